#pragma once

#include <optional>
#include <vector>

#include "squeezenh/banded_operator.hpp"
#include "squeezenh/propagator.hpp"
#include "squeezenh/spin_state.hpp"

namespace squeezenh {

// Symmetry block searched for the steady state. H_eff never couples even and odd
// k, and |down...down> (k = 0) lives in the even block.
enum class ParitySector { even, odd, full };

enum class SteadyStateMethod { automatic, dense, propagation };

struct SteadyStateOptions {
  SteadyStateMethod method = SteadyStateMethod::automatic;
  Index dense_max_dim = 2048;  // automatic: dense when dim <= this
  ParitySector sector = ParitySector::even;
  // Propagation path: stop once |dE/dt| of the Rayleigh quotient drops below rq_tol.
  double rq_tol = 1e-10;
  double check_interval = 0.25;
  double max_time = 400.0;
  PropagationOptions propagation{1e-11};
  std::optional<SpinState> initial;
};

struct EigenPair {
  Complex eigenvalue;
  SpinState right_eigenvector;  // normalized, log_norm = 0
  double residual = 0.0;        // ||H v - E v||
  double operator_norm = 0.0;   // ||H||_inf used to scale the residual
  SteadyStateMethod method = SteadyStateMethod::dense;
  double convergence_time = 0.0;  // chi*t propagated (propagation path only)

  double scaled_residual() const { return residual / std::max(operator_norm, 1e-300); }
};

// Eigenvalues of h restricted to `sector`, sorted by descending imaginary part.
// Dense LAPACK; dim <= BandedOperator::kMaxDenseDim.
std::vector<Complex> sector_eigenvalues(const BandedOperator& h, ParitySector sector);

// Eigenpair with the largest imaginary part (slowest decay) in the requested
// sector. Throws NumericalError("ambiguous steady state") when the two leading
// imaginary parts differ by less than 1e-12, NotConvergedError when the
// propagation path runs past max_time.
EigenPair steady_state(const BandedOperator& h, const SteadyStateOptions& options = {});

}  // namespace squeezenh
