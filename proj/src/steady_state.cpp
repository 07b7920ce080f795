#include "squeezenh/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "squeezenh/error.hpp"

namespace squeezenh {

namespace {

std::vector<Index> sector_indices(Index dim, ParitySector sector) {
  std::vector<Index> idx;
  for (Index k = 0; k < dim; ++k) {
    if (sector == ParitySector::full || (sector == ParitySector::even) == (k % 2 == 0)) idx.push_back(k);
  }
  return idx;
}

// Block of a parity-conserving pentadiagonal operator on one parity class: tridiagonal,
// hence already upper Hessenberg, so LAPACK's QR iteration applies directly.
std::vector<Complex> hessenberg_eigenvalues(const BandedOperator& h, const std::vector<Index>& idx) {
  const lapack_int n = static_cast<lapack_int>(idx.size());
  if (n == 0) return {};
  std::vector<Complex> a(static_cast<std::size_t>(n) * n);
  for (lapack_int c = 0; c < n; ++c) {
    for (lapack_int r = std::max(0, c - 1); r <= std::min(n - 1, c + 1); ++r) {
      const Complex v = h(idx[r], idx[c]);
      a[static_cast<std::size_t>(c) * n + r] = v;
    }
  }
  std::vector<Complex> w(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_zhseqr(LAPACK_COL_MAJOR, 'E', 'N', n, 1, n, a.data(), n, w.data(), nullptr, 1);
  if (info != 0) throw NumericalError("Hessenberg QR failed with info " + std::to_string(info));
  std::vector<Complex> out(static_cast<std::size_t>(n));
  for (lapack_int i = 0; i < n; ++i) out[i] = w[i];
  return out;
}

std::vector<Complex> general_eigenvalues(const BandedOperator& h, const std::vector<Index>& idx) {
  const lapack_int n = static_cast<lapack_int>(idx.size());
  if (n == 0) return {};
  std::vector<Complex> a(static_cast<std::size_t>(n) * n);
  for (lapack_int c = 0; c < n; ++c) {
    for (lapack_int r = 0; r < n; ++r) {
      const Complex v = h(idx[r], idx[c]);
      a[static_cast<std::size_t>(c) * n + r] = v;
    }
  }
  std::vector<Complex> w(static_cast<std::size_t>(n));
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, w.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw NumericalError("dense eigensolve failed with info " + std::to_string(info));
  std::vector<Complex> out(static_cast<std::size_t>(n));
  for (lapack_int i = 0; i < n; ++i) out[i] = w[i];
  return out;
}

using SparseMatrix = Eigen::SparseMatrix<Complex>;

SparseMatrix shifted_sparse(const BandedOperator& h, Complex shift) {
  std::vector<Eigen::Triplet<Complex>> entries;
  const Index n = h.dim();
  for (int d = -h.bandwidth(); d <= h.bandwidth(); ++d) {
    const auto band = h.band(d);
    for (std::size_t i = 0; i < band.size(); ++i) {
      const Index row = d >= 0 ? static_cast<Index>(i) : static_cast<Index>(i) - d;
      Complex v = band[i];
      if (d == 0) v -= shift;
      if (v != Complex{}) entries.emplace_back(row, row + d, v);
    }
  }
  for (Index k = 0; k < n; ++k) {
    if (h(k, k) - shift == Complex{}) entries.emplace_back(k, k, Complex{});
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(entries.begin(), entries.end());
  m.makeCompressed();
  return m;
}

double residual_of(const BandedOperator& h, const Eigen::VectorXcd& v, Complex e) {
  return (h * v - e * v).norm() / v.norm();
}

// Inverse iteration for the eigenvector belonging to `eigenvalue`, seeded inside the sector.
Eigen::VectorXcd inverse_iteration(const BandedOperator& h, Complex eigenvalue, const Eigen::VectorXcd& seed,
                                   double target_residual) {
  const double scale = std::max(1.0, std::abs(eigenvalue));
  const Complex shift = eigenvalue + Complex(1e-10 * scale, 1e-10 * scale);
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(shifted_sparse(h, shift));
  if (lu.info() != Eigen::Success) throw NumericalError("shifted factorization failed in inverse iteration");
  Eigen::VectorXcd v = seed.normalized();
  for (int it = 0; it < 6; ++it) {
    Eigen::VectorXcd next = lu.solve(v);
    if (!next.allFinite()) throw NumericalError("inverse iteration diverged");
    v = next.normalized();
    if (residual_of(h, v, eigenvalue) < target_residual) break;
  }
  return v;
}

Eigen::VectorXcd default_seed(Index dim, ParitySector sector) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  for (Index k : sector_indices(dim, sector)) v[k] = 1.0 / (1.0 + static_cast<double>(k));
  return v;
}

SpinState default_initial(const SpinSector& sector, ParitySector parity) {
  switch (parity) {
    case ParitySector::even:
      return SpinState::all_down(sector);
    case ParitySector::odd:
      return SpinState::dicke(sector, 1);
    case ParitySector::full:
      break;
  }
  return SpinState(sector, default_seed(sector.dim(), ParitySector::full));
}

// Eigenvector phase fixed so that the largest-magnitude amplitude is real positive.
Eigen::VectorXcd fix_phase(Eigen::VectorXcd v) {
  Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  const Complex p = v[arg];
  return v * (std::abs(p) / p);
}

EigenPair dense_steady_state(const BandedOperator& h, ParitySector sector) {
  const std::vector<Complex> evals = sector_eigenvalues(h, sector);
  if (evals.size() < 2) throw std::invalid_argument("steady state needs at least two levels in the sector");
  if (evals[0].imag() - evals[1].imag() < 1e-12) throw AmbiguousSteadyStateError();

  const double hnorm = h.norm_inf();
  const ParitySector seed_sector = h.conserves_parity() ? sector : ParitySector::full;
  const Eigen::VectorXcd v = fix_phase(inverse_iteration(h, evals[0], default_seed(h.dim(), seed_sector), 1e-13 * hnorm));
  EigenPair out{evals[0], SpinState(h.sector(), v), residual_of(h, v, evals[0]), hnorm, SteadyStateMethod::dense, 0.0};
  return out;
}

EigenPair propagated_steady_state(const BandedOperator& h, const SteadyStateOptions& options) {
  const double hnorm = h.norm_inf();
  SpinState state = options.initial ? *options.initial : default_initial(h.sector(), options.sector);
  Propagator propagator(h, options.propagation);
  auto rayleigh = [&](const SpinState& s) { return s.amplitudes().dot(h * s.amplitudes()); };

  Complex previous = rayleigh(state);
  double best_residual = residual_of(h, state.amplitudes(), previous);
  double t = 0.0;
  while (t < options.max_time) {
    propagator.advance(state, options.check_interval);
    t += options.check_interval;
    const Complex current = rayleigh(state);
    best_residual = std::min(best_residual, residual_of(h, state.amplitudes(), current));
    if (std::abs(current - previous) / options.check_interval < options.rq_tol) {
      // Polish with a few inverse-iteration steps shifted to the converged quotient.
      Eigen::VectorXcd v = inverse_iteration(h, current, state.amplitudes(), 1e-13 * hnorm);
      // The quotient is second-order accurate for complex-symmetric H using the transpose pairing.
      const Eigen::VectorXcd hv = h * v;
      const Complex e = (v.array() * hv.array()).sum() / (v.array() * v.array()).sum();
      const double r_sym = residual_of(h, v, e);
      const double r_rq = residual_of(h, v, current);
      const Complex chosen = r_sym < r_rq ? e : current;
      v = fix_phase(v);
      EigenPair out{chosen, SpinState(h.sector(), v), std::min(r_sym, r_rq), hnorm, SteadyStateMethod::propagation, t};
      if (out.scaled_residual() > 1e-8) {
        throw NotConvergedError("steady-state polish left a large residual", out.residual);
      }
      return out;
    }
    previous = current;
  }
  throw NotConvergedError("steady state not converged after chi*t = " + std::to_string(options.max_time), best_residual);
}

}  // namespace

std::vector<Complex> sector_eigenvalues(const BandedOperator& h, ParitySector sector) {
  if (h.dim() > BandedOperator::kMaxDenseDim) {
    throw std::length_error("dense eigensolve limited to dim <= " + std::to_string(BandedOperator::kMaxDenseDim));
  }
  std::vector<Complex> evals;
  if (h.conserves_parity()) {
    for (ParitySector block : {ParitySector::even, ParitySector::odd}) {
      if (sector != ParitySector::full && sector != block) continue;
      const auto part = hessenberg_eigenvalues(h, sector_indices(h.dim(), block));
      evals.insert(evals.end(), part.begin(), part.end());
    }
  } else {
    evals = general_eigenvalues(h, sector_indices(h.dim(), ParitySector::full));
  }
  std::sort(evals.begin(), evals.end(), [](Complex a, Complex b) { return a.imag() > b.imag(); });
  return evals;
}

EigenPair steady_state(const BandedOperator& h, const SteadyStateOptions& options) {
  if (h.dim() < 2) throw std::invalid_argument("steady state needs dim >= 2");
  const ParitySector sector = h.conserves_parity() ? options.sector : ParitySector::full;
  SteadyStateMethod method = options.method;
  if (method == SteadyStateMethod::automatic) {
    method = h.dim() <= options.dense_max_dim ? SteadyStateMethod::dense : SteadyStateMethod::propagation;
  }
  if (method == SteadyStateMethod::dense) return dense_steady_state(h, sector);
  SteadyStateOptions resolved = options;
  resolved.sector = sector;
  return propagated_steady_state(h, resolved);
}

}  // namespace squeezenh
