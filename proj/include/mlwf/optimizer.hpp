#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mlwf/functional.hpp"

namespace mlwf {

struct OptimizerConfig {
  int max_iter = 5000;
  double grad_tol = 1e-9;
  double armijo_c = 1e-4;
  double initial_step = 1.0;
  double step_shrink = 0.5;
  int recenter_every = 50;
  std::uint64_t seed = 0;
  int fd_check_every = 50;  // 0 disables the periodic gradient audit

  void validate() const;
};

/// Exact differential of the discretized frame-form objective with respect
/// to right translations: for every skew-Hermitian field psi,
///   d/de F(U e^{e psi})|_0 = sum_k (|Y*|/N) Re tr(g(k)* psi(k)).
std::vector<Eigen::MatrixXcd> riemannian_gradient(const GaugeField& gauge,
                                                  const BlochFrame& frame, const KGrid& grid,
                                                  const PlaneWaveBasis& pw);

double gradient_norm(const std::vector<Eigen::MatrixXcd>& g, const KGrid& grid);

/// quad-weighted pairing sum_k (|Y*|/N) Re tr(a(k)* b(k)).
double field_inner(const std::vector<Eigen::MatrixXcd>& a,
                   const std::vector<Eigen::MatrixXcd>& b, const KGrid& grid);

/// exp(scale * s) for a skew-Hermitian s, computed through the Hermitian
/// eigendecomposition of -i s (exactly unitary up to roundoff).
Eigen::MatrixXcd exp_skew(const Eigen::MatrixXcd& s, double scale);

enum class GaugeStart { kIdentity, kRandom };

/// Haar-like random unitary field drawn from a seeded generator (QR of a
/// complex Gaussian matrix with phase-fixed diagonal; Box-Muller by hand so
/// streams are identical across platforms).
GaugeField random_gauge(int nk, int m, std::uint64_t seed);

struct IterationRecord {
  int iter;
  double objective;
  double grad_norm;
  double step;
};

struct DescentTrace {
  std::vector<IterationRecord> iterations;
  GaugeField gauge;
  bool converged = false;
  double final_objective = 0.0;
  double final_grad_norm = 0.0;
  double el_residual = 0.0;
  int recenter_count = 0;
  std::vector<double> fd_checks;  // relative error of each periodic gradient audit
};

/// Armijo-backtracked Riemannian descent with retraction U <- U exp(-a g),
/// periodic recentering of the Wannier centers into the centered cell.
DescentTrace minimize(const BlochFrame& frame, const KGrid& grid, const PlaneWaveBasis& pw,
                      const OptimizerConfig& cfg, GaugeStart start);
DescentTrace minimize(const BlochFrame& frame, const KGrid& grid, const PlaneWaveBasis& pw,
                      const OptimizerConfig& cfg, GaugeField initial);

/// quad-norm of the discrete Euler-Lagrange residual field
///   -Lap U + sum_j D_jU U* D_jU
///   + sum_j [ D_jU U* A_j U - (D_jA_j) U - A_j D_jU ]
///   + sum_j [ -(D_jU + A_jU) G^j + U G^j U* (D_jU + A_jU) ].
double el_residual(const GaugeField& gauge, const BerryConnection& conn,
                   const CenterMatrices& centers, const KGrid& grid);

struct OracleResult {
  GaugeField gauge;
  double objective = 0.0;
  double rhs_mean = 0.0;
  // objective per winding sector, scan order = lexicographic over the box
  std::vector<std::pair<std::array<int, 3>, double>> sectors;
  std::array<int, 3> best_sector{0, 0, 0};
};

/// Single-band stationary gauge from the Poisson equation D.D f = i sum_j D_j A_j
/// solved by Fourier diagonalization of the squared central-difference stencil,
/// followed by a winding-sector scan e^{i k . gamma(l)}, |l_i| <= 2.
OracleResult abelian_poisson_oracle(const BlochFrame& frame, const BerryConnection& conn,
                                    const KGrid& grid, const PlaneWaveBasis& pw);

}  // namespace mlwf
