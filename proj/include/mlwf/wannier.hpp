#pragma once

#include <vector>

#include "mlwf/frames.hpp"

namespace mlwf {

struct DecayFit {
  double beta = 0.0;
  double r_squared = 0.0;
  double fit_min = 0.0;
  double fit_max = 0.0;
};

/// Wannier functions sampled on the N_1 x ... x N_d supercell, S_j samples
/// per cell along each axis. Sample index p_j = n_j S_j + s_j (C-ordered,
/// axis 0 slowest) sits at x = sum_j (p_j / S_j) gamma_j.
struct WannierSet {
  BravaisLattice lattice;
  std::vector<int> repetitions;       // = grid sizes N_j
  std::vector<int> samples_per_cell;  // S_j
  std::vector<std::vector<cdouble>> values;  // per band
  double cell_measure = 0.0;                 // |Y| / prod S_j (voxel volume)

  Eigen::MatrixXd centers;      // m x d, filled by compute_moments
  Eigen::VectorXd spreads;      // m
  std::vector<DecayFit> decay;  // filled by fit_decay

  int bands() const { return static_cast<int>(values.size()); }
  int dim() const { return lattice.dim; }
  int total_samples() const { return static_cast<int>(values.empty() ? 0 : values[0].size()); }
  Eigen::VectorXd position(int flat) const;
  std::array<int, 3> sample_coords(int flat) const;

  /// x - ref folded to the supercell-torus image nearest ref.
  Eigen::VectorXd min_image(const Eigen::VectorXd& x, const Eigen::VectorXd& ref) const;
};

/// Inverse Bloch-Floquet synthesis on the supercell,
///   w_a(x) = N^{-1/2} sum_k e^{i k.x} phi_a(k, [x]),
/// evaluated exactly through a zero-padded inverse DFT of the plane-wave
/// coefficients. The discrete transform is unitary:
///   <w_a, w_b> = (1/N) sum_k <phi_a(k), phi_b(k)>.
WannierSet synthesize(const std::vector<Eigen::MatrixXcd>& phi, const KGrid& grid,
                      const PlaneWaveBasis& pw, const std::vector<int>& samples_per_cell);

/// First and second moments in minimal-image coordinates about each band's
/// running center (up to 5 fixed-point passes, CenterDrift on failure).
void compute_moments(WannierSet& ws);

/// sum_a spread_a of the stored moments.
double real_space_mv(const WannierSet& ws);

/// Exact discrete counterpart of the k-space objective: the stencil D_j acts
/// on synthesized functions as multiplication by sin(h_j e^_j.x)/h_j, so
///   F = sum_{a,j} [ |Y*| <s_j^2> - |Y*|^2 <s_j>^2 ],  s_j = sin(2 pi u_j / N_j)/h_j
/// with u_j the lattice coordinate. Matches eval_frame_functional to
/// transform-aliasing accuracy; the linear-coordinate spread differs by O(h^2).
double torus_spread_total(const WannierSet& ws);

/// Least-squares decay rate of log(shell-max |w_a|) against the distance
/// from the band center, window [2 diam(Y), 0.4 R_supercell]. Requires the
/// boundary layer amplitude below 1e-8 of the peak (InsufficientDecay).
std::vector<DecayFit> fit_decay(WannierSet& ws);

}  // namespace mlwf
