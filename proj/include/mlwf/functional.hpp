#pragma once

#include <vector>

#include "mlwf/frames.hpp"

namespace mlwf {

/// Gamma*-periodic unitary gauge field U(k), one m x m matrix per grid
/// point. Unlike Bloch frames, U lives on the torus: wraps carry no phase.
struct GaugeField {
  std::vector<Eigen::MatrixXcd> u;
  int bands() const { return u.empty() ? 0 : static_cast<int>(u[0].cols()); }
  static GaugeField identity(int nk, int m);
  double max_unitarity_defect() const;
};

/// Value of the localization functional split into its bookkeeping parts,
/// total == quadratic + cross + center exactly.
struct FunctionalReport {
  double total = 0.0;
  double quadratic = 0.0;
  double cross = 0.0;
  double center = 0.0;
  std::vector<double> per_band;
};

/// Quadrature of a per-k sample, quad(f) = (|Y*|/N) sum_k f(k).
inline double quad_weight(const KGrid& grid) { return grid.weight; }

/// Frame-form functional
///   F = sum_{a,j} [ quad ||D_j phi_a||^2 - ( quad Re<phi_a, i D_j phi_a> )^2 ]
/// with D_j the central-difference stencil along gamma*_j (tau wraps applied).
FunctionalReport eval_frame_functional(const std::vector<Eigen::MatrixXcd>& phi,
                                       const KGrid& grid, const PlaneWaveBasis& pw);

/// phi_a = sum_b chi_b U_{ba} pointwise.
std::vector<Eigen::MatrixXcd> apply_gauge(const BlochFrame& frame, const GaugeField& gauge);

/// Frame-form functional evaluated at phi = chi U. This is the objective the
/// optimizer descends; the gauge-decomposed route below is diagnostic only.
FunctionalReport eval_gauge_functional(const GaugeField& gauge, const BlochFrame& frame,
                                       const KGrid& grid, const PlaneWaveBasis& pw);

/// The same functional assembled from (U, A) termwise:
///   quadratic: quad[ tr(D_jU* D_jU) + sum_a ||D_j chi_a||^2 ]
///   cross:     quad[ Re tr( (U D_jU* - D_jU U*) A_j ) ]
///   center:    sum_a ( quad[ U*(D_jU + A_jU) ]_aa )^2
/// Discrete product rules are inexact, so the sum differs from the frame
/// route by O(h^2); `route_gap` reports the difference.
struct MvuDecomposition {
  double quadratic = 0.0;
  double cross = 0.0;
  double center = 0.0;
  double total = 0.0;
  double route_gap = 0.0;
};

MvuDecomposition mvu_decomposition(const GaugeField& gauge, const BlochFrame& frame,
                                   const BerryConnection& conn, const KGrid& grid,
                                   const PlaneWaveBasis& pw);

/// Constant purely imaginary diagonal matrices
///   G^j = diag( quad[ U*(D_jU + A_jU) ] ),
/// real parts dropped. The physical Wannier center component along
/// e^_j = gamma*_j/|gamma*_j| is  c_{a,j} = -Im(G^j_aa) / |Y*|.
struct CenterMatrices {
  int dim = 0;
  std::vector<Eigen::VectorXcd> g;  // per axis, m purely imaginary entries

  /// m x d matrix of center components along the unit dual directions.
  Eigen::MatrixXd physical_centers(const KGrid& grid) const;
};

CenterMatrices center_matrices(const GaugeField& gauge, const BerryConnection& conn,
                               const KGrid& grid);

/// U(k) -> diag(e^{i k . shift_a}) U(k) with shift_a = sum_i n_{a,i} gamma_i.
void apply_recentering(GaugeField& gauge, const KGrid& grid,
                       const std::vector<Eigen::VectorXd>& shifts);

}  // namespace mlwf
