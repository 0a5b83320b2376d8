#pragma once

#include <vector>

#include "mlwf/fiber.hpp"
#include "mlwf/lattice.hpp"

namespace mlwf {

/// Spectral projectors P_*(k) onto the band window, one per grid point,
/// stored as the N_pw x m isometry spanning Ran P_*(k).
struct WindowProjector {
  std::vector<Eigen::MatrixXcd> range;
  int bands() const { return range.empty() ? 0 : static_cast<int>(range[0].cols()); }
  Eigen::MatrixXcd full(int k) const { return range[k] * range[k].adjoint(); }
};

Eigen::MatrixXcd window_isometry(const FiberSpectrum& spec, const BandWindow& window);
WindowProjector window_projectors(const std::vector<FiberSpectrum>& spectra,
                                  const BandWindow& window);

/// Orthonormal frame spanning Ran P_*(k) at every grid point. Values are
/// stored for k in the centered zone only; crossing a zone boundary applies
/// the dual coefficient shift (tau equivariance on the truncated basis).
struct BlochFrame {
  std::vector<Eigen::MatrixXcd> columns;
  int bands() const { return columns.empty() ? 0 : static_cast<int>(columns[0].cols()); }

  /// Frame value one grid step along `axis`, shift table applied at wraps.
  Eigen::MatrixXcd neighbor(const KGrid& grid, const PlaneWaveBasis& pw, int k, int axis,
                            int dir) const;
};

/// chi(k) = Loewdin( P_*(k) trial ). Throws DegenerateProjection when the
/// smallest singular value of the projected trial drops below 1e-6.
BlochFrame projection_frame(const WindowProjector& projs, const Eigen::MatrixXcd& trial);

/// Frame transported along `path` (consecutive single-axis grid steps) with
/// the two-projector intertwiner
///   W = (1 - (P1 - P0)^2)^{-1/2} (P1 P0 + (1 - P1)(1 - P0)).
/// Returns per-visited-point frames in stored gauge; the seed is the window
/// isometry at path.front(). When `final_frame` is given it receives the
/// last transported value (stored gauge of path.back()), which differs from
/// the first-visit value on closed loops and measures the loop holonomy.
BlochFrame kato_nagy_transport(const WindowProjector& projs, const KGrid& grid,
                               const PlaneWaveBasis& pw, const std::vector<int>& path,
                               Eigen::MatrixXcd* final_frame = nullptr);

/// Discrete Berry connection A_j(k) = skew( chi* D_j chi ), central
/// differences with tau wraps, one m x m matrix per (k, axis).
struct BerryConnection {
  std::vector<std::vector<Eigen::MatrixXcd>> a;  // [k][axis]
  std::vector<double> hermitian_defect;          // per axis: max_k |A + A*| before projection
};

BerryConnection berry_connection(const BlochFrame& frame, const KGrid& grid,
                                 const PlaneWaveBasis& pw);

}  // namespace mlwf
