#include "mlwf/frames.hpp"

#include <cmath>
#include <string>

namespace mlwf {

Eigen::MatrixXcd window_isometry(const FiberSpectrum& spec, const BandWindow& window) {
  return spec.eigenvectors.middleCols(window.first_band, window.count);
}

WindowProjector window_projectors(const std::vector<FiberSpectrum>& spectra,
                                  const BandWindow& window) {
  WindowProjector projs;
  projs.range.reserve(spectra.size());
  for (const auto& spec : spectra) projs.range.push_back(window_isometry(spec, window));
  return projs;
}

Eigen::MatrixXcd BlochFrame::neighbor(const KGrid& grid, const PlaneWaveBasis& pw, int k,
                                      int axis, int dir) const {
  const auto nb = grid.neighbor(k, axis, dir);
  if (nb.wrap == 0) return columns[nb.index];
  return pw.apply_dual_shift(columns[nb.index], axis, nb.wrap);
}

namespace {

/// Unitary polar factor of a square matrix (Loewdin orthonormalization of
/// V s comes down to V polar(s)).
Eigen::MatrixXcd polar_factor(const Eigen::MatrixXcd& s, double* sigma_min) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (sigma_min) *sigma_min = svd.singularValues().minCoeff();
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace

BlochFrame projection_frame(const WindowProjector& projs, const Eigen::MatrixXcd& trial) {
  BlochFrame frame;
  frame.columns.reserve(projs.range.size());
  for (int k = 0; k < static_cast<int>(projs.range.size()); ++k) {
    const Eigen::MatrixXcd overlap = projs.range[k].adjoint() * trial;  // m x m
    double sigma_min = 0.0;
    const Eigen::MatrixXcd q = polar_factor(overlap, &sigma_min);
    if (sigma_min < 1e-6) {
      throw DegenerateProjection(k, sigma_min,
                                 "projected trial subspace degenerates at k index " +
                                     std::to_string(k) +
                                     " (sigma_min = " + std::to_string(sigma_min) + ")");
    }
    frame.columns.push_back(projs.range[k] * q);
  }
  return frame;
}

BlochFrame kato_nagy_transport(const WindowProjector& projs, const KGrid& grid,
                               const PlaneWaveBasis& pw, const std::vector<int>& path,
                               Eigen::MatrixXcd* final_frame) {
  if (path.empty()) throw TransportGap(0, "empty transport path");
  const int n = static_cast<int>(projs.range[0].rows());
  const Eigen::MatrixXcd ident = Eigen::MatrixXcd::Identity(n, n);

  BlochFrame frame;
  frame.columns.resize(projs.range.size());
  Eigen::MatrixXcd chi = projs.range[path[0]];
  frame.columns[path[0]] = chi;

  // Track the net zone wrap so each stored value is expressed in the stored
  // gauge of its own grid point.
  std::vector<int> net_wrap(grid.dim(), 0);
  Eigen::MatrixXcd p_prev = projs.full(path[0]);

  for (size_t step = 1; step < path.size(); ++step) {
    const int from = path[step - 1];
    const int to = path[step];
    int axis = -1, dir = 0;
    for (int j = 0; j < grid.dim() && axis < 0; ++j) {
      for (int s : {+1, -1}) {
        if (grid.neighbor(from, j, s).index == to) {
          axis = j;
          dir = s;
          break;
        }
      }
    }
    if (axis < 0) {
      throw TransportGap(static_cast<int>(step), "path entries are not grid neighbors");
    }
    net_wrap[axis] += grid.neighbor(from, axis, dir).wrap;

    // Projector at the unwrapped point, expressed in the running sheet.
    Eigen::MatrixXcd v = projs.range[to];
    for (int j = 0; j < grid.dim(); ++j) {
      for (int w = 0; w < std::abs(net_wrap[j]); ++w) {
        v = pw.apply_dual_shift(v, j, net_wrap[j] > 0 ? +1 : -1);
      }
    }
    const Eigen::MatrixXcd p_next = v * v.adjoint();

    const Eigen::MatrixXcd diff = p_next - p_prev;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff);
    const double dist = es.eigenvalues().cwiseAbs().maxCoeff();
    if (dist >= 1.0) {
      throw TransportGap(static_cast<int>(step),
                         "projector jump " + std::to_string(dist) + " at step " +
                             std::to_string(step) + "; grid too coarse");
    }
    // (1 - diff^2)^{-1/2} via the eigenvalues of diff
    Eigen::VectorXd inv_sqrt(es.eigenvalues().size());
    for (int i = 0; i < inv_sqrt.size(); ++i) {
      inv_sqrt[i] = 1.0 / std::sqrt(1.0 - es.eigenvalues()[i] * es.eigenvalues()[i]);
    }
    const Eigen::MatrixXcd w = es.eigenvectors() * inv_sqrt.asDiagonal() *
                               es.eigenvectors().adjoint() *
                               (p_next * p_prev + (ident - p_next) * (ident - p_prev));
    chi = w * chi;

    // Store in the gauge of the grid point itself (unwind the sheet).
    Eigen::MatrixXcd stored = chi;
    for (int j = 0; j < grid.dim(); ++j) {
      for (int ww = 0; ww < std::abs(net_wrap[j]); ++ww) {
        stored = pw.apply_dual_shift(stored, j, net_wrap[j] > 0 ? -1 : +1);
      }
    }
    if (frame.columns[to].size() == 0) frame.columns[to] = stored;
    if (final_frame) *final_frame = stored;
    p_prev = p_next;
  }
  if (final_frame && path.size() == 1) *final_frame = chi;
  return frame;
}

BerryConnection berry_connection(const BlochFrame& frame, const KGrid& grid,
                                 const PlaneWaveBasis& pw) {
  const int d = grid.dim();
  BerryConnection conn;
  conn.a.resize(grid.total);
  conn.hermitian_defect.assign(d, 0.0);
  for (int k = 0; k < grid.total; ++k) {
    conn.a[k].resize(d);
    for (int j = 0; j < d; ++j) {
      const Eigen::MatrixXcd diff =
          (frame.neighbor(grid, pw, k, j, +1) - frame.neighbor(grid, pw, k, j, -1)) /
          (2.0 * grid.spacing[j]);
      const Eigen::MatrixXcd raw = frame.columns[k].adjoint() * diff;
      conn.hermitian_defect[j] =
          std::max(conn.hermitian_defect[j], (raw + raw.adjoint()).norm());
      conn.a[k][j] = 0.5 * (raw - raw.adjoint());
    }
  }
  return conn;
}

}  // namespace mlwf
