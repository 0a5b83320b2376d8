#include "mlwf/functional.hpp"

#include <cmath>
#include <string>

namespace mlwf {

GaugeField GaugeField::identity(int nk, int m) {
  GaugeField g;
  g.u.assign(nk, Eigen::MatrixXcd::Identity(m, m));
  return g;
}

double GaugeField::max_unitarity_defect() const {
  double defect = 0.0;
  for (const auto& uk : u) {
    const int m = static_cast<int>(uk.cols());
    defect = std::max(defect,
                      (uk.adjoint() * uk - Eigen::MatrixXcd::Identity(m, m)).norm());
  }
  return defect;
}

namespace {

void check_orthonormal(const std::vector<Eigen::MatrixXcd>& phi, double tol) {
  for (int k = 0; k < static_cast<int>(phi.size()); ++k) {
    const int m = static_cast<int>(phi[k].cols());
    const double defect =
        (phi[k].adjoint() * phi[k] - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff();
    if (defect > tol) {
      throw NonOrthonormalInput("frame columns deviate from orthonormality by " +
                                std::to_string(defect) + " at k index " + std::to_string(k));
    }
  }
}

Eigen::MatrixXcd phi_neighbor(const std::vector<Eigen::MatrixXcd>& phi, const KGrid& grid,
                              const PlaneWaveBasis& pw, int k, int axis, int dir) {
  const auto nb = grid.neighbor(k, axis, dir);
  if (nb.wrap == 0) return phi[nb.index];
  return pw.apply_dual_shift(phi[nb.index], axis, nb.wrap);
}

}  // namespace

FunctionalReport eval_frame_functional(const std::vector<Eigen::MatrixXcd>& phi,
                                       const KGrid& grid, const PlaneWaveBasis& pw) {
  check_orthonormal(phi, 1e-8);
  const int d = grid.dim();
  const int m = static_cast<int>(phi[0].cols());
  const double w = grid.weight;

  FunctionalReport report;
  report.per_band.assign(m, 0.0);
  std::vector<std::vector<double>> band_centers(m, std::vector<double>(d, 0.0));
  std::vector<std::vector<double>> band_quad(m, std::vector<double>(d, 0.0));

  for (int k = 0; k < grid.total; ++k) {
    for (int j = 0; j < d; ++j) {
      const Eigen::MatrixXcd diff =
          (phi_neighbor(phi, grid, pw, k, j, +1) - phi_neighbor(phi, grid, pw, k, j, -1)) /
          (2.0 * grid.spacing[j]);
      for (int a = 0; a < m; ++a) {
        band_quad[a][j] += w * diff.col(a).squaredNorm();
        // Re<phi, i D phi> = -Im <phi, D phi>
        band_centers[a][j] -= w * phi[k].col(a).dot(diff.col(a)).imag();
      }
    }
  }

  for (int a = 0; a < m; ++a) {
    double spread = 0.0;
    for (int j = 0; j < d; ++j) {
      spread += band_quad[a][j] - band_centers[a][j] * band_centers[a][j];
      report.quadratic += band_quad[a][j];
      report.center -= band_centers[a][j] * band_centers[a][j];
    }
    report.per_band[a] = spread;
  }
  report.cross = 0.0;
  report.total = report.quadratic + report.cross + report.center;
  return report;
}

std::vector<Eigen::MatrixXcd> apply_gauge(const BlochFrame& frame, const GaugeField& gauge) {
  std::vector<Eigen::MatrixXcd> phi(frame.columns.size());
  for (size_t k = 0; k < frame.columns.size(); ++k) phi[k] = frame.columns[k] * gauge.u[k];
  return phi;
}

FunctionalReport eval_gauge_functional(const GaugeField& gauge, const BlochFrame& frame,
                                       const KGrid& grid, const PlaneWaveBasis& pw) {
  const double defect = gauge.max_unitarity_defect();
  if (defect > 1e-8) {
    throw NonOrthonormalInput("gauge field deviates from unitarity by " +
                              std::to_string(defect));
  }
  return eval_frame_functional(apply_gauge(frame, gauge), grid, pw);
}

namespace {

Eigen::MatrixXcd gauge_diff(const GaugeField& gauge, const KGrid& grid, int k, int axis) {
  const int up = grid.neighbor(k, axis, +1).index;
  const int dn = grid.neighbor(k, axis, -1).index;
  return (gauge.u[up] - gauge.u[dn]) / (2.0 * grid.spacing[axis]);
}

}  // namespace

MvuDecomposition mvu_decomposition(const GaugeField& gauge, const BlochFrame& frame,
                                   const BerryConnection& conn, const KGrid& grid,
                                   const PlaneWaveBasis& pw) {
  const int d = grid.dim();
  const int m = gauge.bands();
  const double w = grid.weight;

  MvuDecomposition out;
  std::vector<std::vector<cdouble>> diag_sums(m, std::vector<cdouble>(d, cdouble(0, 0)));

  for (int k = 0; k < grid.total; ++k) {
    for (int j = 0; j < d; ++j) {
      const Eigen::MatrixXcd du = gauge_diff(gauge, grid, k, j);
      const Eigen::MatrixXcd dchi =
          (frame.neighbor(grid, pw, k, j, +1) - frame.neighbor(grid, pw, k, j, -1)) /
          (2.0 * grid.spacing[j]);
      const Eigen::MatrixXcd& a = conn.a[k][j];
      const Eigen::MatrixXcd& u = gauge.u[k];

      out.quadratic += w * ((du.adjoint() * du).trace().real() + dchi.squaredNorm());
      out.cross += w * ((u * du.adjoint() - du * u.adjoint()) * a).trace().real();
      const Eigen::MatrixXcd integrand = u.adjoint() * (du + a * u);
      for (int b = 0; b < m; ++b) diag_sums[b][j] += w * integrand(b, b);
    }
  }
  for (int b = 0; b < m; ++b) {
    for (int j = 0; j < d; ++j) {
      out.center += (diag_sums[b][j] * diag_sums[b][j]).real();
    }
  }
  out.total = out.quadratic + out.cross + out.center;
  out.route_gap =
      std::abs(out.total - eval_gauge_functional(gauge, frame, grid, pw).total);
  return out;
}

CenterMatrices center_matrices(const GaugeField& gauge, const BerryConnection& conn,
                               const KGrid& grid) {
  const int d = grid.dim();
  const int m = gauge.bands();
  const double w = grid.weight;

  CenterMatrices cm;
  cm.dim = d;
  cm.g.assign(d, Eigen::VectorXcd::Zero(m));
  for (int k = 0; k < grid.total; ++k) {
    for (int j = 0; j < d; ++j) {
      const Eigen::MatrixXcd du = gauge_diff(gauge, grid, k, j);
      const Eigen::MatrixXcd integrand =
          gauge.u[k].adjoint() * (du + conn.a[k][j] * gauge.u[k]);
      for (int a = 0; a < m; ++a) cm.g[j][a] += w * integrand(a, a);
    }
  }
  for (int j = 0; j < d; ++j) {
    for (int a = 0; a < m; ++a) cm.g[j][a] = cdouble(0.0, cm.g[j][a].imag());
  }
  return cm;
}

Eigen::MatrixXd CenterMatrices::physical_centers(const KGrid& grid) const {
  const int m = static_cast<int>(g[0].size());
  Eigen::MatrixXd centers(m, dim);
  for (int j = 0; j < dim; ++j) {
    for (int a = 0; a < m; ++a) {
      centers(a, j) = -g[j][a].imag() / grid.lattice.dual_cell_volume;
    }
  }
  return centers;
}

void apply_recentering(GaugeField& gauge, const KGrid& grid,
                       const std::vector<Eigen::VectorXd>& shifts) {
  const int m = gauge.bands();
  for (int k = 0; k < grid.total; ++k) {
    Eigen::VectorXcd phases(m);
    for (int a = 0; a < m; ++a) {
      phases[a] = std::exp(cdouble(0.0, grid.points[k].dot(shifts[a])));
    }
    gauge.u[k] = phases.asDiagonal() * gauge.u[k];
  }
}

}  // namespace mlwf
