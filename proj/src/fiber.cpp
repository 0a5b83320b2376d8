#include "mlwf/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

namespace mlwf {

int PlaneWaveBasis::find(const std::array<int, 3>& coords) const {
  auto it = index_.find(coords);
  return it == index_.end() ? -1 : it->second;
}

Eigen::MatrixXcd PlaneWaveBasis::apply_dual_shift(const Eigen::MatrixXcd& columns, int axis,
                                                  int dir) const {
  const auto& table = shift_table[axis][dir > 0 ? 1 : 0];
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(columns.rows(), columns.cols());
  for (int i = 0; i < size(); ++i) {
    if (table[i] >= 0) out.row(i) = columns.row(table[i]);
  }
  return out;
}

PlaneWaveBasis make_plane_wave_basis(const BravaisLattice& lattice, double cutoff) {
  PlaneWaveBasis pw;
  pw.lattice = lattice;
  pw.cutoff = cutoff;
  const int d = lattice.dim;

  // |n_j| <= cutoff |gamma_j| / (2 pi) bounds the integer search box.
  std::array<int, 3> bound{0, 0, 0};
  for (int j = 0; j < d; ++j) {
    bound[j] = static_cast<int>(std::floor(cutoff * lattice.basis.col(j).norm() /
                                           (2.0 * std::numbers::pi))) + 1;
  }

  std::array<int, 3> n{0, 0, 0};
  const double cut2 = cutoff * cutoff * (1.0 + 1e-12);
  for (n[0] = -bound[0]; n[0] <= bound[0]; ++n[0]) {
    for (n[1] = (d > 1 ? -bound[1] : 0); n[1] <= (d > 1 ? bound[1] : 0); ++n[1]) {
      for (n[2] = (d > 2 ? -bound[2] : 0); n[2] <= (d > 2 ? bound[2] : 0); ++n[2]) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
        for (int j = 0; j < d; ++j) g += n[j] * lattice.dual_basis.col(j);
        if (g.squaredNorm() <= cut2) {
          pw.g_coords.push_back(n);
          pw.g_vectors.push_back(g);
        }
      }
    }
  }
  for (int i = 0; i < pw.size(); ++i) pw.index_[pw.g_coords[i]] = i;

  pw.shift_table.resize(d);
  for (int axis = 0; axis < d; ++axis) {
    for (int s = 0; s < 2; ++s) {
      const int dir = s == 0 ? -1 : +1;
      auto& table = pw.shift_table[axis][s];
      table.resize(pw.size());
      for (int i = 0; i < pw.size(); ++i) {
        auto c = pw.g_coords[i];
        c[axis] += dir;
        table[i] = pw.find(c);
      }
    }
  }
  pw.conj_table.resize(pw.size());
  for (int i = 0; i < pw.size(); ++i) {
    auto c = pw.g_coords[i];
    for (int j = 0; j < d; ++j) c[j] = -c[j];
    pw.conj_table[i] = pw.find(c);
  }
  return pw;
}

PlaneWaveBasis identity_wrap_basis(const BravaisLattice& lattice, int n) {
  PlaneWaveBasis pw;
  pw.lattice = lattice;
  pw.cutoff = 0.0;
  for (int i = 0; i < n; ++i) {
    pw.g_coords.push_back({i, 0, 0});
    pw.g_vectors.push_back(Eigen::VectorXd::Zero(lattice.dim));
  }
  pw.shift_table.resize(lattice.dim);
  std::vector<int> ident(n);
  for (int i = 0; i < n; ++i) ident[i] = i;
  for (int axis = 0; axis < lattice.dim; ++axis) pw.shift_table[axis] = {ident, ident};
  pw.conj_table = ident;
  for (int i = 0; i < n; ++i) pw.index_[pw.g_coords[i]] = i;
  return pw;
}

PotentialSpec::PotentialSpec(
    const std::vector<std::pair<std::array<int, 3>, cdouble>>& entries) {
  std::map<std::array<int, 3>, cdouble> raw;
  for (const auto& [g, v] : entries) raw[g] = v;
  // Hermitian symmetrization keeps V real; missing mirrors are filled in.
  for (const auto& [g, v] : raw) {
    const std::array<int, 3> mg{-g[0], -g[1], -g[2]};
    auto mit = raw.find(mg);
    coeffs_[g] = mit == raw.end() ? v : 0.5 * (v + std::conj(mit->second));
    if (mit == raw.end()) coeffs_[mg] = std::conj(v);
  }
}

cdouble PotentialSpec::coeff(const std::array<int, 3>& g) const {
  auto it = coeffs_.find(g);
  return it == coeffs_.end() ? cdouble(0.0, 0.0) : it->second;
}

PotentialSpec cosine_potential(int dim, double coefficient) {
  std::vector<std::pair<std::array<int, 3>, cdouble>> entries;
  for (int j = 0; j < dim; ++j) {
    std::array<int, 3> g{0, 0, 0};
    g[j] = 1;
    entries.push_back({g, cdouble(coefficient, 0.0)});
    g[j] = -1;
    entries.push_back({g, cdouble(coefficient, 0.0)});
  }
  return PotentialSpec(entries);
}

Eigen::MatrixXcd assemble_fiber(const Eigen::VectorXd& k, const PlaneWaveBasis& basis,
                                const PotentialSpec& pot) {
  const int n = basis.size();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = (k + basis.g_vectors[i]).squaredNorm();
  }
  for (const auto& [g, v] : pot.coeffs()) {
    // scatter Vhat_{G-G'} over all index pairs with G - G' = g
    for (int col = 0; col < n; ++col) {
      std::array<int, 3> target{basis.g_coords[col][0] + g[0], basis.g_coords[col][1] + g[1],
                                basis.g_coords[col][2] + g[2]};
      const int row = basis.find(target);
      if (row >= 0) h(row, col) += v;
    }
  }
  return h;
}

FiberSpectrum solve_fiber(const Eigen::VectorXd& k, const PlaneWaveBasis& basis,
                          const PotentialSpec& pot) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(assemble_fiber(k, basis, pot));
  if (solver.info() != Eigen::Success) {
    throw EigFailure("fiber eigensolver failed to converge at |k| = " +
                     std::to_string(k.norm()));
  }
  FiberSpectrum spec;
  spec.k = k;
  spec.eigenvalues = solver.eigenvalues();
  spec.eigenvectors = solver.eigenvectors();

  // Re-orthonormalize degenerate clusters so downstream code can rely on the
  // columns even when eigenvalues coincide to roundoff.
  const int n = basis.size();
  int i = 0;
  while (i < n) {
    int j = i + 1;
    while (j < n && spec.eigenvalues[j] - spec.eigenvalues[j - 1] < 1e-9) ++j;
    if (j - i > 1) {
      Eigen::MatrixXcd block = spec.eigenvectors.middleCols(i, j - i);
      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(block);
      Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, j - i);
      spec.eigenvectors.middleCols(i, j - i) = q;
    }
    i = j;
  }
  return spec;
}

std::vector<FiberSpectrum> solve_on_grid(const KGrid& grid, const PlaneWaveBasis& basis,
                                         const PotentialSpec& pot, int threads) {
  std::vector<FiberSpectrum> out(grid.total);
  threads = std::max(1, std::min<int>(threads, grid.total));
  if (threads == 1) {
    for (int i = 0; i < grid.total; ++i) out[i] = solve_fiber(grid.points[i], basis, pot);
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      for (int i = t; i < grid.total; i += threads) {
        out[i] = solve_fiber(grid.points[i], basis, pot);
      }
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

BandWindow validate_gap(const std::vector<FiberSpectrum>& spectra, BandWindow window,
                        double tol) {
  const int n = window.first_band;
  const int m = window.count;
  double min_gap = std::numeric_limits<double>::infinity();
  int worst = 0;
  for (int i = 0; i < static_cast<int>(spectra.size()); ++i) {
    const auto& ev = spectra[i].eigenvalues;
    if (n + m >= ev.size()) {
      throw GapViolation(i, 0.0, "band window exceeds the number of computed bands");
    }
    double gap = ev[n + m] - ev[n + m - 1];
    if (n > 0) gap = std::min(gap, ev[n] - ev[n - 1]);
    if (gap < min_gap) {
      min_gap = gap;
      worst = i;
    }
  }
  window.min_gap = min_gap;
  if (!(min_gap > tol)) {
    throw GapViolation(worst, min_gap,
                       "gap condition violated at k index " + std::to_string(worst) +
                           " (gap = " + std::to_string(min_gap) + ")");
  }
  return window;
}

}  // namespace mlwf
