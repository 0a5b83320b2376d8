#include "mlwf/wannier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "detail/dft.hpp"

namespace mlwf {

Eigen::VectorXd WannierSet::position(int flat) const {
  const auto p = sample_coords(flat);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim());
  for (int j = 0; j < dim(); ++j) {
    x += (static_cast<double>(p[j]) / samples_per_cell[j]) * lattice.basis.col(j);
  }
  return x;
}

std::array<int, 3> WannierSet::sample_coords(int flat) const {
  std::array<int, 3> p{0, 0, 0};
  for (int j = dim() - 1; j >= 0; --j) {
    const int mj = repetitions[j] * samples_per_cell[j];
    p[j] = flat % mj;
    flat /= mj;
  }
  return p;
}

Eigen::VectorXd WannierSet::min_image(const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& ref) const {
  Eigen::VectorXd alpha = lattice.lattice_coords(x - ref);
  Eigen::VectorXd out = ref;
  for (int j = 0; j < dim(); ++j) {
    const double n = repetitions[j];
    const double folded = alpha[j] - n * std::round(alpha[j] / n);
    out += folded * lattice.basis.col(j);
  }
  return out;
}

WannierSet synthesize(const std::vector<Eigen::MatrixXcd>& phi, const KGrid& grid,
                      const PlaneWaveBasis& pw, const std::vector<int>& samples_per_cell) {
  const int d = grid.dim();
  const int m = static_cast<int>(phi[0].cols());

  WannierSet ws;
  ws.lattice = grid.lattice;
  ws.repetitions = grid.sizes;
  ws.samples_per_cell = samples_per_cell;

  std::vector<int> dims(d);
  int total = 1;
  for (int j = 0; j < d; ++j) {
    dims[j] = grid.sizes[j] * samples_per_cell[j];
    total *= dims[j];
  }
  ws.cell_measure = grid.lattice.cell_volume;
  for (int j = 0; j < d; ++j) ws.cell_measure /= samples_per_cell[j];

  const double amp =
      1.0 / (std::sqrt(static_cast<double>(grid.total)) * std::sqrt(grid.lattice.cell_volume));

  ws.values.assign(m, {});
  for (int a = 0; a < m; ++a) {
    std::vector<cdouble> freq(total, cdouble(0.0, 0.0));
    for (int k = 0; k < grid.total; ++k) {
      const auto t = grid.coords_of(k);
      for (int gi = 0; gi < pw.size(); ++gi) {
        int flat = 0;
        for (int j = 0; j < d; ++j) {
          int f = t[j] + grid.sizes[j] * pw.g_coords[gi][j] - grid.sizes[j] / 2;
          f %= dims[j];
          if (f < 0) f += dims[j];
          flat = flat * dims[j] + f;
        }
        freq[flat] += phi[k](gi, a);
      }
    }
    detail::dft_grid(freq, dims, true);
    for (auto& v : freq) v *= amp;
    ws.values[a] = std::move(freq);
  }
  return ws;
}

namespace {

double mass_of(const WannierSet& ws, int band) {
  double mass = 0.0;
  for (const auto& v : ws.values[band]) mass += std::norm(v) * ws.cell_measure;
  return mass;
}

}  // namespace

void compute_moments(WannierSet& ws) {
  const int d = ws.dim();
  const int m = ws.bands();
  ws.centers.resize(m, d);
  ws.spreads.resize(m);

  for (int a = 0; a < m; ++a) {
    // seed at the amplitude peak
    int peak = 0;
    double best = 0.0;
    for (int p = 0; p < ws.total_samples(); ++p) {
      const double v = std::norm(ws.values[a][p]);
      if (v > best) {
        best = v;
        peak = p;
      }
    }
    Eigen::VectorXd center = ws.position(peak);
    const double mass = mass_of(ws, a);

    bool converged = false;
    for (int pass = 0; pass < 5 && !converged; ++pass) {
      Eigen::VectorXd first = Eigen::VectorXd::Zero(d);
      for (int p = 0; p < ws.total_samples(); ++p) {
        const double rho = std::norm(ws.values[a][p]) * ws.cell_measure;
        first += rho * ws.min_image(ws.position(p), center);
      }
      first /= mass;
      converged = (first - center).norm() <= 1e-9 * (1.0 + center.norm());
      center = first;
    }
    if (!converged) {
      throw CenterDrift("minimal-image recentering did not settle for band " +
                        std::to_string(a) + "; the function looks delocalized");
    }

    Eigen::VectorXd first = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd second = Eigen::VectorXd::Zero(d);
    for (int p = 0; p < ws.total_samples(); ++p) {
      const double rho = std::norm(ws.values[a][p]) * ws.cell_measure / mass;
      const Eigen::VectorXd xi = ws.min_image(ws.position(p), center);
      first += rho * xi;
      second += rho * xi.cwiseProduct(xi);
    }
    ws.centers.row(a) = first.transpose();
    ws.spreads[a] = (second - first.cwiseProduct(first)).sum();
  }
}

double real_space_mv(const WannierSet& ws) { return ws.spreads.sum(); }

double torus_spread_total(const WannierSet& ws) {
  const int d = ws.dim();
  const int m = ws.bands();
  const double dual_volume = std::pow(2.0 * std::numbers::pi, d) / ws.lattice.cell_volume;

  std::vector<double> h(d);
  for (int j = 0; j < d; ++j) {
    h[j] = ws.lattice.dual_basis.col(j).norm() / ws.repetitions[j];
  }

  double total = 0.0;
  for (int a = 0; a < m; ++a) {
    std::vector<double> s1(d, 0.0), s2(d, 0.0);
    for (int p = 0; p < ws.total_samples(); ++p) {
      const double rho = std::norm(ws.values[a][p]) * ws.cell_measure;
      const auto c = ws.sample_coords(p);
      for (int j = 0; j < d; ++j) {
        const double u = static_cast<double>(c[j]) / ws.samples_per_cell[j];
        const double s =
            std::sin(2.0 * std::numbers::pi * u / ws.repetitions[j]) / h[j];
        s1[j] += rho * s;
        s2[j] += rho * s * s;
      }
    }
    for (int j = 0; j < d; ++j) {
      total += dual_volume * s2[j] - dual_volume * dual_volume * s1[j] * s1[j];
    }
  }
  return total;
}

std::vector<DecayFit> fit_decay(WannierSet& ws) {
  const int d = ws.dim();
  const int m = ws.bands();
  if (ws.centers.rows() != m) compute_moments(ws);

  // geometry of the sampling torus
  double cell_diam = 0.0;
  for (int signs = 0; signs < (1 << (d - 1)); ++signs) {
    Eigen::VectorXd v = ws.lattice.basis.col(0);
    for (int j = 1; j < d; ++j) {
      v += ((signs >> (j - 1)) & 1 ? -1.0 : 1.0) * ws.lattice.basis.col(j);
    }
    cell_diam = std::max(cell_diam, v.norm());
  }
  double radius = 0.0;
  for (int signs = 0; signs < (1 << (d - 1)); ++signs) {
    Eigen::VectorXd v = 0.5 * ws.repetitions[0] * ws.lattice.basis.col(0);
    for (int j = 1; j < d; ++j) {
      v += ((signs >> (j - 1)) & 1 ? -0.5 : 0.5) * ws.repetitions[j] *
           ws.lattice.basis.col(j);
    }
    radius = std::max(radius, v.norm());
  }
  double face_radius = std::numeric_limits<double>::infinity();
  for (int j = 0; j < d; ++j) {
    face_radius = std::min(face_radius, ws.repetitions[j] * std::numbers::pi /
                                            ws.lattice.dual_basis.col(j).norm());
  }

  const double fit_min = 2.0 * cell_diam;
  const double fit_max = 0.4 * radius;
  double bin_width = 0.0;
  for (int j = 0; j < d; ++j) {
    bin_width = std::max(bin_width, ws.lattice.basis.col(j).norm() / ws.samples_per_cell[j]);
  }

  ws.decay.clear();
  for (int a = 0; a < m; ++a) {
    const Eigen::VectorXd center = ws.centers.row(a).transpose();
    double peak = 0.0;
    for (const auto& v : ws.values[a]) peak = std::max(peak, std::abs(v));

    double boundary = 0.0;
    std::map<int, std::pair<double, double>> shells;  // bin -> (amp, r) of the shell max
    for (int p = 0; p < ws.total_samples(); ++p) {
      const double r = (ws.min_image(ws.position(p), center) - center).norm();
      const double amp = std::abs(ws.values[a][p]);
      if (r >= 0.98 * face_radius) boundary = std::max(boundary, amp);
      if (r < fit_min || r > fit_max || amp <= 0.0) continue;
      const int bin = static_cast<int>(std::floor((r - fit_min) / bin_width));
      auto it = shells.find(bin);
      if (it == shells.end() || amp > it->second.first) shells[bin] = {amp, r};
    }
    if (boundary > 1e-8 * peak) {
      throw InsufficientDecay("band " + std::to_string(a) + " boundary amplitude " +
                              std::to_string(boundary / peak) +
                              " of peak; enlarge the k-grid");
    }
    if (shells.size() < 8) {
      throw InsufficientDecay("band " + std::to_string(a) +
                              ": too few shells in the fit window; enlarge the k-grid");
    }

    // least squares of log(amp) against r
    double sr = 0, sy = 0, srr = 0, sry = 0, n = 0;
    for (const auto& [bin, av] : shells) {
      const double y = std::log(av.first);
      sr += av.second;
      sy += y;
      srr += av.second * av.second;
      sry += av.second * y;
      n += 1.0;
    }
    const double slope = (n * sry - sr * sy) / (n * srr - sr * sr);
    const double intercept = (sy - slope * sr) / n;
    double ss_res = 0, ss_tot = 0;
    const double ymean = sy / n;
    for (const auto& [bin, av] : shells) {
      const double y = std::log(av.first);
      const double fit = intercept + slope * av.second;
      ss_res += (y - fit) * (y - fit);
      ss_tot += (y - ymean) * (y - ymean);
    }
    DecayFit fit;
    fit.beta = -slope;
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
    fit.fit_min = fit_min;
    fit.fit_max = fit_max;
    ws.decay.push_back(fit);
  }
  return ws.decay;
}

}  // namespace mlwf
