#include "mlwf/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "detail/dft.hpp"

namespace mlwf {

void OptimizerConfig::validate() const {
  if (max_iter <= 0 || grad_tol <= 0 || initial_step <= 0) {
    throw ConfigError("optimizer: max_iter, grad_tol and initial_step must be positive");
  }
  if (!(armijo_c > 0 && armijo_c < 1) || !(step_shrink > 0 && step_shrink < 1)) {
    throw ConfigError("optimizer: armijo_c and step_shrink must lie in (0,1)");
  }
}

namespace {

struct WrapOp {
  int index;
  int axis;
  int wrap;  // -1, 0, +1
};

Eigen::MatrixXcd fetch(const std::vector<Eigen::MatrixXcd>& field, const PlaneWaveBasis& pw,
                       const WrapOp& op) {
  if (op.wrap == 0) return field[op.index];
  return pw.apply_dual_shift(field[op.index], op.axis, op.wrap);
}

// adjoint of `fetch` scatter: rows move through the inverse shift
Eigen::MatrixXcd fetch_adjoint(const Eigen::MatrixXcd& value, const PlaneWaveBasis& pw,
                               const WrapOp& op) {
  if (op.wrap == 0) return value;
  return pw.apply_dual_shift(value, op.axis, -op.wrap);
}

}  // namespace

std::vector<Eigen::MatrixXcd> riemannian_gradient(const GaugeField& gauge,
                                                  const BlochFrame& frame, const KGrid& grid,
                                                  const PlaneWaveBasis& pw) {
  const int d = grid.dim();
  const int m = gauge.bands();
  const double w = grid.weight;
  const auto phi = apply_gauge(frame, gauge);

  // neighbor bookkeeping and the difference fields
  std::vector<std::vector<WrapOp>> up(grid.total, std::vector<WrapOp>(d));
  std::vector<std::vector<WrapOp>> dn(grid.total, std::vector<WrapOp>(d));
  std::vector<std::vector<Eigen::MatrixXcd>> dphi(grid.total,
                                                  std::vector<Eigen::MatrixXcd>(d));
  Eigen::MatrixXd band_centers = Eigen::MatrixXd::Zero(m, d);
  for (int k = 0; k < grid.total; ++k) {
    for (int j = 0; j < d; ++j) {
      const auto nu = grid.neighbor(k, j, +1);
      const auto nd = grid.neighbor(k, j, -1);
      up[k][j] = {nu.index, j, nu.wrap};
      dn[k][j] = {nd.index, j, nd.wrap};
      dphi[k][j] = (fetch(phi, pw, up[k][j]) - fetch(phi, pw, dn[k][j])) /
                   (2.0 * grid.spacing[j]);
      for (int a = 0; a < m; ++a) {
        band_centers(a, j) -= w * phi[k].col(a).dot(dphi[k][j].col(a)).imag();
      }
    }
  }

  // X(q) collects dF = sum_q Re tr(dphi(q)* X(q))
  std::vector<Eigen::MatrixXcd> x(grid.total, Eigen::MatrixXcd::Zero(phi[0].rows(), m));
  const cdouble iunit(0.0, 1.0);
  for (int k = 0; k < grid.total; ++k) {
    for (int j = 0; j < d; ++j) {
      const double inv2h = 1.0 / (2.0 * grid.spacing[j]);

      // quadratic term: 2 w Re tr(dDphi* Dphi)
      Eigen::MatrixXcd carrier = 2.0 * w * dphi[k][j];
      // center term, delta through D phi: + 2 w C_aj Re tr(dDphi_a* (i phi_a))
      for (int a = 0; a < m; ++a) {
        carrier.col(a) += 2.0 * w * band_centers(a, j) * (iunit * phi[k].col(a));
      }
      x[up[k][j].index] += inv2h * fetch_adjoint(carrier, pw, up[k][j]);
      x[dn[k][j].index] -= inv2h * fetch_adjoint(carrier, pw, dn[k][j]);

      // center term, delta through phi itself: - 2 w C_aj Re tr(dphi_a* (i Dphi_a))
      for (int a = 0; a < m; ++a) {
        x[k].col(a) -= 2.0 * w * band_centers(a, j) * (iunit * dphi[k][j].col(a));
      }
    }
  }

  std::vector<Eigen::MatrixXcd> g(grid.total);
  for (int k = 0; k < grid.total; ++k) {
    const Eigen::MatrixXcd full = phi[k].adjoint() * x[k] / w;
    g[k] = 0.5 * (full - full.adjoint());
  }
  return g;
}

double field_inner(const std::vector<Eigen::MatrixXcd>& a,
                   const std::vector<Eigen::MatrixXcd>& b, const KGrid& grid) {
  double sum = 0.0;
  for (int k = 0; k < grid.total; ++k) {
    sum += grid.weight * (a[k].adjoint() * b[k]).trace().real();
  }
  return sum;
}

double gradient_norm(const std::vector<Eigen::MatrixXcd>& g, const KGrid& grid) {
  double sum = 0.0;
  for (int k = 0; k < grid.total; ++k) sum += grid.weight * g[k].squaredNorm();
  return std::sqrt(sum);
}

Eigen::MatrixXcd exp_skew(const Eigen::MatrixXcd& s, double scale) {
  const cdouble iunit(0.0, 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(-iunit * s);
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (int i = 0; i < phases.size(); ++i) {
    phases[i] = std::exp(iunit * scale * es.eigenvalues()[i]);
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

GaugeField random_gauge(int nk, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto gauss = [&rng]() {
    // Box-Muller from raw 53-bit uniforms; std::normal_distribution is not
    // pinned by the standard.
    const double u1 =
        (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    const double u2 = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  };
  GaugeField g;
  g.u.reserve(nk);
  for (int k = 0; k < nk; ++k) {
    Eigen::MatrixXcd z(m, m);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) z(r, c) = cdouble(gauss(), gauss());
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(m, m);
    const Eigen::MatrixXcd r = q.adjoint() * z;
    for (int c = 0; c < m; ++c) {
      const cdouble rc = r(c, c);
      q.col(c) *= rc / std::abs(rc);
    }
    g.u.push_back(q);
  }
  return g;
}

namespace {

double round_half_toward_zero(double x) {
  const double f = std::floor(std::abs(x));
  const double frac = std::abs(x) - f;
  double r = frac > 0.5 ? f + 1.0 : f;
  return x < 0 ? -r : r;
}

/// Lattice shifts that move every physical center into the centered cell.
std::vector<Eigen::VectorXd> recentering_shifts(const Eigen::MatrixXd& centers,
                                                const KGrid& grid) {
  const int m = static_cast<int>(centers.rows());
  const int d = grid.dim();
  std::vector<Eigen::VectorXd> shifts(m, Eigen::VectorXd::Zero(d));
  for (int a = 0; a < m; ++a) {
    for (int i = 0; i < d; ++i) {
      // lattice coordinate of the center: alpha_i = c . gamma*_i / (2 pi),
      // with c known through its components along the unit dual directions
      const double alpha = centers(a, i) * grid.lattice.dual_basis.col(i).norm() /
                           (2.0 * std::numbers::pi);
      shifts[a] += round_half_toward_zero(alpha) * grid.lattice.basis.col(i);
    }
  }
  return shifts;
}

}  // namespace

DescentTrace minimize(const BlochFrame& frame, const KGrid& grid, const PlaneWaveBasis& pw,
                      const OptimizerConfig& cfg, GaugeStart start) {
  const int m = frame.bands();
  if (start == GaugeStart::kRandom) {
    return minimize(frame, grid, pw, cfg, random_gauge(grid.total, m, cfg.seed));
  }
  return minimize(frame, grid, pw, cfg, GaugeField::identity(grid.total, m));
}

DescentTrace minimize(const BlochFrame& frame, const KGrid& grid, const PlaneWaveBasis& pw,
                      const OptimizerConfig& cfg, GaugeField initial) {
  cfg.validate();
  const int m = frame.bands();
  const BerryConnection conn = berry_connection(frame, grid, pw);
  std::mt19937_64 audit_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);

  DescentTrace trace;
  trace.gauge = std::move(initial);
  double objective = eval_gauge_functional(trace.gauge, frame, grid, pw).total;
  double step_start = cfg.initial_step;

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    if (cfg.recenter_every > 0 && iter > 0 && iter % cfg.recenter_every == 0) {
      const CenterMatrices cm = center_matrices(trace.gauge, conn, grid);
      const auto shifts = recentering_shifts(cm.physical_centers(grid), grid);
      bool moved = false;
      for (const auto& s : shifts) moved = moved || s.norm() > 0;
      if (moved) {
        apply_recentering(trace.gauge, grid, shifts);
        objective = eval_gauge_functional(trace.gauge, frame, grid, pw).total;
        ++trace.recenter_count;
      }
    }

    const auto g = riemannian_gradient(trace.gauge, frame, grid, pw);
    const double gnorm = gradient_norm(g, grid);

    if (cfg.fd_check_every > 0 && iter % cfg.fd_check_every == 0) {
      // audit d/de F(U e^{e psi}) against a central difference
      std::vector<Eigen::MatrixXcd> psi(grid.total);
      auto unif = [&audit_rng]() {
        return 2.0 * (static_cast<double>(audit_rng() >> 11) / 9007199254740992.0) - 1.0;
      };
      for (int k = 0; k < grid.total; ++k) {
        Eigen::MatrixXcd z(m, m);
        for (int r = 0; r < m; ++r) {
          for (int c = 0; c < m; ++c) z(r, c) = cdouble(unif(), unif());
        }
        psi[k] = 0.5 * (z - z.adjoint());
      }
      const double eps = 1e-5;
      GaugeField up = trace.gauge, dnn = trace.gauge;
      for (int k = 0; k < grid.total; ++k) {
        up.u[k] = trace.gauge.u[k] * exp_skew(psi[k], eps);
        dnn.u[k] = trace.gauge.u[k] * exp_skew(psi[k], -eps);
      }
      const double fd = (eval_gauge_functional(up, frame, grid, pw).total -
                         eval_gauge_functional(dnn, frame, grid, pw).total) /
                        (2.0 * eps);
      const double pairing = field_inner(g, psi, grid);
      trace.fd_checks.push_back(std::abs(pairing - fd) / (1.0 + std::abs(pairing)));
    }

    if (gnorm <= cfg.grad_tol) {
      trace.iterations.push_back({iter, objective, gnorm, 0.0});
      trace.converged = true;
      break;
    }

    double alpha = step_start;
    bool accepted = false;
    GaugeField candidate = trace.gauge;
    while (alpha >= 1e-14) {
      for (int k = 0; k < grid.total; ++k) {
        candidate.u[k] = trace.gauge.u[k] * exp_skew(g[k], -alpha);
      }
      const double trial = eval_gauge_functional(candidate, frame, grid, pw).total;
      if (trial <= objective - cfg.armijo_c * alpha * gnorm * gnorm) {
        trace.iterations.push_back({iter, objective, gnorm, alpha});
        trace.gauge = candidate;
        objective = trial;
        accepted = true;
        break;
      }
      alpha *= cfg.step_shrink;
    }
    if (!accepted) {
      throw LineSearchStall("Armijo search stalled below 1e-14 at iteration " +
                            std::to_string(iter) + " (gradient norm " +
                            std::to_string(gnorm) + ")");
    }
    step_start = std::min(cfg.initial_step, alpha / cfg.step_shrink);
  }

  trace.final_objective = objective;
  trace.final_grad_norm =
      gradient_norm(riemannian_gradient(trace.gauge, frame, grid, pw), grid);
  if (!trace.converged && trace.final_grad_norm <= cfg.grad_tol) trace.converged = true;

  const CenterMatrices cm = center_matrices(trace.gauge, conn, grid);
  trace.el_residual = el_residual(trace.gauge, conn, cm, grid);
  return trace;
}

double el_residual(const GaugeField& gauge, const BerryConnection& conn,
                   const CenterMatrices& centers, const KGrid& grid) {
  const int d = grid.dim();
  const int m = gauge.bands();
  double sum = 0.0;
  for (int k = 0; k < grid.total; ++k) {
    const Eigen::MatrixXcd& u = gauge.u[k];
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(m, m);
    for (int j = 0; j < d; ++j) {
      const int upk = grid.neighbor(k, j, +1).index;
      const int dnk = grid.neighbor(k, j, -1).index;
      const double h = grid.spacing[j];
      const Eigen::MatrixXcd lap =
          (gauge.u[upk] - 2.0 * u + gauge.u[dnk]) / (h * h);
      const Eigen::MatrixXcd du = (gauge.u[upk] - gauge.u[dnk]) / (2.0 * h);
      const Eigen::MatrixXcd da = (conn.a[upk][j] - conn.a[dnk][j]) / (2.0 * h);
      const Eigen::MatrixXcd& a = conn.a[k][j];
      const Eigen::MatrixXcd gj = centers.g[j].asDiagonal();

      r -= lap;
      r += du * u.adjoint() * du;
      r += du * u.adjoint() * a * u - da * u - a * du;
      const Eigen::MatrixXcd flux = du + a * u;
      r += -flux * gj + u * gj * u.adjoint() * flux;
    }
    sum += grid.weight * r.squaredNorm();
  }
  return std::sqrt(sum);
}

OracleResult abelian_poisson_oracle(const BlochFrame& frame, const BerryConnection& conn,
                                    const KGrid& grid, const PlaneWaveBasis& pw) {
  if (frame.bands() != 1) {
    throw NotAbelian("the Poisson oracle handles a single band, got m = " +
                     std::to_string(frame.bands()));
  }
  const int d = grid.dim();

  std::vector<cdouble> rhs(grid.total);
  for (int k = 0; k < grid.total; ++k) {
    cdouble div(0.0, 0.0);
    for (int j = 0; j < d; ++j) {
      const int upk = grid.neighbor(k, j, +1).index;
      const int dnk = grid.neighbor(k, j, -1).index;
      div += (conn.a[upk][j](0, 0) - conn.a[dnk][j](0, 0)) / (2.0 * grid.spacing[j]);
    }
    rhs[k] = cdouble(0.0, 1.0) * div;
  }
  cdouble mean(0.0, 0.0);
  for (const auto& v : rhs) mean += v;
  mean /= static_cast<double>(grid.total);
  if (std::abs(mean) > 1e-8) {
    throw NonzeroMean("source of the Poisson equation has mean " +
                      std::to_string(std::abs(mean)) + "; periodicity is broken");
  }

  // Diagonalize the squared central-difference Laplacian: the symbol of D_j
  // is i sin(2 pi n_j / N_j)/h_j, so D.D has symbol -sum_j sin^2/h^2. The
  // kernel (constant and Nyquist modes) is projected out.
  std::vector<cdouble> fhat = rhs;
  detail::dft_grid(fhat, grid.sizes, false);
  for (int idx = 0; idx < grid.total; ++idx) {
    const auto c = grid.coords_of(idx);
    double lambda = 0.0;
    for (int j = 0; j < d; ++j) {
      const double s = std::sin(2.0 * std::numbers::pi * c[j] / grid.sizes[j]);
      lambda -= s * s / (grid.spacing[j] * grid.spacing[j]);
    }
    fhat[idx] = std::abs(lambda) < 1e-12 ? cdouble(0.0, 0.0) : fhat[idx] / lambda;
  }
  detail::dft_grid(fhat, grid.sizes, true);
  std::vector<double> f(grid.total);
  for (int k = 0; k < grid.total; ++k) f[k] = fhat[k].real() / grid.total;

  OracleResult result;
  result.rhs_mean = std::abs(mean);
  double best = std::numeric_limits<double>::infinity();

  std::array<int, 3> l{0, 0, 0};
  const int lo = -2, hi = 2;
  for (l[0] = lo; l[0] <= hi; ++l[0]) {
    for (l[1] = (d > 1 ? lo : 0); l[1] <= (d > 1 ? hi : 0); ++l[1]) {
      for (l[2] = (d > 2 ? lo : 0); l[2] <= (d > 2 ? hi : 0); ++l[2]) {
        Eigen::VectorXd shift = Eigen::VectorXd::Zero(d);
        for (int j = 0; j < d; ++j) shift += l[j] * grid.lattice.basis.col(j);
        GaugeField gauge;
        gauge.u.resize(grid.total);
        for (int k = 0; k < grid.total; ++k) {
          gauge.u[k] = Eigen::MatrixXcd::Constant(
              1, 1, std::exp(cdouble(0.0, f[k] + grid.points[k].dot(shift))));
        }
        const double value = eval_gauge_functional(gauge, frame, grid, pw).total;
        result.sectors.push_back({l, value});
        if (value < best) {
          best = value;
          result.best_sector = l;
          result.gauge = gauge;
        }
      }
    }
  }
  result.objective = best;
  return result;
}

}  // namespace mlwf
