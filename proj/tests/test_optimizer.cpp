#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "mlwf/optimizer.hpp"

using namespace mlwf;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Instance {
  BravaisLattice lat;
  PlaneWaveBasis pw;
  KGrid grid;
  WindowProjector projs;
  BlochFrame frame;
  BerryConnection conn;

  Instance(int nk, double cutoff, double coeff, int bands = 1) {
    Eigen::MatrixXd basis(1, 1);
    basis << kTwoPi;
    lat = build_lattice(basis);
    pw = make_plane_wave_basis(lat, cutoff);
    grid = make_kgrid(lat, {nk});
    const auto spectra = solve_on_grid(grid, pw, cosine_potential(1, coeff));
    const auto window = validate_gap(spectra, BandWindow{0, bands}, 1e-10);
    projs = window_projectors(spectra, window);
    frame = projection_frame(projs, projs.range[grid.gamma_index()]);
    conn = berry_connection(frame, grid, pw);
  }
};

std::vector<Eigen::MatrixXcd> random_skew_field(int nk, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto unif = [&rng]() {
    return 2.0 * (static_cast<double>(rng() >> 11) / 9007199254740992.0) - 1.0;
  };
  std::vector<Eigen::MatrixXcd> psi(nk);
  for (int k = 0; k < nk; ++k) {
    Eigen::MatrixXcd z(m, m);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) z(r, c) = cdouble(unif(), unif());
    }
    psi[k] = 0.5 * (z - z.adjoint());
  }
  return psi;
}

double directional_fd(const GaugeField& gauge, const BlochFrame& frame, const KGrid& grid,
                      const PlaneWaveBasis& pw, const std::vector<Eigen::MatrixXcd>& psi,
                      double eps) {
  GaugeField up = gauge, dn = gauge;
  for (int k = 0; k < grid.total; ++k) {
    up.u[k] = gauge.u[k] * exp_skew(psi[k], eps);
    dn.u[k] = gauge.u[k] * exp_skew(psi[k], -eps);
  }
  return (eval_gauge_functional(up, frame, grid, pw).total -
          eval_gauge_functional(dn, frame, grid, pw).total) /
         (2.0 * eps);
}

}  // namespace

TEST_CASE("gradient matches central finite differences in random directions") {
  Instance setup(16, 6.0, -0.5, 2);
  for (std::uint64_t gauge_seed : {11ull, 12ull, 13ull}) {
    const auto gauge = random_gauge(setup.grid.total, 2, gauge_seed);
    const auto g = riemannian_gradient(gauge, setup.frame, setup.grid, setup.pw);
    for (std::uint64_t dir_seed = 0; dir_seed < 20; ++dir_seed) {
      const auto psi =
          random_skew_field(setup.grid.total, 2, 1000 * gauge_seed + dir_seed);
      const double pairing = field_inner(g, psi, setup.grid);
      const double fd = directional_fd(gauge, setup.frame, setup.grid, setup.pw, psi, 1e-5);
      CHECK(std::abs(pairing - fd) <= 1e-6 * (1.0 + std::abs(pairing)));
    }
  }
}

TEST_CASE("gradient entries are skew-hermitian") {
  Instance setup(16, 6.0, -0.5, 2);
  const auto gauge = random_gauge(setup.grid.total, 2, 5);
  const auto g = riemannian_gradient(gauge, setup.frame, setup.grid, setup.pw);
  for (const auto& gk : g) CHECK((gk + gk.adjoint()).norm() < 1e-12);
}

TEST_CASE("global phase direction is flat") {
  Instance setup(16, 6.0, -0.5, 2);
  const auto gauge = random_gauge(setup.grid.total, 2, 9);
  const auto g = riemannian_gradient(gauge, setup.frame, setup.grid, setup.pw);
  std::vector<Eigen::MatrixXcd> phase_dir(
      setup.grid.total, cdouble(0.0, 1.0) * Eigen::MatrixXcd::Identity(2, 2));
  CHECK(std::abs(field_inner(g, phase_dir, setup.grid)) < 1e-10);
}

TEST_CASE("retraction stays unitary") {
  const auto psi = random_skew_field(1, 3, 77);
  const Eigen::MatrixXcd e = exp_skew(psi[0], 1.7);
  CHECK((e.adjoint() * e - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("descent from identity converges and is monotone") {
  Instance setup(32, 6.0, -0.5);
  OptimizerConfig cfg;
  cfg.max_iter = 20000;
  cfg.grad_tol = 1e-8;
  cfg.recenter_every = 0;  // strict monotonicity in this test
  const auto trace = minimize(setup.frame, setup.grid, setup.pw, cfg, GaugeStart::kIdentity);
  CHECK(trace.converged);
  for (size_t i = 1; i < trace.iterations.size(); ++i) {
    CHECK(trace.iterations[i].objective <= trace.iterations[i - 1].objective + 1e-14);
  }
  CHECK(trace.gauge.max_unitarity_defect() < 1e-10);
  for (double err : trace.fd_checks) CHECK(err < 1e-5);
}

TEST_CASE("optimizer reaches the abelian Poisson oracle value") {
  Instance setup(32, 6.0, -0.5);
  OptimizerConfig cfg;
  cfg.max_iter = 20000;
  cfg.grad_tol = 1e-9;
  const auto trace = minimize(setup.frame, setup.grid, setup.pw, cfg, GaugeStart::kIdentity);
  const auto oracle = abelian_poisson_oracle(setup.frame, setup.conn, setup.grid, setup.pw);

  MESSAGE("optimizer ", trace.final_objective, " oracle ", oracle.objective);
  CHECK(std::abs(trace.final_objective - oracle.objective) <=
        1e-8 * std::abs(oracle.objective));

  const auto g_oracle =
      riemannian_gradient(oracle.gauge, setup.frame, setup.grid, setup.pw);
  const double gnorm = gradient_norm(g_oracle, setup.grid);
  MESSAGE("gradient norm at oracle gauge: ", gnorm);
  CHECK(gnorm <= 1e-7);

  // oracle never loses to the identity gauge
  const double ident = eval_gauge_functional(GaugeField::identity(setup.grid.total, 1),
                                             setup.frame, setup.grid, setup.pw)
                           .total;
  CHECK(oracle.objective <= ident + 1e-14);
}

TEST_CASE("random start reaches the same minimum") {
  Instance setup(32, 6.0, -0.5);
  OptimizerConfig cfg;
  cfg.max_iter = 30000;
  cfg.grad_tol = 1e-9;
  cfg.seed = 7;
  const auto a = minimize(setup.frame, setup.grid, setup.pw, cfg, GaugeStart::kIdentity);
  const auto b = minimize(setup.frame, setup.grid, setup.pw, cfg, GaugeStart::kRandom);
  CHECK(std::abs(a.final_objective - b.final_objective) <=
        1e-6 * (1.0 + std::abs(a.final_objective)));
}

TEST_CASE("minimum does not depend on the reference frame") {
  Instance setup(32, 6.0, -0.5);
  OptimizerConfig cfg;
  cfg.max_iter = 20000;
  cfg.grad_tol = 1e-9;

  // second frame from a different trial subspace: edge-point eigenvector
  const auto frame_b = projection_frame(setup.projs, setup.projs.range[0]);
  const auto a = minimize(setup.frame, setup.grid, setup.pw, cfg, GaugeStart::kIdentity);
  const auto b = minimize(frame_b, setup.grid, setup.pw, cfg, GaugeStart::kIdentity);
  CHECK(std::abs(a.final_objective - b.final_objective) <=
        1e-6 * (1.0 + std::abs(a.final_objective)));
}

TEST_CASE("recentering keeps every center inside the centered cell") {
  Instance setup(32, 6.0, -0.5);
  OptimizerConfig cfg;
  cfg.max_iter = 20000;
  cfg.grad_tol = 1e-8;
  cfg.recenter_every = 25;
  const auto trace = minimize(setup.frame, setup.grid, setup.pw, cfg, GaugeStart::kRandom);
  const auto cm = center_matrices(trace.gauge, setup.conn, setup.grid);
  const auto centers = cm.physical_centers(setup.grid);
  for (int a = 0; a < centers.rows(); ++a) {
    for (int j = 0; j < centers.cols(); ++j) {
      const double alpha =
          centers(a, j) * setup.lat.dual_basis.col(j).norm() / kTwoPi;
      CHECK(std::abs(alpha) <= 0.5 + 1e-9);
    }
  }
}

TEST_CASE("Euler-Lagrange residual: positive away from stationarity, O(h^2) at it") {
  OptimizerConfig cfg;
  cfg.max_iter = 30000;
  cfg.grad_tol = 1e-10;

  double residuals[2];
  double identity_residual = 0.0;
  int idx = 0;
  for (int nk : {32, 64}) {
    Instance setup(nk, 8.0, -0.5);
    const auto trace =
        minimize(setup.frame, setup.grid, setup.pw, cfg, GaugeStart::kIdentity);
    const auto cm = center_matrices(trace.gauge, setup.conn, setup.grid);
    residuals[idx++] = el_residual(trace.gauge, setup.conn, cm, setup.grid);
    if (nk == 32) {
      const auto ident = GaugeField::identity(setup.grid.total, 1);
      const auto cm0 = center_matrices(ident, setup.conn, setup.grid);
      identity_residual = el_residual(ident, setup.conn, cm0, setup.grid);
    }
  }
  MESSAGE("el residuals 32/64: ", residuals[0], " / ", residuals[1],
          "; identity: ", identity_residual);
  CHECK(identity_residual > 10.0 * residuals[0]);
  const double ratio = residuals[0] / residuals[1];
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("abelian bracket terms cancel identically") {
  Instance setup(16, 6.0, -0.5);
  const auto gauge = random_gauge(setup.grid.total, 1, 3);
  const auto cm = center_matrices(gauge, setup.conn, setup.grid);
  CenterMatrices zero = cm;
  zero.g[0].setZero();
  const double with_g = el_residual(gauge, setup.conn, cm, setup.grid);
  const double without_g = el_residual(gauge, setup.conn, zero, setup.grid);
  CHECK(std::abs(with_g - without_g) <= 1e-14 * (1.0 + with_g));
}

TEST_CASE("oracle trivia: zero connection gives the identity gauge") {
  Eigen::MatrixXd basis(1, 1);
  basis << kTwoPi;
  const auto lat = build_lattice(basis);
  const auto pw = identity_wrap_basis(lat, 3);
  const auto grid = make_kgrid(lat, {16});
  BlochFrame frame;
  Eigen::MatrixXcd col = Eigen::MatrixXcd::Zero(3, 1);
  col(0, 0) = 1.0;
  frame.columns.assign(grid.total, col);
  const auto conn = berry_connection(frame, grid, pw);
  const auto oracle = abelian_poisson_oracle(frame, conn, grid, pw);
  CHECK(oracle.objective == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(oracle.best_sector == std::array<int, 3>{0, 0, 0});
  for (int k = 0; k < grid.total; ++k) {
    CHECK(std::abs(oracle.gauge.u[k](0, 0) - cdouble(1.0, 0.0)) < 1e-12);
  }
}

TEST_CASE("oracle refuses multiband input") {
  Instance setup(8, 6.0, -0.5, 2);
  CHECK_THROWS_AS(abelian_poisson_oracle(setup.frame, setup.conn, setup.grid, setup.pw),
                  NotAbelian);
}

TEST_CASE("optimizer config validation") {
  OptimizerConfig cfg;
  cfg.armijo_c = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = OptimizerConfig{};
  cfg.step_shrink = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
