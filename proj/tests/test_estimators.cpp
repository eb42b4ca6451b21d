#include <doctest.h>

#include <fstream>
#include <json.hpp>

#include "oracles.hpp"
#include "panelspec/errors.hpp"
#include "panelspec/estimators.hpp"
#include "panelspec/least_squares.hpp"
#include "panelspec/mcstudy.hpp"
#include "panelspec/transforms.hpp"

using namespace panelspec;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const PanelError& e) {
    return e.kind();
  }
  FAIL("expected PanelError");
  return ErrorKind::Io;
}

// y = X beta + alpha_i exactly, with beta = (1, -1.5).
PanelDataset noiseless(Index n, Index t, bool with_effects, std::uint64_t seed = 1) {
  RandomStream rs(seed);
  MatrixXd x(n * t, 2);
  for (Index r = 0; r < x.rows(); ++r) x.row(r) << rs.normal(), rs.normal();
  VectorXd y = x * default_beta();
  if (with_effects) {
    for (Index i = 0; i < n; ++i) y.segment(i * t, t).array() += 3.0 * rs.normal();
  }
  std::vector<std::string> u, s;
  for (Index i = 0; i < n; ++i) u.push_back(std::to_string(i));
  for (Index j = 0; j < t; ++j) s.push_back(std::to_string(j));
  return PanelDataset(u, s, y, x);
}

void check_cov_psd(const EstimateResult& r) {
  CHECK((r.cov_beta - r.cov_beta.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * r.cov_beta.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(r.cov_beta);
  CHECK(es.eigenvalues().minCoeff() >= 0.0);
}

PanelDataset scale_column(const PanelDataset& ds, Index k, double c) {
  MatrixXd x = ds.x_stacked();
  x.col(k) *= c;
  return PanelDataset(ds.unit_ids(), ds.time_ids(), ds.y_stacked(), x, ds.regressor_names());
}

}  // namespace

TEST_CASE("least squares: exact interpolation and rank deficiency") {
  const auto ds = noiseless(10, 3, false);
  const auto fit = solve_least_squares(ds.x_stacked(), ds.y_stacked());
  CHECK((fit.beta - default_beta()).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(fit.residuals.lpNorm<Eigen::Infinity>() < 1e-12);

  MatrixXd dup(6, 2);
  dup.col(0) << 1, 2, 3, 4, 5, 7;
  dup.col(1) = dup.col(0);
  CHECK(kind_of([&] { solve_least_squares(dup, VectorXd::Ones(6)); }) == ErrorKind::RankDeficientDesign);
}

TEST_CASE("least squares: weights match a row-scaled oracle") {
  RandomStream rs(7);
  MatrixXd x(20, 3);
  VectorXd y(20), w(20);
  for (Index i = 0; i < 20; ++i) {
    x.row(i) << rs.normal(), rs.normal(), rs.normal();
    y(i) = rs.normal();
    w(i) = rs.uniform();
  }
  const auto fit = solve_least_squares(x, y, w);
  const MatrixXd g = x.transpose() * w.asDiagonal() * x;
  const VectorXd beta = g.ldlt().solve(x.transpose() * w.asDiagonal() * y);
  CHECK((fit.beta - beta).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((fit.gram_inverse - g.inverse()).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((fit.residuals - (y - x * beta)).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("pooled OLS on a hand dataset matches normal equations") {
  const PanelDataset ds({"a", "b", "c"}, {"1", "2"}, (VectorXd(6) << 1.0, 2.5, 0.3, -1.0, 4.0, 3.2).finished(),
                        (VectorXd(6) << 0.5, 1.0, -0.2, -0.9, 2.1, 1.7).finished());
  const auto res = fit_pooled_ols(ds);
  CHECK(res.method == Method::PooledOLS);
  CHECK(std::abs(res.beta(0) - oracle::normal_equations(ds.x_stacked(), ds.y_stacked())(0)) < 1e-12);
  const double rss = res.residuals.squaredNorm();
  CHECK(res.rss == doctest::Approx(rss).epsilon(1e-10));
  CHECK(res.sigma2_eps == doctest::Approx(rss / (6 - 1)).epsilon(1e-12));
  check_cov_psd(res);
}

TEST_CASE("fixed effects absorbs unit intercepts") {
  const auto ds = noiseless(8, 4, true);
  const auto fe = fit_fixed_effects(ds);
  CHECK((fe.beta - default_beta()).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK(fe.method == Method::FixedEffects);
}

TEST_CASE("fixed effects matches LSDV on N=4, T=3 random data") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto ds = oracle::random_panel(4, 3, 2, 40 + seed);
    CHECK((fit_fixed_effects(ds).beta - oracle::lsdv_slopes(ds)).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("fixed effects on the fixture matches the numpy LSDV oracle") {
  const auto ds = load_long_csv(std::string(PANELSPEC_TEST_DATA) + "/fe_small.csv",
                                ColumnSchema{"firm", "year", "output", {"capital", "labour"}});
  std::ifstream f(std::string(PANELSPEC_TEST_DATA) + "/fe_small_oracle.json");
  const auto ref = nlohmann::json::parse(f);
  const auto fe = fit_fixed_effects(ds);
  for (Index k = 0; k < 2; ++k) {
    CHECK(std::abs(fe.beta(k) - ref["fe_beta"][k].get<double>()) < 1e-10);
    CHECK(fe.std_errors()(k) == doctest::Approx(ref["fe_std_errors"][k].get<double>()).epsilon(1e-9));
  }
  CHECK(fe.sigma2_eps == doctest::Approx(ref["fe_sigma2_eps"].get<double>()).epsilon(1e-9));
  CHECK(fe.rss == doctest::Approx(ref["fe_rss"].get<double>()).epsilon(1e-9));
  const auto pooled = fit_pooled_ols(ds);
  for (Index k = 0; k < 2; ++k) CHECK(std::abs(pooled.beta(k) - ref["pooled_beta"][k].get<double>()) < 1e-12);
}

TEST_CASE("time-invariant regressor makes FE rank deficient") {
  auto ds = oracle::random_panel(5, 3, 2, 3);
  MatrixXd x = ds.x_stacked();
  for (Index i = 0; i < 5; ++i) x.block(i * 3, 1, 3, 1).setConstant(static_cast<double>(i));
  const PanelDataset bad(ds.unit_ids(), ds.time_ids(), ds.y_stacked(), x);
  CHECK(kind_of([&] { fit_fixed_effects(bad); }) == ErrorKind::RankDeficientDesign);
}

TEST_CASE("FE slopes are invariant to unit-specific constants in y") {
  const auto ds = oracle::random_panel(12, 4, 2, 77);
  VectorXd y = ds.y_stacked();
  for (Index i = 0; i < 12; ++i) y.segment(i * 4, 4).array() += 100.0 * static_cast<double>(i) - 250.0;
  const PanelDataset shifted(ds.unit_ids(), ds.time_ids(), y, ds.x_stacked());
  CHECK((fit_fixed_effects(shifted).beta - fit_fixed_effects(ds).beta).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("column rescaling divides the coefficient") {
  const auto ds = oracle::random_panel(25, 4, 2, 13);
  const auto scaled = scale_column(ds, 1, -3.5);
  const auto check = [&](auto fit) {
    const VectorXd a = fit(ds).beta;
    const VectorXd b = fit(scaled).beta;
    CHECK(b(0) == doctest::Approx(a(0)).epsilon(1e-10));
    CHECK(b(1) == doctest::Approx(a(1) / -3.5).epsilon(1e-10));
  };
  check([](const PanelDataset& d) { return fit_pooled_ols(d); });
  check([](const PanelDataset& d) { return fit_fixed_effects(d); });
  check([](const PanelDataset& d) { return fit_random_effects(d); });
}

TEST_CASE("variance components recover the simulation design at large N") {
  DgpConfig cfg;
  cfg.n_units = 2000;
  cfg.n_periods = 4;
  RandomStream rs(20);
  const auto vc = estimate_variance_components(generate(cfg, rs));
  CHECK(vc.sigma2_eps >= 0.9);
  CHECK(vc.sigma2_eps <= 1.1);
  CHECK(vc.sigma2_alpha >= 0.8);
  CHECK(vc.sigma2_alpha <= 1.2);
  CHECK(vc.theta == doctest::Approx(compute_theta(vc.sigma2_eps, vc.sigma2_alpha, 4)));
}

TEST_CASE("no individual effects: sigma2_alpha near zero and clamped") {
  int clamped = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto ds = oracle::random_panel(500, 4, 2, 900 + seed, 0.0);
    const auto vc = estimate_variance_components(ds);
    CHECK(vc.sigma2_alpha >= 0.0);
    CHECK(vc.sigma2_alpha < 0.05);
    CHECK(vc.theta < 0.3);
    if (vc.sigma2_alpha == 0.0) {
      ++clamped;
      CHECK(vc.theta == 0.0);
    }
  }
  // Roughly half the draws give a negative raw estimate.
  CHECK(clamped > 0);
}

TEST_CASE("variance components need enough degrees of freedom") {
  // N = K + 1: the between regression with intercept has no residual dof.
  const auto ds = oracle::random_panel(3, 4, 2, 5);
  CHECK(kind_of([&] { estimate_variance_components(ds); }) == ErrorKind::InsufficientDegreesOfFreedom);
  CHECK(kind_of([&] { fit_random_effects(ds); }) == ErrorKind::InsufficientDegreesOfFreedom);
}

TEST_CASE("random effects with theta = 0 equals pooled OLS") {
  bool seen = false;
  for (std::uint64_t seed = 0; seed < 40 && !seen; ++seed) {
    const auto ds = oracle::random_panel(60, 3, 2, 300 + seed, 0.0);
    const auto re = fit_random_effects(ds);
    if (re.components->theta != 0.0) continue;
    seen = true;
    CHECK((re.beta - fit_pooled_ols(ds).beta).lpNorm<Eigen::Infinity>() < 1e-12);
  }
  CHECK(seen);
  const auto ds = oracle::random_panel(30, 3, 2, 1);
  RandomEffectsOptions opt;
  opt.forced_theta = 0.0;
  CHECK((fit_random_effects(ds, opt).beta - fit_pooled_ols(ds).beta).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("random effects with theta forced to 1 equals fixed effects") {
  const auto ds = oracle::random_panel(30, 4, 2, 61);
  RandomEffectsOptions opt;
  opt.forced_theta = 1.0;
  const auto re = fit_random_effects(ds, opt);
  const auto fe = fit_fixed_effects(ds);
  CHECK((re.beta - fe.beta).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK(re.components->theta == 1.0);
}

TEST_CASE("random effects on zero-noise data") {
  const auto ds = noiseless(20, 4, true);
  const auto re = fit_random_effects(ds);
  CHECK((re.beta - default_beta()).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK(re.components->theta > 1.0 - 1e-6);
}

TEST_CASE("random and fixed effects agree at large N under the null") {
  DgpConfig cfg;
  cfg.n_units = 2000;
  cfg.n_periods = 4;
  RandomStream rs(21);
  const auto ds = generate(cfg, rs);
  CHECK((fit_random_effects(ds).beta - fit_fixed_effects(ds).beta).lpNorm<Eigen::Infinity>() < 0.05);
}

TEST_CASE("random effects covariance uses sigma2_eps on the quasi-demeaned design") {
  const auto ds = oracle::random_panel(40, 3, 2, 71);
  const auto re = fit_random_effects(ds);
  const auto tp = quasi_demean(ds, re.components->theta);
  const MatrixXd expected = re.components->sigma2_eps * (tp.x.transpose() * tp.x).inverse();
  CHECK((re.cov_beta - expected).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(re.sigma2_alpha == re.components->sigma2_alpha);
}

TEST_CASE("every estimator: PSD covariance, rss, r2 on its own scale") {
  const auto ds = oracle::random_panel(30, 4, 2, 5);
  for (const auto& res : {fit_pooled_ols(ds), fit_fixed_effects(ds), fit_random_effects(ds)}) {
    check_cov_psd(res);
    CHECK(res.rss == doctest::Approx(res.residuals.squaredNorm()).epsilon(1e-10));
    CHECK(res.r_squared == doctest::Approx(1.0 - res.rss / res.tss).epsilon(1e-12));
    CHECK(res.r_squared <= 1.0);
    CHECK(res.residuals.rows() == 30);
    CHECK(res.residuals.cols() == 4);
  }
}
