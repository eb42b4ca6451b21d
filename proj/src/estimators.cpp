#include "panelspec/estimators.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "panelspec/errors.hpp"
#include "panelspec/least_squares.hpp"
#include "panelspec/transforms.hpp"

namespace panelspec {

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::PooledOLS: return "pooled";
    case Method::FixedEffects: return "fe";
    case Method::RandomEffects: return "re";
    case Method::WeightedFixedEffects: return "wfe";
  }
  return "unknown";
}

namespace detail {

EstimateResult make_result(Method method, Index n_units, Index n_periods, const Eigen::VectorXd& y_fit,
                           const Eigen::VectorXd& beta, const Eigen::VectorXd& residuals) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  EstimateResult res;
  res.method = method;
  res.beta = beta;
  res.residuals = Eigen::Map<const RowMajor>(residuals.data(), n_units, n_periods);
  res.rss = residuals.squaredNorm();
  res.tss = (y_fit.array() - y_fit.mean()).square().sum();
  res.r_squared = res.tss > 0.0 ? 1.0 - res.rss / res.tss : std::numeric_limits<double>::quiet_NaN();
  return res;
}

}  // namespace detail

EstimateResult fit_pooled_ols(const PanelDataset& ds) {
  const auto& y = ds.y_stacked();
  const auto& x = ds.x_stacked();
  const auto fit = solve_least_squares(x, y);
  auto res = detail::make_result(Method::PooledOLS, ds.n_units(), ds.n_periods(), y, fit.beta, fit.residuals);
  const double dof = static_cast<double>(ds.n_obs() - ds.n_regressors());
  res.sigma2_eps = res.rss / dof;
  res.cov_beta = res.sigma2_eps * fit.gram_inverse;
  return res;
}

EstimateResult fit_fixed_effects(const PanelDataset& ds) {
  const auto tp = within_transform(ds);
  const auto fit = solve_least_squares(tp.x, tp.y);
  auto res = detail::make_result(Method::FixedEffects, ds.n_units(), ds.n_periods(), tp.y, fit.beta, fit.residuals);
  const double dof = static_cast<double>(ds.n_units() * (ds.n_periods() - 1) - ds.n_regressors());
  res.sigma2_eps = res.rss / dof;
  res.cov_beta = res.sigma2_eps * fit.gram_inverse;
  return res;
}

VarianceComponents estimate_variance_components(const PanelDataset& ds) {
  const Index n = ds.n_units();
  const Index t_count = ds.n_periods();
  const Index k = ds.n_regressors();
  if (n * (t_count - 1) <= k || n <= k + 1) {
    throw PanelError(ErrorKind::InsufficientDegreesOfFreedom,
                     "need N(T-1) > K and N > K+1 (N=" + std::to_string(n) + ", T=" + std::to_string(t_count) +
                         ", K=" + std::to_string(k) + ")");
  }

  const auto tp = within_transform(ds);
  const auto within = solve_least_squares(tp.x, tp.y);
  const double sigma2_eps = within.residuals.squaredNorm() / static_cast<double>(n * (t_count - 1) - k);

  // Between regression on unit means, with intercept.
  Eigen::VectorXd y_bar(n);
  Eigen::MatrixXd design(n, k + 1);
  const double inv_t = 1.0 / static_cast<double>(t_count);
  for (Index i = 0; i < n; ++i) {
    const Index r0 = i * t_count;
    y_bar(i) = ds.y_stacked().segment(r0, t_count).sum() * inv_t;
    design(i, 0) = 1.0;
    for (Index j = 0; j < k; ++j) design(i, j + 1) = ds.x_stacked().col(j).segment(r0, t_count).sum() * inv_t;
  }
  const auto between = solve_least_squares(design, y_bar);
  const double s2_between = between.residuals.squaredNorm() / static_cast<double>(n - k - 1);

  VarianceComponents vc;
  vc.sigma2_eps = sigma2_eps;
  vc.sigma2_alpha = std::max(0.0, s2_between - sigma2_eps / static_cast<double>(t_count));
  // A perfect within fit leaves s2_eps = 0; use the limit of theta instead of failing.
  if (vc.sigma2_eps > 0.0) {
    vc.theta = compute_theta(vc.sigma2_eps, vc.sigma2_alpha, t_count);
  } else {
    vc.theta = vc.sigma2_alpha > 0.0 ? 1.0 : 0.0;
  }
  return vc;
}

EstimateResult fit_random_effects(const PanelDataset& ds, const RandomEffectsOptions& options) {
  VarianceComponents vc = estimate_variance_components(ds);
  if (options.forced_theta) vc.theta = *options.forced_theta;

  const auto tp = quasi_demean(ds, vc.theta);
  const auto fit = solve_least_squares(tp.x, tp.y);
  auto res = detail::make_result(Method::RandomEffects, ds.n_units(), ds.n_periods(), tp.y, fit.beta, fit.residuals);
  res.sigma2_eps = vc.sigma2_eps;
  res.sigma2_alpha = vc.sigma2_alpha;
  res.cov_beta = vc.sigma2_eps * fit.gram_inverse;
  res.components = vc;
  return res;
}

}  // namespace panelspec
