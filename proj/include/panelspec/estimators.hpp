#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "panelspec/panel.hpp"

namespace panelspec {

enum class Method { PooledOLS, FixedEffects, RandomEffects, WeightedFixedEffects };

std::string_view to_string(Method m) noexcept;

struct VarianceComponents {
  double sigma2_eps = 0.0;
  double sigma2_alpha = 0.0;  // clamped at 0
  double theta = 0.0;
};

struct EstimateResult {
  Method method = Method::PooledOLS;
  Eigen::VectorXd beta;
  Eigen::MatrixXd cov_beta;
  double sigma2_eps = 0.0;
  double sigma2_alpha = 0.0;
  // N x T residuals on the scale the method fits (raw, within, or quasi-demeaned).
  Eigen::MatrixXd residuals;
  double rss = 0.0;
  // Total sum of squares of the fitted response around its mean, same scale as residuals.
  double tss = 0.0;
  double r_squared = 0.0;
  // Final observation weights, N x T. WeightedFixedEffects only.
  std::optional<Eigen::MatrixXd> weights;
  // Residual scale used by the weight function. WeightedFixedEffects only.
  std::optional<double> sigma_nu;
  // Variance components that produced theta. RandomEffects only.
  std::optional<VarianceComponents> components;
  bool converged = true;
  int iterations = 0;

  Index n_regressors() const noexcept { return beta.size(); }
  Eigen::VectorXd std_errors() const { return cov_beta.diagonal().cwiseMax(0.0).cwiseSqrt(); }
};

EstimateResult fit_pooled_ols(const PanelDataset& ds);

EstimateResult fit_fixed_effects(const PanelDataset& ds);

// Within/between moment estimator:
//   s2_eps   = RSS_within / (N(T-1) - K)
//   s2_alpha = max(0, RSS_between / (N - K - 1) - s2_eps / T)
// where the between regression fits unit means of y on an intercept and unit means of x.
VarianceComponents estimate_variance_components(const PanelDataset& ds);

struct RandomEffectsOptions {
  // Overrides the estimated theta. Test hook: theta = 1 reproduces the within fit.
  std::optional<double> forced_theta;
};

EstimateResult fit_random_effects(const PanelDataset& ds, const RandomEffectsOptions& options = {});

namespace detail {
// Packages a least-squares fit on a stacked design into an EstimateResult.
EstimateResult make_result(Method method, Index n_units, Index n_periods, const Eigen::VectorXd& y_fit,
                           const Eigen::VectorXd& beta, const Eigen::VectorXd& residuals);
}  // namespace detail

}  // namespace panelspec
