#include "panelspec/wle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "panelspec/errors.hpp"
#include "panelspec/kernels.hpp"
#include "panelspec/least_squares.hpp"
#include "panelspec/transforms.hpp"

namespace panelspec {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

void require_positive_bandwidth(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw PanelError(ErrorKind::NonpositiveBandwidth, "bandwidth must be positive, got " + std::to_string(h));
  }
}

void require_positive_scale(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw PanelError(ErrorKind::NonpositiveScale, "scale must be positive, got " + std::to_string(sigma));
  }
}

std::span<const double> as_span(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace

void WleConfig::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw PanelError(ErrorKind::InvalidConfig, "kappa must be positive, got " + std::to_string(kappa));
  }
  if (!(tolerance > 0.0)) {
    throw PanelError(ErrorKind::InvalidConfig, "tolerance must be positive, got " + std::to_string(tolerance));
  }
  if (max_iterations < 1) {
    throw PanelError(ErrorKind::InvalidConfig, "max_iterations must be >= 1");
  }
}

Eigen::VectorXd kernel_density_at(std::span<const double> points, std::span<const double> eval, double h) {
  if (points.empty()) throw PanelError(ErrorKind::EmptySample, "kernel density needs at least one point");
  require_positive_bandwidth(h);
  Eigen::VectorXd out(static_cast<Index>(eval.size()));
  kernels::gaussian_kernel_sums(points, eval, 1.0 / h, {out.data(), eval.size()});
  out *= kInvSqrt2Pi / (static_cast<double>(points.size()) * h);
  return out;
}

Eigen::VectorXd smoothed_model_density(std::span<const double> eval, double sigma_nu, double h) {
  require_positive_scale(sigma_nu);
  if (!(h >= 0.0) || !std::isfinite(h)) {
    throw PanelError(ErrorKind::NonpositiveBandwidth, "bandwidth must be nonnegative, got " + std::to_string(h));
  }
  const double s = std::sqrt(sigma_nu * sigma_nu + h * h);
  Eigen::VectorXd out(static_cast<Index>(eval.size()));
  for (std::size_t j = 0; j < eval.size(); ++j) {
    const double z = eval[j] / s;
    out(static_cast<Index>(j)) = kInvSqrt2Pi / s * std::exp(-0.5 * z * z);
  }
  return out;
}

Eigen::VectorXd pearson_residuals(std::span<const double> residuals, double sigma_nu, const WleConfig& cfg) {
  if (residuals.size() < 2) {
    throw PanelError(ErrorKind::EmptySample, "Pearson residuals need at least two residuals");
  }
  cfg.validate();
  require_positive_scale(sigma_nu);
  const double h = cfg.kappa * sigma_nu;
  const Eigen::VectorXd f = kernel_density_at(residuals, residuals, h);
  const Eigen::VectorXd m = smoothed_model_density(residuals, sigma_nu, h);
  Eigen::VectorXd delta(f.size());
  for (Index i = 0; i < f.size(); ++i) {
    delta(i) = m(i) > 0.0 ? f(i) / m(i) - 1.0 : std::numeric_limits<double>::infinity();
  }
  return delta;
}

double raf_hellinger(double delta) {
  if (!(delta > -1.0)) {
    throw PanelError(ErrorKind::DeltaOutOfRange, "Pearson residual must exceed -1, got " + std::to_string(delta));
  }
  return 2.0 * (std::sqrt(delta + 1.0) - 1.0);
}

double raf_value(double delta, Raf raf) {
  switch (raf) {
    case Raf::Hellinger: return raf_hellinger(delta);
    case Raf::Identity:
      if (!(delta > -1.0)) {
        throw PanelError(ErrorKind::DeltaOutOfRange, "Pearson residual must exceed -1, got " + std::to_string(delta));
      }
      return delta;
  }
  return delta;
}

double weight_function(double delta, Raf raf) {
  const double a = raf_value(delta, raf);
  if (raf == Raf::Identity) return 1.0;
  if (std::isinf(delta)) return 0.0;
  return std::min(1.0, std::max(0.0, a + 1.0) / (delta + 1.0));
}

WeightState compute_weight_state(std::span<const double> residuals, double sigma_nu, const WleConfig& cfg) {
  WeightState state;
  state.residuals = Eigen::Map<const Eigen::VectorXd>(residuals.data(), static_cast<Index>(residuals.size()));
  state.sigma_nu = sigma_nu;
  state.pearson = pearson_residuals(residuals, sigma_nu, cfg);
  state.weights.resize(state.pearson.size());
  for (Index i = 0; i < state.pearson.size(); ++i) state.weights(i) = weight_function(state.pearson(i), cfg.raf);
  return state;
}

EstimateResult fit_weighted_fixed_effects(const PanelDataset& ds, const WleConfig& cfg) {
  cfg.validate();
  const Index n_units = ds.n_units();
  const Index t_count = ds.n_periods();
  const Index k = ds.n_regressors();
  const Index n = ds.n_obs();
  const double k_share = static_cast<double>(k) / static_cast<double>(n);
  const double within_share = static_cast<double>(n_units + k) / static_cast<double>(n);

  const auto tp = within_transform(ds);
  const auto start = solve_least_squares(tp.x, tp.y);

  Eigen::VectorXd beta = start.beta;
  Eigen::VectorXd residuals = start.residuals;
  // Weighted scale update with unit weights.
  double sigma2_nu = residuals.squaredNorm() / (static_cast<double>(n) * (1.0 - k_share));

  Eigen::VectorXd weights;
  Eigen::MatrixXd gram_inverse;
  double weight_sum = 0.0;
  bool converged = false;
  int iterations = 0;

  while (iterations < cfg.max_iterations) {
    ++iterations;
    const WeightState state = compute_weight_state(as_span(residuals), std::sqrt(sigma2_nu), cfg);
    weights = state.weights;
    if (cfg.granularity == WeightGranularity::Unit) {
      for (Index i = 0; i < n_units; ++i) {
        auto block = weights.segment(i * t_count, t_count);
        block.setConstant(block.mean());
      }
    }
    weight_sum = weights.sum();
    if (!(weight_sum > static_cast<double>(k))) {
      throw PanelError(ErrorKind::DegenerateWeights,
                       "total weight " + std::to_string(weight_sum) + " <= K=" + std::to_string(k));
    }

    const auto fit = solve_least_squares(tp.x, tp.y, weights);
    residuals = fit.residuals;
    gram_inverse = fit.gram_inverse;
    sigma2_nu = (weights.array() * residuals.array().square()).sum() / (weight_sum * (1.0 - k_share));

    const double change = (fit.beta - beta).lpNorm<Eigen::Infinity>() / std::max(1.0, beta.lpNorm<Eigen::Infinity>());
    beta = fit.beta;
    if (change < cfg.tolerance) {
      converged = true;
      break;
    }
  }

  auto res = detail::make_result(Method::WeightedFixedEffects, n_units, t_count, tp.y, beta, residuals);
  res.sigma_nu = std::sqrt(sigma2_nu);
  res.sigma2_eps = (weights.array() * residuals.array().square()).sum() / (weight_sum * (1.0 - within_share));
  res.cov_beta = res.sigma2_eps * gram_inverse;
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  res.weights = Eigen::MatrixXd(Eigen::Map<const RowMajor>(weights.data(), n_units, t_count));
  res.converged = converged;
  res.iterations = iterations;
  return res;
}

}  // namespace panelspec
