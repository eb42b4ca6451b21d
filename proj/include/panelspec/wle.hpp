#pragma once

#include <span>

#include <Eigen/Dense>

#include "panelspec/estimators.hpp"
#include "panelspec/panel.hpp"

namespace panelspec {

// Residual adjustment function.
enum class Raf {
  Hellinger,  // A(d) = 2 (sqrt(d + 1) - 1)
  Identity,   // A(d) = d; every weight is 1 and the fit reduces to ordinary least squares
};

// Level at which Pearson residuals are turned into weights.
enum class WeightGranularity {
  Observation,  // one weight per (unit, period) cell
  Unit,         // cell weights averaged within each unit
};

struct WleConfig {
  double kappa = 0.5;  // bandwidth h = kappa * sigma_nu
  int max_iterations = 50;
  double tolerance = 1e-6;  // on max|beta_k - beta_{k-1}| / max(1, max|beta_{k-1}|)
  Raf raf = Raf::Hellinger;
  WeightGranularity granularity = WeightGranularity::Observation;

  // Throws PanelError(InvalidConfig).
  void validate() const;
};

struct WeightState {
  Eigen::VectorXd residuals;
  double sigma_nu = 0.0;
  Eigen::VectorXd pearson;
  Eigen::VectorXd weights;
};

// Normal-kernel density estimate of `points` evaluated at `eval`.
Eigen::VectorXd kernel_density_at(std::span<const double> points, std::span<const double> eval, double h);

// N(0, sigma_nu^2) smoothed by a normal kernel of bandwidth h, i.e. the N(0, sigma_nu^2 + h^2) density.
Eigen::VectorXd smoothed_model_density(std::span<const double> eval, double sigma_nu, double h);

// delta_i = f*(r_i) / m*(r_i) - 1 with h = kappa * sigma_nu. A residual so far
// out that m* underflows gets delta = +inf.
Eigen::VectorXd pearson_residuals(std::span<const double> residuals, double sigma_nu, const WleConfig& cfg);

double raf_hellinger(double delta);
double raf_value(double delta, Raf raf);

// min{1, [A(delta) + 1]^+ / (delta + 1)}; delta = +inf maps to 0.
double weight_function(double delta, Raf raf = Raf::Hellinger);

// Pearson residuals and weights for one set of residuals.
WeightState compute_weight_state(std::span<const double> residuals, double sigma_nu, const WleConfig& cfg);

// Weighted-likelihood fixed-effects estimator: iteratively reweighted least
// squares on within-transformed data, starting from the ordinary within fit.
//
// On return, `weights` are the weights that define beta (beta solves the
// weighted normal equations with exactly those weights), `sigma_nu` is the
// weighted residual scale used by the weight function, and `sigma2_eps` is the
// same quantity rescaled to the idiosyncratic-error level:
//   sigma2_eps = sum w r^2 / (sum w * (1 - (N + K) / n)),
// which equals the within estimator's s2_eps when all weights are 1.
// cov_beta = sigma2_eps * (X'WX)^-1 on the within-transformed design.
//
// Non-convergence is reported through `converged`, not an exception.
EstimateResult fit_weighted_fixed_effects(const PanelDataset& ds, const WleConfig& cfg = {});

}  // namespace panelspec
