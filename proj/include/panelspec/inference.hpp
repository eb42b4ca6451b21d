#pragma once

#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "panelspec/estimators.hpp"

namespace panelspec {

enum class TestKind { Hausman, WeightedHausman };

std::string_view to_string(TestKind k) noexcept;

struct TestResult {
  TestKind kind = TestKind::Hausman;
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  Eigen::VectorXd q;         // coefficient difference
  Eigen::MatrixXd m_matrix;  // covariance difference actually inverted
  bool repaired = false;     // an eigenvalue of the covariance difference was clamped
};

// q' M^- q under the eigenvalue repair policy: M is symmetrised, eigenvalues
// below 1e-12 * max(max eigenvalue, 1 if none positive) are raised to that
// floor, and the form is evaluated in the eigenbasis.
struct QuadraticForm {
  double statistic = 0.0;
  Eigen::MatrixXd m_used;
  bool repaired = false;
};

QuadraticForm repaired_quadratic_form(const Eigen::VectorXd& q, const Eigen::MatrixXd& m);

// Classical test: q = beta_fe - beta_re, M = cov_fe - cov_re, chi2 with K df.
TestResult hausman_test(const EstimateResult& fe, const EstimateResult& re);

// Robust variant: q = beta_wfe - beta_re, M = cov_wfe - cov_re.
TestResult weighted_hausman_test(const EstimateResult& wfe, const EstimateResult& re);

// P(X > x) for X ~ chi2(df).
double chi_square_sf(double x, int df);

struct FitStatistics {
  double rss = 0.0;
  double r_squared = 0.0;
};

// RSS of the residuals and R^2 = 1 - RSS / TSS, TSS taken around the mean of
// `response` (the fitted, possibly transformed, response).
FitStatistics fit_statistics(std::span<const double> residuals, std::span<const double> response);

// Same, using the residuals and TSS recorded in an estimate.
FitStatistics fit_statistics(const EstimateResult& res);

}  // namespace panelspec
