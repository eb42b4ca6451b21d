#include "panelspec/inference.hpp"

#include <cmath>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "panelspec/errors.hpp"

namespace panelspec {

namespace {

constexpr double kEigenFloor = 1e-12;

TestResult compare(TestKind kind, const EstimateResult& robust, Method robust_method, const EstimateResult& re) {
  if (robust.method != robust_method) {
    throw PanelError(ErrorKind::MethodMismatch,
                     "first estimate must be '" + std::string(to_string(robust_method)) + "', got '" +
                         std::string(to_string(robust.method)) + "'");
  }
  if (re.method != Method::RandomEffects) {
    throw PanelError(ErrorKind::MethodMismatch,
                     "second estimate must be 're', got '" + std::string(to_string(re.method)) + "'");
  }
  const Index k = robust.beta.size();
  if (re.beta.size() != k || robust.cov_beta.rows() != k || robust.cov_beta.cols() != k || re.cov_beta.rows() != k ||
      re.cov_beta.cols() != k || k == 0) {
    throw PanelError(ErrorKind::DimensionMismatch, "estimates have different coefficient counts");
  }

  TestResult out;
  out.kind = kind;
  out.df = static_cast<int>(k);
  out.q = robust.beta - re.beta;
  const auto form = repaired_quadratic_form(out.q, robust.cov_beta - re.cov_beta);
  out.statistic = form.statistic;
  out.m_matrix = form.m_used;
  out.repaired = form.repaired;
  out.p_value = chi_square_sf(out.statistic, out.df);
  return out;
}

}  // namespace

std::string_view to_string(TestKind k) noexcept {
  switch (k) {
    case TestKind::Hausman: return "hausman";
    case TestKind::WeightedHausman: return "weighted";
  }
  return "unknown";
}

QuadraticForm repaired_quadratic_form(const Eigen::VectorXd& q, const Eigen::MatrixXd& m) {
  if (m.rows() != q.size() || m.cols() != q.size()) {
    throw PanelError(ErrorKind::DimensionMismatch, "covariance difference must be K x K");
  }
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  Eigen::VectorXd lambda = eig.eigenvalues();
  const double top = lambda.maxCoeff();
  const double floor = kEigenFloor * (top > 0.0 ? top : 1.0);

  QuadraticForm out;
  for (Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < floor) {
      lambda(i) = floor;
      out.repaired = true;
    }
  }
  const Eigen::MatrixXd& v = eig.eigenvectors();
  const Eigen::VectorXd proj = v.transpose() * q;
  out.statistic = (proj.array().square() / lambda.array()).sum();
  out.m_used = v * lambda.asDiagonal() * v.transpose();
  return out;
}

TestResult hausman_test(const EstimateResult& fe, const EstimateResult& re) {
  return compare(TestKind::Hausman, fe, Method::FixedEffects, re);
}

TestResult weighted_hausman_test(const EstimateResult& wfe, const EstimateResult& re) {
  return compare(TestKind::WeightedHausman, wfe, Method::WeightedFixedEffects, re);
}

double chi_square_sf(double x, int df) {
  if (!(x >= 0.0)) throw PanelError(ErrorKind::NegativeArgument, "chi-square argument must be >= 0");
  if (df < 1) throw PanelError(ErrorKind::InvalidConfig, "degrees of freedom must be positive");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * static_cast<double>(df), 0.5 * x);
}

FitStatistics fit_statistics(std::span<const double> residuals, std::span<const double> response) {
  if (residuals.size() != response.size()) {
    throw PanelError(ErrorKind::DimensionMismatch, "residuals and response differ in length");
  }
  double rss = 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    rss += residuals[i] * residuals[i];
    mean += response[i];
  }
  mean /= static_cast<double>(response.size());
  double tss = 0.0;
  for (const double v : response) tss += (v - mean) * (v - mean);
  if (!(tss > 0.0)) throw PanelError(ErrorKind::ZeroTotalVariation, "response has no variation");
  return {rss, 1.0 - rss / tss};
}

FitStatistics fit_statistics(const EstimateResult& res) {
  if (res.residuals.size() == 0) throw PanelError(ErrorKind::DimensionMismatch, "estimate has no residuals");
  if (!(res.tss > 0.0)) throw PanelError(ErrorKind::ZeroTotalVariation, "response has no variation");
  const double rss = res.residuals.squaredNorm();
  return {rss, 1.0 - rss / res.tss};
}

}  // namespace panelspec
