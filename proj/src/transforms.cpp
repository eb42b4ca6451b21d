#include "panelspec/transforms.hpp"

#include <cmath>
#include <string>

#include "panelspec/errors.hpp"

namespace panelspec {

namespace {

TransformedPanel demean(const PanelDataset& ds, double theta, TransformKind kind) {
  const Index n = ds.n_units();
  const Index t_count = ds.n_periods();
  const Index k = ds.n_regressors();
  const auto& y = ds.y_stacked();
  const auto& x = ds.x_stacked();

  TransformedPanel out{n, t_count, Eigen::VectorXd(y.size()), Eigen::MatrixXd(x.rows(), k), kind, theta};
  const double inv_t = 1.0 / static_cast<double>(t_count);
  for (Index i = 0; i < n; ++i) {
    const Index r0 = i * t_count;
    const double y_bar = y.segment(r0, t_count).sum() * inv_t;
    out.y.segment(r0, t_count).array() = y.segment(r0, t_count).array() - theta * y_bar;
    for (Index j = 0; j < k; ++j) {
      const double x_bar = x.col(j).segment(r0, t_count).sum() * inv_t;
      out.x.col(j).segment(r0, t_count).array() = x.col(j).segment(r0, t_count).array() - theta * x_bar;
    }
  }
  return out;
}

}  // namespace

TransformedPanel within_transform(const PanelDataset& ds) { return demean(ds, 1.0, TransformKind::Within); }

TransformedPanel quasi_demean(const PanelDataset& ds, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw PanelError(ErrorKind::ThetaOutOfRange, "theta must lie in [0, 1], got " + std::to_string(theta));
  }
  return demean(ds, theta, TransformKind::QuasiDemeaned);
}

double compute_theta(double sigma2_eps, double sigma2_alpha, Index n_periods) {
  if (!(sigma2_eps > 0.0)) {
    throw PanelError(ErrorKind::ZeroIdiosyncraticVariance,
                     "idiosyncratic variance must be positive, got " + std::to_string(sigma2_eps));
  }
  if (!(sigma2_alpha >= 0.0)) {
    throw PanelError(ErrorKind::InvalidConfig, "effect variance must be nonnegative");
  }
  if (n_periods < 1) throw PanelError(ErrorKind::InvalidConfig, "T must be positive");
  const double t = static_cast<double>(n_periods);
  return 1.0 - std::sqrt(sigma2_eps / (sigma2_eps + t * sigma2_alpha));
}

}  // namespace panelspec
