#pragma once

#include <Eigen/Dense>

#include "panelspec/panel.hpp"

namespace panelspec {

enum class TransformKind { Within, QuasiDemeaned };

// Transformed panel in the same stacked layout as PanelDataset.
struct TransformedPanel {
  Index n_units = 0;
  Index n_periods = 0;
  Eigen::VectorXd y;
  Eigen::MatrixXd x;
  TransformKind kind = TransformKind::Within;
  double theta = 1.0;
};

// y_it - mean_t(y_i), likewise for every regressor.
TransformedPanel within_transform(const PanelDataset& ds);

// y_it - theta * mean_t(y_i). theta = 0 is the identity, theta = 1 the within transform.
TransformedPanel quasi_demean(const PanelDataset& ds, double theta);

// theta = 1 - sqrt(s2_eps / (s2_eps + T s2_alpha)).
double compute_theta(double sigma2_eps, double sigma2_alpha, Index n_periods);

}  // namespace panelspec
