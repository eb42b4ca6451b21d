#pragma once

#include <optional>

#include <Eigen/Dense>

namespace panelspec {

// Relative pivot threshold below which a design is declared rank deficient.
inline constexpr double kRankTolerance = 1e-10;

struct LeastSquaresFit {
  Eigen::VectorXd beta;
  Eigen::MatrixXd gram_inverse;  // (X'WX)^-1, symmetric
  Eigen::VectorXd residuals;     // y - X beta, unweighted
};

// Column-pivoted QR solve of min sum_i w_i (y_i - x_i' beta)^2.
// Throws PanelError(RankDeficientDesign) when an R diagonal falls below
// kRankTolerance times the largest one.
LeastSquaresFit solve_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                    const std::optional<Eigen::VectorXd>& weights = std::nullopt);

}  // namespace panelspec
