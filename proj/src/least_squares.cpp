#include "panelspec/least_squares.hpp"

#include <string>

#include "panelspec/errors.hpp"

namespace panelspec {

LeastSquaresFit solve_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                    const std::optional<Eigen::VectorXd>& weights) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = x.cols();
  if (y.size() != n || (weights && weights->size() != n)) {
    throw PanelError(ErrorKind::DimensionMismatch, "design, response and weights must share a row count");
  }
  if (n < k) {
    throw PanelError(ErrorKind::RankDeficientDesign,
                     "fewer observations (" + std::to_string(n) + ") than coefficients (" + std::to_string(k) + ")");
  }

  Eigen::MatrixXd xs = x;
  Eigen::VectorXd ys = y;
  if (weights) {
    const Eigen::ArrayXd root = weights->array().sqrt();
    xs.array().colwise() *= root;
    ys.array() *= root;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
  qr.setThreshold(kRankTolerance);
  if (qr.rank() < k) {
    throw PanelError(ErrorKind::RankDeficientDesign,
                     "design has numerical rank " + std::to_string(qr.rank()) + " < K=" + std::to_string(k));
  }

  LeastSquaresFit fit;
  fit.beta = qr.solve(ys);

  // X P = Q R  =>  (X'X)^-1 = P R^-1 R^-T P'
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd g = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation();
  Eigen::MatrixXd gram_inverse = perm * g * perm.transpose();
  fit.gram_inverse = 0.5 * (gram_inverse + gram_inverse.transpose());

  fit.residuals = y - x * fit.beta;
  return fit;
}

}  // namespace panelspec
