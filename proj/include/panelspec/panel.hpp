#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace panelspec {

using Index = Eigen::Index;

// Column names for long-format input: one row per (unit, time) cell.
struct ColumnSchema {
  std::string unit_col;
  std::string time_col;
  std::string y_col;
  std::vector<std::string> x_cols;
};

// Stacked (unit-major) representation: row i*T + t holds unit i at period t.
struct StackedPanel {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;
};

// Balanced panel of N units observed over T periods with K regressors.
//
// Storage is the stacked layout itself, so to_stacked() is a copy and the
// ordering contract cannot drift from the internal representation. The object
// is immutable after construction.
class PanelDataset {
 public:
  // Throws PanelError (TooFewUnitsOrPeriods, DuplicateCell, DimensionMismatch,
  // NonNumericValue, InterceptColumn) when an invariant does not hold.
  PanelDataset(std::vector<std::string> unit_ids, std::vector<std::string> time_ids,
               Eigen::VectorXd y_stacked, Eigen::MatrixXd x_stacked,
               std::vector<std::string> regressor_names = {});

  Index n_units() const noexcept { return static_cast<Index>(unit_ids_.size()); }
  Index n_periods() const noexcept { return static_cast<Index>(time_ids_.size()); }
  Index n_regressors() const noexcept { return x_.cols(); }
  Index n_obs() const noexcept { return y_.size(); }

  Index row(Index unit, Index period) const noexcept { return unit * n_periods() + period; }

  double y(Index unit, Index period) const { return y_(row(unit, period)); }
  double x(Index unit, Index period, Index k) const { return x_(row(unit, period), k); }

  const Eigen::VectorXd& y_stacked() const noexcept { return y_; }
  const Eigen::MatrixXd& x_stacked() const noexcept { return x_; }

  // N x T view of the response (row = unit).
  Eigen::MatrixXd y_matrix() const;

  const std::vector<std::string>& unit_ids() const noexcept { return unit_ids_; }
  const std::vector<std::string>& time_ids() const noexcept { return time_ids_; }
  const std::vector<std::string>& regressor_names() const noexcept { return names_; }

  // Same labels, new response values. Used by the contamination schemes.
  PanelDataset with_response(Eigen::VectorXd y_stacked) const;

  friend bool operator==(const PanelDataset& a, const PanelDataset& b);

 private:
  std::vector<std::string> unit_ids_;
  std::vector<std::string> time_ids_;
  std::vector<std::string> names_;
  Eigen::VectorXd y_;
  Eigen::MatrixXd x_;
};

PanelDataset load_long_csv(const std::filesystem::path& path, const ColumnSchema& schema);
PanelDataset parse_long_csv(std::istream& in, const ColumnSchema& schema);

// Writes the dataset back as long-format CSV with columns unit,time,y,<regressors>.
void write_long_csv(std::ostream& out, const PanelDataset& ds);

StackedPanel to_stacked(const PanelDataset& ds);
PanelDataset from_stacked(const StackedPanel& stacked, std::vector<std::string> unit_ids,
                          std::vector<std::string> time_ids,
                          std::vector<std::string> regressor_names = {});

}  // namespace panelspec
