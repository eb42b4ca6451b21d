#include "panelspec/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <optional>
#include <sstream>
#include <unordered_set>

#include "panelspec/errors.hpp"
#include "number_format.hpp"

namespace panelspec {

namespace {

std::vector<std::string> default_names(Index k) {
  std::vector<std::string> names;
  for (Index j = 0; j < k; ++j) names.push_back("x" + std::to_string(j + 1));
  return names;
}

template <class Labels>
void require_distinct(const Labels& labels, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) {
      throw PanelError(ErrorKind::DuplicateCell, std::string("duplicate ") + what + " label '" + l + "'");
    }
  }
}

std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Splits one CSV record. Supports double-quoted fields with "" escapes.
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

// Labels sort numerically when every label is numeric, lexicographically otherwise.
void natural_sort(std::vector<std::string>& labels) {
  const bool all_numeric =
      std::all_of(labels.begin(), labels.end(), [](const std::string& l) { return parse_number(l).has_value(); });
  if (all_numeric) {
    std::stable_sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
      return *parse_number(a) < *parse_number(b);
    });
  } else {
    std::sort(labels.begin(), labels.end());
  }
}

}  // namespace

PanelDataset::PanelDataset(std::vector<std::string> unit_ids, std::vector<std::string> time_ids,
                           Eigen::VectorXd y_stacked, Eigen::MatrixXd x_stacked,
                           std::vector<std::string> regressor_names)
    : unit_ids_(std::move(unit_ids)),
      time_ids_(std::move(time_ids)),
      names_(std::move(regressor_names)),
      y_(std::move(y_stacked)),
      x_(std::move(x_stacked)) {
  const Index n = n_units();
  const Index t = n_periods();
  const Index k = x_.cols();
  if (n < 2 || t < 2) {
    throw PanelError(ErrorKind::TooFewUnitsOrPeriods,
                     "need N >= 2 and T >= 2, got N=" + std::to_string(n) + " T=" + std::to_string(t));
  }
  if (k < 1) throw PanelError(ErrorKind::TooFewUnitsOrPeriods, "need at least one regressor");
  if (n * (t - 1) <= k) {
    throw PanelError(ErrorKind::TooFewUnitsOrPeriods,
                     "within estimator not identified: N(T-1)=" + std::to_string(n * (t - 1)) +
                         " <= K=" + std::to_string(k));
  }
  if (y_.size() != n * t || x_.rows() != n * t) {
    throw PanelError(ErrorKind::DimensionMismatch, "stacked arrays must have N*T rows");
  }
  if (names_.empty()) names_ = default_names(k);
  if (static_cast<Index>(names_.size()) != k) {
    throw PanelError(ErrorKind::DimensionMismatch, "regressor name count differs from K");
  }
  require_distinct(unit_ids_, "unit");
  require_distinct(time_ids_, "time");
  if (!y_.allFinite() || !x_.allFinite()) {
    throw PanelError(ErrorKind::NonNumericValue, "non-finite value in panel");
  }
  for (Index j = 0; j < k; ++j) {
    if ((x_.col(j).array() == x_(0, j)).all()) {
      throw PanelError(ErrorKind::InterceptColumn,
                       "regressor '" + names_[static_cast<std::size_t>(j)] +
                           "' is constant over all observations; intercepts are not accepted");
    }
  }
}

Eigen::MatrixXd PanelDataset::y_matrix() const {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(y_.data(), n_units(), n_periods());
}

PanelDataset PanelDataset::with_response(Eigen::VectorXd y_stacked) const {
  return PanelDataset(unit_ids_, time_ids_, std::move(y_stacked), x_, names_);
}

bool operator==(const PanelDataset& a, const PanelDataset& b) {
  return a.unit_ids_ == b.unit_ids_ && a.time_ids_ == b.time_ids_ && a.names_ == b.names_ &&
         a.y_.size() == b.y_.size() && a.x_.rows() == b.x_.rows() && a.x_.cols() == b.x_.cols() &&
         a.y_ == b.y_ && a.x_ == b.x_;
}

PanelDataset load_long_csv(const std::filesystem::path& path, const ColumnSchema& schema) {
  std::ifstream in(path);
  if (!in) throw PanelError(ErrorKind::Io, "cannot open '" + path.string() + "'");
  return parse_long_csv(in, schema);
}

PanelDataset parse_long_csv(std::istream& in, const ColumnSchema& schema) {
  if (schema.unit_col.empty() || schema.time_col.empty() || schema.y_col.empty() || schema.x_cols.empty()) {
    throw PanelError(ErrorKind::InvalidSchema, "schema needs unit, time, response and >= 1 regressor column");
  }
  {
    std::vector<std::string> all{schema.unit_col, schema.time_col, schema.y_col};
    all.insert(all.end(), schema.x_cols.begin(), schema.x_cols.end());
    std::unordered_set<std::string> seen;
    for (const auto& c : all) {
      if (!seen.insert(c).second) throw PanelError(ErrorKind::InvalidSchema, "column '" + c + "' named twice");
    }
  }

  std::string line;
  if (!std::getline(in, line)) throw PanelError(ErrorKind::Io, "empty input, no header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_record(line);
  for (auto& h : header) h = trim(h);

  auto column = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw PanelError(ErrorKind::MissingColumn, "column '" + name + "' not in header");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t unit_idx = column(schema.unit_col);
  const std::size_t time_idx = column(schema.time_col);
  const std::size_t y_idx = column(schema.y_col);
  std::vector<std::size_t> x_idx;
  for (const auto& c : schema.x_cols) x_idx.push_back(column(c));
  const std::size_t k = x_idx.size();

  struct Cell {
    double y;
    std::vector<double> x;
  };
  std::set<std::string> unit_seen;
  std::set<std::string> time_seen;
  std::map<std::pair<std::string, std::string>, Cell> cells;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_record(line);
    if (fields.size() != header.size()) {
      throw PanelError(ErrorKind::NonNumericValue, "line " + std::to_string(line_no) + " has " +
                                                       std::to_string(fields.size()) + " fields, header has " +
                                                       std::to_string(header.size()));
    }
    std::string unit = trim(fields[unit_idx]);
    std::string time = trim(fields[time_idx]);
    auto value = [&](std::size_t idx, const std::string& col) {
      auto v = parse_number(fields[idx]);
      if (!v) {
        throw PanelError(ErrorKind::NonNumericValue, "column '" + col + "' at (" + unit + ", " + time + "): '" +
                                                         fields[idx] + "' is not a number");
      }
      return *v;
    };
    Cell cell{value(y_idx, schema.y_col), {}};
    for (std::size_t j = 0; j < k; ++j) cell.x.push_back(value(x_idx[j], schema.x_cols[j]));

    unit_seen.insert(unit);
    time_seen.insert(time);
    if (!cells.emplace(std::make_pair(unit, time), std::move(cell)).second) {
      throw PanelError(ErrorKind::DuplicateCell, "cell (" + unit + ", " + time + ") appears more than once");
    }
  }

  // Both label sets are canonically ordered so the result does not depend on row order.
  std::vector<std::string> units(unit_seen.begin(), unit_seen.end());
  natural_sort(units);
  std::vector<std::string> times(time_seen.begin(), time_seen.end());
  natural_sort(times);

  if (units.size() < 2 || times.size() < 2) {
    throw PanelError(ErrorKind::TooFewUnitsOrPeriods, "found " + std::to_string(units.size()) + " units and " +
                                                          std::to_string(times.size()) + " periods");
  }

  const Index n = static_cast<Index>(units.size());
  const Index t_count = static_cast<Index>(times.size());
  Eigen::VectorXd y(n * t_count);
  Eigen::MatrixXd x(n * t_count, static_cast<Index>(k));
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < t_count; ++t) {
      const auto& u = units[static_cast<std::size_t>(i)];
      const auto& tm = times[static_cast<std::size_t>(t)];
      auto it = cells.find({u, tm});
      if (it == cells.end()) {
        throw PanelError(ErrorKind::MissingCell, "cell (" + u + ", " + tm + ") is missing; panel is unbalanced");
      }
      const Index r = i * t_count + t;
      y(r) = it->second.y;
      for (std::size_t j = 0; j < k; ++j) x(r, static_cast<Index>(j)) = it->second.x[j];
    }
  }
  return PanelDataset(std::move(units), std::move(times), std::move(y), std::move(x), schema.x_cols);
}

void write_long_csv(std::ostream& out, const PanelDataset& ds) {
  out << "unit,time,y";
  for (const auto& name : ds.regressor_names()) out << ',' << name;
  out << '\n';
  for (Index i = 0; i < ds.n_units(); ++i) {
    for (Index t = 0; t < ds.n_periods(); ++t) {
      out << ds.unit_ids()[static_cast<std::size_t>(i)] << ',' << ds.time_ids()[static_cast<std::size_t>(t)] << ','
          << detail::format_double(ds.y(i, t));
      for (Index k = 0; k < ds.n_regressors(); ++k) out << ',' << detail::format_double(ds.x(i, t, k));
      out << '\n';
    }
  }
}

StackedPanel to_stacked(const PanelDataset& ds) { return {ds.y_stacked(), ds.x_stacked()}; }

PanelDataset from_stacked(const StackedPanel& stacked, std::vector<std::string> unit_ids,
                          std::vector<std::string> time_ids, std::vector<std::string> regressor_names) {
  return PanelDataset(std::move(unit_ids), std::move(time_ids), stacked.y, stacked.x, std::move(regressor_names));
}

}  // namespace panelspec
