#include "panelspec/report.hpp"

#include <ostream>
#include <string>

#include "number_format.hpp"

namespace panelspec::report {

namespace {

using nlohmann::json;

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string hypothesis_name(const Hypothesis& h) {
  return std::holds_alternative<NullHypothesis>(h) ? "null" : "alt";
}

std::string scheme_name(const ContaminationScheme& s) {
  if (std::holds_alternative<RandomVertical>(s)) return "random";
  if (std::holds_alternative<ConcentratedVertical>(s)) return "concentrated";
  return "none";
}

json contamination_json(const ContaminationConfig& cc) {
  json out{{"scheme", scheme_name(cc.scheme)}, {"m", cc.n_outliers}};
  if (const auto* r = std::get_if<RandomVertical>(&cc.scheme)) {
    out["low"] = r->low;
    out["high"] = r->high;
  } else if (const auto* c = std::get_if<ConcentratedVertical>(&cc.scheme)) {
    out["low"] = c->low;
    out["high"] = c->high;
  }
  return out;
}

}  // namespace

json estimate_json(const EstimateResult& res, const PanelDataset& ds) {
  json out;
  out["method"] = std::string(to_string(res.method));
  out["n_units"] = ds.n_units();
  out["n_periods"] = ds.n_periods();
  out["n_regressors"] = ds.n_regressors();
  out["regressors"] = ds.regressor_names();
  out["beta"] = vector_json(res.beta);
  out["std_errors"] = vector_json(res.std_errors());
  out["cov_beta"] = matrix_json(res.cov_beta);
  out["sigma2_eps"] = res.sigma2_eps;
  out["sigma2_alpha"] = res.sigma2_alpha;
  out["theta"] = res.components ? json(res.components->theta) : json(nullptr);
  out["sigma_nu"] = optional_number(res.sigma_nu);
  out["rss"] = res.rss;
  out["r_squared"] = res.r_squared;
  out["converged"] = res.converged;
  out["iterations"] = res.iterations;
  out["weights"] = res.weights ? matrix_json(*res.weights) : json(nullptr);
  return out;
}

json test_json(const TestResult& t) {
  return json{{"kind", std::string(to_string(t.kind))},
              {"statistic", t.statistic},
              {"df", t.df},
              {"p_value", t.p_value},
              {"repaired", t.repaired},
              {"q", vector_json(t.q)},
              {"m_matrix", matrix_json(t.m_matrix)}};
}

json study_json(const StudyRecord& record, bool include_statistics) {
  json config{{"hypothesis", hypothesis_name(record.dgp.hypothesis)},
              {"n_units", record.dgp.n_units},
              {"n_periods", record.dgp.n_periods},
              {"beta", vector_json(record.dgp.beta)},
              {"contamination", contamination_json(record.contamination)},
              {"s", record.s},
              {"seed", record.dgp.seed},
              {"kappa", record.wle.kappa}};
  if (const auto* alt = std::get_if<AlternativeHypothesis>(&record.dgp.hypothesis)) {
    config["tau"] = vector_json(alt->tau);
  } else {
    config["tau"] = nullptr;
  }

  json tests = json::array();
  for (const auto& series : record.result.tests) {
    json t{{"kind", std::string(to_string(series.kind))},
           {"rejection_rates", series.rejection_rates},
           {"repaired", series.repaired}};
    if (include_statistics) t["statistics"] = series.statistics;
    tests.push_back(std::move(t));
  }
  return json{{"config", std::move(config)},
              {"gamma_grid", record.result.gamma_grid},
              {"s_replications", record.result.s_replications},
              {"failures", record.result.failures},
              {"tests", std::move(tests)}};
}

json simulate_document(const std::vector<StudyRecord>& records, bool include_statistics) {
  json studies = json::array();
  for (const auto& r : records) studies.push_back(study_json(r, include_statistics));
  return json{{"command", "simulate"}, {"studies", std::move(studies)}};
}

void write_study_csv(std::ostream& out, const std::vector<StudyRecord>& records) {
  out << "n,t,hypothesis,contamination,m,test,gamma,rejection_rate,s,failures\n";
  for (const auto& r : records) {
    for (const auto& series : r.result.tests) {
      for (std::size_t g = 0; g < r.result.gamma_grid.size(); ++g) {
        out << r.dgp.n_units << ',' << r.dgp.n_periods << ',' << hypothesis_name(r.dgp.hypothesis) << ','
            << scheme_name(r.contamination.scheme) << ',' << r.contamination.n_outliers << ','
            << to_string(series.kind) << ',' << detail::format_double(r.result.gamma_grid[g]) << ','
            << detail::format_double(series.rejection_rates[g]) << ',' << r.result.s_replications << ','
            << r.result.failures << '\n';
      }
    }
  }
}

void write_estimate_csv(std::ostream& out, const EstimateResult& res, const PanelDataset& ds) {
  out << "name,estimate,std_error\n";
  const Eigen::VectorXd se = res.std_errors();
  for (Index k = 0; k < res.beta.size(); ++k) {
    out << ds.regressor_names()[static_cast<std::size_t>(k)] << ',' << detail::format_double(res.beta(k)) << ','
        << detail::format_double(se(k)) << '\n';
  }
}

}  // namespace panelspec::report
