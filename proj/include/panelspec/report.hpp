#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "panelspec/estimators.hpp"
#include "panelspec/inference.hpp"
#include "panelspec/mcstudy.hpp"
#include "panelspec/panel.hpp"
#include "panelspec/wle.hpp"

// Machine-readable projections of results. The JSON layouts are described by
// schema/panelspec-output.schema.json.
namespace panelspec::report {

nlohmann::json estimate_json(const EstimateResult& res, const PanelDataset& ds);

nlohmann::json test_json(const TestResult& t);

// One study together with the configuration that produced it.
struct StudyRecord {
  DgpConfig dgp;
  ContaminationConfig contamination;
  WleConfig wle;
  std::vector<double> gamma_grid;
  std::size_t s = 0;
  StudyResult result;
};

nlohmann::json study_json(const StudyRecord& record, bool include_statistics = true);

nlohmann::json simulate_document(const std::vector<StudyRecord>& records, bool include_statistics = true);

// Header: n,t,hypothesis,contamination,m,test,gamma,rejection_rate,s,failures
void write_study_csv(std::ostream& out, const std::vector<StudyRecord>& records);

// Coefficient table: name,estimate,std_error
void write_estimate_csv(std::ostream& out, const EstimateResult& res, const PanelDataset& ds);

}  // namespace panelspec::report
