#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "panelspec/inference.hpp"
#include "panelspec/panel.hpp"
#include "panelspec/rng.hpp"
#include "panelspec/wle.hpp"

namespace panelspec {

inline Eigen::VectorXd default_beta() { return Eigen::Vector2d(1.0, -1.5); }
inline Eigen::VectorXd default_tau() { return Eigen::Vector2d(1.0, 1.0); }

struct NullHypothesis {};

// Individual effects alpha_i = mean_t(x_it' tau) + eta_i.
struct AlternativeHypothesis {
  Eigen::VectorXd tau = default_tau();
};

using Hypothesis = std::variant<NullHypothesis, AlternativeHypothesis>;

struct DgpConfig {
  Index n_units = 100;
  Index n_periods = 4;
  Eigen::VectorXd beta = default_beta();
  Hypothesis hypothesis = NullHypothesis{};
  std::uint64_t seed = 1;

  // Throws PanelError(InvalidConfig).
  void validate() const;
};

struct NoContamination {};

// m cells anywhere in the panel get y ~ U(low, high).
struct RandomVertical {
  double low = 10.0;
  double high = 35.0;
};

// Blocks of ceil(T/2) consecutive periods inside randomly chosen units get y ~ U(low, high).
struct ConcentratedVertical {
  double low = 17.0;
  double high = 18.0;
};

using ContaminationScheme = std::variant<NoContamination, RandomVertical, ConcentratedVertical>;

struct ContaminationConfig {
  ContaminationScheme scheme = NoContamination{};
  Index n_outliers = 0;

  // Throws PanelError(TooManyOutliers / InvalidConfig) for a panel of the given shape.
  void validate(Index n_units, Index n_periods) const;
};

// Draw order within a stream: all regressors (unit-major, regressor fastest),
// then one effect draw per unit, then one idiosyncratic draw per cell.
PanelDataset generate_null(const DgpConfig& cfg, RandomStream& stream);
PanelDataset generate_alternative(const DgpConfig& cfg, RandomStream& stream);
// Dispatches on cfg.hypothesis.
PanelDataset generate(const DgpConfig& cfg, RandomStream& stream);

// Distinct cells chosen by a partial Fisher-Yates shuffle, then one uniform per chosen cell.
PanelDataset contaminate_random(const PanelDataset& ds, const ContaminationConfig& cc, RandomStream& stream);

// Units are visited in a random order; each gets a block of b = ceil(T/2)
// consecutive cells at a random start, the last one a shorter block so that
// exactly m cells are replaced.
PanelDataset contaminate_concentrated(const PanelDataset& ds, const ContaminationConfig& cc, RandomStream& stream);

// Dispatches on cc.scheme; NoContamination returns the input unchanged.
PanelDataset contaminate(const PanelDataset& ds, const ContaminationConfig& cc, RandomStream& stream);

struct TestSeries {
  TestKind kind = TestKind::Hausman;
  std::vector<double> rejection_rates;  // aligned with gamma_grid
  std::vector<double> statistics;       // one per successful replication, in replication order
  std::size_t repaired = 0;             // replications whose covariance difference needed repair
};

struct StudyResult {
  std::vector<double> gamma_grid;
  std::vector<TestSeries> tests;  // Hausman, then WeightedHausman
  std::size_t s_replications = 0;
  std::size_t failures = 0;

  const TestSeries& series(TestKind kind) const;
  double rejection_rate(TestKind kind, double gamma) const;
};

struct StudyOptions {
  // Worker threads; 0 picks hardware concurrency.
  unsigned threads = 1;
};

// Replication r draws from RandomStream::for_replication(dgp.seed, r):
// data first, contamination after. Results do not depend on the thread count.
StudyResult run_study(const DgpConfig& dgp, const ContaminationConfig& cc, std::size_t s,
                      const std::vector<double>& gamma_grid, const WleConfig& wle_cfg,
                      const StudyOptions& options = {});

}  // namespace panelspec
