#include "panelspec/mcstudy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "panelspec/errors.hpp"

namespace panelspec {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<std::string> numbered_labels(Index count) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index i = 1; i <= count; ++i) out.push_back(std::to_string(i));
  return out;
}

// Shared generator body; `tau` empty means the null design.
PanelDataset generate_impl(const DgpConfig& cfg, const Eigen::VectorXd* tau, RandomStream& stream) {
  cfg.validate();
  const Index n = cfg.n_units;
  const Index t_count = cfg.n_periods;
  const Index k = cfg.beta.size();

  Eigen::MatrixXd x(n * t_count, k);
  for (Index r = 0; r < n * t_count; ++r) {
    for (Index j = 0; j < k; ++j) x(r, j) = stream.normal();
  }
  Eigen::VectorXd alpha(n);
  for (Index i = 0; i < n; ++i) alpha(i) = stream.normal();
  if (tau != nullptr) {
    for (Index i = 0; i < n; ++i) {
      const Eigen::RowVectorXd x_bar = x.middleRows(i * t_count, t_count).colwise().mean();
      alpha(i) += x_bar.dot(*tau);
    }
  }
  Eigen::VectorXd y = x * cfg.beta;
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < t_count; ++t) y(i * t_count + t) += alpha(i) + stream.normal();
  }
  return PanelDataset(numbered_labels(n), numbered_labels(t_count), std::move(y), std::move(x));
}

struct ReplicationOutcome {
  bool ok = false;
  double stat[2] = {0.0, 0.0};
  double p_value[2] = {1.0, 1.0};
  bool repaired[2] = {false, false};
};

ReplicationOutcome run_replication(const DgpConfig& dgp, const ContaminationConfig& cc, const WleConfig& wle_cfg,
                                   std::size_t r) {
  ReplicationOutcome out;
  RandomStream stream = RandomStream::for_replication(dgp.seed, r);
  const PanelDataset clean = generate(dgp, stream);
  const PanelDataset ds = contaminate(clean, cc, stream);
  try {
    const auto fe = fit_fixed_effects(ds);
    const auto re = fit_random_effects(ds);
    const auto wfe = fit_weighted_fixed_effects(ds, wle_cfg);
    const TestResult tests[2] = {hausman_test(fe, re), weighted_hausman_test(wfe, re)};
    for (int i = 0; i < 2; ++i) {
      out.stat[i] = tests[i].statistic;
      out.p_value[i] = tests[i].p_value;
      out.repaired[i] = tests[i].repaired;
    }
    out.ok = true;
  } catch (const PanelError&) {
    out.ok = false;
  }
  return out;
}

}  // namespace

void DgpConfig::validate() const {
  if (n_units < 2 || n_periods < 2) {
    throw PanelError(ErrorKind::InvalidConfig, "DGP needs N >= 2 and T >= 2");
  }
  if (beta.size() < 1) throw PanelError(ErrorKind::InvalidConfig, "beta must have at least one entry");
  if (const auto* alt = std::get_if<AlternativeHypothesis>(&hypothesis)) {
    if (alt->tau.size() != beta.size()) {
      throw PanelError(ErrorKind::InvalidConfig, "tau and beta must have the same length");
    }
  }
}

void ContaminationConfig::validate(Index n_units, Index n_periods) const {
  if (n_outliers < 0) throw PanelError(ErrorKind::InvalidConfig, "outlier count must be nonnegative");
  auto check_range = [](double low, double high) {
    if (!(low < high) || !std::isfinite(low) || !std::isfinite(high)) {
      throw PanelError(ErrorKind::InvalidConfig, "contamination range must satisfy low < high");
    }
  };
  std::visit(overloaded{
                 [&](const NoContamination&) {},
                 [&](const RandomVertical& s) {
                   check_range(s.low, s.high);
                   if (n_outliers > n_units * n_periods) {
                     throw PanelError(ErrorKind::TooManyOutliers,
                                      "m=" + std::to_string(n_outliers) + " exceeds N*T=" +
                                          std::to_string(n_units * n_periods));
                   }
                 },
                 [&](const ConcentratedVertical& s) {
                   check_range(s.low, s.high);
                   const Index block = (n_periods + 1) / 2;
                   if (n_outliers > n_units * block) {
                     throw PanelError(ErrorKind::TooManyOutliers,
                                      "m=" + std::to_string(n_outliers) + " exceeds N*ceil(T/2)=" +
                                          std::to_string(n_units * block));
                   }
                 },
             },
             scheme);
}

PanelDataset generate_null(const DgpConfig& cfg, RandomStream& stream) {
  if (!std::holds_alternative<NullHypothesis>(cfg.hypothesis)) {
    throw PanelError(ErrorKind::InvalidConfig, "generate_null needs the null hypothesis");
  }
  return generate_impl(cfg, nullptr, stream);
}

PanelDataset generate_alternative(const DgpConfig& cfg, RandomStream& stream) {
  const auto* alt = std::get_if<AlternativeHypothesis>(&cfg.hypothesis);
  if (alt == nullptr) throw PanelError(ErrorKind::InvalidConfig, "generate_alternative needs an alternative");
  return generate_impl(cfg, &alt->tau, stream);
}

PanelDataset generate(const DgpConfig& cfg, RandomStream& stream) {
  return std::holds_alternative<NullHypothesis>(cfg.hypothesis) ? generate_null(cfg, stream)
                                                                 : generate_alternative(cfg, stream);
}

PanelDataset contaminate_random(const PanelDataset& ds, const ContaminationConfig& cc, RandomStream& stream) {
  const auto* scheme = std::get_if<RandomVertical>(&cc.scheme);
  if (scheme == nullptr) throw PanelError(ErrorKind::InvalidConfig, "contaminate_random needs RandomVertical");
  cc.validate(ds.n_units(), ds.n_periods());
  if (cc.n_outliers == 0) return ds;

  const auto cells = static_cast<std::uint64_t>(ds.n_obs());
  std::vector<Index> order(cells);
  std::iota(order.begin(), order.end(), Index{0});
  for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(cc.n_outliers); ++j) {
    std::swap(order[j], order[j + stream.index(cells - j)]);
  }
  Eigen::VectorXd y = ds.y_stacked();
  for (Index j = 0; j < cc.n_outliers; ++j) y(order[static_cast<std::size_t>(j)]) = stream.uniform(scheme->low, scheme->high);
  return ds.with_response(std::move(y));
}

PanelDataset contaminate_concentrated(const PanelDataset& ds, const ContaminationConfig& cc, RandomStream& stream) {
  const auto* scheme = std::get_if<ConcentratedVertical>(&cc.scheme);
  if (scheme == nullptr) {
    throw PanelError(ErrorKind::InvalidConfig, "contaminate_concentrated needs ConcentratedVertical");
  }
  cc.validate(ds.n_units(), ds.n_periods());
  if (cc.n_outliers == 0) return ds;

  const Index t_count = ds.n_periods();
  const Index block = (t_count + 1) / 2;
  const auto units = static_cast<std::uint64_t>(ds.n_units());
  std::vector<Index> order(units);
  std::iota(order.begin(), order.end(), Index{0});

  Eigen::VectorXd y = ds.y_stacked();
  Index remaining = cc.n_outliers;
  for (std::uint64_t j = 0; remaining > 0; ++j) {
    std::swap(order[j], order[j + stream.index(units - j)]);
    const Index unit = order[j];
    const Index len = std::min(block, remaining);
    const auto start = static_cast<Index>(stream.index(static_cast<std::uint64_t>(t_count - len + 1)));
    for (Index t = start; t < start + len; ++t) y(unit * t_count + t) = stream.uniform(scheme->low, scheme->high);
    remaining -= len;
  }
  return ds.with_response(std::move(y));
}

PanelDataset contaminate(const PanelDataset& ds, const ContaminationConfig& cc, RandomStream& stream) {
  return std::visit(overloaded{
                        [&](const NoContamination&) { return ds; },
                        [&](const RandomVertical&) { return contaminate_random(ds, cc, stream); },
                        [&](const ConcentratedVertical&) { return contaminate_concentrated(ds, cc, stream); },
                    },
                    cc.scheme);
}

const TestSeries& StudyResult::series(TestKind kind) const {
  for (const auto& s : tests) {
    if (s.kind == kind) return s;
  }
  throw PanelError(ErrorKind::InvalidConfig, "study has no series for this test");
}

double StudyResult::rejection_rate(TestKind kind, double gamma) const {
  const auto& s = series(kind);
  for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
    if (gamma_grid[i] == gamma) return s.rejection_rates[i];
  }
  throw PanelError(ErrorKind::InvalidConfig, "gamma " + std::to_string(gamma) + " is not on the study grid");
}

StudyResult run_study(const DgpConfig& dgp, const ContaminationConfig& cc, std::size_t s,
                      const std::vector<double>& gamma_grid, const WleConfig& wle_cfg, const StudyOptions& options) {
  dgp.validate();
  cc.validate(dgp.n_units, dgp.n_periods);
  wle_cfg.validate();
  if (s < 1) throw PanelError(ErrorKind::InvalidConfig, "need at least one replication");
  if (gamma_grid.empty()) throw PanelError(ErrorKind::InvalidConfig, "gamma grid is empty");
  for (const double g : gamma_grid) {
    if (!(g > 0.0 && g < 1.0)) {
      throw PanelError(ErrorKind::InvalidConfig, "nominal size " + std::to_string(g) + " is outside (0, 1)");
    }
  }

  std::vector<ReplicationOutcome> outcomes(s);
  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, s));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next.fetch_add(1); r < s; r = next.fetch_add(1)) {
      outcomes[r] = run_replication(dgp, cc, wle_cfg, r);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  StudyResult result;
  result.gamma_grid = gamma_grid;
  result.s_replications = s;
  result.tests = {TestSeries{TestKind::Hausman, {}, {}, 0}, TestSeries{TestKind::WeightedHausman, {}, {}, 0}};
  for (const auto& o : outcomes) {
    if (!o.ok) {
      ++result.failures;
      continue;
    }
    for (int i = 0; i < 2; ++i) {
      result.tests[static_cast<std::size_t>(i)].statistics.push_back(o.stat[i]);
      if (o.repaired[i]) ++result.tests[static_cast<std::size_t>(i)].repaired;
    }
  }
  const std::size_t used = s - result.failures;
  for (int i = 0; i < 2; ++i) {
    auto& series = result.tests[static_cast<std::size_t>(i)];
    for (const double g : gamma_grid) {
      std::size_t rejections = 0;
      for (const auto& o : outcomes) {
        if (o.ok && o.p_value[i] < g) ++rejections;
      }
      series.rejection_rates.push_back(used == 0 ? 0.0 : static_cast<double>(rejections) / static_cast<double>(used));
    }
  }
  return result;
}

}  // namespace panelspec
