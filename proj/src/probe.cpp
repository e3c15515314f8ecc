#include "creditrisk/probe.hpp"

#include <cmath>

#include <json.hpp>

#include "creditrisk/error.hpp"

namespace creditrisk {

using json = nlohmann::json;

const char* ProbeScenarioName(ProbeScenario scenario) {
  switch (scenario) {
    case ProbeScenario::kHighDim: return "high_dim";
    case ProbeScenario::kCorrelated: return "correlated";
    case ProbeScenario::kKernelSweep: return "kernel_sweep";
  }
  return "unknown";
}

ProbeScenario ParseProbeScenario(const std::string& name) {
  if (name == "high_dim") return ProbeScenario::kHighDim;
  if (name == "correlated") return ProbeScenario::kCorrelated;
  if (name == "kernel_sweep") return ProbeScenario::kKernelSweep;
  throw Error(ErrorKind::kInvalidArgument, "unknown probe scenario '" + name + "'");
}

ProbeRow StabilityOnSynthetic(std::size_t n_features, double correlation,
                              const ProbeSpec& spec) {
  if (spec.n_units < 1) throw Error(ErrorKind::kInvalidArgument, "n_units must be >= 1");
  SyntheticSpec synthetic;
  synthetic.n_rows = spec.n_rows;
  synthetic.n_features = n_features;
  synthetic.bad_rate_target = spec.bad_rate;
  synthetic.nonlinearity = Nonlinearity::kNonlinear;
  synthetic.correlation = correlation;
  synthetic.seed = spec.seed;
  const Dataset data = GenerateSynthetic(synthetic).data;
  const BoostedEnsemble model = FitGbm(data, spec.gbm);
  const FeatureStats stats = ComputeFeatureStats(data);
  const BlackBox blackbox = [&model](std::span<const double> x) { return PredictPd(model, x); };

  ProbeRow row;
  row.parameter = correlation;
  const auto units = std::min<std::size_t>(static_cast<std::size_t>(spec.n_units), data.num_rows());
  for (std::size_t u = 0; u < units; ++u) {
    const auto unit = data.Row(u);
    const StabilityReport r =
        Stability(blackbox, unit, stats, spec.lime, spec.runs, data.row_ids()[u]);
    row.topk_overlap += r.topk_overlap / units;
    row.mean_abs_top_contribution += r.mean_abs_top_contribution / units;
    row.mean_dispersion += r.MeanDispersion() / units;
    row.mean_r_squared += r.mean_r_squared / units;
  }
  return row;
}

std::vector<KernelSweepRow> KernelSweep(const BlackBox& blackbox, double unit,
                                        const ProbeSpec& spec) {
  FeatureStats stats;
  stats.names = {"x"};
  stats.mean = {0.0};
  stats.std = {1.0};
  stats.min = {-4.0};
  stats.max = {4.0};
  stats.quartiles = {{-0.6744897501960817, 0.0, 0.6744897501960817}};

  std::vector<KernelSweepRow> rows;
  const double unit_vector[1] = {unit};
  for (double m : spec.width_multipliers) {
    LimeConfig config = spec.lime;
    config.mode = PerturbationMode::kContinuous;
    config.kernel_width = m * LimeConfig{}.ResolvedKernelWidth(1);
    const Explanation e = Explain(blackbox, unit_vector, stats, config);
    rows.push_back({m, config.kernel_width, e.local_slopes[0], e.surrogate_r_squared});
  }
  return rows;
}

ProbeReport WeaknessProbe(ProbeScenario scenario, const ProbeSpec& spec) {
  ProbeReport report;
  report.scenario = scenario;
  switch (scenario) {
    case ProbeScenario::kHighDim:
      for (auto p : spec.dimensions) {
        ProbeRow row = StabilityOnSynthetic(p, spec.high_dim_correlation, spec);
        row.parameter = static_cast<double>(p);
        report.rows.push_back(row);
      }
      break;
    case ProbeScenario::kCorrelated:
      for (double rho : spec.correlations) {
        report.rows.push_back(StabilityOnSynthetic(spec.correlated_features, rho, spec));
      }
      break;
    case ProbeScenario::kKernelSweep:
      report.sweep = KernelSweep([](std::span<const double> x) { return std::abs(x[0]); },
                                 spec.sweep_unit, spec);
      break;
  }
  return report;
}

std::string ProbeReportToJson(const ProbeReport& report) {
  json doc;
  doc["schema_version"] = 1;
  doc["kind"] = "probe";
  doc["scenario"] = ProbeScenarioName(report.scenario);
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"parameter", r.parameter},
                    {"topk_overlap", r.topk_overlap},
                    {"mean_abs_top_contribution", r.mean_abs_top_contribution},
                    {"mean_dispersion", r.mean_dispersion},
                    {"mean_r_squared", r.mean_r_squared}});
  }
  doc["rows"] = std::move(rows);
  json sweep = json::array();
  for (const auto& s : report.sweep) {
    sweep.push_back({{"width_multiplier", s.width_multiplier},
                     {"kernel_width", s.kernel_width},
                     {"slope", s.slope},
                     {"r_squared", s.r_squared}});
  }
  doc["sweep"] = std::move(sweep);
  return doc.dump(2) + "\n";
}

}  // namespace creditrisk
