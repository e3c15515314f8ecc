#include "creditrisk/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "creditrisk/error.hpp"

namespace creditrisk {
namespace {

double Sigmoid(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

std::string FormatDouble(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

std::vector<std::string_view> SplitLine(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::string CellLocation(std::size_t row, const std::string& column) {
  return "(row " + std::to_string(row) + ", column " + column + ")";
}

}  // namespace

// ---------------------------------------------------------------------------

Dataset::Dataset(Matrix features, std::vector<int> target,
                 std::vector<std::string> feature_names,
                 std::vector<std::string> row_ids)
    : features_(std::move(features)),
      target_(std::move(target)),
      feature_names_(std::move(feature_names)),
      row_ids_(std::move(row_ids)) {
  const auto n = target_.size();
  if (static_cast<std::size_t>(features_.rows()) != n ||
      static_cast<std::size_t>(features_.cols()) != feature_names_.size() ||
      row_ids_.size() != n) {
    throw Error(ErrorKind::kDimensionMismatch,
                "dataset shape mismatch: " + std::to_string(features_.rows()) + "x" +
                    std::to_string(features_.cols()) + " features, " +
                    std::to_string(n) + " targets, " +
                    std::to_string(feature_names_.size()) + " names, " +
                    std::to_string(row_ids_.size()) + " ids");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (target_[i] != 0 && target_[i] != 1) {
      throw Error(ErrorKind::kNonBinaryTarget,
                  "non-binary target " + std::to_string(target_[i]) + " at row " +
                      std::to_string(i));
    }
  }
  for (Eigen::Index j = 0; j < features_.cols(); ++j) {
    for (Eigen::Index i = 0; i < features_.rows(); ++i) {
      if (!std::isfinite(features_(i, j))) {
        throw Error(ErrorKind::kMissingValue,
                    "missing value at " + CellLocation(i, feature_names_[j]));
      }
    }
  }
}

std::size_t Dataset::num_bads() const {
  return static_cast<std::size_t>(std::count(target_.begin(), target_.end(), 1));
}

double Dataset::bad_rate() const {
  if (target_.empty()) return 0.0;
  return static_cast<double>(num_bads()) / static_cast<double>(target_.size());
}

std::vector<double> Dataset::Row(std::size_t i) const {
  std::vector<double> row(num_features());
  for (std::size_t j = 0; j < row.size(); ++j) row[j] = features_(i, j);
  return row;
}

Dataset Dataset::Subset(const std::vector<std::size_t>& rows) const {
  Matrix x(rows.size(), features_.cols());
  std::vector<int> y(rows.size());
  std::vector<std::string> ids(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    x.row(k) = features_.row(rows[k]);
    y[k] = target_[rows[k]];
    ids[k] = row_ids_[rows[k]];
  }
  return Dataset(std::move(x), std::move(y), feature_names_, std::move(ids));
}

// ---------------------------------------------------------------------------
// CSV

Dataset LoadCsv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) {
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorKind::kMissingFile, "no such file: " + path.string());
    }
    throw Error(ErrorKind::kIo, "cannot open " + path.string());
  }

  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::kMalformedDocument, "missing header row in " + path.string());
  }
  std::vector<std::string> header;
  for (auto cell : SplitLine(line)) header.emplace_back(Trim(cell));

  int target_col = -1;
  int id_col = -1;
  std::vector<int> feature_cols;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == options.target_column) {
      target_col = static_cast<int>(c);
    } else if (!options.id_column.empty() && header[c] == options.id_column) {
      id_col = static_cast<int>(c);
    } else {
      feature_cols.push_back(static_cast<int>(c));
      names.push_back(header[c]);
    }
  }
  if (target_col < 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "target column '" + options.target_column + "' not in header of " +
                    path.string());
  }

  std::vector<double> values;
  std::vector<int> target;
  std::vector<std::string> ids;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    const auto cells = SplitLine(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::kMalformedDocument,
                  "row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(header.size()));
    }
    auto parse = [&](int c) {
      const auto cell = Trim(cells[c]);
      if (cell.empty()) {
        throw Error(ErrorKind::kMissingValue,
                    "missing value at " + CellLocation(row, header[c]));
      }
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw Error(ErrorKind::kNonNumeric, "non-numeric value '" + std::string(cell) +
                                                "' at " + CellLocation(row, header[c]));
      }
      if (std::isnan(v)) {
        throw Error(ErrorKind::kMissingValue,
                    "missing value at " + CellLocation(row, header[c]));
      }
      return v;
    };
    for (int c : feature_cols) values.push_back(parse(c));
    const double y = parse(target_col);
    if (y != 0.0 && y != 1.0) {
      throw Error(ErrorKind::kNonBinaryTarget,
                  "non-binary target '" + std::string(Trim(cells[target_col])) + "' at " +
                      CellLocation(row, header[target_col]));
    }
    target.push_back(static_cast<int>(y));
    ids.push_back(id_col >= 0 ? std::string(Trim(cells[id_col])) : std::to_string(row));
    ++row;
  }

  const auto p = feature_cols.size();
  Matrix x(row, p);
  for (std::size_t i = 0; i < row; ++i) {
    for (std::size_t j = 0; j < p; ++j) x(i, j) = values[i * p + j];
  }
  return Dataset(std::move(x), std::move(target), std::move(names), std::move(ids));
}

void WriteCsv(const Dataset& data, const std::filesystem::path& path,
              const CsvOptions& options) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  std::string buffer;
  buffer += options.id_column;
  for (const auto& name : data.feature_names()) buffer += "," + name;
  buffer += "," + options.target_column + "\n";
  const auto& x = data.features();
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    buffer += data.row_ids()[i];
    for (std::size_t j = 0; j < data.num_features(); ++j) {
      buffer += ',';
      buffer += FormatDouble(x(i, j));
    }
    buffer += data.target()[i] ? ",1\n" : ",0\n";
  }
  out << buffer;
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Split

SplitResult Split(const Dataset& data, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "train_fraction must lie in (0,1)");
  }
  std::vector<std::size_t> bads, goods;
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    (data.target()[i] ? bads : goods).push_back(i);
  }
  if (bads.empty() || goods.empty()) {
    throw Error(ErrorKind::kSingleClass, "split needs both classes present");
  }

  std::mt19937_64 rng(spec.seed);
  std::shuffle(bads.begin(), bads.end(), rng);
  std::shuffle(goods.begin(), goods.end(), rng);

  const double n = static_cast<double>(data.num_rows());
  const auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * n));
  auto bad_train = static_cast<std::size_t>(
      std::llround(spec.train_fraction * static_cast<double>(bads.size())));
  bad_train = std::min(bad_train, std::min(bads.size(), n_train));
  const std::size_t good_train = std::min(n_train - bad_train, goods.size());

  std::vector<std::size_t> train(bads.begin(), bads.begin() + bad_train);
  train.insert(train.end(), goods.begin(), goods.begin() + good_train);
  std::vector<std::size_t> test(bads.begin() + bad_train, bads.end());
  test.insert(test.end(), goods.begin() + good_train, goods.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());

  if (train.empty() || test.empty()) {
    throw Error(ErrorKind::kUnbalancedSplit, "split leaves an empty side");
  }
  SplitResult result{data.Subset(train), data.Subset(test)};
  const double gap = std::abs(result.train.bad_rate() - result.test.bad_rate());
  if (gap > spec.balance_check_tolerance) {
    throw Error(ErrorKind::kUnbalancedSplit,
                "bad-rate gap " + FormatDouble(gap) + " exceeds tolerance " +
                    FormatDouble(spec.balance_check_tolerance));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Synthetic data

double GroundTruth::LogOdds(const double* x) const {
  double eta = intercept;
  for (std::size_t j = 0; j < slopes.size(); ++j) eta += slopes[j] * x[j];
  if (nonlinearity == Nonlinearity::kNonlinear) {
    const std::size_t p = slopes.size();
    if (p >= 2) eta += interaction * x[0] * x[1];
    if (p >= 3 && x[2] > step_threshold) eta += step;
    if (p >= 4) eta += curvature * (x[3] * x[3] - 1.0);
  }
  return eta;
}

double GroundTruth::Pd(const double* x) const { return Sigmoid(LogOdds(x)); }

namespace {

// Every feature gets the same slope magnitude with alternating signs, scaled
// so the linear signal has standard deviation `linear_scale` for
// uncorrelated features. More features therefore means weaker individual
// effects.
std::vector<double> GroundTruthSlopes(std::size_t p, double linear_scale) {
  const double s = linear_scale / std::sqrt(static_cast<double>(p));
  std::vector<double> slopes(p);
  for (std::size_t j = 0; j < p; ++j) slopes[j] = (j % 2 == 0) ? s : -s;
  return slopes;
}

constexpr double kCalibrationTolerance = 0.005;

}  // namespace

SyntheticData GenerateSynthetic(const SyntheticSpec& spec) {
  if (spec.n_rows == 0 || spec.n_features == 0) {
    throw Error(ErrorKind::kInvalidArgument, "n_rows and n_features must be positive");
  }
  if (!(spec.bad_rate_target > 0.0 && spec.bad_rate_target < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "bad_rate_target must lie in (0,1)");
  }
  if (!(spec.correlation >= 0.0 && spec.correlation < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "correlation must lie in [0,1)");
  }

  const std::size_t n = spec.n_rows;
  const std::size_t p = spec.n_features;

  GroundTruth truth;
  truth.nonlinearity = spec.nonlinearity;
  if (spec.nonlinearity == Nonlinearity::kLinear) {
    truth.slopes = GroundTruthSlopes(p, 1.0);
  } else {
    // Nonlinear terms are sized relative to the per-feature slope.
    const double lin = 1.4;
    truth.slopes = GroundTruthSlopes(p, lin);
    const double unit = lin / std::sqrt(static_cast<double>(p));
    truth.interaction = 2.2 * unit;
    truth.step = 3.2 * unit;
    truth.step_threshold = 1.0;
    truth.curvature = 1.1 * unit;
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  const double shared = std::sqrt(spec.correlation);
  const double own = std::sqrt(1.0 - spec.correlation);
  Matrix x(n, p);
  std::vector<double> row(p);
  std::vector<double> base(n);
  std::vector<double> draw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double common = normal(rng);
    for (std::size_t j = 0; j < p; ++j) {
      row[j] = shared * common + own * normal(rng);
      x(i, j) = row[j];
    }
    base[i] = truth.LogOdds(row.data());  // intercept is still 0
    draw[i] = uniform(rng);
  }

  auto expected_rate = [&](double b) {
    double s = 0.0;
    for (double v : base) s += Sigmoid(b + v);
    return s / static_cast<double>(n);
  };
  auto realised_rate = [&](double b) {
    std::size_t bads = 0;
    for (std::size_t i = 0; i < n; ++i) bads += draw[i] < Sigmoid(b + base[i]);
    return static_cast<double>(bads) / static_cast<double>(n);
  };

  // Expected rate is continuous and increasing in the intercept.
  double lo = -60.0, hi = 60.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (expected_rate(mid) < spec.bad_rate_target ? lo : hi) = mid;
  }
  double intercept = 0.5 * (lo + hi);

  // Sampling noise can push the realised rate off target for small n; fall
  // back to bisecting the (monotone, stepwise) realised rate itself.
  if (std::abs(realised_rate(intercept) - spec.bad_rate_target) > kCalibrationTolerance) {
    lo = -60.0;
    hi = 60.0;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
      const double mid = 0.5 * (lo + hi);
      (realised_rate(mid) < spec.bad_rate_target ? lo : hi) = mid;
    }
    const double gap_lo = std::abs(realised_rate(lo) - spec.bad_rate_target);
    const double gap_hi = std::abs(realised_rate(hi) - spec.bad_rate_target);
    intercept = gap_lo <= gap_hi ? lo : hi;
  }
  const double realised = realised_rate(intercept);
  if (std::abs(realised - spec.bad_rate_target) > kCalibrationTolerance) {
    throw Error(ErrorKind::kCalibration,
                "cannot reach bad rate " + FormatDouble(spec.bad_rate_target) + " with " +
                    std::to_string(n) + " rows (closest " + FormatDouble(realised) + ")");
  }
  truth.intercept = intercept;

  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = draw[i] < Sigmoid(intercept + base[i]);

  std::vector<std::string> names(p);
  for (std::size_t j = 0; j < p; ++j) names[j] = "x" + std::to_string(j);
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);

  return {Dataset(std::move(x), std::move(y), std::move(names), std::move(ids)),
          std::move(truth)};
}

// ---------------------------------------------------------------------------

DatasetSummary Summarize(const Dataset& data) {
  DatasetSummary s;
  s.n_rows = data.num_rows();
  s.n_features = data.num_features();
  s.n_bads = data.num_bads();
  s.bad_rate = data.bad_rate();
  const auto& x = data.features();
  for (std::size_t j = 0; j < s.n_features; ++j) {
    FeatureSummary f;
    f.name = data.feature_names()[j];
    if (s.n_rows > 0) {
      const auto col = x.col(j);
      f.min = col.minCoeff();
      f.max = col.maxCoeff();
      f.mean = col.mean();
      f.std = f.min == f.max ? 0.0 : std::sqrt((col.array() - f.mean).square().mean());
    }
    s.features.push_back(std::move(f));
  }
  return s;
}

}  // namespace creditrisk
