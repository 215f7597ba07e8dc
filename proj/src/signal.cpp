#include "har/signal.hpp"

#include <algorithm>
#include <cmath>

namespace har {

double population_variance(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() == 0) return 0.0;
  const double mean = x.mean();
  return (x.array() - mean).square().mean();
}

double midpoint_median(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::Index n = x.size();
  if (n == 0) return 0.0;
  std::vector<double> sorted(x.data(), x.data() + n);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = static_cast<std::size_t>(n) / 2;
  if (n % 2 == 1) return sorted[mid];
  return 0.5 * (sorted[mid - 1] + sorted[mid]);
}

double sample_skewness(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const double mean = x.mean();
  const Eigen::ArrayXd centered = x.array() - mean;
  const double var = centered.square().mean();
  if (var <= 0.0) return 0.0;
  return centered.cube().mean() / std::pow(var, 1.5);
}

double sample_kurtosis(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const double mean = x.mean();
  const Eigen::ArrayXd centered = x.array() - mean;
  const double var = centered.square().mean();
  if (var <= 0.0) return 0.0;
  return centered.pow(4).mean() / (var * var);
}

double zero_crossing_rate(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::Index n = x.size();
  if (n == 0) return 0.0;
  int crossings = 0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (x[i] * x[i + 1] < 0.0) ++crossings;
  }
  return static_cast<double>(crossings) / static_cast<double>(n);
}

int peak_count(const Eigen::Ref<const Eigen::VectorXd>& x) {
  int peaks = 0;
  for (Eigen::Index i = 1; i + 1 < x.size(); ++i) {
    if (x[i] > x[i - 1] && x[i] > x[i + 1]) ++peaks;
  }
  return peaks;
}

double pearson_correlation(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const Eigen::Ref<const Eigen::VectorXd>& y) {
  const Eigen::ArrayXd cx = x.array() - x.mean();
  const Eigen::ArrayXd cy = y.array() - y.mean();
  const double sx = std::sqrt(cx.square().mean());
  const double sy = std::sqrt(cy.square().mean());
  if (sx <= 0.0 || sy <= 0.0) return 0.0;
  return (cx * cy).mean() / (sx * sy);
}

namespace {

double lower_median_of_window(std::vector<double>& window) {
  const std::size_t mid = (window.size() - 1) / 2;
  std::nth_element(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(mid), window.end());
  return window[mid];
}

}  // namespace

Eigen::VectorXd median_filter(const Eigen::Ref<const Eigen::VectorXd>& stream, int kernel) {
  if (kernel < 1 || kernel % 2 == 0) {
    throw ConfigError("median filter kernel must be odd and >= 1");
  }
  const Eigen::Index n = stream.size();
  if (kernel == 1 || n == 0) return stream;
  Eigen::VectorXd out(n);
  const Eigen::Index half = kernel / 2;
  std::vector<double> window;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - half);
    const Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + half);
    window.assign(stream.data() + lo, stream.data() + hi + 1);
    out[i] = lower_median_of_window(window);
  }
  return out;
}

Eigen::MatrixXd median_filter_columns(const Eigen::MatrixXd& columns, int kernel) {
  Eigen::MatrixXd out(columns.rows(), columns.cols());
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    out.col(c) = median_filter(columns.col(c), kernel);
  }
  return out;
}

std::vector<Segment> segment(const AlignedFrames& aligned, int window_seconds,
                             const std::string& subject_id,
                             const std::optional<std::string>& ground_truth) {
  if (window_seconds < 1) throw ConfigError("window_seconds must be >= 1");
  std::vector<Segment> out;
  if (aligned.rows() == 0) return out;

  const std::int64_t window_ms = static_cast<std::int64_t>(window_seconds) * 1000;
  const std::int64_t origin = aligned.timestamps_ms.front();
  const std::int64_t covered = aligned.timestamps_ms.back() - origin + aligned.grid_period_ms;

  Eigen::Index row = 0;
  for (std::int64_t k = 0; (k + 1) * window_ms <= covered; ++k) {
    const std::int64_t start = origin + k * window_ms;
    const std::int64_t end = start + window_ms;
    const Eigen::Index first = row;
    while (row < static_cast<Eigen::Index>(aligned.timestamps_ms.size()) &&
           aligned.timestamps_ms[static_cast<std::size_t>(row)] < end) {
      ++row;
    }
    Segment seg;
    seg.start_ms = start;
    seg.end_ms = end;
    seg.window_seconds = window_seconds;
    seg.samples = aligned.values.middleRows(first, row - first);
    seg.subject_id = subject_id;
    seg.ground_truth_activity = ground_truth;
    out.push_back(std::move(seg));
  }
  return out;
}

Eigen::VectorXd extract_features(const Segment& seg) {
  const Eigen::Index rows = seg.samples.rows();
  const Eigen::Index cols = seg.samples.cols();
  if (rows == 0 || cols == 0 || cols % 3 != 0) {
    throw DataError("extract_features: segment must be non-empty with 3 columns per sensor");
  }
  const Eigen::Index sensors = cols / 3;
  Eigen::VectorXd fv(sensors * kFeaturesPerSensor);

  Eigen::Index at = 0;
  for (Eigen::Index s = 0; s < sensors; ++s) {
    const auto block = seg.samples.middleCols(s * 3, 3);
    for (Eigen::Index a = 0; a < 3; ++a) {
      const Eigen::VectorXd axis = block.col(a);
      const double mean = axis.mean();
      const double var = population_variance(axis);
      const double energy = axis.array().square().mean();
      fv[at++] = mean;
      fv[at++] = var;
      fv[at++] = std::sqrt(var);
      fv[at++] = midpoint_median(axis);
      fv[at++] = std::sqrt(energy);  // root mean square
      fv[at++] = sample_kurtosis(axis);
      fv[at++] = sample_skewness(axis);
      fv[at++] = zero_crossing_rate(axis);
      fv[at++] = static_cast<double>(peak_count(axis));
      fv[at++] = energy;
      fv[at++] = axis.maxCoeff() - axis.minCoeff();
    }
    fv[at++] = pearson_correlation(block.col(0), block.col(1));
    fv[at++] = pearson_correlation(block.col(0), block.col(2));
    fv[at++] = pearson_correlation(block.col(1), block.col(2));
    fv[at++] = block.rowwise().norm().mean();  // magnitude
  }
  return fv;
}

std::vector<std::string> feature_names(const std::vector<StreamKey>& streams) {
  static const char* kAxisStats[11] = {"mean",     "variance", "std",   "median",
                                       "rms",      "kurtosis", "skewness",
                                       "zero_crossing_rate",   "peak_count",
                                       "energy",   "range"};
  static const char* kAxes[3] = {"x", "y", "z"};
  std::vector<std::string> names;
  names.reserve(streams.size() * kFeaturesPerSensor);
  for (const auto& key : streams) {
    const std::string base = key.name();
    for (const char* axis : kAxes) {
      for (const char* stat : kAxisStats) {
        names.push_back(base + "." + axis + "." + stat);
      }
    }
    names.push_back(base + ".corr_xy");
    names.push_back(base + ".corr_xz");
    names.push_back(base + ".corr_yz");
    names.push_back(base + ".magnitude");
  }
  return names;
}

void Standardizer::observe(const Eigen::VectorXd& fv) {
  if (count_ == 0) {
    mean_ = Eigen::VectorXd::Zero(fv.size());
    m2_ = Eigen::VectorXd::Zero(fv.size());
  }
  if (fv.size() != mean_.size()) {
    throw DataError("Standardizer: feature vector dimension mismatch");
  }
  ++count_;
  const Eigen::VectorXd delta = fv - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta.cwiseProduct(fv - mean_);
}

Eigen::VectorXd Standardizer::standardize(const Eigen::VectorXd& fv, bool update) {
  if (update) observe(fv);
  if (count_ < 2) return fv;
  if (fv.size() != mean_.size()) {
    throw DataError("Standardizer: feature vector dimension mismatch");
  }
  const Eigen::ArrayXd stddev =
      (m2_.array() / static_cast<double>(count_ - 1)).sqrt().max(1e-8);
  return ((fv - mean_).array() / stddev).matrix();
}

}  // namespace har
