#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "har/types.hpp"

namespace har {

// An n-second window of aligned samples. Consecutive segments produced by
// segment() are contiguous and non-overlapping; a trailing partial window is
// discarded.
struct Segment {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  int window_seconds = 0;
  Eigen::MatrixXd samples;  // same column layout as the source AlignedFrames
  std::string subject_id;
  std::optional<std::string> ground_truth_activity;
};

// Scalar statistics used by the feature extractor. All use the population
// (divide by n) convention; statistics undefined on zero-variance input
// return 0.
double population_variance(const Eigen::Ref<const Eigen::VectorXd>& x);
double midpoint_median(const Eigen::Ref<const Eigen::VectorXd>& x);
double sample_skewness(const Eigen::Ref<const Eigen::VectorXd>& x);
double sample_kurtosis(const Eigen::Ref<const Eigen::VectorXd>& x);
double zero_crossing_rate(const Eigen::Ref<const Eigen::VectorXd>& x);
int peak_count(const Eigen::Ref<const Eigen::VectorXd>& x);
double pearson_correlation(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const Eigen::Ref<const Eigen::VectorXd>& y);

// Sliding median with an odd kernel; edges use truncated windows with the
// lower-median convention. kernel == 1 is the identity.
Eigen::VectorXd median_filter(const Eigen::Ref<const Eigen::VectorXd>& stream, int kernel);

// Applies median_filter to every column.
Eigen::MatrixXd median_filter_columns(const Eigen::MatrixXd& columns, int kernel);

// Tiles the aligned stream into contiguous non-overlapping windows of
// window_seconds, discarding the trailing remainder.
std::vector<Segment> segment(const AlignedFrames& aligned, int window_seconds,
                             const std::string& subject_id,
                             const std::optional<std::string>& ground_truth = std::nullopt);

// 11 per-axis statistics + 3 pairwise Pearson correlations + 1 magnitude
// = 37 features per 3-axis sensor, in feature_names() order.
Eigen::VectorXd extract_features(const Segment& seg);

std::vector<std::string> feature_names(const std::vector<StreamKey>& streams);

constexpr int kFeaturesPerSensor = 37;

// Online per-feature standardization via running mean and Bessel-corrected
// standard deviation. Identity until two samples have been absorbed.
class Standardizer {
 public:
  Standardizer() = default;

  // Transforms fv to z-scores; when update is true the running statistics
  // are advanced with the raw values first. The first vector fixes the
  // dimension.
  Eigen::VectorXd standardize(const Eigen::VectorXd& fv, bool update);

  void observe(const Eigen::VectorXd& fv);
  long count() const { return count_; }
  int dimension() const { return static_cast<int>(mean_.size()); }

 private:
  long count_ = 0;
  Eigen::VectorXd mean_;
  Eigen::VectorXd m2_;  // running sum of squared deviations (Welford)
};

}  // namespace har
