#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace har {

// Usage/configuration problems (CLI exit code 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (CLI exit code 2).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SensorKind { Accelerometer, Gyroscope, Magnetometer };

const char* to_string(SensorKind kind);
SensorKind sensor_kind_from_string(const std::string& name);

struct SensorFrame {
  std::int64_t timestamp_ms = 0;
  std::string device_id;
  SensorKind kind = SensorKind::Accelerometer;
  double x = 0, y = 0, z = 0;
};

// A bundle of context attributes observed at one instant. Every attribute is
// either a value or unknown (nullopt), except the temporal ones which are
// always derived from the timestamp.
struct ContextSnapshot {
  std::int64_t timestamp_ms = 0;
  std::optional<std::string> semantic_place;
  std::optional<double> speed_mps;
  std::optional<double> height_variation_m;
  std::optional<std::string> weather;
  std::optional<bool> transit_proximity;
  std::optional<std::string> traffic_level;
  std::optional<double> light_level;
  std::optional<double> noise_level;
  std::string time_of_day;
  std::string day_of_week;
};

std::string time_of_day_from_timestamp(std::int64_t timestamp_ms);
std::string day_of_week_from_timestamp(std::int64_t timestamp_ms);

// Makes a snapshot with every attribute unknown but the temporal ones derived.
ContextSnapshot unknown_snapshot(std::int64_t timestamp_ms);

// One annotated activity instance: a contiguous run of frames and context
// snapshots recorded while the subject performed a single activity.
struct LabeledRecord {
  std::string subject_id;
  std::string activity;
  std::vector<SensorFrame> frames;
  std::vector<ContextSnapshot> contexts;
};

// Ordered set of activity labels. The order fixes the meaning of every
// probability vector and confusion-matrix row in the system.
class ActivitySet {
 public:
  ActivitySet() = default;
  explicit ActivitySet(std::vector<std::string> labels);

  int index_of(const std::string& label) const;  // -1 when absent
  int require(const std::string& label) const;   // throws DataError when absent
  bool contains(const std::string& label) const { return index_of(label) >= 0; }
  const std::string& label(int index) const { return labels_.at(static_cast<std::size_t>(index)); }
  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
};

// Probability vector over an ActivitySet, in label order.
using ActivityDistribution = Eigen::VectorXd;

bool is_distribution(const ActivityDistribution& probs, double tol = 1e-9);

// One (device, sensor) stream of 3-axis readings.
struct StreamKey {
  std::string device_id;
  SensorKind kind = SensorKind::Accelerometer;

  bool operator==(const StreamKey& other) const {
    return device_id == other.device_id && kind == other.kind;
  }
  bool operator<(const StreamKey& other) const {
    if (device_id != other.device_id) return device_id < other.device_id;
    return static_cast<int>(kind) < static_cast<int>(other.kind);
  }
  std::string name() const { return device_id + "." + to_string(kind); }
};

// Multi-stream samples resampled onto one shared time grid. Column layout is
// three consecutive columns (x, y, z) per stream, in `streams` order.
struct AlignedFrames {
  std::vector<std::int64_t> timestamps_ms;
  std::vector<StreamKey> streams;
  Eigen::MatrixXd values;  // rows = grid points, cols = 3 * streams.size()

  std::int64_t grid_period_ms = 0;
  int rows() const { return static_cast<int>(values.rows()); }
};

}  // namespace har
