#include "har/types.hpp"

#include <cmath>

namespace har {

const char* to_string(SensorKind kind) {
  switch (kind) {
    case SensorKind::Accelerometer: return "accelerometer";
    case SensorKind::Gyroscope: return "gyroscope";
    case SensorKind::Magnetometer: return "magnetometer";
  }
  return "accelerometer";
}

SensorKind sensor_kind_from_string(const std::string& name) {
  if (name == "accelerometer") return SensorKind::Accelerometer;
  if (name == "gyroscope") return SensorKind::Gyroscope;
  if (name == "magnetometer") return SensorKind::Magnetometer;
  throw DataError("unknown sensor_kind: " + name);
}

std::string time_of_day_from_timestamp(std::int64_t timestamp_ms) {
  std::int64_t ms_in_day = timestamp_ms % 86400000;
  if (ms_in_day < 0) ms_in_day += 86400000;
  const int hour = static_cast<int>(ms_in_day / 3600000);
  if (hour < 6) return "night";
  if (hour < 12) return "morning";
  if (hour < 18) return "afternoon";
  return "evening";
}

std::string day_of_week_from_timestamp(std::int64_t timestamp_ms) {
  static const char* kNames[7] = {"monday",   "tuesday", "wednesday", "thursday",
                                  "friday",   "saturday", "sunday"};
  std::int64_t days = timestamp_ms / 86400000;
  if (timestamp_ms < 0 && timestamp_ms % 86400000 != 0) --days;
  // 1970-01-01 was a Thursday.
  const int idx = static_cast<int>(((days + 3) % 7 + 7) % 7);
  return kNames[idx];
}

ContextSnapshot unknown_snapshot(std::int64_t timestamp_ms) {
  ContextSnapshot snap;
  snap.timestamp_ms = timestamp_ms;
  snap.time_of_day = time_of_day_from_timestamp(timestamp_ms);
  snap.day_of_week = day_of_week_from_timestamp(timestamp_ms);
  return snap;
}

ActivitySet::ActivitySet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  for (int i = 0; i < static_cast<int>(labels_.size()); ++i) {
    if (!index_.emplace(labels_[static_cast<std::size_t>(i)], i).second) {
      throw ConfigError("duplicate activity label: " + labels_[static_cast<std::size_t>(i)]);
    }
  }
}

int ActivitySet::index_of(const std::string& label) const {
  auto it = index_.find(label);
  return it == index_.end() ? -1 : it->second;
}

int ActivitySet::require(const std::string& label) const {
  const int idx = index_of(label);
  if (idx < 0) throw DataError("activity label not in configured set: " + label);
  return idx;
}

bool is_distribution(const ActivityDistribution& probs, double tol) {
  if (probs.size() == 0) return false;
  if ((probs.array() < -tol).any() || (probs.array() > 1.0 + tol).any()) return false;
  return std::abs(probs.sum() - 1.0) <= tol;
}

}  // namespace har
