#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "har/types.hpp"

namespace har {

struct ForestParams {
  int trees = 10;
  int min_split_samples = 20;   // samples a leaf absorbs before it may split
  double min_gain = 0.01;       // minimum Gini gain for a split
  int candidates_per_node = 0;  // 0: floor(sqrt(d)), at least 1
  int max_depth = 20;
  std::uint64_t seed = 1;
};

struct LabeledSample {
  Eigen::VectorXd fv;
  int label = 0;        // index into the activity set
  double weight = 1.0;  // Poisson mean for online bagging
};

// Incremental multi-class random forest. Trees grow one leaf split at a time
// from per-leaf candidate tests (axis-aligned thresholds sampled from observed
// values); online bagging replicates each sample Poisson(weight) times per
// tree. Leaf distributions are Laplace-smoothed with pseudo-count 1, so
// predictions are strictly positive.
class OnlineForest {
 public:
  OnlineForest(int n_classes, const ForestParams& params);

  void update(const LabeledSample& sample);
  ActivityDistribution predict(const Eigen::VectorXd& fv) const;

  bool bootstrapped() const;  // at least one sample offered per class
  long updates_offered() const { return updates_offered_; }
  int n_classes() const { return n_classes_; }
  int dimension() const { return dimension_; }
  const ForestParams& params() const { return params_; }

  void save(const std::string& path) const;
  static OnlineForest load(const std::string& path);

 private:
  struct SplitCandidate {
    int feature = -1;
    bool threshold_set = false;
    double threshold = 0.0;
    bool has_first = false;
    double first_value = 0.0;
    int first_label = 0;
    Eigen::VectorXd left_counts;
    Eigen::VectorXd right_counts;
  };

  struct Node {
    int left = -1;  // leaf iff left < 0
    int right = -1;
    int split_feature = -1;
    double split_threshold = 0.0;
    int depth = 0;
    Eigen::VectorXd class_counts;
    std::vector<SplitCandidate> candidates;
    long absorbed = 0;  // samples absorbed at this leaf since creation
  };

  struct Tree {
    std::vector<Node> nodes;
    std::mt19937_64 rng;
  };

  void ensure_initialized(int dimension);
  std::vector<SplitCandidate> make_candidates(Tree& tree) const;
  void insert(Tree& tree, const Eigen::VectorXd& fv, int label);
  void maybe_split(Tree& tree, int node_index);
  int leaf_for(const Tree& tree, const Eigen::VectorXd& fv) const;

  friend struct ForestCodec;

  int n_classes_ = 0;
  int dimension_ = -1;
  ForestParams params_;
  std::vector<Tree> trees_;
  Eigen::VectorXd offered_per_class_;
  long updates_offered_ = 0;
};

// Selects the bootstrap budget from a labeled stream: the first
// ceil(t_seconds / window_seconds) segments of every class, in stream order.
// Throws DataError naming the first class with insufficient data.
std::vector<std::size_t> bootstrap_selection(const std::vector<int>& labels_in_order,
                                             const ActivitySet& activities, int window_seconds,
                                             int t_seconds);

// Builds a fresh forest from the bootstrap budget of `stream`.
OnlineForest bootstrap(const std::vector<LabeledSample>& stream, const ActivitySet& activities,
                       int window_seconds, int t_seconds, const ForestParams& params);

// Layout of the context feature block appended by make_context_features.
struct ContextFeatureSchema {
  std::vector<std::string> places;
  std::vector<std::string> weather;
  std::vector<std::string> traffic;

  int dimension() const;
  std::vector<std::string> names() const;
};

// Statistical features over the numeric context attributes observed in the
// window (mean, variance, max-min, plus a known bit; zeros when everything is
// unknown) and one-hot indicators for the symbolic attributes (latest known
// value; all-zero when unknown).
Eigen::VectorXd context_feature_block(const std::vector<ContextSnapshot>& recent,
                                      const ContextFeatureSchema& schema);

Eigen::VectorXd make_context_features(const Eigen::VectorXd& fv,
                                      const std::vector<ContextSnapshot>& recent,
                                      const ContextFeatureSchema& schema);

}  // namespace har
