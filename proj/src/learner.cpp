#include "har/learner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace har {

namespace {

double gini(const Eigen::VectorXd& counts) {
  const double total = counts.sum();
  if (total <= 0.0) return 0.0;
  return 1.0 - (counts / total).squaredNorm();
}

}  // namespace

OnlineForest::OnlineForest(int n_classes, const ForestParams& params)
    : n_classes_(n_classes), params_(params) {
  if (n_classes < 1) throw ConfigError("forest needs at least one class");
  if (params.trees < 1) throw ConfigError("forest needs at least one tree");
  trees_.resize(static_cast<std::size_t>(params.trees));
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    trees_[t].rng.seed(params.seed + 0x9e3779b97f4a7c15ULL * (t + 1));
  }
  offered_per_class_ = Eigen::VectorXd::Zero(n_classes);
}

void OnlineForest::ensure_initialized(int dimension) {
  if (dimension_ < 0) {
    if (dimension < 1) throw DataError("forest: empty feature vector");
    dimension_ = dimension;
    for (auto& tree : trees_) {
      Node root;
      root.class_counts = Eigen::VectorXd::Zero(n_classes_);
      root.candidates = make_candidates(tree);
      tree.nodes.push_back(std::move(root));
    }
  } else if (dimension != dimension_) {
    throw DataError("forest: feature dimension changed from " + std::to_string(dimension_) +
                    " to " + std::to_string(dimension));
  }
}

std::vector<OnlineForest::SplitCandidate> OnlineForest::make_candidates(Tree& tree) const {
  int f = params_.candidates_per_node;
  if (f <= 0) f = std::max(1, static_cast<int>(std::floor(std::sqrt(dimension_))));
  f = std::min(f, dimension_);

  // Partial Fisher-Yates draw of f distinct feature indices.
  std::vector<int> pool(static_cast<std::size_t>(dimension_));
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<SplitCandidate> candidates(static_cast<std::size_t>(f));
  for (int i = 0; i < f; ++i) {
    std::uniform_int_distribution<int> pick(i, dimension_ - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(tree.rng))]);
    candidates[static_cast<std::size_t>(i)].feature = pool[static_cast<std::size_t>(i)];
    candidates[static_cast<std::size_t>(i)].left_counts = Eigen::VectorXd::Zero(n_classes_);
    candidates[static_cast<std::size_t>(i)].right_counts = Eigen::VectorXd::Zero(n_classes_);
  }
  return candidates;
}

int OnlineForest::leaf_for(const Tree& tree, const Eigen::VectorXd& fv) const {
  int at = 0;
  while (tree.nodes[static_cast<std::size_t>(at)].left >= 0) {
    const Node& node = tree.nodes[static_cast<std::size_t>(at)];
    at = fv[node.split_feature] <= node.split_threshold ? node.left : node.right;
  }
  return at;
}

void OnlineForest::insert(Tree& tree, const Eigen::VectorXd& fv, int label) {
  const int leaf_index = leaf_for(tree, fv);
  Node& leaf = tree.nodes[static_cast<std::size_t>(leaf_index)];
  leaf.class_counts[label] += 1.0;
  leaf.absorbed += 1;

  for (SplitCandidate& cand : leaf.candidates) {
    const double value = fv[cand.feature];
    if (!cand.threshold_set) {
      if (!cand.has_first) {
        cand.has_first = true;
        cand.first_value = value;
        cand.first_label = label;
        continue;
      }
      if (value == cand.first_value) continue;
      const double lo = std::min(cand.first_value, value);
      const double hi = std::max(cand.first_value, value);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      cand.threshold = lo + unit(tree.rng) * (hi - lo);
      cand.threshold_set = true;
      // Route the retained first sample along with the current one.
      auto& first_side =
          cand.first_value <= cand.threshold ? cand.left_counts : cand.right_counts;
      first_side[cand.first_label] += 1.0;
    }
    auto& side = value <= cand.threshold ? cand.left_counts : cand.right_counts;
    side[label] += 1.0;
  }

  maybe_split(tree, leaf_index);
}

void OnlineForest::maybe_split(Tree& tree, int node_index) {
  {
    const Node& node = tree.nodes[static_cast<std::size_t>(node_index)];
    if (node.absorbed < params_.min_split_samples) return;
    if (node.depth >= params_.max_depth) return;
  }

  int best = -1;
  double best_gain = 0.0;
  const Node& node = tree.nodes[static_cast<std::size_t>(node_index)];
  for (std::size_t i = 0; i < node.candidates.size(); ++i) {
    const SplitCandidate& cand = node.candidates[i];
    if (!cand.threshold_set) continue;
    const double n_left = cand.left_counts.sum();
    const double n_right = cand.right_counts.sum();
    if (n_left <= 0.0 || n_right <= 0.0) continue;
    const double n_total = n_left + n_right;
    const double gain = gini(cand.left_counts + cand.right_counts) -
                        (n_left / n_total) * gini(cand.left_counts) -
                        (n_right / n_total) * gini(cand.right_counts);
    if (best < 0 || gain > best_gain) {
      best = static_cast<int>(i);
      best_gain = gain;
    }
  }
  if (best < 0 || best_gain < params_.min_gain) return;

  SplitCandidate chosen = node.candidates[static_cast<std::size_t>(best)];
  Node left_child;
  left_child.depth = node.depth + 1;
  left_child.class_counts = chosen.left_counts;
  left_child.candidates = make_candidates(tree);
  Node right_child;
  right_child.depth = node.depth + 1;
  right_child.class_counts = chosen.right_counts;
  right_child.candidates = make_candidates(tree);

  const int left_index = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back(std::move(left_child));
  tree.nodes.push_back(std::move(right_child));

  Node& parent = tree.nodes[static_cast<std::size_t>(node_index)];
  parent.left = left_index;
  parent.right = left_index + 1;
  parent.split_feature = chosen.feature;
  parent.split_threshold = chosen.threshold;
  parent.candidates.clear();
  parent.candidates.shrink_to_fit();
}

void OnlineForest::update(const LabeledSample& sample) {
  if (sample.label < 0 || sample.label >= n_classes_) {
    throw DataError("forest update: label index out of range");
  }
  ensure_initialized(static_cast<int>(sample.fv.size()));
  offered_per_class_[sample.label] += 1.0;
  ++updates_offered_;
  if (sample.weight <= 0.0) return;
  for (auto& tree : trees_) {
    std::poisson_distribution<int> replicate(sample.weight);
    const int r = replicate(tree.rng);
    for (int k = 0; k < r; ++k) insert(tree, sample.fv, sample.label);
  }
}

bool OnlineForest::bootstrapped() const {
  return dimension_ > 0 && (offered_per_class_.array() > 0.0).all();
}

ActivityDistribution OnlineForest::predict(const Eigen::VectorXd& fv) const {
  if (!bootstrapped()) {
    throw std::logic_error("forest predict: model not bootstrapped (unseen classes remain)");
  }
  if (fv.size() != dimension_) throw DataError("forest predict: feature dimension mismatch");
  ActivityDistribution probs = ActivityDistribution::Zero(n_classes_);
  for (const auto& tree : trees_) {
    const Node& leaf = tree.nodes[static_cast<std::size_t>(leaf_for(tree, fv))];
    probs += (leaf.class_counts.array() + 1.0).matrix() /
             (leaf.class_counts.sum() + static_cast<double>(n_classes_));
  }
  probs /= probs.sum();
  return probs;
}

std::vector<std::size_t> bootstrap_selection(const std::vector<int>& labels_in_order,
                                             const ActivitySet& activities, int window_seconds,
                                             int t_seconds) {
  if (window_seconds < 1) throw ConfigError("window_seconds must be >= 1");
  if (t_seconds < 1) throw ConfigError("bootstrap budget must be >= 1 second");
  const long needed = (t_seconds + window_seconds - 1) / window_seconds;
  std::vector<long> taken(static_cast<std::size_t>(activities.size()), 0);
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < labels_in_order.size(); ++i) {
    const int label = labels_in_order[i];
    if (label < 0 || label >= activities.size()) {
      throw DataError("bootstrap: label index out of range");
    }
    if (taken[static_cast<std::size_t>(label)] < needed) {
      ++taken[static_cast<std::size_t>(label)];
      selected.push_back(i);
    }
  }
  for (int c = 0; c < activities.size(); ++c) {
    if (taken[static_cast<std::size_t>(c)] < needed) {
      throw DataError("bootstrap: class '" + activities.label(c) + "' has only " +
                      std::to_string(taken[static_cast<std::size_t>(c)] * window_seconds) +
                      " s of data, need " + std::to_string(t_seconds) + " s");
    }
  }
  return selected;
}

OnlineForest bootstrap(const std::vector<LabeledSample>& stream, const ActivitySet& activities,
                       int window_seconds, int t_seconds, const ForestParams& params) {
  std::vector<int> labels;
  labels.reserve(stream.size());
  for (const auto& sample : stream) labels.push_back(sample.label);
  const auto selected = bootstrap_selection(labels, activities, window_seconds, t_seconds);
  OnlineForest model(activities.size(), params);
  for (const std::size_t i : selected) model.update(stream[i]);
  return model;
}

// ---------------------------------------------------------------------------
// Context feature block

namespace {

const std::vector<std::string>& times_of_day() {
  static const std::vector<std::string> kValues = {"night", "morning", "afternoon", "evening"};
  return kValues;
}

const std::vector<std::string>& days_of_week() {
  static const std::vector<std::string> kValues = {"monday",   "tuesday", "wednesday", "thursday",
                                                   "friday",   "saturday", "sunday"};
  return kValues;
}

void append_numeric_stats(std::vector<double>& out, const std::vector<double>& known) {
  if (known.empty()) {
    out.insert(out.end(), {0.0, 0.0, 0.0, 0.0});
    return;
  }
  const Eigen::Map<const Eigen::VectorXd> values(known.data(),
                                                 static_cast<Eigen::Index>(known.size()));
  const double mean = values.mean();
  const double var = (values.array() - mean).square().mean();
  out.push_back(mean);
  out.push_back(var);
  out.push_back(values.maxCoeff() - values.minCoeff());
  out.push_back(1.0);
}

void append_one_hot(std::vector<double>& out, const std::vector<std::string>& vocabulary,
                    const std::optional<std::string>& value) {
  for (const auto& v : vocabulary) {
    out.push_back(value && *value == v ? 1.0 : 0.0);
  }
}

}  // namespace

int ContextFeatureSchema::dimension() const {
  return 4 * 4 + static_cast<int>(places.size() + weather.size() + traffic.size()) + 2 +
         static_cast<int>(times_of_day().size() + days_of_week().size());
}

std::vector<std::string> ContextFeatureSchema::names() const {
  std::vector<std::string> out;
  for (const char* attr : {"speed", "height_variation", "light", "noise"}) {
    for (const char* stat : {"mean", "variance", "range", "known"}) {
      out.push_back(std::string("ctx.") + attr + "." + stat);
    }
  }
  for (const auto& v : places) out.push_back("ctx.place=" + v);
  for (const auto& v : weather) out.push_back("ctx.weather=" + v);
  for (const char* v : {"near", "far"}) out.push_back(std::string("ctx.transit=") + v);
  for (const auto& v : traffic) out.push_back("ctx.traffic=" + v);
  for (const auto& v : times_of_day()) out.push_back("ctx.time_of_day=" + v);
  for (const auto& v : days_of_week()) out.push_back("ctx.day_of_week=" + v);
  return out;
}

Eigen::VectorXd context_feature_block(const std::vector<ContextSnapshot>& recent,
                                      const ContextFeatureSchema& schema) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(schema.dimension()));

  const auto collect = [&recent](auto member) {
    std::vector<double> known;
    for (const auto& snap : recent) {
      if (snap.*member) known.push_back(*(snap.*member));
    }
    return known;
  };
  append_numeric_stats(out, collect(&ContextSnapshot::speed_mps));
  append_numeric_stats(out, collect(&ContextSnapshot::height_variation_m));
  append_numeric_stats(out, collect(&ContextSnapshot::light_level));
  append_numeric_stats(out, collect(&ContextSnapshot::noise_level));

  const auto latest = [&recent](auto member) -> std::optional<std::string> {
    for (auto it = recent.rbegin(); it != recent.rend(); ++it) {
      if ((*it).*member) return *((*it).*member);
    }
    return std::nullopt;
  };
  append_one_hot(out, schema.places, latest(&ContextSnapshot::semantic_place));
  append_one_hot(out, schema.weather, latest(&ContextSnapshot::weather));
  std::optional<std::string> transit;
  for (auto it = recent.rbegin(); it != recent.rend(); ++it) {
    if (it->transit_proximity) {
      transit = *it->transit_proximity ? "near" : "far";
      break;
    }
  }
  append_one_hot(out, {"near", "far"}, transit);
  append_one_hot(out, schema.traffic, latest(&ContextSnapshot::traffic_level));
  std::optional<std::string> tod;
  std::optional<std::string> dow;
  if (!recent.empty()) {
    tod = recent.back().time_of_day;
    dow = recent.back().day_of_week;
  }
  append_one_hot(out, times_of_day(), tod);
  append_one_hot(out, days_of_week(), dow);

  return Eigen::Map<const Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

Eigen::VectorXd make_context_features(const Eigen::VectorXd& fv,
                                      const std::vector<ContextSnapshot>& recent,
                                      const ContextFeatureSchema& schema) {
  const Eigen::VectorXd block = context_feature_block(recent, schema);
  Eigen::VectorXd out(fv.size() + block.size());
  out << fv, block;
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = arr[static_cast<std::size_t>(i)].get<double>();
  return v;
}

}  // namespace

struct ForestCodec {
  static json encode(const OnlineForest& forest) {
    json doc;
    doc["format"] = "har-online-forest";
    doc["version"] = 1;
    doc["params"] = {{"trees", forest.params_.trees},
                     {"min_split_samples", forest.params_.min_split_samples},
                     {"min_gain", forest.params_.min_gain},
                     {"candidates_per_node", forest.params_.candidates_per_node},
                     {"max_depth", forest.params_.max_depth},
                     {"seed", forest.params_.seed}};
    doc["n_classes"] = forest.n_classes_;
    doc["dimension"] = forest.dimension_;
    doc["offered_per_class"] = vector_to_json(forest.offered_per_class_);
    doc["updates_offered"] = forest.updates_offered_;
    json trees = json::array();
    for (const auto& tree : forest.trees_) {
      json jt;
      std::ostringstream rng_state;
      rng_state << tree.rng;
      jt["rng"] = rng_state.str();
      json nodes = json::array();
      for (const auto& node : tree.nodes) {
        json jn;
        jn["left"] = node.left;
        jn["right"] = node.right;
        jn["split_feature"] = node.split_feature;
        jn["split_threshold"] = node.split_threshold;
        jn["depth"] = node.depth;
        jn["class_counts"] = vector_to_json(node.class_counts);
        jn["absorbed"] = node.absorbed;
        json cands = json::array();
        for (const auto& cand : node.candidates) {
          cands.push_back({{"feature", cand.feature},
                           {"threshold_set", cand.threshold_set},
                           {"threshold", cand.threshold},
                           {"has_first", cand.has_first},
                           {"first_value", cand.first_value},
                           {"first_label", cand.first_label},
                           {"left", vector_to_json(cand.left_counts)},
                           {"right", vector_to_json(cand.right_counts)}});
        }
        jn["candidates"] = std::move(cands);
        nodes.push_back(std::move(jn));
      }
      jt["nodes"] = std::move(nodes);
      trees.push_back(std::move(jt));
    }
    doc["trees"] = std::move(trees);
    return doc;
  }

  static OnlineForest decode(const json& doc) {
    if (doc.value("format", "") != "har-online-forest") {
      throw DataError("model file: unrecognized format header");
    }
    if (doc.value("version", 0) != 1) {
      throw DataError("model file: unsupported version");
    }
    ForestParams params;
    const auto& jp = doc.at("params");
    params.trees = jp.at("trees").get<int>();
    params.min_split_samples = jp.at("min_split_samples").get<int>();
    params.min_gain = jp.at("min_gain").get<double>();
    params.candidates_per_node = jp.at("candidates_per_node").get<int>();
    params.max_depth = jp.at("max_depth").get<int>();
    params.seed = jp.at("seed").get<std::uint64_t>();

    OnlineForest forest(doc.at("n_classes").get<int>(), params);
    forest.dimension_ = doc.at("dimension").get<int>();
    forest.offered_per_class_ = vector_from_json(doc.at("offered_per_class"));
    forest.updates_offered_ = doc.at("updates_offered").get<long>();
    const auto& jtrees = doc.at("trees");
    if (jtrees.size() != forest.trees_.size()) {
      throw DataError("model file: tree count does not match params");
    }
    for (std::size_t t = 0; t < forest.trees_.size(); ++t) {
      auto& tree = forest.trees_[t];
      std::istringstream rng_state(jtrees[t].at("rng").get<std::string>());
      rng_state >> tree.rng;
      tree.nodes.clear();
      for (const auto& jn : jtrees[t].at("nodes")) {
        OnlineForest::Node node;
        node.left = jn.at("left").get<int>();
        node.right = jn.at("right").get<int>();
        node.split_feature = jn.at("split_feature").get<int>();
        node.split_threshold = jn.at("split_threshold").get<double>();
        node.depth = jn.at("depth").get<int>();
        node.class_counts = vector_from_json(jn.at("class_counts"));
        node.absorbed = jn.at("absorbed").get<long>();
        for (const auto& jc : jn.at("candidates")) {
          OnlineForest::SplitCandidate cand;
          cand.feature = jc.at("feature").get<int>();
          cand.threshold_set = jc.at("threshold_set").get<bool>();
          cand.threshold = jc.at("threshold").get<double>();
          cand.has_first = jc.at("has_first").get<bool>();
          cand.first_value = jc.at("first_value").get<double>();
          cand.first_label = jc.at("first_label").get<int>();
          cand.left_counts = vector_from_json(jc.at("left"));
          cand.right_counts = vector_from_json(jc.at("right"));
          node.candidates.push_back(std::move(cand));
        }
        tree.nodes.push_back(std::move(node));
      }
    }
    return forest;
  }
};

void OnlineForest::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open model file for writing: " + path);
  out << ForestCodec::encode(*this).dump(1) << '\n';
}

OnlineForest OnlineForest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("model file parse error: " + std::string(e.what()));
  }
  return ForestCodec::decode(doc);
}

}  // namespace har
