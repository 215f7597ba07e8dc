#include "har/context.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace har {

const std::set<std::string>& known_place_traits() {
  static const std::set<std::string> kTraits = {"is_outdoor",         "has_stairs",
                                                "has_elevator",       "has_road",
                                                "is_pedestrian_area", "has_bathroom"};
  return kTraits;
}

namespace {

std::string speed_band_of(double mps, const DiscretizeThresholds& t) {
  if (mps < t.speed_low) return "zero";
  if (mps < t.speed_medium) return "low";
  if (mps < t.speed_high) return "medium";
  return "high";
}

std::string height_trend_of(double meters, const DiscretizeThresholds& t) {
  if (meters < -t.height_eps) return "negative";
  if (meters > t.height_eps) return "positive";
  return "flat";
}

std::string light_band_of(double lux, const DiscretizeThresholds& t) {
  if (lux < t.light_dim) return "dark";
  if (lux < t.light_bright) return "dim";
  return "bright";
}

std::string noise_band_of(double db, const DiscretizeThresholds& t) {
  if (db < t.noise_moderate) return "quiet";
  if (db < t.noise_loud) return "moderate";
  return "loud";
}

}  // namespace

DiscretizedContext discretize(const ContextSnapshot& snapshot, const PlaceVocabulary& vocab,
                              const DiscretizeThresholds& thresholds,
                              std::vector<std::string>* warnings) {
  DiscretizedContext ctx;
  if (snapshot.semantic_place) {
    auto it = vocab.find(*snapshot.semantic_place);
    if (it == vocab.end()) {
      if (warnings) {
        warnings->push_back("place label not in vocabulary, treated as unknown: " +
                            *snapshot.semantic_place);
      }
    } else {
      ctx.semantic_place = it->first;
      ctx.place_traits = it->second;
    }
  }
  if (snapshot.speed_mps) ctx.speed_band = speed_band_of(*snapshot.speed_mps, thresholds);
  if (snapshot.height_variation_m) {
    ctx.height_trend = height_trend_of(*snapshot.height_variation_m, thresholds);
  }
  ctx.weather = snapshot.weather;
  if (snapshot.transit_proximity) {
    ctx.transit_proximity = *snapshot.transit_proximity ? "near" : "far";
  }
  ctx.traffic_level = snapshot.traffic_level;
  if (snapshot.light_level) ctx.light_band = light_band_of(*snapshot.light_level, thresholds);
  if (snapshot.noise_level) ctx.noise_band = noise_band_of(*snapshot.noise_level, thresholds);
  ctx.time_of_day = snapshot.time_of_day.empty()
                        ? time_of_day_from_timestamp(snapshot.timestamp_ms)
                        : snapshot.time_of_day;
  ctx.day_of_week = snapshot.day_of_week.empty()
                        ? day_of_week_from_timestamp(snapshot.timestamp_ms)
                        : snapshot.day_of_week;
  return ctx;
}

namespace {

const std::optional<std::string>& attribute_value(const DiscretizedContext& ctx,
                                                  const std::string& attribute,
                                                  std::optional<std::string>& temporal_storage) {
  if (attribute == "semantic_place") return ctx.semantic_place;
  if (attribute == "speed_band") return ctx.speed_band;
  if (attribute == "height_trend") return ctx.height_trend;
  if (attribute == "weather") return ctx.weather;
  if (attribute == "transit_proximity") return ctx.transit_proximity;
  if (attribute == "traffic_level") return ctx.traffic_level;
  if (attribute == "light_band") return ctx.light_band;
  if (attribute == "noise_band") return ctx.noise_band;
  if (attribute == "time_of_day") {
    temporal_storage = ctx.time_of_day;
    return temporal_storage;
  }
  if (attribute == "day_of_week") {
    temporal_storage = ctx.day_of_week;
    return temporal_storage;
  }
  throw std::logic_error("unvalidated attribute in rule atom: " + attribute);
}

}  // namespace

bool atom_satisfied(const Atom& atom, const DiscretizedContext& ctx) {
  if (atom.kind == AtomKind::TraitRequired || atom.kind == AtomKind::TraitForbidden) {
    if (!ctx.place_traits) return true;  // unknown place: no trait knowledge
    const bool present = ctx.has_trait(atom.attribute);
    return atom.kind == AtomKind::TraitRequired ? present : !present;
  }
  std::optional<std::string> temporal;
  const auto& value = attribute_value(ctx, atom.attribute, temporal);
  if (!value) return true;  // unknown attribute never violates
  switch (atom.kind) {
    case AtomKind::Equal:
      return *value == atom.values.front();
    case AtomKind::NotEqual:
      return *value != atom.values.front();
    case AtomKind::InSet:
      return std::find(atom.values.begin(), atom.values.end(), *value) != atom.values.end();
    default:
      return true;
  }
}

bool is_consistent(const std::string& activity, const DiscretizedContext& ctx,
                   const RuleSet& kb) {
  auto it = kb.rules.find(activity);
  if (it == kb.rules.end()) return true;
  for (const Atom& atom : it->second.atoms) {
    if (!atom_satisfied(atom, ctx)) return false;
  }
  return true;
}

namespace {

struct RuleParser {
  const ActivitySet& activities;
  const ContextVocabulary& vocab;
  std::string origin;
  RuleSet kb;

  [[noreturn]] void fail(int line, const std::string& message) const {
    throw DataError(origin + ":" + std::to_string(line) + ": " + message);
  }

  static std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
  }

  static std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream stream(s);
    std::string part;
    while (std::getline(stream, part, sep)) parts.push_back(trim(part));
    return parts;
  }

  std::vector<std::string> attribute_vocabulary(const std::string& attribute, int line) const {
    if (attribute == "speed_band") return {"zero", "low", "medium", "high"};
    if (attribute == "height_trend") return {"negative", "flat", "positive"};
    if (attribute == "transit_proximity") return {"near", "far"};
    if (attribute == "light_band") return {"dark", "dim", "bright"};
    if (attribute == "noise_band") return {"quiet", "moderate", "loud"};
    if (attribute == "time_of_day") return {"night", "morning", "afternoon", "evening"};
    if (attribute == "day_of_week") {
      return {"monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"};
    }
    if (attribute == "weather") return vocab.weather;
    if (attribute == "traffic_level") return vocab.traffic;
    if (attribute == "semantic_place") {
      std::vector<std::string> places;
      for (const auto& [label, traits] : kb.place_vocab) places.push_back(label);
      return places;
    }
    fail(line, "unknown context attribute: " + attribute);
  }

  void check_value(const std::string& attribute, const std::string& value, int line) const {
    const auto allowed = attribute_vocabulary(attribute, line);
    if (std::find(allowed.begin(), allowed.end(), value) == allowed.end()) {
      fail(line, "value '" + value + "' not in vocabulary of attribute '" + attribute + "'");
    }
  }

  Atom parse_atom(const std::string& text, int line) const {
    Atom atom;
    if (text.rfind("trait(", 0) == 0) {
      if (text.back() != ')' || text.size() < 9) fail(line, "malformed trait atom: " + text);
      const char sign = text[6];
      if (sign != '+' && sign != '-') fail(line, "trait atom needs +name or -name: " + text);
      atom.kind = sign == '+' ? AtomKind::TraitRequired : AtomKind::TraitForbidden;
      atom.attribute = trim(text.substr(7, text.size() - 8));
      if (known_place_traits().count(atom.attribute) == 0) {
        fail(line, "unknown place trait: " + atom.attribute);
      }
      return atom;
    }
    auto ne = text.find("!=");
    if (ne != std::string::npos) {
      atom.kind = AtomKind::NotEqual;
      atom.attribute = trim(text.substr(0, ne));
      atom.values = {trim(text.substr(ne + 2))};
      check_value(atom.attribute, atom.values.front(), line);
      return atom;
    }
    auto in_pos = text.find(" in ");
    if (in_pos != std::string::npos) {
      atom.kind = AtomKind::InSet;
      atom.attribute = trim(text.substr(0, in_pos));
      std::string rest = trim(text.substr(in_pos + 4));
      if (rest.size() < 2 || rest.front() != '{' || rest.back() != '}') {
        fail(line, "'in' atom needs a {v1,v2} set: " + text);
      }
      atom.values = split(rest.substr(1, rest.size() - 2), ',');
      if (atom.values.empty()) fail(line, "'in' atom with empty set: " + text);
      for (const auto& v : atom.values) check_value(atom.attribute, v, line);
      return atom;
    }
    auto eq = text.find('=');
    if (eq != std::string::npos) {
      atom.kind = AtomKind::Equal;
      atom.attribute = trim(text.substr(0, eq));
      atom.values = {trim(text.substr(eq + 1))};
      check_value(atom.attribute, atom.values.front(), line);
      return atom;
    }
    fail(line, "cannot parse atom: " + text);
  }

  void parse(const std::string& text) {
    // Places first so activity rules can reference any declared place.
    std::istringstream first(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(first, raw)) {
      ++line_no;
      std::string line = trim(raw);
      if (line.empty() || line[0] == '#') continue;
      if (line.rfind("place ", 0) != 0) continue;
      const auto colon = line.find(':');
      if (colon == std::string::npos) fail(line_no, "place block needs ':'");
      const std::string label = trim(line.substr(6, colon - 6));
      if (label.empty()) fail(line_no, "place block needs a label");
      if (kb.place_vocab.count(label)) fail(line_no, "duplicate place: " + label);
      std::set<std::string> traits;
      for (const auto& item : split(line.substr(colon + 1), ',')) {
        if (item.empty()) continue;
        if (item[0] != '+') fail(line_no, "place traits are listed as +name: " + item);
        const std::string trait = trim(item.substr(1));
        if (known_place_traits().count(trait) == 0) fail(line_no, "unknown place trait: " + trait);
        traits.insert(trait);
      }
      kb.place_vocab[label] = std::move(traits);
    }

    std::istringstream second(text);
    line_no = 0;
    while (std::getline(second, raw)) {
      ++line_no;
      std::string line = trim(raw);
      if (line.empty() || line[0] == '#' || line.rfind("place ", 0) == 0) continue;
      if (line.rfind("activity ", 0) == 0) {
        const auto colon = line.find(':');
        if (colon == std::string::npos) fail(line_no, "activity rule needs ':'");
        Rule rule;
        rule.activity = trim(line.substr(9, colon - 9));
        if (!activities.contains(rule.activity)) {
          fail(line_no, "rule for activity not in configured set: " + rule.activity);
        }
        if (kb.rules.count(rule.activity)) {
          fail(line_no, "duplicate rule for activity: " + rule.activity);
        }
        const std::string body = trim(line.substr(colon + 1));
        if (!body.empty()) {
          for (const auto& atom_text : split(body, '&')) {
            if (atom_text.empty()) fail(line_no, "empty atom in conjunction");
            rule.atoms.push_back(parse_atom(atom_text, line_no));
          }
        }
        kb.rules[rule.activity] = std::move(rule);
      } else if (line.rfind("minority:", 0) == 0) {
        for (const auto& name : split(line.substr(9), ',')) {
          if (name.empty()) continue;
          if (!activities.contains(name)) {
            fail(line_no, "minority activity not in configured set: " + name);
          }
          kb.minority.insert(name);
        }
      } else {
        fail(line_no, "unrecognized directive: " + line);
      }
    }
  }
};

}  // namespace

RuleSet parse_rules(const std::string& text, const ActivitySet& activities,
                    const ContextVocabulary& vocab, const std::string& origin) {
  RuleParser parser{activities, vocab, origin, RuleSet{}};
  parser.kb.context_vocab = vocab;
  parser.parse(text);
  return std::move(parser.kb);
}

RuleSet load_rules(const std::string& path, const ActivitySet& activities,
                   const ContextVocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open rule file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_rules(buffer.str(), activities, vocab, path);
}

}  // namespace har
