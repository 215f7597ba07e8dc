#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "har/types.hpp"

namespace har {

// Trait names a place may carry. Places not listing a trait do not have it;
// an unknown place carries no trait knowledge at all.
const std::set<std::string>& known_place_traits();

using PlaceVocabulary = std::map<std::string, std::set<std::string>>;

// Symbolic vocabularies for attributes whose values are not fixed by the
// discretizer itself.
struct ContextVocabulary {
  std::vector<std::string> weather = {"sunny", "cloudy", "rainy", "snowy"};
  std::vector<std::string> traffic = {"none", "light", "heavy"};
};

struct DiscretizeThresholds {
  double speed_low = 0.3;     // below: zero
  double speed_medium = 1.5;  // below: low
  double speed_high = 6.0;    // below: medium, at/above: high
  double height_eps = 0.3;    // |variation| <= eps: flat
  double light_dim = 50.0;    // below: dark
  double light_bright = 500.0;
  double noise_moderate = 40.0;  // below: quiet
  double noise_loud = 70.0;
};

// Snapshot attributes mapped to symbols. Unknown raw values stay unknown;
// the temporal attributes are always present.
struct DiscretizedContext {
  std::optional<std::string> semantic_place;
  std::optional<std::set<std::string>> place_traits;  // engaged iff place known
  std::optional<std::string> speed_band;
  std::optional<std::string> height_trend;
  std::optional<std::string> weather;
  std::optional<std::string> transit_proximity;
  std::optional<std::string> traffic_level;
  std::optional<std::string> light_band;
  std::optional<std::string> noise_band;
  std::string time_of_day;
  std::string day_of_week;

  bool has_trait(const std::string& trait) const {
    return place_traits && place_traits->count(trait) > 0;
  }
};

enum class AtomKind { Equal, NotEqual, InSet, TraitRequired, TraitForbidden };

// One conjunct of an activity rule. Atoms over unknown attributes are
// satisfied (open-world leniency).
struct Atom {
  AtomKind kind = AtomKind::Equal;
  std::string attribute;  // or trait name for the trait kinds
  std::vector<std::string> values;
};

struct Rule {
  std::string activity;
  std::vector<Atom> atoms;  // empty conjunction: always consistent
};

// Declarative knowledge base: at most one rule per activity, the place trait
// vocabulary, and the set of a-priori minority activities.
struct RuleSet {
  std::map<std::string, Rule> rules;
  std::set<std::string> minority;
  PlaceVocabulary place_vocab;
  ContextVocabulary context_vocab;
};

DiscretizedContext discretize(const ContextSnapshot& snapshot, const PlaceVocabulary& vocab,
                              const DiscretizeThresholds& thresholds = {},
                              std::vector<std::string>* warnings = nullptr);

bool atom_satisfied(const Atom& atom, const DiscretizedContext& ctx);

// True iff every atom of the activity's rule holds in ctx. Activities without
// a rule are consistent everywhere.
bool is_consistent(const std::string& activity, const DiscretizedContext& ctx, const RuleSet& kb);

// Parses the line-oriented rule grammar:
//   # comment
//   place <label>: +trait, +trait
//   activity <name>: attr=value & attr!=value & attr in {v1,v2} & trait(+t) & trait(-t)
//   minority: name, name
RuleSet load_rules(const std::string& path, const ActivitySet& activities,
                   const ContextVocabulary& vocab = {});

RuleSet parse_rules(const std::string& text, const ActivitySet& activities,
                    const ContextVocabulary& vocab = {}, const std::string& origin = "<string>");

}  // namespace har
