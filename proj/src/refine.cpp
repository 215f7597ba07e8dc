#include "har/refine.hpp"

namespace har {

RefinedPrediction refine(const ActivityDistribution& pred, const DiscretizedContext& ctx,
                         const RuleSet& kb, const ActivitySet& activities) {
  if (pred.size() != activities.size()) {
    throw DataError("refine: distribution length does not match activity set");
  }
  RefinedPrediction out;
  out.refined = pred;
  double surviving_mass = 0.0;
  bool any_survivor = false;
  for (int i = 0; i < activities.size(); ++i) {
    if (pred[i] <= 0.0) continue;
    if (is_consistent(activities.label(i), ctx, kb)) {
      any_survivor = true;
      surviving_mass += pred[i];
    } else {
      out.refined[i] = 0.0;
      out.removed.push_back(i);
    }
  }
  if (!any_survivor) {
    out.refined = pred;
    out.fallback_used = true;
    return out;
  }
  out.refined /= surviving_mass;
  return out;
}

RefinedPrediction no_refinement(const ActivityDistribution& pred) {
  RefinedPrediction out;
  out.refined = pred;
  return out;
}

}  // namespace har
