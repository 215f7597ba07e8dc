#pragma once

#include <vector>

#include "har/context.hpp"
#include "har/types.hpp"

namespace har {

// A context-refined prediction. `refined` keeps the full activity-set length
// with zeros at removed entries. When every candidate is inconsistent the
// original prediction is passed through and fallback_used is set.
struct RefinedPrediction {
  ActivityDistribution refined;
  std::vector<int> removed;  // activity indices pruned by the context
  bool fallback_used = false;

  int argmax() const {
    Eigen::Index best = 0;
    refined.maxCoeff(&best);
    return static_cast<int>(best);
  }
  double r_star() const { return refined.maxCoeff(); }
};

// Zeroes every context-inconsistent activity with positive probability and
// renormalizes the survivors.
RefinedPrediction refine(const ActivityDistribution& pred, const DiscretizedContext& ctx,
                         const RuleSet& kb, const ActivitySet& activities);

// Identity refinement used by the modes that skip context reasoning.
RefinedPrediction no_refinement(const ActivityDistribution& pred);

}  // namespace har
