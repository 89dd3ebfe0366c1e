#pragma once

#include <string>

#include "plancompile/plan.hpp"

namespace fastspline {

// Straight-line kernel program for a plan: tables, one unrolled block per
// coset, then "out". Every kernel is evaluated and the one belonging to the
// point's sub-region is kept with select, so the text has no branches.
std::string emit_kernel(const EvaluationPlan& plan);

}  // namespace fastspline
