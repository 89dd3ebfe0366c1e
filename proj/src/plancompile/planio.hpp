#pragma once

#include <string>
#include <string_view>

#include "plancompile/plan.hpp"

namespace fastspline {

inline constexpr int kPlanFormatVersion = 1;

// JSON document: {"format", "version", "checksum", "plan"}. The checksum is
// the SHA-256 of the compact dump of "plan".
std::string serialize_plan(const EvaluationPlan& plan);
EvaluationPlan deserialize_plan(std::string_view document);

std::string sha256_hex(std::string_view data);

}  // namespace fastspline
