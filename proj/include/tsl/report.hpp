#pragma once

#include "tsl/estimates.hpp"

namespace tsl {

/// FNV-1a over the canonical parameter dump; rows with the same lemma id but
/// different parameters stay separate under this key.
std::string param_hash(const Json& params);

/// Aggregates verify reports: per-(lemma, params) rows with summed instance
/// counts and the worst slack, plus global totals.
Json report_merge(const std::vector<Json>& reports);

}  // namespace tsl
