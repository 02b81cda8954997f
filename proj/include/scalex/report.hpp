#pragma once

#include <map>
#include <span>
#include <string>

#include "scalex/atlas.hpp"
#include "scalex/compare.hpp"
#include "scalex/validation.hpp"

namespace scalex::report {

// All renderers return deterministic text; callers own file IO. Table floats
// are fixed to 4 decimals, ranking scores to 5.

std::string deltas_csv(std::span<const DefaultDeltaResult> table);

std::string ranking_csv(const RankingResult& ranking);

std::string deltas_json(std::span<const DefaultDeltaResult> table,
                        const std::map<std::string, Correlation>& variant_correlations);

std::string ranking_json(const RankingResult& ranking,
                         const std::vector<LlmExchange>& summary_exchanges,
                         const std::string& summary_text,
                         const std::string& summary_error);

std::string atlas_json(const ConceptAtlas& atlas);

std::string validation_json(const ValidationReport& report);

// Fixed 4-decimal rendering used across tables ("-0.0003").
std::string fixed4(double v);

}  // namespace scalex::report
