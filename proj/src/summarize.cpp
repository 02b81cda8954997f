#include "scalex/summarize.hpp"

#include <cstdio>

#include "scalex/errors.hpp"

namespace scalex {

RankingSummary llm_summarize_ranking(const RankingResult& ranking,
                                     SummarizerClient& endpoint) {
    if (ranking.rows.empty()) {
        raise(ErrorCode::EmptyInput, "cannot summarize an empty ranking");
    }
    std::string request =
        "These captions are ranked from most aligned with \"" + ranking.concept_id +
        "\" to least aligned. Summarize the characteristics that distinguish the "
        "two ends of the spectrum.\n";
    for (const auto& row : ranking.rows) {
        char score[32];
        std::snprintf(score, sizeof(score), "%+.5f", row.score);
        request += std::string(score) + "  " + row.descriptor_id + "\n";
    }
    RankingSummary summary;
    summary.request = request;
    summary.response = endpoint.complete(request);
    return summary;
}

}  // namespace scalex
