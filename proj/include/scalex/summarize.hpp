#pragma once

#include "scalex/clients.hpp"
#include "scalex/compare.hpp"

namespace scalex {

struct RankingSummary {
    std::string request;   // exact payload, kept for audit
    std::string response;  // verbatim
};

// Sends the full ranked caption list (most-target-aligned first) to the
// summarizer. Throws EndpointUnavailable / Timeout; the request is never
// mutated on retry — retrying is the caller's call, with the same payload.
RankingSummary llm_summarize_ranking(const RankingResult& ranking,
                                     SummarizerClient& endpoint);

}  // namespace scalex
