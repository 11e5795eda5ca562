#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace trailkit::corpus {

/// One raw web document flowing through the mining stages.
struct CandidateDoc {
    std::string doc_id;
    std::string url;
    std::string text;
    std::string source_shard;
};

CandidateDoc doc_from_json(const nlohmann::json& j);
nlohmann::json doc_to_json(const CandidateDoc& doc);

struct FilterConfig {
    std::unordered_set<std::string> common_keywords;
    std::unordered_set<std::string> essential_keywords;
    size_t window_words = 38000;
    size_t min_common_total = 20;
    size_t min_distinct_common = 4;
    size_t min_essential_count = 2;
    size_t min_words = 100;
    size_t max_words = 100000;
    std::unordered_set<std::string> url_allow_schemes = {"http", "https"};
    std::vector<std::string> url_deny_patterns;

    /// Default keyword lists: GUI interaction verbs plus platform terms.
    /// The verbs double as the essential list.
    static FilterConfig defaults();

    static FilterConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    /// Throws FilterError when invariants are violated.
    void validate() const;
};

struct RuleResult {
    bool passed = false;
    size_t observed_count = 0;
    size_t threshold = 0;
};

/// Rule names, in report order: density, diversity, essential, length, url.
struct FilterVerdict {
    bool accepted = false;
    std::map<std::string, RuleResult> rule_results;
    size_t window_word_count = 0;

    nlohmann::json to_json() const;
};

/// Rule-based prefilter over one document. Keyword rules see only the
/// first `window_words` tokens; the length rule sees the whole text.
FilterVerdict prefilter(const CandidateDoc& doc, const FilterConfig& config);

struct FilterStats {
    uint64_t docs_in = 0;
    uint64_t docs_out = 0;
    uint64_t malformed = 0;
    std::vector<size_t> malformed_lines;
    std::map<std::string, uint64_t> per_rule_fail_counts;

    double acceptance_rate() const {
        return docs_in == 0 ? 0.0 : static_cast<double>(docs_out) / static_cast<double>(docs_in);
    }
    nlohmann::json to_json() const;
};

/// Streams line-delimited documents from `in`, writes accepted ones to
/// `out` in input order. Malformed lines and duplicate doc_ids are counted
/// and skipped; processing continues.
FilterStats run_filter_stream(std::istream& in, std::ostream& out, const FilterConfig& config);

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double positive_recall = 0.0;  // recall over label-positive docs
    double accuracy = 0.0;

    nlohmann::json to_json() const;
    /// One row of the filter-performance table: precision / recall / f1.
    std::string report_row(const std::string& name) const;
};

/// Prefilter quality against boolean labels. Throws FilterError on empty input.
Metrics evaluate_filter(const std::vector<std::pair<CandidateDoc, bool>>& labeled,
                        const FilterConfig& config);

Metrics metrics_from_confusion(uint64_t tp, uint64_t fp, uint64_t fn, uint64_t tn);

}  // namespace trailkit::corpus
