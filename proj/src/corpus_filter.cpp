#include "trailkit/corpus_filter.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "trailkit/errors.hpp"
#include "trailkit/tokenize.hpp"

namespace trailkit::corpus {

using nlohmann::json;

CandidateDoc doc_from_json(const json& j) {
    CandidateDoc doc;
    if (!j.is_object()) throw FilterError("document record is not an object");
    doc.doc_id = j.at("doc_id").get<std::string>();
    doc.url = j.at("url").get<std::string>();
    doc.text = j.at("text").get<std::string>();
    doc.source_shard = j.value("source_shard", "");
    if (doc.url.empty()) throw FilterError("document url is empty");
    if (doc.doc_id.empty()) throw FilterError("document doc_id is empty");
    return doc;
}

json doc_to_json(const CandidateDoc& doc) {
    return json{{"doc_id", doc.doc_id},
                {"url", doc.url},
                {"text", doc.text},
                {"source_shard", doc.source_shard}};
}

FilterConfig FilterConfig::defaults() {
    FilterConfig cfg;
    cfg.essential_keywords = {"click", "type",   "select", "drag",
                              "scroll", "press", "open",   "navigate"};
    cfg.common_keywords = cfg.essential_keywords;
    for (const char* term : {"macos", "windows", "linux", "android", "ios", "chrome",
                             "browser", "menu", "settings", "button", "tab"})
        cfg.common_keywords.insert(term);
    return cfg;
}

static std::unordered_set<std::string> string_set(const json& j) {
    std::unordered_set<std::string> out;
    for (const auto& v : j) out.insert(v.get<std::string>());
    return out;
}

FilterConfig FilterConfig::from_json(const json& j) {
    FilterConfig cfg = defaults();
    if (j.contains("common_keywords")) cfg.common_keywords = string_set(j["common_keywords"]);
    if (j.contains("essential_keywords"))
        cfg.essential_keywords = string_set(j["essential_keywords"]);
    cfg.window_words = j.value("window_words", cfg.window_words);
    cfg.min_common_total = j.value("min_common_total", cfg.min_common_total);
    cfg.min_distinct_common = j.value("min_distinct_common", cfg.min_distinct_common);
    cfg.min_essential_count = j.value("min_essential_count", cfg.min_essential_count);
    cfg.min_words = j.value("min_words", cfg.min_words);
    cfg.max_words = j.value("max_words", cfg.max_words);
    if (j.contains("url_allow_schemes")) cfg.url_allow_schemes = string_set(j["url_allow_schemes"]);
    if (j.contains("url_deny_patterns"))
        cfg.url_deny_patterns = j["url_deny_patterns"].get<std::vector<std::string>>();
    cfg.validate();
    return cfg;
}

json FilterConfig::to_json() const {
    auto sorted = [](const std::unordered_set<std::string>& s) {
        std::vector<std::string> v(s.begin(), s.end());
        std::sort(v.begin(), v.end());
        return v;
    };
    return json{{"common_keywords", sorted(common_keywords)},
                {"essential_keywords", sorted(essential_keywords)},
                {"window_words", window_words},
                {"min_common_total", min_common_total},
                {"min_distinct_common", min_distinct_common},
                {"min_essential_count", min_essential_count},
                {"min_words", min_words},
                {"max_words", max_words},
                {"url_allow_schemes", sorted(url_allow_schemes)},
                {"url_deny_patterns", url_deny_patterns}};
}

void FilterConfig::validate() const {
    if (window_words == 0) throw FilterError("window_words must be > 0");
    if (min_distinct_common > common_keywords.size())
        throw FilterError("min_distinct_common exceeds the size of common_keywords");
    if (min_words > max_words) throw FilterError("min_words exceeds max_words");
}

static std::string lowercase(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = ascii_lower(c);
    return out;
}

/// Scheme allowed and no deny pattern matches (case-insensitive substring).
static RuleResult url_rule(const std::string& url, const FilterConfig& cfg) {
    RuleResult r;
    r.threshold = 1;
    std::string low = lowercase(url);
    size_t sep = low.find("://");
    bool ok = sep != std::string::npos && cfg.url_allow_schemes.count(low.substr(0, sep)) > 0;
    if (ok) {
        for (const auto& pattern : cfg.url_deny_patterns) {
            if (low.find(lowercase(pattern)) != std::string::npos) {
                ok = false;
                break;
            }
        }
    }
    r.passed = ok;
    r.observed_count = ok ? 1 : 0;
    return r;
}

FilterVerdict prefilter(const CandidateDoc& doc, const FilterConfig& config) {
    FilterVerdict v;

    // One pass over all tokens: keyword counts inside the window, total
    // word count for the length rule.
    std::unordered_map<std::string, size_t> common_hits;
    size_t common_total = 0;
    std::unordered_map<std::string, size_t> essential_hits;
    size_t total_words = 0;
    size_t window_count = 0;
    std::string tok_buf;
    for_each_token(doc.text, static_cast<size_t>(-1), [&](std::string_view tok) {
        ++total_words;
        if (total_words > config.window_words) return;
        ++window_count;
        tok_buf.assign(tok);
        if (config.common_keywords.count(tok_buf)) {
            ++common_total;
            ++common_hits[tok_buf];
        }
        if (config.essential_keywords.count(tok_buf)) ++essential_hits[tok_buf];
    });
    v.window_word_count = window_count;

    size_t essential_best = 0;
    for (const auto& [kw, n] : essential_hits) essential_best = std::max(essential_best, n);

    v.rule_results["density"] = {common_total >= config.min_common_total, common_total,
                                 config.min_common_total};
    v.rule_results["diversity"] = {common_hits.size() >= config.min_distinct_common,
                                   common_hits.size(), config.min_distinct_common};
    v.rule_results["essential"] = {essential_best >= config.min_essential_count, essential_best,
                                   config.min_essential_count};
    v.rule_results["length"] = {total_words >= config.min_words && total_words <= config.max_words,
                                total_words, config.min_words};
    v.rule_results["url"] = url_rule(doc.url, config);

    v.accepted = true;
    for (const auto& [name, r] : v.rule_results) v.accepted = v.accepted && r.passed;
    return v;
}

json FilterVerdict::to_json() const {
    json rules = json::object();
    for (const auto& [name, r] : rule_results)
        rules[name] = json{{"passed", r.passed},
                           {"observed_count", r.observed_count},
                           {"threshold", r.threshold}};
    return json{{"accepted", accepted},
                {"rule_results", rules},
                {"window_word_count", window_word_count}};
}

json FilterStats::to_json() const {
    return json{{"docs_in", docs_in},
                {"docs_out", docs_out},
                {"acceptance_rate", acceptance_rate()},
                {"malformed", malformed},
                {"malformed_lines", malformed_lines},
                {"per_rule_fail_counts", per_rule_fail_counts}};
}

FilterStats run_filter_stream(std::istream& in, std::ostream& out, const FilterConfig& config) {
    config.validate();
    FilterStats stats;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        CandidateDoc doc;
        try {
            doc = doc_from_json(json::parse(line));
            if (!seen_ids.insert(doc.doc_id).second)
                throw FilterError("duplicate doc_id " + doc.doc_id);
        } catch (const std::exception&) {
            ++stats.malformed;
            stats.malformed_lines.push_back(line_no);
            continue;
        }
        ++stats.docs_in;
        FilterVerdict v = prefilter(doc, config);
        if (v.accepted) {
            ++stats.docs_out;
            out << doc_to_json(doc).dump() << '\n';
        } else {
            for (const auto& [name, r] : v.rule_results)
                if (!r.passed) ++stats.per_rule_fail_counts[name];
        }
    }
    return stats;
}

Metrics metrics_from_confusion(uint64_t tp, uint64_t fp, uint64_t fn, uint64_t tn) {
    Metrics m;
    auto ratio = [](uint64_t num, uint64_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    m.precision = ratio(tp, tp + fp);
    m.recall = ratio(tp, tp + fn);
    m.positive_recall = m.recall;
    m.f1 = (m.precision + m.recall) == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    m.accuracy = ratio(tp + tn, tp + fp + fn + tn);
    return m;
}

Metrics evaluate_filter(const std::vector<std::pair<CandidateDoc, bool>>& labeled,
                        const FilterConfig& config) {
    if (labeled.empty()) throw FilterError("evaluate_filter: empty labeled set");
    uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (const auto& [doc, label] : labeled) {
        bool predicted = prefilter(doc, config).accepted;
        if (predicted && label) ++tp;
        else if (predicted && !label) ++fp;
        else if (!predicted && label) ++fn;
        else ++tn;
    }
    return metrics_from_confusion(tp, fp, fn, tn);
}

json Metrics::to_json() const {
    return json{{"precision", precision},
                {"recall", recall},
                {"f1", f1},
                {"positive_recall", positive_recall},
                {"accuracy", accuracy}};
}

std::string Metrics::report_row(const std::string& name) const {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-12s precision=%.4f recall=%.4f f1=%.4f", name.c_str(),
                  precision, recall, f1);
    return buf;
}

}  // namespace trailkit::corpus
