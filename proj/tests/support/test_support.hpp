#pragma once

// Shared test helpers: independent oracles and deterministic generators.
// Everything here is deliberately written against the specification text,
// not against the library code paths it checks.

#include <algorithm>
#include <cctype>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "trailkit/corpus_filter.hpp"
#include "trailkit/ngram_classifier.hpp"

namespace testsupport {

/// Independent tokenizer: map non-word bytes to spaces, lowercase, then
/// stream-split. Must agree with the library tokenizer by construction of
/// the rule, not by sharing code.
inline std::vector<std::string> oracle_tokenize(const std::string& text, size_t window) {
    std::string mapped = text;
    for (char& c : mapped) {
        const unsigned char u = static_cast<unsigned char>(c);
        const bool word = (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') ||
                          (u >= '0' && u <= '9') || u >= 0x80;
        c = word ? static_cast<char>(std::tolower(u)) : ' ';
    }
    std::istringstream in(mapped);
    std::vector<std::string> tokens;
    std::string tok;
    while (in >> tok && tokens.size() < window) tokens.push_back(tok);
    return tokens;
}

/// Oracle keyword counts over the windowed tokens.
struct OracleCounts {
    size_t common_total = 0;
    size_t distinct_common = 0;
    size_t essential_best = 0;
    size_t total_words = 0;
};

inline OracleCounts oracle_counts(const std::string& text,
                                  const trailkit::corpus::FilterConfig& cfg) {
    OracleCounts out;
    out.total_words = oracle_tokenize(text, static_cast<size_t>(-1)).size();
    std::map<std::string, size_t> common, essential;
    for (const std::string& tok : oracle_tokenize(text, cfg.window_words)) {
        if (cfg.common_keywords.count(tok)) ++common[tok];
        if (cfg.essential_keywords.count(tok)) ++essential[tok];
    }
    for (const auto& [k, n] : common) out.common_total += n;
    out.distinct_common = common.size();
    for (const auto& [k, n] : essential) out.essential_best = std::max(out.essential_best, n);
    return out;
}

/// Deterministic random document that may or may not trip the filter rules.
inline trailkit::corpus::CandidateDoc random_doc(std::mt19937_64& rng, int index) {
    static const std::vector<std::string> kFiller = {
        "the", "quick", "brown", "fox", "jumps", "over", "lazy", "dog",  "report",
        "data", "value", "number", "page", "story", "river", "cloud", "stone"};
    static const std::vector<std::string> kKeywords = {
        "click", "type", "select", "press", "open", "menu", "settings", "button",
        "browser", "windows", "chrome", "tab", "scroll", "drag", "navigate"};
    trailkit::corpus::CandidateDoc doc;
    doc.doc_id = "rand-" + std::to_string(index);
    doc.url = (rng() % 8 == 0) ? "ftp://example.org/file" : "https://example.org/page";
    doc.source_shard = "random";
    const size_t words = 40 + rng() % 400;
    std::string text;
    for (size_t i = 0; i < words; ++i) {
        const bool keyword = rng() % 5 == 0;
        const auto& pool = keyword ? kKeywords : kFiller;
        text += pool[rng() % pool.size()];
        text += (i % 13 == 12) ? ". " : " ";
    }
    doc.text = text;
    return doc;
}

/// The separable toy corpus: positives carry the sentinel token
/// "tutorialstep" (three occurrences, random positions); negatives never do.
/// Labels alternate so any split has both classes.
inline std::vector<trailkit::ngram::Example> sentinel_corpus(size_t n, uint64_t seed) {
    static const std::vector<std::string> kVocab = {
        "alpha", "bravo", "charlie", "delta", "echo",  "foxtrot", "golf",
        "hotel", "india", "juliet",  "kilo",  "lima",  "mike",    "november"};
    std::mt19937_64 rng(seed);
    std::vector<trailkit::ngram::Example> out;
    for (size_t i = 0; i < n; ++i) {
        const bool positive = i % 2 == 0;
        const size_t words = 6 + rng() % 5;
        std::vector<std::string> tokens;
        for (size_t w = 0; w < words; ++w) tokens.push_back(kVocab[rng() % kVocab.size()]);
        if (positive)
            for (int r = 0; r < 3; ++r)
                tokens.insert(tokens.begin() + static_cast<long>(rng() % (tokens.size() + 1)),
                              "tutorialstep");
        std::string text;
        for (const std::string& tok : tokens) {
            text += tok;
            text += ' ';
        }
        out.emplace_back(text, positive ? trailkit::ngram::Label::tutorial
                                        : trailkit::ngram::Label::non_tutorial);
    }
    return out;
}

/// Brute-force logistic regression on the single feature "contains the
/// sentinel token" — the independent check that the toy corpus really is
/// separable on that one feature.
inline double single_feature_logistic_accuracy(
    const std::vector<trailkit::ngram::Example>& train,
    const std::vector<trailkit::ngram::Example>& test) {
    auto has_sentinel = [](const std::string& text) {
        return text.find("tutorialstep") != std::string::npos ? 1.0 : 0.0;
    };
    double w = 0.0, b = 0.0;
    for (int iter = 0; iter < 2000; ++iter) {
        double gw = 0.0, gb = 0.0;
        for (const auto& [text, label] : train) {
            const double x = has_sentinel(text);
            const double y = label == trailkit::ngram::Label::tutorial ? 1.0 : 0.0;
            const double p = 1.0 / (1.0 + std::exp(-(w * x + b)));
            gw += (p - y) * x;
            gb += (p - y);
        }
        w -= 0.5 * gw / static_cast<double>(train.size());
        b -= 0.5 * gb / static_cast<double>(train.size());
    }
    size_t correct = 0;
    for (const auto& [text, label] : test) {
        const double p = 1.0 / (1.0 + std::exp(-(w * has_sentinel(text) + b)));
        const bool pred = p > 0.5;
        if (pred == (label == trailkit::ngram::Label::tutorial)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace testsupport
