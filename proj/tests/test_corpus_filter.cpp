#include <sstream>

#include "doctest.h"
#include "support/test_support.hpp"
#include "trailkit/corpus_filter.hpp"
#include "trailkit/errors.hpp"
#include "trailkit/tokenize.hpp"

#include <nlohmann/json.hpp>

using namespace trailkit;
using namespace trailkit::corpus;
using nlohmann::json;

TEST_CASE("tokenize_window basics") {
    CHECK(tokenize_window("", 38000).empty());

    auto tokens = tokenize_window("Click the File menu.", 38000);
    CHECK(tokens == std::vector<std::string>{"click", "the", "file", "menu"});

    std::string many;
    for (int i = 0; i < 40001; ++i) many += "click ";
    CHECK(tokenize_window(many, 38000).size() == 38000);
}

TEST_CASE("tokenize_window splits on punctuation and lowercases") {
    auto tokens = tokenize_window("How-To: can't stop; URL=https://x.y", 100);
    CHECK(tokens == std::vector<std::string>{"how", "to", "can", "t", "stop", "url", "https",
                                             "x", "y"});
    // agrees with the independent oracle tokenizer
    CHECK(tokens == testsupport::oracle_tokenize("How-To: can't stop; URL=https://x.y", 100));
}

namespace {

CandidateDoc make_doc(const std::string& id, const std::string& url, const std::string& text) {
    return CandidateDoc{id, url, text, "shard-0"};
}

/// ~500 words, 5 distinct common keywords totaling 25 hits, "click" x3.
std::string designed_positive_text() {
    std::string text = "This guide shows the steps. ";
    // 25 common-keyword occurrences over 5 distinct keywords
    for (int i = 0; i < 3; ++i) text += "click ";          // essential, 3 times
    for (int i = 0; i < 6; ++i) text += "menu ";
    for (int i = 0; i < 6; ++i) text += "settings ";
    for (int i = 0; i < 5; ++i) text += "button ";
    for (int i = 0; i < 5; ++i) text += "browser ";
    while (testsupport::oracle_tokenize(text, 100000).size() < 500) text += "filler word here ";
    return text;
}

}  // namespace

TEST_CASE("prefilter accepts the designed positive") {
    FilterConfig cfg = FilterConfig::defaults();
    CandidateDoc doc = make_doc("pos-1", "https://example.com/how-to", designed_positive_text());

    // Independent recount over the fixture text.
    auto oracle = testsupport::oracle_counts(doc.text, cfg);
    REQUIRE(oracle.common_total >= 20);
    REQUIRE(oracle.distinct_common >= 4);
    REQUIRE(oracle.essential_best >= 2);
    REQUIRE(oracle.total_words >= 100);

    FilterVerdict v = prefilter(doc, cfg);
    CHECK(v.accepted);
    CHECK(v.rule_results.at("density").observed_count == oracle.common_total);
    CHECK(v.rule_results.at("diversity").observed_count == oracle.distinct_common);
    CHECK(v.rule_results.at("essential").observed_count == oracle.essential_best);
    CHECK(v.rule_results.at("length").observed_count == oracle.total_words);
    CHECK(v.rule_results.at("url").passed);
}

TEST_CASE("keyword content after the 38k window is invisible to keyword rules") {
    FilterConfig cfg = FilterConfig::defaults();
    std::string filler;
    filler.reserve(38001 * 6);
    for (int i = 0; i < 38001; ++i) filler += "word ";
    CandidateDoc doc = make_doc("late-1", "https://example.com/x",
                                filler + designed_positive_text());

    // Window-slicing oracle: the first 38000 tokens contain no keywords.
    auto window_tokens = testsupport::oracle_tokenize(doc.text, cfg.window_words);
    for (const auto& tok : window_tokens) REQUIRE(cfg.common_keywords.count(tok) == 0);

    FilterVerdict v = prefilter(doc, cfg);
    CHECK_FALSE(v.accepted);
    CHECK(v.rule_results.at("density").observed_count == 0);
    CHECK(v.rule_results.at("diversity").observed_count == 0);
    CHECK(v.rule_results.at("essential").observed_count == 0);
    CHECK_FALSE(v.rule_results.at("density").passed);
}

TEST_CASE("prefilter on empty text rejects with zero counts") {
    FilterConfig cfg = FilterConfig::defaults();
    FilterVerdict v = prefilter(make_doc("empty", "https://example.com/", ""), cfg);
    CHECK_FALSE(v.accepted);
    CHECK(v.rule_results.at("density").observed_count == 0);
    CHECK(v.rule_results.at("diversity").observed_count == 0);
    CHECK(v.rule_results.at("essential").observed_count == 0);
    CHECK(v.window_word_count == 0);
}

TEST_CASE("prefilter url rule") {
    FilterConfig cfg = FilterConfig::defaults();
    std::string text = designed_positive_text();
    CHECK_FALSE(prefilter(make_doc("ftp", "ftp://example.com/a", text), cfg).accepted);
    CHECK_FALSE(prefilter(make_doc("no-scheme", "example.com/a", text), cfg)
                    .rule_results.at("url")
                    .passed);
    cfg.url_deny_patterns.push_back("/ads/");
    CHECK_FALSE(prefilter(make_doc("deny", "https://example.com/ads/page", text), cfg).accepted);
}

TEST_CASE("run_filter_stream on a designed 10-doc stream") {
    FilterConfig cfg = FilterConfig::defaults();
    std::ostringstream input;
    auto emit = [&](const CandidateDoc& d) { input << doc_to_json(d).dump() << '\n'; };

    const std::string pos = designed_positive_text();
    emit(make_doc("d1", "https://a.example/guide", pos));
    emit(make_doc("d2", "https://b.example/howto", pos + " extra trailing words"));
    emit(make_doc("d3", "https://c.example/steps", pos + " click menu"));
    emit(make_doc("d4", "https://d.example/plain",
                  "plain prose with no interface words at all, just filler text."));
    std::string one_keyword;
    for (int i = 0; i < 30; ++i) one_keyword += "click ";
    while (testsupport::oracle_tokenize(one_keyword, 1000).size() < 120)
        one_keyword += "pad word ";
    emit(make_doc("d5", "https://e.example/one", one_keyword));  // diversity fails
    std::string platform_only;
    for (int i = 0; i < 7; ++i)
        platform_only += "windows macos linux chrome ";  // 28 hits, 4 distinct, no essential
    while (testsupport::oracle_tokenize(platform_only, 1000).size() < 120)
        platform_only += "pad word ";
    emit(make_doc("d6", "https://f.example/plat", platform_only));  // essential fails
    std::string short_doc = "click click menu menu settings settings button button browser "
                            "browser tab tab open open press press select select drag drag";
    emit(make_doc("d7", "https://g.example/short", short_doc));  // length fails
    emit(make_doc("d8", "ftp://h.example/file", pos));           // url fails
    emit(make_doc("d9", "https://i.example/prose",
                  "a long narrative about rivers and clouds " + std::string(600, 'x')));
    emit(make_doc("d10", "https://j.example/empty", ""));

    std::istringstream in(input.str());
    std::ostringstream out;
    FilterStats stats = run_filter_stream(in, out, cfg);
    CHECK(stats.docs_in == 10);
    CHECK(stats.docs_out == 3);
    CHECK(stats.acceptance_rate() == doctest::Approx(0.3));
    CHECK(stats.malformed == 0);

    // accepted stream preserves input order
    std::istringstream accepted(out.str());
    std::string line;
    std::vector<std::string> ids;
    while (std::getline(accepted, line)) ids.push_back(json::parse(line)["doc_id"]);
    CHECK(ids == std::vector<std::string>{"d1", "d2", "d3"});
}

TEST_CASE("run_filter_stream counts malformed lines and keeps going") {
    FilterConfig cfg = FilterConfig::defaults();
    const std::string pos = designed_positive_text();
    std::ostringstream input;
    input << doc_to_json(make_doc("a", "https://x.example/1", pos)).dump() << '\n';
    input << "{not json at all\n";
    input << doc_to_json(make_doc("b", "https://x.example/2", pos)).dump() << '\n';
    input << doc_to_json(make_doc("c", "https://x.example/3", "")).dump() << '\n';
    input << doc_to_json(make_doc("d", "https://x.example/4", pos)).dump() << '\n';

    std::istringstream in(input.str());
    std::ostringstream out;
    FilterStats stats = run_filter_stream(in, out, cfg);
    CHECK(stats.docs_in == 4);
    CHECK(stats.malformed == 1);
    CHECK(stats.malformed_lines == std::vector<size_t>{2});
    CHECK(stats.docs_out == 3);
}

TEST_CASE("run_filter_stream on an empty stream") {
    std::istringstream in("");
    std::ostringstream out;
    FilterStats stats = run_filter_stream(in, out, FilterConfig::defaults());
    CHECK(stats.docs_in == 0);
    CHECK(stats.docs_out == 0);
    CHECK(stats.acceptance_rate() == 0.0);
}

TEST_CASE("run_filter_stream rejects duplicate doc ids as malformed") {
    FilterConfig cfg = FilterConfig::defaults();
    const std::string pos = designed_positive_text();
    std::ostringstream input;
    input << doc_to_json(make_doc("same", "https://x.example/1", pos)).dump() << '\n';
    input << doc_to_json(make_doc("same", "https://x.example/2", pos)).dump() << '\n';
    std::istringstream in(input.str());
    std::ostringstream out;
    FilterStats stats = run_filter_stream(in, out, cfg);
    CHECK(stats.docs_in == 1);
    CHECK(stats.malformed == 1);
}

TEST_CASE("evaluate_filter metrics") {
    FilterConfig cfg = FilterConfig::defaults();
    const std::string pos = designed_positive_text();

    SUBCASE("all predictions correct") {
        std::vector<std::pair<CandidateDoc, bool>> labeled = {
            {make_doc("p1", "https://a.example/1", pos), true},
            {make_doc("p2", "https://a.example/2", pos), true},
            {make_doc("n1", "https://a.example/3", "short filler"), false},
            {make_doc("n2", "https://a.example/4", ""), false},
        };
        Metrics m = evaluate_filter(labeled, cfg);
        CHECK(m.precision == 1.0);
        CHECK(m.recall == 1.0);
        CHECK(m.f1 == 1.0);
        CHECK(m.positive_recall == 1.0);
    }

    SUBCASE("hand-computed confusion 2 TP / 1 FP / 1 FN") {
        std::vector<std::pair<CandidateDoc, bool>> labeled = {
            {make_doc("tp1", "https://a.example/1", pos), true},
            {make_doc("tp2", "https://a.example/2", pos), true},
            {make_doc("fp1", "https://a.example/3", pos), false},
            {make_doc("fn1", "https://a.example/4", "no keywords here"), true},
        };
        Metrics m = evaluate_filter(labeled, cfg);
        CHECK(m.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
        CHECK(m.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    }

    SUBCASE("empty labeled set is an error") {
        CHECK_THROWS_AS(evaluate_filter({}, cfg), FilterError);
    }

    SUBCASE("report row carries the table columns") {
        Metrics m = metrics_from_confusion(2, 1, 1, 0);
        const std::string row = m.report_row("prefilter");
        CHECK(row.find("precision=") != std::string::npos);
        CHECK(row.find("recall=") != std::string::npos);
        CHECK(row.find("f1=") != std::string::npos);
    }
}

TEST_CASE("filter properties over randomized documents") {
    FilterConfig cfg = FilterConfig::defaults();
    cfg.min_words = 10;  // let short random docs exercise both length outcomes
    std::mt19937_64 rng(0xfeedULL);

    for (int i = 0; i < 250; ++i) {
        CandidateDoc doc = testsupport::random_doc(rng, i);
        FilterVerdict before = prefilter(doc, cfg);

        // Verdict completeness: accepted <=> all rules pass.
        bool all = true;
        for (const auto& [name, r] : before.rule_results) all = all && r.passed;
        CHECK(before.accepted == all);

        // Determinism: identical (doc, config) serializes identically.
        CHECK(prefilter(doc, cfg).to_json().dump() == before.to_json().dump());

        // Keyword monotonicity: one more in-window occurrence never flips a
        // keyword rule from pass to fail.
        CandidateDoc more = doc;
        more.text = "click " + more.text;
        FilterVerdict after = prefilter(more, cfg);
        for (const char* rule : {"density", "diversity", "essential"}) {
            if (before.rule_results.at(rule).passed) CHECK(after.rule_results.at(rule).passed);
        }
    }
}

TEST_CASE("window locality: edits past the window never move keyword rules") {
    FilterConfig cfg = FilterConfig::defaults();
    cfg.window_words = 50;
    std::mt19937_64 rng(0xbeefULL);
    for (int i = 0; i < 100; ++i) {
        CandidateDoc doc = testsupport::random_doc(rng, i);
        // make sure the doc extends past the window
        while (testsupport::oracle_tokenize(doc.text, 100).size() < 60)
            doc.text += " padding word";
        FilterVerdict before = prefilter(doc, cfg);
        CandidateDoc edited = doc;
        edited.text += " click type select press open menu settings browser click click";
        FilterVerdict after = prefilter(edited, cfg);
        for (const char* rule : {"density", "diversity", "essential"}) {
            CHECK(before.rule_results.at(rule).passed == after.rule_results.at(rule).passed);
            CHECK(before.rule_results.at(rule).observed_count ==
                  after.rule_results.at(rule).observed_count);
        }
    }
}

TEST_CASE("config validation") {
    FilterConfig cfg = FilterConfig::defaults();
    cfg.window_words = 0;
    CHECK_THROWS_AS(cfg.validate(), FilterError);
    cfg = FilterConfig::defaults();
    cfg.min_distinct_common = cfg.common_keywords.size() + 1;
    CHECK_THROWS_AS(cfg.validate(), FilterError);
    cfg = FilterConfig::defaults();
    CHECK_NOTHROW(cfg.validate());

    // config round-trips through json
    FilterConfig parsed = FilterConfig::from_json(cfg.to_json());
    CHECK(parsed.common_keywords == cfg.common_keywords);
    CHECK(parsed.window_words == cfg.window_words);
}
