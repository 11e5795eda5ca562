#include <fstream>
#include <random>

#include "doctest.h"
#include "trailkit/chat.hpp"
#include "trailkit/errors.hpp"
#include "trailkit/prompts.hpp"
#include "trailkit/tutorial.hpp"

#include <nlohmann/json.hpp>

using namespace trailkit;
using namespace trailkit::tutorial;
using trailkit::corpus::CandidateDoc;
using nlohmann::json;

namespace {

CandidateDoc sample_doc() {
    return CandidateDoc{"doc-1", "https://example.com/howto",
                        "Step 1 click the menu. Step 2 press apply.", "shard-0"};
}

/// Fails the first `failures` calls, then answers normally.
class FlakyBackend : public chat::ChatBackend {
  public:
    FlakyBackend(int failures, std::string response)
        : failures_(failures), response_(std::move(response)) {}

    chat::ChatResult complete(const std::vector<chat::ChatMessage>& messages) override {
        if (calls_++ < failures_) throw BackendError("synthetic transport failure");
        chat::ChatResult r;
        r.content = response_;
        for (const auto& m : messages) r.usage.prompt_tokens += chat::word_count(m.content);
        r.usage.completion_tokens = chat::word_count(response_);
        return r;
    }

    int calls() const { return calls_; }

  private:
    int failures_;
    std::string response_;
    int calls_ = 0;
};

chat::Gateway mock_gateway(const std::string& response) {
    auto mock = std::make_shared<chat::MockBackend>();
    mock->set_default_response(response);
    return chat::Gateway(mock, 0);
}

const char* kSlidesResponse = R"({
  "platform": "Windows",
  "target type": "Web browser",
  "target object": "Chrome browser",
  "target web URL": "https://docs.google.com/presentation",
  "task description": "Make a Google Slides presentation vertical.",
  "prerequisites": "A Google account with access to Google Slides.",
  "instructions": [
    "Step_1: Open the presentation.",
    "Step_2: Open the Page setup dialog.",
    "Step_3: Enter a custom size.",
    "Step_4: Apply the new orientation."
  ],
  "instructions steps": "4",
  "expected_result": "The slides display in vertical orientation."
})";

}  // namespace

TEST_CASE("label_document") {
    SUBCASE("'1' means tutorial") {
        auto out = label_document(sample_doc(), mock_gateway("1"));
        CHECK(out.is_tutorial);
    }
    SUBCASE("'0' means non-tutorial") {
        auto out = label_document(sample_doc(), mock_gateway("0"));
        CHECK_FALSE(out.is_tutorial);
    }
    SUBCASE("quotes and whitespace are tolerated") {
        CHECK(label_document(sample_doc(), mock_gateway(" \"1\"\n")).is_tutorial);
        CHECK_FALSE(label_document(sample_doc(), mock_gateway("'0'")).is_tutorial);
    }
    SUBCASE("prose is a LabelParseError carrying the raw text") {
        try {
            label_document(sample_doc(), mock_gateway("It is a tutorial."));
            FAIL("expected LabelParseError");
        } catch (const LabelParseError& e) {
            CHECK(e.raw == "It is a tutorial.");
        }
    }
    SUBCASE("empty document text is rejected") {
        CandidateDoc doc = sample_doc();
        doc.text.clear();
        CHECK_THROWS_AS(label_document(doc, mock_gateway("1")), LabelParseError);
    }
}

TEST_CASE("labeler prompt renders the url and context") {
    auto messages = build_labeler_messages(sample_doc());
    REQUIRE(messages.size() == 2);
    CHECK(messages[0].role == chat::Role::system);
    CHECK(messages[0].content == prompts::kLabelerSystem);
    CHECK(messages[1].content.find("- URL: https://example.com/howto") != std::string::npos);
    CHECK(messages[1].content.find("Step 1 click the menu.") != std::string::npos);
}

TEST_CASE("paraphrase_to_tutorial") {
    SUBCASE("the template's spaced keys parse to canonical fields") {
        auto out = paraphrase_to_tutorial(sample_doc(), mock_gateway(kSlidesResponse));
        CHECK(out.tutorial.target_web_url == "https://docs.google.com/presentation");
        CHECK(out.tutorial.target_type == TargetType::web_browser);
        CHECK(out.tutorial.platform == Platform::Windows);
        CHECK(out.tutorial.instructions.size() == 4);
        CHECK(out.usage.phase == chat::Phase::paraphrase);
    }
    SUBCASE("declared step count must match the list") {
        std::string bad = kSlidesResponse;
        const auto pos = bad.find("\"4\"");
        bad.replace(pos, 3, "\"5\"");
        CHECK_THROWS_WITH_AS(paraphrase_to_tutorial(sample_doc(), mock_gateway(bad)),
                             doctest::Contains("step-count mismatch"), SchemaError);
    }
    SUBCASE("platform is a closed enum") {
        std::string bad = kSlidesResponse;
        const auto pos = bad.find("\"Windows\"");
        bad.replace(pos, 9, "\"Solaris\"");
        CHECK_THROWS_AS(paraphrase_to_tutorial(sample_doc(), mock_gateway(bad)), SchemaError);
    }
}

TEST_CASE("parse_tutorial") {
    SUBCASE("missing expected_result") {
        json j = json::parse(kSlidesResponse);
        j.erase("expected_result");
        CHECK_THROWS_WITH_AS(parse_tutorial(j.dump()),
                             doctest::Contains("expected_result"), SchemaError);
    }
    SUBCASE("platform defaults to Windows when absent") {
        json j = json::parse(kSlidesResponse);
        j.erase("platform");
        CHECK(parse_tutorial(j.dump()).tutorial.platform == Platform::Windows);
    }
    SUBCASE("numeric step counts are accepted without coercion") {
        json j = json::parse(kSlidesResponse);
        j["instructions steps"] = 4;
        CHECK(parse_tutorial(j.dump()).tutorial.instructions.size() == 4);
    }
    SUBCASE("non-numeric step count is an error") {
        json j = json::parse(kSlidesResponse);
        j["instructions steps"] = "four";
        CHECK_THROWS_AS(parse_tutorial(j.dump()), SchemaError);
    }
    SUBCASE("unknown keys are warnings, not errors") {
        json j = json::parse(kSlidesResponse);
        j["surprise"] = "extra";
        auto parsed = parse_tutorial(j.dump());
        REQUIRE(parsed.warnings.size() == 1);
        CHECK(parsed.warnings[0].find("surprise") != std::string::npos);
    }
    SUBCASE("web_browser requires an http(s) target url") {
        json j = json::parse(kSlidesResponse);
        j["target web URL"] = "None";
        CHECK_THROWS_AS(parse_tutorial(j.dump()), SchemaError);
        j["target web URL"] = "file:///etc/passwd";
        CHECK_THROWS_AS(parse_tutorial(j.dump()), SchemaError);
    }
    SUBCASE("non-browser tutorials drop the 'None' url") {
        json j = json::parse(kSlidesResponse);
        j["target type"] = "PC app";
        j["target web URL"] = "None";
        auto parsed = parse_tutorial(j.dump());
        CHECK_FALSE(parsed.tutorial.target_web_url.has_value());
        CHECK(parsed.tutorial.target_type == TargetType::pc_app);
    }
    SUBCASE("the first object is extracted out of surrounding prose") {
        const std::string wrapped =
            "Here is the tutorial you asked for:\n" + std::string(kSlidesResponse) +
            "\nLet me know if you need anything else.";
        CHECK(parse_tutorial(wrapped).tutorial.instructions.size() == 4);
    }
    SUBCASE("instructions must be present and non-empty") {
        json j = json::parse(kSlidesResponse);
        j["instructions"] = json::array();
        j.erase("instructions steps");
        CHECK_THROWS_AS(parse_tutorial(j.dump()), SchemaError);
    }
}

TEST_CASE("tutorial round trip: parse(serialize(t)) == t") {
    std::mt19937_64 rng(5);
    const Platform platforms[] = {Platform::macOS, Platform::Windows, Platform::Linux,
                                  Platform::Android, Platform::iOS};
    const TargetType types[] = {TargetType::web_browser, TargetType::pc_app,
                                TargetType::mobile_app, TargetType::pc_os, TargetType::mobile_os};
    for (int i = 0; i < 50; ++i) {
        StructuredTutorial t;
        t.platform = platforms[rng() % 5];
        t.target_type = types[rng() % 5];
        t.target_object = "object-" + std::to_string(rng() % 100);
        if (t.target_type == TargetType::web_browser)
            t.target_web_url = "https://site" + std::to_string(rng() % 10) + ".example/page";
        t.task_description = "task " + std::to_string(i);
        t.prerequisites = rng() % 2 ? "none" : "";
        const size_t steps = 1 + rng() % 5;
        for (size_t s = 0; s < steps; ++s)
            t.instructions.push_back("Step_" + std::to_string(s + 1) + ": do thing " +
                                     std::to_string(rng() % 50));
        t.expected_result = "result " + std::to_string(i);

        auto parsed = parse_tutorial(serialize_tutorial(t));
        CHECK(parsed.tutorial == t);
        CHECK(parsed.warnings.empty());
    }
}

TEST_CASE("retry policy") {
    const std::vector<chat::ChatMessage> msg{{chat::Role::user, "ping"}};

    SUBCASE("failing max_retries times then succeeding is a success") {
        auto flaky = std::make_shared<FlakyBackend>(2, "pong");
        chat::Gateway gateway(flaky, 2);
        auto result = gateway.call(msg);
        CHECK(result.content == "pong");
        CHECK(result.attempts == 3);  // retry count observable
    }
    SUBCASE("one more failure exhausts the budget") {
        auto flaky = std::make_shared<FlakyBackend>(3, "pong");
        chat::Gateway gateway(flaky, 2);
        CHECK_THROWS_AS(gateway.call(msg), BackendError);
        CHECK(flaky->calls() == 3);
    }
}

TEST_CASE("mock backend") {
    SUBCASE("identical prompts give identical responses and usage") {
        auto gateway = mock_gateway("fixed answer here");
        const std::vector<chat::ChatMessage> msg{{chat::Role::user, "one two three"}};
        auto a = gateway.call(msg);
        auto b = gateway.call(msg);
        CHECK(a.content == b.content);
        CHECK(a.usage.prompt_tokens == b.usage.prompt_tokens);
        CHECK(a.usage.completion_tokens == b.usage.completion_tokens);
    }
    SUBCASE("usage proxy is the word count") {
        auto gateway = mock_gateway("four words in reply");
        const std::vector<chat::ChatMessage> msg{
            {chat::Role::system, "a b c d e f"},
            {chat::Role::user, "g h i j k l"}};  // 12 prompt words
        auto r = gateway.call(msg);
        CHECK(r.usage.prompt_tokens == 12);
        CHECK(r.usage.completion_tokens == 4);
    }
    SUBCASE("strict mode names the unknown fingerprint") {
        chat::MockBackend mock;  // strict, nothing scripted
        const std::vector<chat::ChatMessage> msg{{chat::Role::user, "unexpected"}};
        const std::string fp = chat::prompt_fingerprint(msg);
        try {
            mock.complete(msg);
            FAIL("expected BackendError");
        } catch (const BackendError& e) {
            CHECK(std::string(e.what()).find(fp) != std::string::npos);
        }
    }
    SUBCASE("fingerprint routing beats substring routing") {
        chat::MockBackend mock;
        const std::vector<chat::ChatMessage> msg{{chat::Role::user, "needle in prompt"}};
        mock.script_contains("needle", "by-contains");
        mock.script_fingerprint(chat::prompt_fingerprint(msg), "by-fingerprint");
        CHECK(mock.complete(msg).content == "by-fingerprint");
    }
}

TEST_CASE("token usage aggregates exactly per phase") {
    auto gateway = mock_gateway("1");
    chat::TokenUsage total;
    uint64_t expect_prompt = 0, expect_completion = 0;
    for (int i = 0; i < 7; ++i) {
        CandidateDoc doc = sample_doc();
        doc.doc_id = "doc-" + std::to_string(i);
        doc.text += " extra";
        for (int k = 0; k < i; ++k) doc.text += " pad";
        auto out = label_document(doc, gateway);
        total += out.usage;
        expect_prompt += out.usage.prompt_tokens;
        expect_completion += out.usage.completion_tokens;
    }
    CHECK(total.prompt_tokens == expect_prompt);
    CHECK(total.completion_tokens == expect_completion);
}

TEST_CASE("prompt assets byte-match the embedded texts") {
    auto slurp = [](const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        REQUIRE(f);
        return std::string((std::istreambuf_iterator<char>(f)),
                           std::istreambuf_iterator<char>());
    };
    const std::string root = std::string(TRAILKIT_SOURCE_DIR) + "/assets/prompts/";
    CHECK(slurp(root + "labeler_system.txt") == prompts::kLabelerSystem);
    CHECK(slurp(root + "labeler_user.txt") == prompts::kLabelerUserTemplate);
    CHECK(slurp(root + "paraphrase_user.txt") == prompts::kParaphraseUserTemplate);
    CHECK(slurp(root + "evaluator_system.txt") == prompts::kEvaluatorSystem);
    CHECK(slurp(root + "evaluator_user.txt") == prompts::kEvaluatorUserTemplate);
}

TEST_CASE("backend config validation") {
    chat::BackendConfig cfg;
    cfg.backend_kind = "remote";
    CHECK_THROWS_AS(cfg.validate(), BackendError);
    cfg.endpoint_url = "http://localhost:9/v1/chat/completions";
    CHECK_NOTHROW(cfg.validate());
    cfg.backend_kind = "carrier-pigeon";
    CHECK_THROWS_AS(cfg.validate(), BackendError);
}
