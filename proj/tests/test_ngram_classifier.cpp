#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "support/test_support.hpp"
#include "trailkit/errors.hpp"
#include "trailkit/ngram_classifier.hpp"

using namespace trailkit;
using namespace trailkit::ngram;

namespace {

// Independent FNV-1a reimplementation for cross-checking bucket values.
uint64_t oracle_fnv(const std::string& s) {
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

ClassifierModel zero_model(const HasherConfig& hasher, uint32_t dim) {
    ClassifierModel m;
    m.hasher = hasher;
    m.dim = dim;
    m.embedding.assign(hasher.bucket_count * dim, 0.0);
    m.output.assign(dim * 2ull, 0.0);
    return m;
}

ClassifierModel random_model(const HasherConfig& hasher, uint32_t dim, uint64_t seed) {
    ClassifierModel m = zero_model(hasher, dim);
    std::mt19937_64 rng(seed);
    auto unit = [&]() { return (static_cast<double>(rng() >> 11) / 9007199254740992.0) - 0.5; };
    for (double& w : m.embedding) w = unit();
    for (double& w : m.output) w = unit();
    return m;
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("featurize") {
    HasherConfig hasher;
    hasher.bucket_count = 1ull << 12;

    CHECK(featurize("", hasher).empty());

    auto buckets = featurize("click here", hasher);
    REQUIRE(buckets.size() == 3);
    const uint64_t mask = hasher.bucket_count - 1;
    CHECK(buckets[0] == (oracle_fnv("click") & mask));
    CHECK(buckets[1] == (oracle_fnv("here") & mask));
    CHECK(buckets[2] == (oracle_fnv(std::string("click") + '\x1f' + "here") & mask));

    CHECK(featurize("click here", hasher) == buckets);

    hasher.ngram_min = 2;
    hasher.ngram_max = 2;
    CHECK(featurize("one", hasher).empty());  // no bigrams in a 1-token text
}

TEST_CASE("hasher validation") {
    HasherConfig h;
    h.bucket_count = 3;
    CHECK_THROWS_AS(h.validate(), TrainError);
    h = HasherConfig{};
    h.ngram_min = 0;
    CHECK_THROWS_AS(h.validate(), TrainError);
    h = HasherConfig{};
    h.ngram_max = 4;
    CHECK_THROWS_AS(h.validate(), TrainError);
}

TEST_CASE("predict on degenerate models") {
    HasherConfig hasher;
    hasher.bucket_count = 1ull << 10;

    SUBCASE("zero model gives 0.5/0.5 and resolves the tie to non_tutorial") {
        ClassifierModel m = zero_model(hasher, 8);
        Prediction p = predict(m, "anything at all");
        CHECK(p.probs[0] == doctest::Approx(0.5));
        CHECK(p.probs[1] == doctest::Approx(0.5));
        CHECK(p.label == Label::non_tutorial);
        CHECK(p.confidence == doctest::Approx(0.5));
    }

    SUBCASE("empty text keeps the zero-hidden convention on any model") {
        ClassifierModel m = random_model(hasher, 8, 7);
        Prediction p = predict(m, "");
        CHECK(p.probs[0] == doctest::Approx(0.5));
        CHECK(p.probs[1] == doctest::Approx(0.5));
        CHECK(p.label == Label::non_tutorial);
    }

    SUBCASE("hand-built one-feature model votes tutorial") {
        hasher.ngram_max = 1;
        ClassifierModel m = zero_model(hasher, 2);
        const uint64_t bucket = featurize("click", hasher).at(0);
        m.emb(bucket, 0) = 1.0;
        m.out(0, 1) = 2.0;   // tutorial column dominates on the active bucket
        m.out(0, 0) = -2.0;
        Prediction p = predict(m, "click");
        CHECK(p.label == Label::tutorial);
        CHECK(p.probs[1] > 0.9);
    }
}

TEST_CASE("training on the separable toy corpus") {
    auto corpus = testsupport::sentinel_corpus(200, 11);
    // 95:5 split
    std::vector<Example> train_set(corpus.begin(), corpus.begin() + 190);
    std::vector<Example> test_set(corpus.begin() + 190, corpus.end());

    // The corpus really is separable on the single sentinel feature: a
    // brute-force logistic fit on that feature alone gets the test set right.
    CHECK(testsupport::single_feature_logistic_accuracy(train_set, test_set) >= 0.95);

    TrainConfig cfg;
    cfg.hasher.bucket_count = 1ull << 16;
    cfg.seed = 42;
    TrainReport report;
    ClassifierModel model = train(train_set, cfg, &report);

    EvalMetrics metrics = evaluate(model, test_set);
    CHECK(metrics.accuracy >= 0.95);

    // Averaged per-epoch loss is non-increasing on the separable corpus.
    REQUIRE(report.epoch_avg_loss.size() == cfg.epochs);
    for (size_t e = 1; e < report.epoch_avg_loss.size(); ++e)
        CHECK(report.epoch_avg_loss[e] <= report.epoch_avg_loss[e - 1] + 1e-12);
}

TEST_CASE("training determinism and edge cases") {
    auto corpus = testsupport::sentinel_corpus(60, 3);
    TrainConfig cfg;
    cfg.hasher.bucket_count = 1ull << 12;
    cfg.dim = 8;
    cfg.seed = 9;

    SUBCASE("same dataset and seed give identical model bytes") {
        ClassifierModel a = train(corpus, cfg);
        ClassifierModel b = train(corpus, cfg);
        const std::string pa = temp_path("trailkit_model_a.bin");
        const std::string pb = temp_path("trailkit_model_b.bin");
        save_model(a, pa);
        save_model(b, pb);
        CHECK(slurp(pa) == slurp(pb));
        std::remove(pa.c_str());
        std::remove(pb.c_str());
    }

    SUBCASE("epochs = 0 returns the initialized model unchanged") {
        cfg.epochs = 0;
        ClassifierModel m = train(corpus, cfg);
        // output head still zero: every text sits at exactly 0.5/0.5
        Prediction p = predict(m, corpus.front().first);
        CHECK(p.probs[0] == doctest::Approx(0.5));
        ClassifierModel again = train(corpus, cfg);
        CHECK(m.embedding == again.embedding);
        CHECK(m.output == again.output);
    }

    SUBCASE("empty and single-class datasets are errors") {
        CHECK_THROWS_AS(train({}, cfg), TrainError);
        std::vector<Example> one_class = {{"a b c", Label::tutorial},
                                          {"d e f", Label::tutorial}};
        CHECK_THROWS_AS(train(one_class, cfg), TrainError);
    }
}

TEST_CASE("gradient check") {
    HasherConfig hasher;
    hasher.bucket_count = 1ull << 10;
    const Example example{"click the settings menu and press apply", Label::tutorial};

    SUBCASE("analytic matches central differences on a random model") {
        for (uint64_t seed : {1ull, 2ull, 3ull}) {
            ClassifierModel m = random_model(hasher, 8, seed);
            CHECK(gradient_check(m, example, 1e-3) < 1e-4);
        }
    }

    SUBCASE("zero-gradient point") {
        ClassifierModel m = zero_model(hasher, 8);
        CHECK(gradient_check(m, example, 1e-3) < 1e-8);
    }

    SUBCASE("an injected fault is caught") {
        ClassifierModel m = random_model(hasher, 8, 5);
        GradientBundle analytic = analytic_gradients(m, example);
        GradientBundle numeric = numeric_gradients(m, example, 1e-3);
        analytic.grad_output[0] += 0.1;  // corrupt one weight's gradient
        double worst = 0.0;
        for (size_t i = 0; i < analytic.grad_output.size(); ++i)
            worst = std::max(worst,
                             relative_error(analytic.grad_output[i], numeric.grad_output[i]));
        CHECK(worst > 1e-2);
    }

    SUBCASE("epsilon must be positive") {
        ClassifierModel m = zero_model(hasher, 4);
        CHECK_THROWS_AS(gradient_check(m, example, 0.0), TrainError);
    }
}

TEST_CASE("evaluate on a crafted confusion") {
    auto corpus = testsupport::sentinel_corpus(200, 21);
    TrainConfig cfg;
    cfg.hasher.bucket_count = 1ull << 16;
    cfg.epochs = 10;
    cfg.seed = 4;
    ClassifierModel model = train(corpus, cfg);

    SUBCASE("perfect split on fresh sentinel docs") {
        auto fresh = testsupport::sentinel_corpus(40, 99);
        EvalMetrics m = evaluate(model, fresh);
        CHECK(m.f1 == doctest::Approx(1.0));
    }

    SUBCASE("9 TP / 1 FP / 1 FN / 9 TN by construction") {
        static const char* kPairs[] = {"alpha bravo",  "charlie delta", "echo foxtrot",
                                       "golf hotel",   "india juliet",  "kilo lima",
                                       "mike november", "alpha charlie", "bravo delta"};
        std::vector<Example> test;
        for (const char* words : kPairs)
            test.emplace_back(std::string("tutorialstep ") + words, Label::tutorial);
        test.emplace_back("tutorialstep echo golf", Label::non_tutorial);  // FP by labeling
        test.emplace_back("echo foxtrot golf hotel", Label::tutorial);     // FN by labeling
        for (const char* words : kPairs)
            test.emplace_back(std::string("india kilo ") + words, Label::non_tutorial);
        EvalMetrics m = evaluate(model, test);
        CHECK(m.precision == doctest::Approx(0.9));
        CHECK(m.recall == doctest::Approx(0.9));
    }
}

TEST_CASE("prediction invariants") {
    HasherConfig hasher;
    hasher.bucket_count = 1ull << 10;
    std::mt19937_64 rng(17);
    const std::vector<std::string> texts = {
        "click the button", "alpha bravo", "tutorialstep now", "", "menu settings tab open",
        "one two three four five six"};

    for (uint64_t seed = 0; seed < 12; ++seed) {
        ClassifierModel m = random_model(hasher, 6, seed);
        for (const std::string& text : texts) {
            Prediction p = predict(m, text);
            CHECK(p.probs[0] + p.probs[1] == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(p.confidence >= 0.5);
            CHECK(p.confidence <= 1.0);

            // scaling output weights by a positive constant keeps the argmax
            ClassifierModel scaled = m;
            const double c = 0.25 + (rng() % 100) / 25.0;
            for (double& w : scaled.output) w *= c;
            CHECK(predict(scaled, text).label == p.label);
        }
    }
}

TEST_CASE("model persistence is bit-exact") {
    auto corpus = testsupport::sentinel_corpus(50, 33);
    TrainConfig cfg;
    cfg.hasher.bucket_count = 1ull << 12;
    cfg.dim = 8;
    cfg.seed = 31;
    ClassifierModel model = train(corpus, cfg);

    const std::string path = temp_path("trailkit_model_rt.bin");
    save_model(model, path);
    ClassifierModel loaded = load_model(path);

    CHECK(loaded.hasher.bucket_count == model.hasher.bucket_count);
    CHECK(loaded.dim == model.dim);
    CHECK(loaded.train_meta.seed == model.train_meta.seed);

    // save -> load -> predict is bit-identical on a fixture set
    ClassifierModel reloaded = load_model(path);
    for (const std::string& text :
         {"tutorialstep alpha", "bravo charlie", "delta echo foxtrot", ""}) {
        Prediction a = predict(loaded, text);
        Prediction b = predict(reloaded, text);
        CHECK(a.probs[0] == b.probs[0]);
        CHECK(a.probs[1] == b.probs[1]);
        CHECK(a.label == b.label);
    }

    // a second save of the loaded model reproduces the file byte for byte
    const std::string path2 = temp_path("trailkit_model_rt2.bin");
    save_model(loaded, path2);
    CHECK(slurp(path) == slurp(path2));

    std::remove(path.c_str());
    std::remove(path2.c_str());

    CHECK_THROWS_AS(load_model("/nonexistent/model.bin"), TrainError);
}
