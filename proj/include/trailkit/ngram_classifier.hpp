#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace trailkit::ngram {

/// Hashed word n-gram feature space. The hash is fixed (64-bit FNV-1a over
/// the n-gram tokens joined with 0x1f, reduced modulo bucket_count) so that
/// models are bit-reproducible.
struct HasherConfig {
    uint32_t ngram_min = 1;
    uint32_t ngram_max = 2;
    uint64_t bucket_count = 1ull << 21;
    std::string hash_name = "fnv1a64";

    void validate() const;
    static HasherConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Bucket ids (with multiplicity, in scan order) for all word n-grams of
/// the text. Tokenization matches the corpus filter's, with no window.
std::vector<uint64_t> featurize(std::string_view text, const HasherConfig& hasher);

enum class Label { non_tutorial = 0, tutorial = 1 };

const char* label_name(Label l);
Label label_from_name(std::string_view name);

struct Prediction {
    Label label = Label::non_tutorial;
    double confidence = 0.5;    // max(probs)
    double probs[2] = {0.5, 0.5};  // [non_tutorial, tutorial]
};

struct TrainMeta {
    uint32_t epochs = 0;
    double lr0 = 0.0;
    uint64_t seed = 0;
};

/// Mean-of-embedding-rows linear classifier with a 2-way softmax head.
/// Weights are held in doubles and persisted as little-endian float32.
struct ClassifierModel {
    HasherConfig hasher;
    uint32_t dim = 16;
    std::vector<double> embedding;  // bucket_count x dim, row-major
    std::vector<double> output;     // dim x 2, row-major
    TrainMeta train_meta;

    double& emb(uint64_t bucket, uint32_t d) { return embedding[bucket * dim + d]; }
    double emb(uint64_t bucket, uint32_t d) const { return embedding[bucket * dim + d]; }
    double& out(uint32_t d, int cls) { return output[d * 2 + static_cast<uint32_t>(cls)]; }
    double out(uint32_t d, int cls) const { return output[d * 2 + static_cast<uint32_t>(cls)]; }

    void validate() const;
};

/// Mean embedding of the feature buckets; the zero vector when there are none.
std::vector<double> hidden_vector(const ClassifierModel& model,
                                  const std::vector<uint64_t>& buckets);

Prediction predict(const ClassifierModel& model, std::string_view text);

struct TrainConfig {
    uint32_t epochs = 5;
    double lr0 = 0.1;  // linearly decayed to 0 over all updates
    uint32_t dim = 16;
    HasherConfig hasher;
    uint64_t seed = 0;
};

struct TrainReport {
    std::vector<double> epoch_avg_loss;
};

using Example = std::pair<std::string, Label>;

/// Plain SGD on softmax cross-entropy, order shuffled per epoch by a seeded
/// PRNG. Fixed seed gives a byte-identical model file. Throws TrainError on
/// an empty or single-class dataset and on non-finite loss.
ClassifierModel train(const std::vector<Example>& dataset, const TrainConfig& config,
                      TrainReport* report = nullptr);

/// Loss and analytic gradients at one example; the layout of `grad_output`
/// matches model.output, `grad_active` holds one dim-length block per entry
/// of `active_buckets` (deduplicated, ascending).
struct GradientBundle {
    double loss = 0.0;
    std::vector<double> grad_output;
    std::vector<uint64_t> active_buckets;
    std::vector<double> grad_active;
};

GradientBundle analytic_gradients(const ClassifierModel& model, const Example& example);
GradientBundle numeric_gradients(ClassifierModel model, const Example& example, double epsilon);

/// Max relative error between analytic and central-difference gradients over
/// the output weights and the active embedding rows.
double gradient_check(const ClassifierModel& model, const Example& example, double epsilon);

double relative_error(double a, double b);

struct EvalMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;

    nlohmann::json to_json() const;
    std::string report_row(const std::string& name) const;
};

EvalMetrics evaluate(const ClassifierModel& model, const std::vector<Example>& test);

/// Versioned binary layout: magic, version, hasher config, dims, train meta,
/// row-major weights as little-endian float32.
void save_model(const ClassifierModel& model, const std::string& path);
ClassifierModel load_model(const std::string& path);

}  // namespace trailkit::ngram
