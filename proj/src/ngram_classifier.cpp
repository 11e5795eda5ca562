#include "trailkit/ngram_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "trailkit/errors.hpp"
#include "trailkit/hash.hpp"
#include "trailkit/tokenize.hpp"

namespace trailkit::ngram {

using nlohmann::json;

void HasherConfig::validate() const {
    if (ngram_min < 1 || ngram_min > ngram_max || ngram_max > 3)
        throw TrainError("hasher requires 1 <= ngram_min <= ngram_max <= 3");
    if (bucket_count == 0 || (bucket_count & (bucket_count - 1)) != 0)
        throw TrainError("bucket_count must be a power of two");
    if (hash_name != "fnv1a64") throw TrainError("unknown hash: " + hash_name);
}

HasherConfig HasherConfig::from_json(const json& j) {
    HasherConfig h;
    h.ngram_min = j.value("ngram_min", h.ngram_min);
    h.ngram_max = j.value("ngram_max", h.ngram_max);
    h.bucket_count = j.value("bucket_count", h.bucket_count);
    h.hash_name = j.value("hash_name", h.hash_name);
    h.validate();
    return h;
}

json HasherConfig::to_json() const {
    return json{{"ngram_min", ngram_min},
                {"ngram_max", ngram_max},
                {"bucket_count", bucket_count},
                {"hash_name", hash_name}};
}

std::vector<uint64_t> featurize(std::string_view text, const HasherConfig& hasher) {
    hasher.validate();
    std::vector<std::string> tokens = tokenize_window(text, static_cast<size_t>(-1));
    std::vector<uint64_t> buckets;
    const uint64_t mask = hasher.bucket_count - 1;
    std::string joined;
    for (uint32_t n = hasher.ngram_min; n <= hasher.ngram_max; ++n) {
        if (tokens.size() < n) break;
        for (size_t i = 0; i + n <= tokens.size(); ++i) {
            joined.clear();
            for (uint32_t k = 0; k < n; ++k) {
                if (k) joined.push_back('\x1f');
                joined += tokens[i + k];
            }
            buckets.push_back(fnv1a64(joined) & mask);
        }
    }
    return buckets;
}

const char* label_name(Label l) { return l == Label::tutorial ? "tutorial" : "non_tutorial"; }

Label label_from_name(std::string_view name) {
    if (name == "tutorial" || name == "1") return Label::tutorial;
    if (name == "non_tutorial" || name == "0") return Label::non_tutorial;
    throw TrainError("unknown label: " + std::string(name));
}

void ClassifierModel::validate() const {
    hasher.validate();
    if (dim == 0) throw TrainError("dim must be > 0");
    if (embedding.size() != hasher.bucket_count * dim || output.size() != dim * 2)
        throw TrainError("model weight dimensions are inconsistent");
    for (double w : output)
        if (!std::isfinite(w)) throw TrainError("non-finite output weight");
}

std::vector<double> hidden_vector(const ClassifierModel& model,
                                  const std::vector<uint64_t>& buckets) {
    std::vector<double> hidden(model.dim, 0.0);
    if (buckets.empty()) return hidden;
    for (uint64_t b : buckets)
        for (uint32_t d = 0; d < model.dim; ++d) hidden[d] += model.emb(b, d);
    const double inv = 1.0 / static_cast<double>(buckets.size());
    for (double& h : hidden) h *= inv;
    return hidden;
}

static void softmax2(const double logits[2], double probs[2]) {
    double m = std::max(logits[0], logits[1]);
    double e0 = std::exp(logits[0] - m);
    double e1 = std::exp(logits[1] - m);
    double z = e0 + e1;
    probs[0] = e0 / z;
    probs[1] = e1 / z;
}

static void forward(const ClassifierModel& model, const std::vector<double>& hidden,
                    double probs[2]) {
    double logits[2] = {0.0, 0.0};
    for (uint32_t d = 0; d < model.dim; ++d) {
        logits[0] += hidden[d] * model.out(d, 0);
        logits[1] += hidden[d] * model.out(d, 1);
    }
    softmax2(logits, probs);
}

Prediction predict(const ClassifierModel& model, std::string_view text) {
    std::vector<uint64_t> buckets = featurize(text, model.hasher);
    std::vector<double> hidden = hidden_vector(model, buckets);
    Prediction p;
    forward(model, hidden, p.probs);
    // Tie resolves to non_tutorial: a false negative is recoverable upstream.
    p.label = p.probs[1] > p.probs[0] ? Label::tutorial : Label::non_tutorial;
    p.confidence = std::max(p.probs[0], p.probs[1]);
    return p;
}

namespace {

/// Uniform double in [0, 1) from the top 53 bits of the generator output.
double next_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

/// Fisher-Yates with explicit index arithmetic; std::shuffle is not
/// reproducible across standard libraries.
void shuffle_indices(std::vector<size_t>& idx, std::mt19937_64& rng) {
    for (size_t i = idx.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng() % i);
        std::swap(idx[i - 1], idx[j]);
    }
}

ClassifierModel init_model(const TrainConfig& config) {
    config.hasher.validate();
    ClassifierModel model;
    model.hasher = config.hasher;
    model.dim = config.dim;
    model.train_meta = {config.epochs, config.lr0, config.seed};
    model.embedding.assign(config.hasher.bucket_count * config.dim, 0.0);
    model.output.assign(config.dim * 2ull, 0.0);
    std::mt19937_64 rng(config.seed);
    const double bound = 1.0 / static_cast<double>(config.dim);
    for (double& w : model.embedding) w = (next_unit(rng) * 2.0 - 1.0) * bound;
    // Output head starts at zero: every text begins at probs (0.5, 0.5).
    return model;
}

}  // namespace

ClassifierModel train(const std::vector<Example>& dataset, const TrainConfig& config,
                      TrainReport* report) {
    if (dataset.empty()) throw TrainError("train: empty dataset");
    bool has_pos = false, has_neg = false;
    for (const auto& [text, label] : dataset)
        (label == Label::tutorial ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) throw TrainError("train: dataset contains a single class");

    ClassifierModel model = init_model(config);

    // Features are hashed once up front; epochs then touch only bucket ids.
    std::vector<std::vector<uint64_t>> features;
    features.reserve(dataset.size());
    for (const auto& [text, label] : dataset) features.push_back(featurize(text, model.hasher));

    std::mt19937_64 shuffle_rng(mix_seed(config.seed, 0x736875666c65ULL));
    std::vector<size_t> order(dataset.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    const uint64_t total_updates = static_cast<uint64_t>(config.epochs) * dataset.size();
    uint64_t step = 0;
    std::vector<double> hidden, grad_hidden(config.dim);
    for (uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_indices(order, shuffle_rng);
        double loss_sum = 0.0;
        for (size_t pos = 0; pos < order.size(); ++pos) {
            const size_t i = order[pos];
            const double lr =
                config.lr0 * (1.0 - static_cast<double>(step) / static_cast<double>(total_updates));
            ++step;

            const std::vector<uint64_t>& buckets = features[i];
            hidden = hidden_vector(model, buckets);
            double probs[2];
            forward(model, hidden, probs);
            const int y = dataset[i].second == Label::tutorial ? 1 : 0;
            const double loss = -std::log(std::max(probs[y], 1e-300));
            if (!std::isfinite(loss))
                throw TrainError("non-finite loss at epoch " + std::to_string(epoch) +
                                 ", example " + std::to_string(i));
            loss_sum += loss;

            double dlogits[2] = {probs[0] - (y == 0 ? 1.0 : 0.0), probs[1] - (y == 1 ? 1.0 : 0.0)};
            for (uint32_t d = 0; d < model.dim; ++d) {
                grad_hidden[d] = model.out(d, 0) * dlogits[0] + model.out(d, 1) * dlogits[1];
                model.out(d, 0) -= lr * hidden[d] * dlogits[0];
                model.out(d, 1) -= lr * hidden[d] * dlogits[1];
            }
            if (!buckets.empty()) {
                const double scale = lr / static_cast<double>(buckets.size());
                for (uint64_t b : buckets)
                    for (uint32_t d = 0; d < config.dim; ++d)
                        model.emb(b, d) -= scale * grad_hidden[d];
            }
        }
        if (report) report->epoch_avg_loss.push_back(loss_sum / static_cast<double>(order.size()));
    }
    return model;
}

GradientBundle analytic_gradients(const ClassifierModel& model, const Example& example) {
    GradientBundle g;
    std::vector<uint64_t> buckets = featurize(example.first, model.hasher);
    std::vector<double> hidden = hidden_vector(model, buckets);
    double probs[2];
    forward(model, hidden, probs);
    const int y = example.second == Label::tutorial ? 1 : 0;
    g.loss = -std::log(std::max(probs[y], 1e-300));
    double dlogits[2] = {probs[0] - (y == 0 ? 1.0 : 0.0), probs[1] - (y == 1 ? 1.0 : 0.0)};

    g.grad_output.assign(model.dim * 2ull, 0.0);
    for (uint32_t d = 0; d < model.dim; ++d) {
        g.grad_output[d * 2 + 0] = hidden[d] * dlogits[0];
        g.grad_output[d * 2 + 1] = hidden[d] * dlogits[1];
    }

    g.active_buckets = buckets;
    std::sort(g.active_buckets.begin(), g.active_buckets.end());
    g.active_buckets.erase(std::unique(g.active_buckets.begin(), g.active_buckets.end()),
                           g.active_buckets.end());
    // Multiplicity of a bucket scales its row gradient.
    std::vector<double> grad_hidden(model.dim);
    for (uint32_t d = 0; d < model.dim; ++d)
        grad_hidden[d] = model.out(d, 0) * dlogits[0] + model.out(d, 1) * dlogits[1];
    g.grad_active.assign(g.active_buckets.size() * model.dim, 0.0);
    if (!buckets.empty()) {
        const double inv = 1.0 / static_cast<double>(buckets.size());
        for (size_t k = 0; k < g.active_buckets.size(); ++k) {
            const uint64_t b = g.active_buckets[k];
            const double mult =
                static_cast<double>(std::count(buckets.begin(), buckets.end(), b));
            for (uint32_t d = 0; d < model.dim; ++d)
                g.grad_active[k * model.dim + d] = grad_hidden[d] * mult * inv;
        }
    }
    return g;
}

static double loss_at(const ClassifierModel& model, const std::vector<uint64_t>& buckets, int y) {
    std::vector<double> hidden = hidden_vector(model, buckets);
    double probs[2];
    forward(model, hidden, probs);
    return -std::log(std::max(probs[y], 1e-300));
}

GradientBundle numeric_gradients(ClassifierModel model, const Example& example, double epsilon) {
    GradientBundle g;
    std::vector<uint64_t> buckets = featurize(example.first, model.hasher);
    const int y = example.second == Label::tutorial ? 1 : 0;
    g.loss = loss_at(model, buckets, y);

    g.grad_output.assign(model.dim * 2ull, 0.0);
    for (size_t w = 0; w < model.output.size(); ++w) {
        const double orig = model.output[w];
        model.output[w] = orig + epsilon;
        const double up = loss_at(model, buckets, y);
        model.output[w] = orig - epsilon;
        const double down = loss_at(model, buckets, y);
        model.output[w] = orig;
        g.grad_output[w] = (up - down) / (2.0 * epsilon);
    }

    g.active_buckets = buckets;
    std::sort(g.active_buckets.begin(), g.active_buckets.end());
    g.active_buckets.erase(std::unique(g.active_buckets.begin(), g.active_buckets.end()),
                           g.active_buckets.end());
    g.grad_active.assign(g.active_buckets.size() * model.dim, 0.0);
    for (size_t k = 0; k < g.active_buckets.size(); ++k) {
        for (uint32_t d = 0; d < model.dim; ++d) {
            double& w = model.emb(g.active_buckets[k], d);
            const double orig = w;
            w = orig + epsilon;
            const double up = loss_at(model, buckets, y);
            w = orig - epsilon;
            const double down = loss_at(model, buckets, y);
            w = orig;
            g.grad_active[k * model.dim + d] = (up - down) / (2.0 * epsilon);
        }
    }
    return g;
}

double relative_error(double a, double b) {
    const double denom = std::max(std::abs(a) + std::abs(b), 1e-8);
    return std::abs(a - b) / denom;
}

double gradient_check(const ClassifierModel& model, const Example& example, double epsilon) {
    if (epsilon <= 0.0) throw TrainError("gradient_check: epsilon must be > 0");
    GradientBundle analytic = analytic_gradients(model, example);
    GradientBundle numeric = numeric_gradients(model, example, epsilon);
    double worst = 0.0;
    for (size_t i = 0; i < analytic.grad_output.size(); ++i)
        worst = std::max(worst, relative_error(analytic.grad_output[i], numeric.grad_output[i]));
    for (size_t i = 0; i < analytic.grad_active.size(); ++i)
        worst = std::max(worst, relative_error(analytic.grad_active[i], numeric.grad_active[i]));
    return worst;
}

EvalMetrics evaluate(const ClassifierModel& model, const std::vector<Example>& test) {
    if (test.empty()) throw TrainError("evaluate: empty test set");
    uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (const auto& [text, label] : test) {
        const bool pred = predict(model, text).label == Label::tutorial;
        const bool truth = label == Label::tutorial;
        if (pred && truth) ++tp;
        else if (pred && !truth) ++fp;
        else if (!pred && truth) ++fn;
        else ++tn;
    }
    EvalMetrics m;
    auto ratio = [](uint64_t num, uint64_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    m.precision = ratio(tp, tp + fp);
    m.recall = ratio(tp, tp + fn);
    m.f1 = (m.precision + m.recall) == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    m.accuracy = ratio(tp + tn, tp + fp + fn + tn);
    return m;
}

json EvalMetrics::to_json() const {
    return json{
        {"precision", precision}, {"recall", recall}, {"f1", f1}, {"accuracy", accuracy}};
}

std::string EvalMetrics::report_row(const std::string& name) const {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-12s precision=%.4f recall=%.4f f1=%.4f accuracy=%.4f",
                  name.c_str(), precision, recall, f1, accuracy);
    return buf;
}

// ---------------------------------------------------------------------------
// Model file: magic "TKNGRAM1", then little-endian scalars and float32 rows.

namespace {

constexpr char kMagic[8] = {'T', 'K', 'N', 'G', 'R', 'A', 'M', '1'};
constexpr uint32_t kVersion = 1;

template <typename T>
void put_le(std::string& out, T value) {
    auto v = static_cast<std::make_unsigned_t<T>>(value);
    for (size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float value) {
    uint32_t bits;
    std::memcpy(&bits, &value, 4);
    put_le(out, bits);
}

void put_f64(std::string& out, double value) {
    uint64_t bits;
    std::memcpy(&bits, &value, 8);
    put_le(out, bits);
}

struct Reader {
    const std::string& data;
    size_t pos = 0;

    void need(size_t n) const {
        if (pos + n > data.size()) throw TrainError("model file truncated");
    }
    template <typename T>
    T get_le() {
        need(sizeof(T));
        std::make_unsigned_t<T> v = 0;
        for (size_t i = 0; i < sizeof(T); ++i)
            v |= static_cast<std::make_unsigned_t<T>>(static_cast<unsigned char>(data[pos + i]))
                 << (8 * i);
        pos += sizeof(T);
        return static_cast<T>(v);
    }
    float get_f32() {
        uint32_t bits = get_le<uint32_t>();
        float f;
        std::memcpy(&f, &bits, 4);
        return f;
    }
    double get_f64() {
        uint64_t bits = get_le<uint64_t>();
        double d;
        std::memcpy(&d, &bits, 8);
        return d;
    }
    std::string get_str() {
        uint32_t len = get_le<uint32_t>();
        need(len);
        std::string s = data.substr(pos, len);
        pos += len;
        return s;
    }
};

}  // namespace

void save_model(const ClassifierModel& model, const std::string& path) {
    model.validate();
    std::string out;
    out.reserve(64 + (model.embedding.size() + model.output.size()) * 4);
    out.append(kMagic, sizeof(kMagic));
    put_le(out, kVersion);
    put_le(out, model.hasher.ngram_min);
    put_le(out, model.hasher.ngram_max);
    put_le(out, model.hasher.bucket_count);
    put_le(out, static_cast<uint32_t>(model.hasher.hash_name.size()));
    out += model.hasher.hash_name;
    put_le(out, model.dim);
    put_le(out, model.train_meta.epochs);
    put_f64(out, model.train_meta.lr0);
    put_le(out, model.train_meta.seed);
    for (double w : model.embedding) put_f32(out, static_cast<float>(w));
    for (double w : model.output) put_f32(out, static_cast<float>(w));

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw TrainError("cannot open model file for writing: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw TrainError("failed writing model file: " + path);
}

ClassifierModel load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw TrainError("cannot open model file: " + path);
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    Reader r{data};
    r.need(sizeof(kMagic));
    if (std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0)
        throw TrainError("not a classifier model file: " + path);
    r.pos = sizeof(kMagic);
    const uint32_t version = r.get_le<uint32_t>();
    if (version != kVersion)
        throw TrainError("unsupported model version " + std::to_string(version));

    ClassifierModel model;
    model.hasher.ngram_min = r.get_le<uint32_t>();
    model.hasher.ngram_max = r.get_le<uint32_t>();
    model.hasher.bucket_count = r.get_le<uint64_t>();
    model.hasher.hash_name = r.get_str();
    model.dim = r.get_le<uint32_t>();
    model.train_meta.epochs = r.get_le<uint32_t>();
    model.train_meta.lr0 = r.get_f64();
    model.train_meta.seed = r.get_le<uint64_t>();
    model.embedding.resize(model.hasher.bucket_count * model.dim);
    for (double& w : model.embedding) w = r.get_f32();
    model.output.resize(model.dim * 2ull);
    for (double& w : model.output) w = r.get_f32();
    if (r.pos != data.size()) throw TrainError("trailing bytes in model file: " + path);
    model.validate();
    return model;
}

}  // namespace trailkit::ngram
