#include "trailkit/cost.hpp"

#include <nlohmann/json.hpp>

#include "trailkit/errors.hpp"

namespace trailkit::cost {

using nlohmann::json;

void CostInputs::validate() const {
    const Decimal one = Decimal::parse("1");
    for (const Decimal* ratio : {&web_ratio, &success_rate}) {
        if (ratio->nanos() <= 0) throw CostError("ratios must be > 0");
        if (*ratio > one) throw CostError("ratios must be <= 1");
    }
    for (const Decimal* c : {&tp_per_1k, &replay_per_1k, &eval_per_1k})
        if (c->is_negative()) throw CostError("phase costs must be >= 0");
}

CostReport cost_per_1k(const CostInputs& inputs) {
    inputs.validate();
    CostReport report;
    report.mining_term = inputs.tp_per_1k / inputs.web_ratio;
    report.replay_eval_term = (inputs.replay_per_1k + inputs.eval_per_1k) / inputs.success_rate;
    report.total = report.mining_term + report.replay_eval_term;
    return report;
}

json CostReport::to_json() const {
    return json{{"mining_term", mining_term.to_string()},
                {"replay_eval_term", replay_eval_term.to_string()},
                {"total", total.to_string()},
                {"total_display", display_total()}};
}

}  // namespace trailkit::cost
