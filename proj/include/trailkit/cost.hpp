#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "trailkit/decimal.hpp"

namespace trailkit::cost {

/// Per-1,000-entry phase costs plus the two yield ratios. Defaults are the
/// published pipeline figures.
struct CostInputs {
    Decimal tp_per_1k = Decimal::parse("0.886");
    Decimal replay_per_1k = Decimal::parse("215.359");
    Decimal eval_per_1k = Decimal::parse("3.104");
    Decimal web_ratio = Decimal::parse("0.275");
    Decimal success_rate = Decimal::parse("0.399");

    void validate() const;  // ratios in (0, 1], costs >= 0
};

struct CostReport {
    Decimal mining_term;       // tp_per_1k / web_ratio
    Decimal replay_eval_term;  // (replay_per_1k + eval_per_1k) / success_rate
    Decimal total;

    /// Two-place half-up display of the total (e.g. "550.75").
    std::string display_total() const { return total.to_display_string(2); }
    nlohmann::json to_json() const;
};

/// Cost per 1,000 verified effective trajectories.
CostReport cost_per_1k(const CostInputs& inputs);

}  // namespace trailkit::cost
