#include "frogtoad/oracle.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace frogtoad::oracle {

using env::Action;

void check_config(const OracleConfig& config) {
    if (config.refill_ceiling < 1 || config.refill_ceiling > env::kMaxEnergy)
        throw std::invalid_argument("oracle config: refill_ceiling must be in 1..20");
    if (config.help_min_energy < 1)
        throw std::invalid_argument("oracle config: help_min_energy must be >= 1");
    if (config.leap_lookahead < 1 || config.leap_lookahead > 5)
        throw std::invalid_argument("oracle config: leap_lookahead must be in 1..5");
}

Action label(const env::StateVector& state, const OracleConfig& config) {
    check_config(config);
    env::validate_state(state);
    const env::AgentCells cells = env::resolve_agent_cells(state);

    const int self_code = state[env::kPlayerBase + cells.frog_cell];
    const int other_code = state[env::kPlayerBase + cells.toad_cell];
    const int self_energy = state[env::kStatsBase + 0];
    const int other_energy = state[env::kStatsBase + 1];

    // Distress code and zero energy must agree; in particular this rejects
    // zero-statistics encodings of healthy agents.
    if ((self_code == env::kCodeDistress) != (self_energy == 0))
        throw std::invalid_argument(
            "state: own distress code and energy cell disagree (statistics "
            "cells must be populated for labeling)");
    if ((other_code == env::kCodeDistress) != (other_energy == 0))
        throw std::invalid_argument(
            "state: partner distress code and energy cell disagree "
            "(statistics cells must be populated for labeling)");

    if (self_energy == 0) return Action::Jump;  // R1: stalled, fish for flies

    if (state[env::kFlyBase + cells.frog_cell] == 1 &&
        self_energy <= config.refill_ceiling)
        return Action::Jump;  // R2: top up while it is cheap

    if (other_code == env::kCodeDistress &&
        self_energy >= config.help_min_energy)
        return Action::Help;  // R3: revive the partner

    const int scan_end =
        std::min(cells.frog_cell + config.leap_lookahead, env::kCells - 1);
    for (int i = cells.frog_cell + 1; i <= scan_end; ++i) {
        if (state[env::kGroundBase + i] == env::kGroundRough && self_energy >= 2)
            return Action::Leap;  // R4: vault the rough patch
    }

    return Action::Hop;  // R5
}

std::vector<Action> label_batch(const std::vector<env::StateVector>& states,
                                const OracleConfig& config) {
    std::vector<Action> out;
    out.reserve(states.size());
    for (const env::StateVector& s : states) out.push_back(label(s, config));
    return out;
}

}  // namespace frogtoad::oracle
