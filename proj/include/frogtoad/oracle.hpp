#pragma once

#include <vector>

#include "frogtoad/env.hpp"

namespace frogtoad::oracle {

// Rule thresholds for the labeling policy.
struct OracleConfig {
    int refill_ceiling = 16;  // jump for a fly while energy <= this
    int help_min_energy = 2;  // minimum energy to give help away
    int leap_lookahead = 5;   // rough-terrain scan distance for leaping

    bool operator==(const OracleConfig&) const = default;
};

// Throws std::invalid_argument unless 0 < refill_ceiling <= 20,
// help_min_energy >= 1, and 1 <= leap_lookahead <= 5.
void check_config(const OracleConfig& config);

// Labels a state with the approximately-optimal action from Frog's
// perspective. First matching rule wins:
//   R1  own energy 0                                    -> Jump
//   R2  fly at own column and energy <= refill_ceiling  -> Jump
//   R3  partner distressed and energy >= help_min_energy-> Help
//   R4  rough ground within leap_lookahead cells ahead
//       and energy >= 2                                 -> Leap
//   R5  otherwise                                       -> Hop
//
// The state must be a statistics-bearing encoding (energies populated):
// a distress code and a zero energy cell must agree, and non-distressed
// agents must show positive energy. Zero-statistics dataset rows are
// therefore rejected; labeling happens before the cells are zeroed.
// When the player codes leave agent identity unrecoverable, the leftmost
// occupied cell is treated as Frog's position (see resolve_agent_cells);
// the returned label is still deterministic.
env::Action label(const env::StateVector& state, const OracleConfig& config);

// Elementwise label(); order preserved; throws on the first malformed state.
std::vector<env::Action> label_batch(const std::vector<env::StateVector>& states,
                                     const OracleConfig& config);

}  // namespace frogtoad::oracle
