#include "frogtoad/env.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <string>

namespace frogtoad::env {

const char* action_name(Action a) {
    switch (a) {
        case Action::Hop: return "hop";
        case Action::Jump: return "jump";
        case Action::Leap: return "leap";
        case Action::Help: return "help";
    }
    throw std::invalid_argument("unknown action value");
}

void check_config(const WorldConfig& config) {
    if (!(config.rough_prob >= 0.0 && config.rough_prob <= 1.0))
        throw std::invalid_argument("world config: rough_prob must be in [0,1]");
    if (!(config.fly_prob >= 0.0 && config.fly_prob <= 1.0))
        throw std::invalid_argument("world config: fly_prob must be in [0,1]");
    if (config.rough_run_max < 1)
        throw std::invalid_argument("world config: rough_run_max must be >= 1");
    for (int e : {config.start_energy_frog, config.start_energy_toad}) {
        if (e < 1 || e > kMaxEnergy)
            throw std::invalid_argument(
                "world config: start energies must be in 1..20");
    }
}

namespace {

constexpr double kHelpLeapChance = 0.25;
constexpr int kJumpEnergyGain = 4;
constexpr int kHelpEnergyGift = 2;
constexpr int kLeapDistance = 5;

// Draws the next ground cell, continuing any rough run in progress.
std::uint8_t next_ground_cell(const WorldConfig& config, SplitMix64& rng,
                              int& run_remaining) {
    if (run_remaining > 0) {
        --run_remaining;
        return kGroundRough;
    }
    if (rng.next_double() < config.rough_prob) {
        const int run_len =
            1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(config.rough_run_max)));
        run_remaining = run_len - 1;
        return kGroundRough;
    }
    return kGroundSolid;
}

std::uint8_t next_fly_cell(const WorldConfig& config, SplitMix64& rng) {
    return rng.next_double() < config.fly_prob ? 1 : 0;
}

// Shifts the window one cell left; both agents keep their world positions.
void scroll(WorldState& w, SplitMix64& rng) {
    std::copy(w.ground.begin() + 1, w.ground.end(), w.ground.begin());
    std::copy(w.flies.begin() + 1, w.flies.end(), w.flies.begin());
    w.ground[kCells - 1] = next_ground_cell(w.config, rng, w.rough_run_remaining);
    w.flies[kCells - 1] = next_fly_cell(w.config, rng);
    --w.frog.position;
    --w.toad.position;
    ++w.scroll_offset;
}

// Advances `agent` up to `steps` cells, hopping over the partner and
// scrolling at the window edge. Stops early when the trailing agent is
// pinned at cell 0. Returns how many cells were actually covered.
int move_forward(WorldState& w, AgentId agent, int steps, SplitMix64& rng) {
    int moved = 0;
    const AgentId other =
        agent == AgentId::Frog ? AgentId::Toad : AgentId::Frog;
    for (int s = 0; s < steps; ++s) {
        AgentState& actor = w.agent(agent);
        const AgentState& partner = w.agent(other);
        int target = actor.position + 1;
        if (target == partner.position) ++target;  // leapfrog over partner
        while (target > kCells - 1) {
            if (std::min(actor.position, partner.position) == 0) return moved;
            scroll(w, rng);
            --target;
        }
        assert(target != w.agent(other).position);
        actor.position = target;
        ++moved;
    }
    return moved;
}

}  // namespace

WorldState new_world(const WorldConfig& config, std::uint64_t seed) {
    check_config(config);
    WorldState w;
    w.config = config;
    SplitMix64 rng(seed);
    int run_remaining = 0;
    for (int i = 0; i < kCells; ++i)
        w.ground[i] = next_ground_cell(config, rng, run_remaining);
    for (int i = 0; i < kCells; ++i) w.flies[i] = next_fly_cell(config, rng);
    w.rough_run_remaining = run_remaining;
    w.frog = AgentState{0, config.start_energy_frog, 0, Activity::Idle};
    w.toad = AgentState{1, config.start_energy_toad, 0, Activity::Idle};
    w.rng_state = rng.state();
    return w;
}

WorldState apply_action(const WorldState& world, AgentId agent, Action action) {
    const AgentState& actor_before = world.agent(agent);
    if (action != Action::Jump && actor_before.energy == 0)
        throw std::invalid_argument(
            "illegal action: a distressed agent can only jump for flies");

    WorldState w = world;
    SplitMix64 rng(w.rng_state);
    const AgentId other =
        agent == AgentId::Frog ? AgentId::Toad : AgentId::Frog;

    switch (action) {
        case Action::Hop: {
            const int moved = move_forward(w, agent, 1, rng);
            AgentState& actor = w.agent(agent);
            if (moved >= 1) {
                actor.score += 1;
                if (w.ground[actor.position] == kGroundRough)
                    actor.energy -= 1;  // rough landings cost 1
            }
            actor.activity = Activity::Hopping;
            break;
        }
        case Action::Jump: {
            AgentState& actor = w.agent(agent);
            if (w.flies[actor.position] == 1) {
                actor.energy = std::min(actor.energy + kJumpEnergyGain, kMaxEnergy);
                w.flies[actor.position] = 0;
            }
            actor.activity = Activity::Jumping;
            break;
        }
        case Action::Leap: {
            move_forward(w, agent, kLeapDistance, rng);
            AgentState& actor = w.agent(agent);
            actor.energy -= 1;
            actor.activity = Activity::Leaping;
            break;
        }
        case Action::Help: {
            w.agent(agent).energy -= 1;
            w.agent(agent).activity = Activity::Helping;
            AgentState& partner = w.agent(other);
            partner.energy = std::min(partner.energy + kHelpEnergyGift, kMaxEnergy);
            if (partner.activity == Activity::Distressed && partner.energy > 0)
                partner.activity = Activity::Idle;
            if (rng.next_double() < kHelpLeapChance) {
                const int moved = move_forward(w, other, kLeapDistance, rng);
                if (moved >= 1) w.agent(other).activity = Activity::Leaping;
            }
            break;
        }
    }

    if (w.frog.energy == 0) w.frog.activity = Activity::Distressed;
    if (w.toad.energy == 0) w.toad.activity = Activity::Distressed;
    assert(w.frog.energy >= 0 && w.frog.energy <= kMaxEnergy);
    assert(w.toad.energy >= 0 && w.toad.energy <= kMaxEnergy);
    assert(w.frog.position != w.toad.position);
    w.rng_state = rng.state();
    return w;
}

int player_code(AgentId id, Activity activity) {
    switch (activity) {
        case Activity::Idle:
        case Activity::Hopping:
            return id == AgentId::Frog ? kCodeFrogHop : kCodeToadHop;
        case Activity::Jumping: return kCodeJump;
        case Activity::Leaping: return kCodeLeap;
        case Activity::Helping: return kCodeHelp;
        case Activity::Distressed: return kCodeDistress;
    }
    throw std::invalid_argument("unknown activity");
}

StateVector encode(const WorldState& world, bool zero_stats) {
    StateVector v{};
    for (int i = 0; i < kCells; ++i) v[kGroundBase + i] = world.ground[i];
    v[kPlayerBase + world.frog.position] =
        player_code(AgentId::Frog, world.frog.activity);
    v[kPlayerBase + world.toad.position] =
        player_code(AgentId::Toad, world.toad.activity);
    for (int i = 0; i < kCells; ++i) v[kFlyBase + i] = world.flies[i];
    if (!zero_stats) {
        v[kStatsBase + 0] = world.frog.energy;
        v[kStatsBase + 1] = world.toad.energy;
        v[kStatsBase + 2] = world.frog.score;
        v[kStatsBase + 3] = world.toad.score;
    }
    return v;
}

std::vector<Action> legal_actions(const WorldState& world, AgentId agent) {
    if (world.agent(agent).energy == 0) return {Action::Jump};
    return {Action::Hop, Action::Jump, Action::Leap, Action::Help};
}

void validate_state(const StateVector& state) {
    for (int i = 0; i < kCells; ++i) {
        const int g = state[kGroundBase + i];
        if (g != kGroundSolid && g != kGroundRough)
            throw std::invalid_argument("state: ground cell " + std::to_string(i) +
                                        " holds " + std::to_string(g) +
                                        ", expected 1 or 2");
    }
    int occupied = 0;
    for (int i = 0; i < kCells; ++i) {
        const int p = state[kPlayerBase + i];
        const bool ok = p == 0 || (p >= kCodeFrogHop && p <= kCodeDistress);
        if (!ok)
            throw std::invalid_argument("state: player cell " + std::to_string(i) +
                                        " holds invalid code " + std::to_string(p));
        if (p != 0) ++occupied;
    }
    if (occupied > 2)
        throw std::invalid_argument("state: more than two occupied player cells");
    for (int i = 0; i < kCells; ++i) {
        const int f = state[kFlyBase + i];
        if (f != 0 && f != 1)
            throw std::invalid_argument("state: fly cell " + std::to_string(i) +
                                        " holds " + std::to_string(f));
    }
    for (int i = 0; i < 4; ++i) {
        if (state[kStatsBase + i] < 0)
            throw std::invalid_argument("state: negative statistics cell " +
                                        std::to_string(kStatsBase + i));
    }
}

AgentCells resolve_agent_cells(const StateVector& state) {
    int cells[2] = {-1, -1};
    int found = 0;
    for (int i = 0; i < kCells; ++i) {
        if (state[kPlayerBase + i] != 0) {
            if (found < 2) cells[found] = i;
            ++found;
        }
    }
    if (found != 2)
        throw std::invalid_argument(
            "state: expected exactly two occupied player cells, found " +
            std::to_string(found));

    const int code0 = state[kPlayerBase + cells[0]];
    const int code1 = state[kPlayerBase + cells[1]];
    if (code0 == kCodeFrogHop && code1 == kCodeFrogHop)
        throw std::invalid_argument("state: two cells claim the Frog hop code");
    if (code0 == kCodeToadHop && code1 == kCodeToadHop)
        throw std::invalid_argument("state: two cells claim the Toad hop code");

    if (code0 == kCodeFrogHop) return {cells[0], cells[1]};
    if (code1 == kCodeFrogHop) return {cells[1], cells[0]};
    if (code0 == kCodeToadHop) return {cells[1], cells[0]};
    if (code1 == kCodeToadHop) return {cells[0], cells[1]};

    // Both codes are agent-agnostic. A lone distress cell plus populated
    // statistics identifies the zero-energy agent.
    const bool stats_present = state[kStatsBase + 0] != 0 ||
                               state[kStatsBase + 1] != 0 ||
                               state[kStatsBase + 2] != 0 ||
                               state[kStatsBase + 3] != 0;
    const bool d0 = code0 == kCodeDistress;
    const bool d1 = code1 == kCodeDistress;
    if (stats_present && (d0 != d1)) {
        const bool frog_zero = state[kStatsBase + 0] == 0;
        const bool toad_zero = state[kStatsBase + 1] == 0;
        if (frog_zero != toad_zero) {
            const int distress_cell = d0 ? cells[0] : cells[1];
            const int other_cell = d0 ? cells[1] : cells[0];
            return frog_zero ? AgentCells{distress_cell, other_cell}
                             : AgentCells{other_cell, distress_cell};
        }
    }
    // Identity is unrecoverable; leftmost cell is Frog's by convention.
    return {cells[0], cells[1]};
}

}  // namespace frogtoad::env
