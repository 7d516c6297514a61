#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "frogtoad/rng.hpp"

namespace frogtoad::env {

// --- Layout constants ---

inline constexpr int kCells = 32;      // visible world window
inline constexpr int kStateDim = 100;  // encoded state vector length

inline constexpr int kGroundBase = 0;   // cells 0..31: ground codes
inline constexpr int kPlayerBase = 32;  // cells 32..63: player-layer codes
inline constexpr int kFlyBase = 64;     // cells 64..95: fly presence
inline constexpr int kStatsBase = 96;   // cells 96..99: energies + scores

inline constexpr int kGroundSolid = 1;
inline constexpr int kGroundRough = 2;

// Player-layer codes. Hop/idle codes identify the agent; the rest are
// agent-agnostic, so identity must be recovered by elimination (or not at all).
inline constexpr int kCodeFrogHop = 4;
inline constexpr int kCodeToadHop = 5;
inline constexpr int kCodeJump = 6;
inline constexpr int kCodeLeap = 7;
inline constexpr int kCodeHelp = 8;
inline constexpr int kCodeDistress = 9;

inline constexpr int kMaxEnergy = 20;

// --- Domain types ---

enum class AgentId : int { Frog = 0, Toad = 1 };

enum class Action : int { Hop = 0, Jump = 1, Leap = 2, Help = 3 };

inline constexpr std::array<Action, 4> kAllActions{Action::Hop, Action::Jump, Action::Leap,
                                                   Action::Help};

// Lower-case action label ("hop" | "jump" | "leap" | "help").
const char* action_name(Action a);

enum class Activity : int {
    Idle = 0,
    Hopping,
    Jumping,
    Leaping,
    Helping,
    Distressed,
};

struct WorldConfig {
    double rough_prob = 0.15;  // per-cell chance of starting a rough run
    double fly_prob = 0.15;    // i.i.d. per-cell fly presence
    int rough_run_max = 3;     // rough run length uniform in 1..rough_run_max
    // Asymmetric starts: Frog opens rested, Toad opens low, so random play
    // visits helper-and-distressed states often while Frog (whose viewpoint
    // is labeled) rarely sits at ambiguous near-zero energies.
    int start_energy_frog = 20;
    int start_energy_toad = 6;

    bool operator==(const WorldConfig&) const = default;
};

struct AgentState {
    int position = 0;   // window cell 0..31
    int energy = 10;    // 0..20; exactly 0 <=> Distressed
    int score = 0;
    Activity activity = Activity::Idle;

    bool operator==(const AgentState&) const = default;
};

// Immutable value type; apply_action returns a new state. Each world owns its
// RNG stream (help-leap branch, fresh terrain drawn on scroll).
struct WorldState {
    std::array<std::uint8_t, kCells> ground{};  // kGroundSolid / kGroundRough
    std::array<std::uint8_t, kCells> flies{};   // 0 / 1
    AgentState frog;
    AgentState toad;
    std::uint64_t rng_state = 0;
    std::uint64_t scroll_offset = 0;   // world cells scrolled past so far
    int rough_run_remaining = 0;       // continues terrain runs across scrolls
    WorldConfig config;

    const AgentState& agent(AgentId id) const {
        return id == AgentId::Frog ? frog : toad;
    }
    AgentState& agent(AgentId id) { return id == AgentId::Frog ? frog : toad; }

    bool operator==(const WorldState&) const = default;
};

// Encoded state: 0..31 ground, 32..63 player codes, 64..95 flies,
// 96..99 (frog energy, toad energy, frog score, toad score).
using StateVector = std::array<int, kStateDim>;

// --- Operations ---

// Throws std::invalid_argument naming the first invalid field: probabilities
// in [0,1], rough_run_max >= 1, start energies in 1..20.
void check_config(const WorldConfig& config);

// Validates config, lays out terrain and flies from `seed`, places Frog at
// cell 0 and Toad at cell 1, both idle at kStartEnergy.
WorldState new_world(const WorldConfig& config, std::uint64_t seed);

// Applies one action for one agent and returns the successor world.
// Throws std::invalid_argument when the action is illegal for the agent
// (Hop/Leap/Help at zero energy). Forward moves past cell 31 scroll the
// window while the trailing agent is off cell 0, otherwise they stop early.
WorldState apply_action(const WorldState& world, AgentId agent, Action action);

// Encodes a world into the 100-cell state vector. With zero_stats the four
// statistics cells are left at 0 (the form stored in datasets).
StateVector encode(const WorldState& world, bool zero_stats);

// Energy 0 => {Jump}; otherwise all four actions (Help needs energy >= 1).
std::vector<Action> legal_actions(const WorldState& world, AgentId agent);

// Throws std::invalid_argument naming the first encoding invariant violated:
// ground codes in {1,2}, player codes in {0,4..9}, fly cells in {0,1}, at
// most two nonzero player cells, statistics cells non-negative.
void validate_state(const StateVector& state);

// Player-layer code for an agent in a given activity. Idle encodes like
// hopping (4/5); jump/leap/help/distress are agent-agnostic (6/7/8/9).
int player_code(AgentId id, Activity activity);

// --- Identity recovery ---

struct AgentCells {
    int frog_cell;  // window position 0..31
    int toad_cell;
};

// Recovers which player cell belongs to which agent, by elimination:
//   1. a code-4 cell is Frog's; a code-5 cell is Toad's;
//   2. with one distress cell and populated statistics, the zero-energy
//      agent owns it;
//   3. otherwise identity is genuinely absent from the encoding and the
//      leftmost occupied cell is assigned to Frog (fixed convention).
// Requires exactly two occupied player cells; throws std::invalid_argument
// otherwise (both agents always exist, so valid encodings have two).
AgentCells resolve_agent_cells(const StateVector& state);

}  // namespace frogtoad::env
