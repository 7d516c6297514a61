#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <stdexcept>

#include "frogtoad/env.hpp"
#include "frogtoad/rng.hpp"

using namespace frogtoad;
using namespace frogtoad::env;

namespace {

// All-solid, fly-free world so tests can stage terrain by hand.
WorldState bare_world(std::uint64_t seed = 1) {
    WorldConfig cfg;
    cfg.rough_prob = 0.0;
    cfg.fly_prob = 0.0;
    return new_world(cfg, seed);
}

}  // namespace

TEST_CASE("new_world is deterministic for a fixed seed and config") {
    WorldConfig cfg;
    CHECK(new_world(cfg, 7) == new_world(cfg, 7));
    CHECK(new_world(cfg, 7) != new_world(cfg, 8));
}

TEST_CASE("degenerate probabilities produce uniform layers") {
    WorldConfig cfg;
    cfg.rough_prob = 0.0;
    cfg.fly_prob = 1.0;
    const WorldState w = new_world(cfg, 3);
    CHECK(std::all_of(w.ground.begin(), w.ground.end(),
                      [](std::uint8_t g) { return g == kGroundSolid; }));
    CHECK(std::all_of(w.flies.begin(), w.flies.end(),
                      [](std::uint8_t f) { return f == 1; }));

    cfg.rough_prob = 1.0;
    cfg.fly_prob = 0.0;
    const WorldState w2 = new_world(cfg, 3);
    CHECK(std::all_of(w2.ground.begin(), w2.ground.end(),
                      [](std::uint8_t g) { return g == kGroundRough; }));
    CHECK(std::all_of(w2.flies.begin(), w2.flies.end(),
                      [](std::uint8_t f) { return f == 0; }));
}

TEST_CASE("invalid world configs are rejected") {
    WorldConfig cfg;
    cfg.rough_prob = -0.1;
    CHECK_THROWS_AS(new_world(cfg, 1), std::invalid_argument);
    cfg.rough_prob = 0.5;
    cfg.fly_prob = 1.5;
    CHECK_THROWS_AS(new_world(cfg, 1), std::invalid_argument);
    cfg.fly_prob = 0.5;
    cfg.rough_run_max = 0;
    CHECK_THROWS_AS(new_world(cfg, 1), std::invalid_argument);
}

TEST_CASE("hop on solid ground advances, scores, and keeps energy") {
    WorldState w = bare_world();
    w.frog.position = 4;
    w.toad.position = 10;
    w.frog.energy = 5;
    const WorldState after = apply_action(w, AgentId::Frog, Action::Hop);
    CHECK(after.frog.position == 5);
    CHECK(after.frog.score == 1);
    CHECK(after.frog.energy == 5);
    CHECK(after.frog.activity == Activity::Hopping);
}

TEST_CASE("hop onto rough ground costs one energy") {
    WorldState w = bare_world();
    w.frog.position = 4;
    w.toad.position = 10;
    w.ground[5] = kGroundRough;
    w.frog.energy = 5;
    WorldState after = apply_action(w, AgentId::Frog, Action::Hop);
    CHECK(after.frog.energy == 4);
    CHECK(after.frog.score == 1);

    w.frog.energy = 1;
    after = apply_action(w, AgentId::Frog, Action::Hop);
    CHECK(after.frog.energy == 0);
    CHECK(after.frog.activity == Activity::Distressed);
}

TEST_CASE("hop leapfrogs over the partner") {
    WorldState w = bare_world();
    w.frog.position = 9;
    w.toad.position = 10;
    const WorldState after = apply_action(w, AgentId::Frog, Action::Hop);
    CHECK(after.frog.position == 11);
    CHECK(after.frog.score == 1);
    CHECK(after.frog.position != after.toad.position);
}

TEST_CASE("jump with a fly overhead refills energy, capped at 20") {
    WorldState w = bare_world();
    w.frog.position = 6;
    w.toad.position = 10;
    w.flies[6] = 1;
    w.frog.energy = 18;
    const WorldState after = apply_action(w, AgentId::Frog, Action::Jump);
    CHECK(after.frog.energy == kMaxEnergy);
    CHECK(after.flies[6] == 0);
    CHECK(after.frog.activity == Activity::Jumping);
    CHECK(after.frog.position == 6);
    CHECK(after.frog.score == 0);
}

TEST_CASE("jump without a fly is a free no-op") {
    WorldState w = bare_world();
    w.frog.energy = 7;
    const WorldState after = apply_action(w, AgentId::Frog, Action::Jump);
    CHECK(after.frog.energy == 7);
    CHECK(after.frog.position == w.frog.position);
}

TEST_CASE("leap covers five cells, costs one energy, scores nothing") {
    WorldState w = bare_world();
    w.frog.position = 3;
    w.toad.position = 20;
    w.frog.energy = 5;
    const WorldState after = apply_action(w, AgentId::Frog, Action::Leap);
    CHECK(after.frog.position == 8);
    CHECK(after.frog.energy == 4);
    CHECK(after.frog.score == 0);
    CHECK(after.frog.activity == Activity::Leaping);
}

TEST_CASE("help transfers energy and can distress the helper") {
    WorldState w = bare_world();
    w.frog.energy = 1;
    w.toad.energy = 6;
    const WorldState after = apply_action(w, AgentId::Frog, Action::Help);
    CHECK(after.frog.energy == 0);
    CHECK(after.frog.activity == Activity::Distressed);
    CHECK(after.toad.energy == 8);
}

TEST_CASE("help revives a distressed recipient") {
    WorldState w = bare_world();
    w.toad.energy = 0;
    w.toad.activity = Activity::Distressed;
    w.frog.energy = 5;
    const WorldState after = apply_action(w, AgentId::Frog, Action::Help);
    CHECK(after.toad.energy == 2);
    CHECK(after.toad.activity != Activity::Distressed);
}

TEST_CASE("help energy gift is capped so the total delta shrinks near the cap") {
    for (int toad_energy : {5, 19, 20}) {
        WorldState w = bare_world();
        w.frog.energy = 10;
        w.toad.energy = toad_energy;
        const WorldState after = apply_action(w, AgentId::Frog, Action::Help);
        const int before_total = w.frog.energy + w.toad.energy;
        const int after_total = after.frog.energy + after.toad.energy;
        CHECK(after_total - before_total ==
              -1 + std::min(2, kMaxEnergy - toad_energy));
    }
}

TEST_CASE("help leap branch fires for about a quarter of seeded trials") {
    // Frog at 0, Toad at 1: a fired branch always lands the Toad on cell 6.
    WorldConfig cfg;
    cfg.rough_prob = 0.0;
    cfg.fly_prob = 0.0;
    int fired = 0;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) {
        const WorldState w = new_world(cfg, static_cast<std::uint64_t>(i));
        const WorldState after = apply_action(w, AgentId::Frog, Action::Help);
        if (after.toad.position == 6) ++fired;
        else CHECK(after.toad.position == 1);
    }
    const double freq = static_cast<double>(fired) / trials;
    CHECK(freq >= 0.24);
    CHECK(freq <= 0.26);
}

TEST_CASE("distressed agents may only jump") {
    WorldState w = bare_world();
    w.frog.energy = 0;
    w.frog.activity = Activity::Distressed;
    CHECK(legal_actions(w, AgentId::Frog) == std::vector<Action>{Action::Jump});
    CHECK_THROWS_AS(apply_action(w, AgentId::Frog, Action::Hop),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_action(w, AgentId::Frog, Action::Leap),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_action(w, AgentId::Frog, Action::Help),
                    std::invalid_argument);
}

TEST_CASE("all four actions are legal at energy 1 and at the cap") {
    WorldState w = bare_world();
    const std::vector<Action> all{Action::Hop, Action::Jump, Action::Leap,
                                  Action::Help};
    w.frog.energy = 1;
    CHECK(legal_actions(w, AgentId::Frog) == all);
    w.frog.energy = kMaxEnergy;
    CHECK(legal_actions(w, AgentId::Frog) == all);
}

TEST_CASE("scrolling keeps the leading agent inside the window") {
    WorldState w = bare_world(11);
    w.frog.position = 31;
    w.toad.position = 5;
    const WorldState after = apply_action(w, AgentId::Frog, Action::Hop);
    CHECK(after.frog.position == 31);
    CHECK(after.toad.position == 4);
    CHECK(after.scroll_offset == 1);
    CHECK(after.frog.score == 1);
}

TEST_CASE("a move is clamped when the trailing agent is pinned at cell 0") {
    WorldState w = bare_world();
    w.frog.position = 31;
    w.toad.position = 0;
    const WorldState after = apply_action(w, AgentId::Frog, Action::Hop);
    CHECK(after.frog.position == 31);
    CHECK(after.toad.position == 0);
    CHECK(after.scroll_offset == 0);
    CHECK(after.frog.score == 0);  // no ground covered, no point
}

TEST_CASE("encode writes codes at 32 + position") {
    WorldState w = bare_world();
    w.frog.position = 3;
    w.frog.activity = Activity::Hopping;
    w.toad.position = 10;
    w.toad.energy = 0;
    w.toad.activity = Activity::Distressed;
    const StateVector v = encode(w, false);
    CHECK(v[35] == kCodeFrogHop);
    CHECK(v[42] == kCodeDistress);
    CHECK(v[kStatsBase + 0] == w.frog.energy);
    CHECK(v[kStatsBase + 1] == 0);

    const StateVector z = encode(w, true);
    for (int i = 0; i < 4; ++i) CHECK(z[kStatsBase + i] == 0);
    CHECK(std::equal(v.begin(), v.begin() + kStatsBase, z.begin()));
}

TEST_CASE("dual distress encodes two 9s and no identity bits") {
    WorldState w = bare_world();
    w.frog.energy = 0;
    w.frog.activity = Activity::Distressed;
    w.toad.energy = 0;
    w.toad.activity = Activity::Distressed;
    const StateVector v = encode(w, true);
    int nines = 0;
    for (int i = 0; i < kCells; ++i)
        if (v[kPlayerBase + i] == kCodeDistress) ++nines;
    CHECK(nines == 2);
    validate_state(v);
}

TEST_CASE("idle agents encode with their hop codes") {
    CHECK(player_code(AgentId::Frog, Activity::Idle) == kCodeFrogHop);
    CHECK(player_code(AgentId::Toad, Activity::Idle) == kCodeToadHop);
    CHECK(player_code(AgentId::Frog, Activity::Jumping) == kCodeJump);
    CHECK(player_code(AgentId::Toad, Activity::Jumping) == kCodeJump);
    CHECK(player_code(AgentId::Frog, Activity::Distressed) == kCodeDistress);
}

TEST_CASE("validate_state rejects malformed vectors") {
    const WorldState w = new_world(WorldConfig{}, 5);
    StateVector v = encode(w, false);
    validate_state(v);  // valid as produced

    StateVector bad = v;
    bad[0] = 3;
    CHECK_THROWS_AS(validate_state(bad), std::invalid_argument);
    bad = v;
    bad[kPlayerBase + 7] = 1;
    CHECK_THROWS_AS(validate_state(bad), std::invalid_argument);
    bad = v;
    bad[kFlyBase + 2] = 5;
    CHECK_THROWS_AS(validate_state(bad), std::invalid_argument);
    bad = v;
    bad[kPlayerBase + 20] = kCodeJump;
    bad[kPlayerBase + 21] = kCodeJump;  // three occupied player cells
    CHECK_THROWS_AS(validate_state(bad), std::invalid_argument);
}

TEST_CASE("agent identity is recovered by elimination where possible") {
    WorldState w = bare_world();
    w.frog.position = 8;
    w.toad.position = 3;

    SUBCASE("frog hop code pins both agents") {
        const AgentCells c = resolve_agent_cells(encode(w, true));
        CHECK(c.frog_cell == 8);
        CHECK(c.toad_cell == 3);
    }
    SUBCASE("toad hop code identifies the frog as the other cell") {
        w.frog.activity = Activity::Jumping;
        const AgentCells c = resolve_agent_cells(encode(w, true));
        CHECK(c.frog_cell == 8);
        CHECK(c.toad_cell == 3);
    }
    SUBCASE("distress plus statistics identifies the zero-energy agent") {
        w.frog.energy = 0;
        w.frog.activity = Activity::Distressed;
        w.toad.activity = Activity::Leaping;
        const AgentCells c = resolve_agent_cells(encode(w, false));
        CHECK(c.frog_cell == 8);
        CHECK(c.toad_cell == 3);
    }
    SUBCASE("fully ambiguous codes fall back to the leftmost-is-frog rule") {
        w.frog.activity = Activity::Jumping;
        w.toad.activity = Activity::Leaping;
        const AgentCells c = resolve_agent_cells(encode(w, true));
        CHECK(c.frog_cell == 3);  // convention, not knowledge
        CHECK(c.toad_cell == 8);
    }
}

TEST_CASE("random episodes never break the core invariants") {
    WorldConfig cfg;
    SplitMix64 rng(0xE9157EADULL);
    for (int episode = 0; episode < 400; ++episode) {
        WorldState w = new_world(cfg, rng.next_u64());
        int last_scores[2] = {0, 0};
        for (int step = 0; step < 64; ++step) {
            const AgentId mover = step % 2 == 0 ? AgentId::Frog : AgentId::Toad;
            const auto legal = legal_actions(w, mover);
            const Action a = legal[rng.next_below(legal.size())];
            w = apply_action(w, mover, a);
            for (AgentId id : {AgentId::Frog, AgentId::Toad}) {
                const AgentState& ag = w.agent(id);
                CHECK(ag.energy >= 0);
                CHECK(ag.energy <= kMaxEnergy);
                CHECK(ag.position >= 0);
                CHECK(ag.position <= kCells - 1);
                CHECK((ag.energy == 0) == (ag.activity == Activity::Distressed));
            }
            CHECK(w.frog.position != w.toad.position);
            const int ms = w.agent(mover).score;
            const int midx = static_cast<int>(mover);
            CHECK(ms >= last_scores[midx]);
            CHECK(ms - last_scores[midx] <= 1);
            if (a != Action::Hop) CHECK(ms == last_scores[midx]);
            last_scores[midx] = ms;
            validate_state(encode(w, false));
            validate_state(encode(w, true));
        }
    }
}

TEST_CASE("identical seed, config, and action sequence reproduce the world") {
    WorldConfig cfg;
    const std::uint64_t seed = 99;
    auto play = [&] {
        WorldState w = new_world(cfg, seed);
        SplitMix64 choices(4242);
        for (int step = 0; step < 200; ++step) {
            const AgentId mover = step % 2 == 0 ? AgentId::Frog : AgentId::Toad;
            const auto legal = legal_actions(w, mover);
            w = apply_action(w, mover, legal[choices.next_below(legal.size())]);
        }
        return w;
    };
    CHECK(play() == play());
}
