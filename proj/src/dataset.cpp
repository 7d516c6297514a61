#include "frogtoad/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "json.hpp"

#include "frogtoad/rng.hpp"

namespace frogtoad::dataset {

using env::Action;
using env::AgentId;

namespace {

constexpr const char* kActionNames[4] = {"hop", "jump", "leap", "help"};

std::string pack_key(const std::array<std::uint8_t, env::kStateDim>& features) {
    return std::string(reinterpret_cast<const char*>(features.data()),
                       features.size());
}

std::array<std::uint8_t, env::kStateDim> to_row_features(
    const env::StateVector& v) {
    std::array<std::uint8_t, env::kStateDim> out{};
    for (int i = 0; i < env::kStateDim; ++i)
        out[i] = static_cast<std::uint8_t>(v[i]);
    return out;
}

}  // namespace

Dataset generate(std::int64_t count, const env::WorldConfig& world_config,
                 const oracle::OracleConfig& oracle_config,
                 std::uint64_t seed) {
    if (count < 1)
        throw std::invalid_argument("generate: count must be >= 1");
    oracle::check_config(oracle_config);

    Dataset data;
    data.rows.reserve(static_cast<std::size_t>(count));
    std::unordered_set<std::string> seen;
    seen.reserve(static_cast<std::size_t>(count) * 2);

    // Generous budget: random play repeats itself only in stalled stretches.
    const std::int64_t step_budget = count * 64 + 1000000;
    std::int64_t steps_taken = 0;
    std::uint64_t episodes_done[kGenShards] = {};

    while (static_cast<std::int64_t>(data.rows.size()) < count) {
        if (steps_taken >= step_budget)
            throw std::runtime_error(
                "generate: step budget exhausted after " +
                std::to_string(steps_taken) + " steps with " +
                std::to_string(data.rows.size()) + " of " +
                std::to_string(count) + " distinct rows");
        // One episode per shard per round, merged in shard order.
        for (int w = 0;
             w < kGenShards &&
             static_cast<std::int64_t>(data.rows.size()) < count;
             ++w) {
            const std::uint64_t e = episodes_done[w]++;
            env::WorldState world = env::new_world(
                world_config,
                mix_seed(seed, static_cast<std::uint64_t>(w), 2 * e));
            SplitMix64 choices(
                mix_seed(seed, static_cast<std::uint64_t>(w), 2 * e + 1));
            for (int step = 0;
                 step < kEpisodeHorizon &&
                 static_cast<std::int64_t>(data.rows.size()) < count;
                 ++step) {
                ++steps_taken;
                const env::StateVector full = env::encode(world, false);
                LabeledRow row;
                row.features = to_row_features(env::encode(world, true));
                std::string key = pack_key(row.features);
                if (seen.insert(std::move(key)).second) {
                    row.label = static_cast<std::uint8_t>(
                        oracle::label(full, oracle_config));
                    data.rows.push_back(row);
                }
                const AgentId mover =
                    step % 2 == 0 ? AgentId::Frog : AgentId::Toad;
                const auto legal = env::legal_actions(world, mover);
                world = env::apply_action(world, mover,
                                          legal[choices.next_below(legal.size())]);
            }
        }
    }
    return data;
}

void check_spec(const SplitSpec& spec) {
    if (spec.test_size < 1)
        throw std::invalid_argument("split spec: test_size must be >= 1");
    double sum = 0.0;
    for (double p : spec.proportions) {
        if (p < 0.0)
            throw std::invalid_argument("split spec: negative proportion");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("split spec: proportions must sum to 1");
}

std::array<std::int64_t, 4> test_counts(const SplitSpec& spec) {
    check_spec(spec);
    std::array<std::int64_t, 4> counts{};
    std::int64_t assigned = 0;
    for (int a = 0; a < 4; ++a) {
        counts[a] = static_cast<std::int64_t>(
            std::floor(spec.proportions[a] * static_cast<double>(spec.test_size)));
        assigned += counts[a];
    }
    counts[0] += spec.test_size - assigned;  // leftover rows go to Hop
    return counts;
}

std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec,
                                  std::uint64_t seed) {
    const auto wanted = test_counts(spec);

    std::array<std::vector<std::size_t>, 4> by_label;
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        const std::uint8_t l = data.rows[i].label;
        if (l > 3)
            throw std::invalid_argument("split: row " + std::to_string(i) +
                                        " has label " + std::to_string(l));
        by_label[l].push_back(i);
    }

    std::string deficits;
    for (int a = 0; a < 4; ++a) {
        const std::int64_t have = static_cast<std::int64_t>(by_label[a].size());
        if (have < wanted[a]) {
            deficits += std::string(deficits.empty() ? "" : ", ") +
                        kActionNames[a] + " needs " + std::to_string(wanted[a]) +
                        " rows, has " + std::to_string(have);
        }
    }
    if (!deficits.empty())
        throw std::runtime_error("split: insufficient rows: " + deficits);

    std::vector<char> in_test(data.rows.size(), 0);
    for (int a = 0; a < 4; ++a) {
        auto& idx = by_label[a];
        SplitMix64 rng(mix_seed(seed, 0x5B117ULL, static_cast<std::uint64_t>(a)));
        // Partial Fisher-Yates: the first wanted[a] slots become the test rows.
        for (std::int64_t i = 0; i < wanted[a]; ++i) {
            const std::size_t j =
                static_cast<std::size_t>(i) +
                static_cast<std::size_t>(rng.next_below(idx.size() - i));
            std::swap(idx[i], idx[j]);
            in_test[idx[i]] = 1;
        }
    }

    Dataset train, test;
    test.rows.reserve(static_cast<std::size_t>(spec.test_size));
    train.rows.reserve(data.rows.size() -
                       static_cast<std::size_t>(spec.test_size));
    for (std::size_t i = 0; i < data.rows.size(); ++i)
        (in_test[i] ? test : train).rows.push_back(data.rows[i]);
    return {std::move(train), std::move(test)};
}

std::array<std::int64_t, 4> label_histogram(const Dataset& data) {
    std::array<std::int64_t, 4> hist{};
    for (const LabeledRow& r : data.rows) {
        if (r.label > 3)
            throw std::invalid_argument("histogram: invalid label " +
                                        std::to_string(r.label));
        ++hist[r.label];
    }
    return hist;
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path.string());
    std::string line;
    line.reserve(512);
    for (int i = 0; i < env::kStateDim; ++i) {
        line += 'f';
        line += std::to_string(i);
        line += ',';
    }
    line += "label\n";
    out << line;
    for (const LabeledRow& r : data.rows) {
        line.clear();
        for (int i = 0; i < env::kStateDim; ++i) {
            line += std::to_string(static_cast<int>(r.features[i]));
            line += ',';
        }
        line += std::to_string(static_cast<int>(r.label));
        line += '\n';
        out << line;
    }
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

Dataset read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open for reading: " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty dataset file: " + path.string());

    Dataset data;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        LabeledRow row;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (int i = 0; i <= env::kStateDim; ++i) {
            int value = 0;
            const auto res = std::from_chars(p, end, value);
            if (res.ec != std::errc{} || value < 0 || value > 255)
                throw std::runtime_error("bad field " + std::to_string(i) +
                                         " at " + path.string() + ":" +
                                         std::to_string(lineno));
            p = res.ptr;
            if (i < env::kStateDim) {
                if (p == end || *p != ',')
                    throw std::runtime_error("missing comma at " +
                                             path.string() + ":" +
                                             std::to_string(lineno));
                ++p;
                row.features[i] = static_cast<std::uint8_t>(value);
            } else {
                if (p != end)
                    throw std::runtime_error("trailing bytes at " +
                                             path.string() + ":" +
                                             std::to_string(lineno));
                if (value > 3)
                    throw std::runtime_error("label out of range at " +
                                             path.string() + ":" +
                                             std::to_string(lineno));
                row.label = static_cast<std::uint8_t>(value);
            }
        }
        data.rows.push_back(row);
    }
    return data;
}

void write_manifest(const std::filesystem::path& path, std::int64_t count,
                    const env::WorldConfig& world_config,
                    const oracle::OracleConfig& oracle_config,
                    std::uint64_t seed, const Dataset& data) {
    const auto hist = label_histogram(data);
    nlohmann::json j;
    j["schema_version"] = 1;
    j["kind"] = "dataset";
    j["count"] = count;
    j["rows"] = data.rows.size();
    j["seed"] = seed;
    j["world"] = {{"rough_prob", world_config.rough_prob},
                  {"fly_prob", world_config.fly_prob},
                  {"rough_run_max", world_config.rough_run_max}};
    j["oracle"] = {{"refill_ceiling", oracle_config.refill_ceiling},
                   {"help_min_energy", oracle_config.help_min_energy},
                   {"leap_lookahead", oracle_config.leap_lookahead}};
    j["label_histogram"] = {{"hop", hist[0]},
                            {"jump", hist[1]},
                            {"leap", hist[2]},
                            {"help", hist[3]}};
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

}  // namespace frogtoad::dataset
