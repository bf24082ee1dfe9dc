#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <string>
#include <vector>

#include "mmc/core.hpp"
#include "mmc/enumerate.hpp"
#include "mmc/planner.hpp"
#include "mmc/shapes.hpp"

namespace mmc {

struct TrialConfig {
    Supply supply;
    Workspace workspace{11, 11};
    std::uint32_t trials = 1000;
    std::uint32_t restarts_per_trial = 20;
    std::uint64_t master_seed = 0;
    Limits planner_limits{};  // applied per planner run, so schedules cannot interfere
};

// Scrambled start: every cube on its own cell, no two face-adjacent, all
// north-up singletons.
inline Configuration random_initial(const PlannerContext& ctx, const Supply& supply,
                                    SplitMix64& rng) {
    const Workspace& ws = ctx.workspace();
    const std::uint32_t k = supply.total();
    const std::uint32_t cells = std::uint32_t(ws.width) * std::uint32_t(ws.height);
    // The checkerboard is the largest pairwise non-adjacent placement.
    if (k > (cells + 1) / 2)
        throw DataError("workspace cannot host the supply without face contacts");

    std::vector<std::uint8_t> types;
    for (const auto& [name, count] : supply.counts) {
        std::uint8_t t = std::uint8_t(ctx.catalog().index_of(name));
        for (std::uint32_t i = 0; i < count; ++i) types.push_back(t);
    }

    std::vector<PlacedCube> cubes(k);
    std::vector<std::uint8_t> used(cells);
    for (;;) {
        std::fill(used.begin(), used.end(), 0);
        for (std::uint32_t i = 0; i < k; ++i) {
            std::uint32_t cell;
            do {
                cell = std::uint32_t(rng.below(cells));
            } while (used[cell]);
            used[cell] = 1;
            cubes[i] = {{int(cell % std::uint32_t(ws.width)), int(cell / std::uint32_t(ws.width)), 0},
                        types[i]};
        }
        bool adjacent = false;
        for (std::uint32_t i = 0; i < k && !adjacent; ++i)
            for (std::uint32_t j = i + 1; j < k && !adjacent; ++j)
                adjacent = std::abs(cubes[i].cell.x - cubes[j].cell.x) +
                               std::abs(cubes[i].cell.y - cubes[j].cell.y) ==
                           1;
        if (!adjacent) break;
    }
    return make_configuration(ctx, cubes);
}

struct AggregateStats {
    std::uint32_t trials = 0;
    std::uint32_t restarts = 0;
    std::uint32_t censored_trials = 0;
    std::uint64_t master_seed = 0;
    std::uint32_t max_shapes = 0;  // size of the enumerated valid set
    std::uint64_t samples = 0;     // non-censored trials x restarts

    std::vector<std::string> shape_ids;                     // canonical order
    std::vector<std::uint64_t> reach_counts;                // per shape, over samples
    std::vector<std::vector<std::uint32_t>> steps_by_shape; // per shape: per-trial minima
    std::vector<double> cumulative_mean;                    // unique shapes after restart r+1
    std::vector<std::uint32_t> first_start_counts;          // per non-censored trial
    std::vector<std::uint64_t> start_count_hist;            // index = per-start reachable count
    std::uint64_t full_coverage_trials = 0;

    double median_first_start() const {
        if (first_start_counts.empty()) return 0.0;
        std::vector<std::uint32_t> s = first_start_counts;
        std::sort(s.begin(), s.end());
        std::size_t n = s.size();
        return n % 2 ? double(s[n / 2]) : (double(s[n / 2 - 1]) + double(s[n / 2])) / 2.0;
    }

    double full_coverage_fraction() const {
        std::uint32_t live = trials - censored_trials;
        return live ? double(full_coverage_trials) / double(live) : 0.0;
    }
};

namespace detail {

struct TrialResult {
    bool censored = false;
    std::uint32_t first_count = 0;
    std::vector<std::uint32_t> cumulative;       // per restart
    std::vector<std::uint32_t> start_counts;     // per restart
    std::vector<std::uint32_t> reach_per_shape;  // restarts where found
    std::vector<std::int64_t> min_steps;         // -1 when never found
};

inline double mean_of(const std::vector<std::uint32_t>& v) {
    if (v.empty()) return 0.0;
    double s = 0;
    for (std::uint32_t x : v) s += x;
    return s / double(v.size());
}

inline double median_of(std::vector<std::uint32_t> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? double(v[n / 2]) : (double(v[n / 2 - 1]) + double(v[n / 2])) / 2.0;
}

// Shortest decimal representation; stable across runs and locales.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace detail

// Runs seeded trials of restart sampling + reachability planning and folds
// the per-trial results in trial order, so any worker count and schedule
// produces identical statistics.
inline AggregateStats run_trials(const TrialConfig& cfg, const Catalog& cat, int workers = 1) {
    if (cfg.trials < 1 || cfg.restarts_per_trial < 1)
        throw DataError("trials and restarts must be at least 1");
    const std::uint32_t n = cfg.supply.total();
    PlannerContext ctx(cfg.workspace, cat);

    // The planner is 2D, so the valid set is the planar enumeration.
    std::vector<ColoredShape> valid = enumerate_colored(cfg.supply, cat, int(n), {}, workers, 2);
    std::map<ColoredShape, std::uint32_t> shape_index;
    for (std::uint32_t i = 0; i < valid.size(); ++i) shape_index.emplace(valid[i], i);

    std::vector<detail::TrialResult> results(cfg.trials);
    detail::parallel_for(cfg.trials, workers, [&](std::size_t trial) {
        detail::TrialResult& r = results[trial];
        r.cumulative.assign(cfg.restarts_per_trial, 0);
        r.start_counts.assign(cfg.restarts_per_trial, 0);
        r.reach_per_shape.assign(valid.size(), 0);
        r.min_steps.assign(valid.size(), -1);
        std::vector<std::uint8_t> covered(valid.size(), 0);
        std::uint32_t covered_count = 0;
        for (std::uint32_t restart = 0; restart < cfg.restarts_per_trial; ++restart) {
            SplitMix64 rng = derive_stream(cfg.master_seed, trial, restart);
            Configuration start = random_initial(ctx, cfg.supply, rng);
            PlanResult plan;
            try {
                plan = bfs_reachable(ctx, start, cfg.planner_limits);
            } catch (const BudgetExceeded&) {
                r.censored = true;
                return;
            }
            for (const auto& [shape, entry] : plan.shapes) {
                auto it = shape_index.find(shape);
                if (it == shape_index.end())
                    throw IntegrityError("planner reached a shape outside the enumerated set");
                std::uint32_t idx = it->second;
                ++r.reach_per_shape[idx];
                if (r.min_steps[idx] < 0 || std::int64_t(entry.translation_steps) < r.min_steps[idx])
                    r.min_steps[idx] = std::int64_t(entry.translation_steps);
                if (!covered[idx]) {
                    covered[idx] = 1;
                    ++covered_count;
                }
            }
            r.start_counts[restart] = std::uint32_t(plan.shapes.size());
            if (restart == 0) r.first_count = std::uint32_t(plan.shapes.size());
            r.cumulative[restart] = covered_count;
        }
    });

    AggregateStats out;
    out.trials = cfg.trials;
    out.restarts = cfg.restarts_per_trial;
    out.master_seed = cfg.master_seed;
    out.max_shapes = std::uint32_t(valid.size());
    out.shape_ids.reserve(valid.size());
    for (const ColoredShape& s : valid) out.shape_ids.push_back(s.id(cat));
    out.reach_counts.assign(valid.size(), 0);
    out.steps_by_shape.assign(valid.size(), {});
    out.cumulative_mean.assign(cfg.restarts_per_trial, 0.0);
    out.start_count_hist.assign(valid.size() + 1, 0);

    for (const detail::TrialResult& r : results) {
        if (r.censored) {
            ++out.censored_trials;
            continue;
        }
        out.first_start_counts.push_back(r.first_count);
        for (std::size_t i = 0; i < valid.size(); ++i) {
            out.reach_counts[i] += r.reach_per_shape[i];
            if (r.min_steps[i] >= 0)
                out.steps_by_shape[i].push_back(std::uint32_t(r.min_steps[i]));
        }
        for (std::uint32_t restart = 0; restart < cfg.restarts_per_trial; ++restart) {
            out.cumulative_mean[restart] += r.cumulative[restart];
            ++out.start_count_hist[r.start_counts[restart]];
        }
        if (r.cumulative[cfg.restarts_per_trial - 1] == valid.size()) ++out.full_coverage_trials;
    }
    std::uint32_t live = out.trials - out.censored_trials;
    out.samples = std::uint64_t(live) * cfg.restarts_per_trial;
    for (double& c : out.cumulative_mean) c = live ? c / double(live) : 0.0;
    return out;
}

// CSV: one row per shape with reach frequency and the per-trial minimum
// step distribution. Step cells stay empty for never-reached shapes.
inline std::string stats_to_csv(const AggregateStats& s) {
    std::string out = "id,frequency,min_steps,median_steps,mean_steps,max_steps\n";
    for (std::size_t i = 0; i < s.shape_ids.size(); ++i) {
        double freq = s.samples ? double(s.reach_counts[i]) / double(s.samples) : 0.0;
        out += s.shape_ids[i];
        out += ',';
        out += detail::format_double(freq);
        const auto& steps = s.steps_by_shape[i];
        if (steps.empty()) {
            out += ",,,,\n";
            continue;
        }
        auto [mn, mx] = std::minmax_element(steps.begin(), steps.end());
        out += ',' + std::to_string(*mn);
        out += ',' + detail::format_double(detail::median_of(steps));
        out += ',' + detail::format_double(detail::mean_of(steps));
        out += ',' + std::to_string(*mx);
        out += '\n';
    }
    return out;
}

}  // namespace mmc
