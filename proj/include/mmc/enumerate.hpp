#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "mmc/core.hpp"
#include "mmc/magnets.hpp"
#include "mmc/shapes.hpp"

namespace mmc {

namespace detail {

inline constexpr int kDirs2[4][3] = {{0, -1, 0}, {-1, 0, 0}, {1, 0, 0}, {0, 1, 0}};
inline constexpr int kDirs3[6][3] = {{0, 0, -1}, {0, -1, 0}, {-1, 0, 0},
                                     {1, 0, 0},  {0, 1, 0},  {0, 0, 1}};

// New cells may only extend past the origin: strictly above the bottom
// row/layer, or rightward along it. This is what makes the recursion emit
// every fixed shape exactly once.
inline bool admissible_cell(int dim, const Cell& c) {
    if (dim == 2) return c.y > 0 || (c.y == 0 && c.x >= 0);
    return c.z > 0 || (c.z == 0 && c.y > 0) || (c.z == 0 && c.y == 0 && c.x >= 0);
}

// Status / type grids over the reachable coordinate range for size-n shapes.
class RedelGrid {
  public:
    static constexpr std::uint8_t kFree = 0, kReached = 1, kOccupied = 2;

    RedelGrid(int n, int dim) : n_(n), dim_(dim), side_(2 * n + 1) {
        std::size_t cells = std::size_t(side_) * std::size_t(side_) * (dim == 3 ? n : 1);
        status_.assign(cells, kFree);
        type_.assign(cells, 0);
    }

    std::size_t index(const Cell& c) const {
        return (std::size_t(c.z) * side_ + std::size_t(c.y + n_)) * side_ + std::size_t(c.x + n_);
    }

    std::uint8_t status(const Cell& c) const { return status_[index(c)]; }
    void set_status(const Cell& c, std::uint8_t s) { status_[index(c)] = s; }
    std::uint8_t type_at(const Cell& c) const { return type_[index(c)]; }
    void set_type(const Cell& c, std::uint8_t t) { type_[index(c)] = t; }

    int dim() const { return dim_; }
    std::size_t cell_count() const { return status_.size(); }

  private:
    int n_, dim_, side_;
    std::vector<std::uint8_t> status_;
    std::vector<std::uint8_t> type_;
};

// Snapshot of a partially built shape; recursion subtrees are distributed
// across workers as tasks so results do not depend on the worker count.
struct EnumTask {
    std::vector<Cell> placed;
    std::vector<std::uint8_t> colors;  // empty in fixed mode
    std::vector<Cell> untried;
    std::size_t from = 0;
};

// Pairwise face classification by catalog type and face direction index.
struct InteractionTable {
    int ntypes = 0;
    std::vector<std::uint8_t> repel, bond;  // [ta][tb][dir]

    InteractionTable() = default;

    InteractionTable(const Catalog& cat, int dim) : ntypes(int(cat.size())) {
        const auto dirs = dim == 2 ? &kDirs2[0] : &kDirs3[0];
        const int ndirs = dim == 2 ? 4 : 6;
        repel.assign(std::size_t(ntypes) * ntypes * ndirs, 0);
        bond.assign(repel.size(), 0);
        for (int a = 0; a < ntypes; ++a)
            for (int b = 0; b < ntypes; ++b)
                for (int d = 0; d < ndirs; ++d) {
                    Interaction w = pair_interaction(cat, std::size_t(a), std::size_t(b),
                                                     dirs[d][0], dirs[d][1], dirs[d][2]);
                    std::size_t k = (std::size_t(a) * ntypes + b) * ndirs + d;
                    repel[k] = w == Interaction::Repel;
                    bond[k] = w == Interaction::Bond;
                }
    }

    bool repels(int a, int b, int d, int ndirs) const {
        return repel[(std::size_t(a) * ntypes + b) * ndirs + d] != 0;
    }
    bool bonds(int a, int b, int d, int ndirs) const {
        return bond[(std::size_t(a) * ntypes + b) * ndirs + d] != 0;
    }
};

class Enumerator {
  public:
    // Fixed mode.
    Enumerator(int n, int dim, Budget& budget)
        : n_(n), dim_(dim), ndirs_(dim == 2 ? 4 : 6), dirs_(dim == 2 ? &kDirs2[0] : &kDirs3[0]),
          grid_(n, dim), budget_(budget) {}

    // Colored mode: `supply` indexed by catalog type.
    Enumerator(int n, int dim, Budget& budget, const InteractionTable& table,
               std::vector<std::uint32_t> supply)
        : Enumerator(n, dim, budget) {
        colored_ = true;
        table_ = &table;
        supply_left_ = std::move(supply);
    }

    using EmitFn = std::function<void(const std::vector<Cell>&, const std::vector<std::uint8_t>&)>;

    static EnumTask initial_task() {
        EnumTask t;
        t.untried = {Cell{0, 0, 0}};
        return t;
    }

    // Runs one recursion subtree to completion. Returns the leaf count.
    BigCount run(const EnumTask& task, const EmitFn& emit) {
        load(task);
        count_ = 0;
        emit_ = &emit;
        capture_depth_ = 0;
        rec(task.from);
        unload(task);
        return count_;
    }

    // Expands one subtree only until `depth` cells are placed, capturing the
    // pending sub-subtrees as tasks.
    std::vector<EnumTask> split(const EnumTask& task, int depth) {
        load(task);
        capture_depth_ = depth;
        captured_.clear();
        rec(task.from);
        unload(task);
        return std::move(captured_);
    }

  private:
    void load(const EnumTask& task) {
        placed_ = task.placed;
        colors_ = task.colors;
        untried_ = task.untried;
        for (const Cell& c : untried_) grid_.set_status(c, RedelGrid::kReached);
        for (std::size_t i = 0; i < placed_.size(); ++i) {
            grid_.set_status(placed_[i], RedelGrid::kOccupied);
            if (colored_) {
                grid_.set_type(placed_[i], colors_[i]);
                --supply_left_[colors_[i]];
            }
        }
    }

    void unload(const EnumTask& task) {
        for (const Cell& c : untried_) grid_.set_status(c, RedelGrid::kFree);
        for (std::size_t i = 0; i < task.placed.size(); ++i) {
            grid_.set_status(task.placed[i], RedelGrid::kFree);
            if (colored_) ++supply_left_[task.colors[i]];
        }
    }

    void rec(std::size_t from) {
        const std::size_t limit = untried_.size();
        for (std::size_t i = from; i < limit; ++i) {
            const Cell cell = untried_[i];
            if (!colored_) {
                budget_.spend(1);
                placed_.push_back(cell);
                step(i);
                placed_.pop_back();
            } else {
                for (std::uint8_t t = 0; t < std::uint8_t(table_->ntypes); ++t) {
                    if (supply_left_[t] == 0) continue;
                    budget_.spend(1);
                    if (!color_allowed(cell, t)) continue;
                    placed_.push_back(cell);
                    colors_.push_back(t);
                    grid_.set_type(cell, t);
                    --supply_left_[t];
                    step(i);
                    ++supply_left_[t];
                    colors_.pop_back();
                    placed_.pop_back();
                }
            }
        }
    }

    // Shared tail of one placement: emit, capture or extend.
    void step(std::size_t i) {
        if (placed_.size() == std::size_t(n_)) {
            if (!colored_ || bond_connected()) {
                ++count_;
                if (*emit_) (*emit_)(placed_, colors_);
            }
            return;
        }
        if (capture_depth_ != 0 && placed_.size() == std::size_t(capture_depth_)) {
            grid_.set_status(placed_.back(), RedelGrid::kOccupied);
            std::size_t old = untried_.size();
            extend(placed_.back());
            captured_.push_back({placed_, colors_, untried_, i + 1});
            rollback(old);
            return;
        }
        grid_.set_status(placed_.back(), RedelGrid::kOccupied);
        std::size_t old = untried_.size();
        extend(placed_.back());
        rec(i + 1);
        rollback(old);
    }

    void extend(const Cell& cell) {
        for (int d = 0; d < ndirs_; ++d) {
            Cell nb = cell.offset(dirs_[d][0], dirs_[d][1], dirs_[d][2]);
            if (!admissible_cell(dim_, nb)) continue;
            if (grid_.status(nb) != RedelGrid::kFree) continue;
            grid_.set_status(nb, RedelGrid::kReached);
            untried_.push_back(nb);
        }
    }

    void rollback(std::size_t old_untried) {
        for (std::size_t j = old_untried; j < untried_.size(); ++j)
            grid_.set_status(untried_[j], RedelGrid::kFree);
        untried_.resize(old_untried);
        grid_.set_status(placed_.back(), RedelGrid::kReached);
    }

    // A color is admissible if no occupied neighbor repels it. Neutral
    // contacts are allowed here; connectivity is a final filter.
    bool color_allowed(const Cell& cell, std::uint8_t t) const {
        for (int d = 0; d < ndirs_; ++d) {
            Cell nb = cell.offset(dirs_[d][0], dirs_[d][1], dirs_[d][2]);
            if (!admissible_cell(dim_, nb)) continue;  // never occupied, also guards the grid range
            if (grid_.status(nb) != RedelGrid::kOccupied) continue;
            if (table_->repels(t, grid_.type_at(nb), d, ndirs_)) return false;
        }
        return true;
    }

    // BFS from the first cell over bonding contacts; the shape counts only
    // if all n cubes form one magnetically-connected component. Works off
    // the placed list since the final cell is never marked occupied.
    bool bond_connected() {
        if (placed_.size() == 1) return true;
        if (scratch_pos_.empty()) scratch_pos_.assign(grid_.cell_count(), 0);
        for (std::uint32_t i = 0; i < placed_.size(); ++i)
            scratch_pos_[grid_.index(placed_[i])] = i + 1;
        scratch_seen_.assign(placed_.size(), 0);
        scratch_queue_.clear();
        scratch_queue_.push_back(0);
        scratch_seen_[0] = 1;
        std::size_t reached = 1;
        for (std::size_t head = 0; head < scratch_queue_.size(); ++head) {
            const std::uint32_t at = scratch_queue_[head];
            const Cell c = placed_[at];
            const std::uint8_t tc = colors_[at];
            for (int d = 0; d < ndirs_; ++d) {
                Cell nb = c.offset(dirs_[d][0], dirs_[d][1], dirs_[d][2]);
                if (!admissible_cell(dim_, nb)) continue;
                std::uint32_t j = scratch_pos_[grid_.index(nb)];
                if (j == 0 || scratch_seen_[j - 1]) continue;
                if (!table_->bonds(tc, colors_[j - 1], d, ndirs_)) continue;
                scratch_seen_[j - 1] = 1;
                ++reached;
                scratch_queue_.push_back(j - 1);
            }
        }
        for (const Cell& c : placed_) scratch_pos_[grid_.index(c)] = 0;
        return reached == placed_.size();
    }

    int n_, dim_, ndirs_;
    const int (*dirs_)[3];
    RedelGrid grid_;
    Budget& budget_;

    bool colored_ = false;
    const InteractionTable* table_ = nullptr;
    std::vector<std::uint32_t> supply_left_;

    std::vector<Cell> placed_;
    std::vector<std::uint8_t> colors_;
    std::vector<Cell> untried_;
    BigCount count_ = 0;
    const EmitFn* emit_ = nullptr;
    int capture_depth_ = 0;
    std::vector<EnumTask> captured_;

    std::vector<std::uint8_t> scratch_seen_;
    std::vector<std::uint32_t> scratch_queue_;
    std::vector<std::uint32_t> scratch_pos_;
};

template <typename Fn>
inline void parallel_for(std::size_t count, int workers, Fn fn) {
    workers = std::max(1, workers);
    if (workers == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr error;
    auto body = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (error) return;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    for (int w = 0; w < std::min<int>(workers, int(count)); ++w) threads.emplace_back(body);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

// Split the recursion into enough independent subtrees to keep the workers
// busy; results are merged in task order, so any worker count produces the
// same answer.
inline std::vector<EnumTask> make_tasks(Enumerator& e, int n, int dim) {
    int cut = std::min(n - 1, dim == 2 ? 5 : 4);
    if (cut < 2) return {Enumerator::initial_task()};
    return e.split(Enumerator::initial_task(), cut);
}

}  // namespace detail

inline BigCount count_fixed(int n, int dim, const Limits& limits = {}, int workers = 1) {
    if (n < 1) throw DataError("shape size must be at least 1");
    if (dim != 2 && dim != 3) throw DataError("dimension must be 2 or 3");
    Budget budget(limits);
    detail::Enumerator splitter(n, dim, budget);
    std::vector<detail::EnumTask> tasks = detail::make_tasks(splitter, n, dim);
    std::vector<BigCount> counts(tasks.size(), 0);
    detail::Enumerator::EmitFn no_emit;
    detail::parallel_for(tasks.size(), workers, [&](std::size_t i) {
        detail::Enumerator e(n, dim, budget);
        counts[i] = e.run(tasks[i], no_emit);
    });
    BigCount total = 0;
    for (BigCount c : counts) total += c;
    return total;
}

inline BigCount count_fixed_polyominoes(int n, const Limits& limits = {}, int workers = 1) {
    return count_fixed(n, 2, limits, workers);
}

inline BigCount count_fixed_polycubes(int n, const Limits& limits = {}, int workers = 1) {
    return count_fixed(n, 3, limits, workers);
}

// All fixed shapes of size n as sorted canonical cell lists.
inline std::vector<std::vector<Cell>> enumerate_fixed(int n, int dim, const Limits& limits = {},
                                                      int workers = 1) {
    if (n < 1) throw DataError("shape size must be at least 1");
    Budget budget(limits);
    detail::Enumerator splitter(n, dim, budget);
    std::vector<detail::EnumTask> tasks = detail::make_tasks(splitter, n, dim);
    std::vector<std::vector<std::vector<Cell>>> buckets(tasks.size());
    detail::parallel_for(tasks.size(), workers, [&](std::size_t i) {
        detail::Enumerator e(n, dim, budget);
        detail::Enumerator::EmitFn emit = [&](const std::vector<Cell>& cells,
                                              const std::vector<std::uint8_t>&) {
            std::vector<Cell> copy = cells;
            std::sort(copy.begin(), copy.end());
            buckets[i].push_back(std::move(copy));
        };
        e.run(tasks[i], emit);
    });
    std::vector<std::vector<Cell>> out;
    for (auto& b : buckets)
        for (auto& s : b) out.push_back(std::move(s));
    std::sort(out.begin(), out.end());
    return out;
}

// Dimension of an enumeration: planar unless some involved type is 3D.
inline int supply_dimension(const Supply& supply, const Catalog& cat) {
    for (const auto& [name, count] : supply.counts) {
        if (count == 0) continue;
        if (!cat.type(cat.index_of(name)).planar) return 3;
    }
    return 2;
}

namespace detail {

inline std::vector<std::uint32_t> supply_by_type(const Supply& supply, const Catalog& cat) {
    std::vector<std::uint32_t> out(cat.size(), 0);
    for (const auto& [name, count] : supply.counts) out[cat.index_of(name)] += count;
    return out;
}

}  // namespace detail

// Every canonical colored shape of exactly n cells buildable from the
// supply: colors respect the per-type counts, no contact repels, and the
// result is one magnetically-connected component.
inline std::vector<ColoredShape> enumerate_colored(const Supply& supply, const Catalog& cat, int n,
                                                   const Limits& limits = {}, int workers = 1,
                                                   int dim = 0) {
    if (n < 1) throw DataError("shape size must be at least 1");
    std::vector<std::uint32_t> by_type = detail::supply_by_type(supply, cat);
    if (std::uint32_t(n) > supply.total()) throw DataError("supply has fewer cubes than requested size");
    if (dim == 0) dim = supply_dimension(supply, cat);
    if (cat.size() > 250) throw DataError("catalog too large");

    Budget budget(limits);
    detail::InteractionTable table(cat, dim);
    detail::Enumerator splitter(n, dim, budget, table, by_type);
    std::vector<detail::EnumTask> tasks = detail::make_tasks(splitter, n, dim);
    std::vector<std::vector<ColoredShape>> buckets(tasks.size());
    detail::parallel_for(tasks.size(), workers, [&](std::size_t i) {
        detail::Enumerator e(n, dim, budget, table, by_type);
        detail::Enumerator::EmitFn emit = [&](const std::vector<Cell>& cells,
                                              const std::vector<std::uint8_t>& colors) {
            std::vector<PlacedCube> cubes(cells.size());
            for (std::size_t k = 0; k < cells.size(); ++k) cubes[k] = {cells[k], colors[k]};
            std::sort(cubes.begin(), cubes.end());
            buckets[i].push_back(ColoredShape::from_canonical(std::move(cubes)));
        };
        e.run(tasks[i], emit);
    });
    std::vector<ColoredShape> out;
    for (auto& b : buckets)
        for (auto& s : b) out.push_back(std::move(s));
    std::sort(out.begin(), out.end());
    return out;
}

// Count table for a two-type supply, C[n][i] = colored shapes with i cubes
// of type_b and n-i of type_a, plus the fixed count per row.
struct CountTable {
    int dim = 2;
    std::string type_a, type_b;
    struct Row {
        int n = 0;
        BigCount fixed = 0;
        std::vector<BigCount> colored;  // index i = cubes of type_b
    };
    std::vector<Row> rows;
};

inline CountTable colored_count_table(int n_max, const std::string& type_a,
                                      const std::string& type_b, const Catalog& cat,
                                      const Limits& limits = {}, int workers = 1) {
    if (n_max < 1) throw DataError("n_max must be at least 1");
    if (type_a == type_b) throw DataError("table types must differ");
    std::size_t ia = cat.index_of(type_a);
    std::size_t ib = cat.index_of(type_b);
    int dim = (cat.type(ia).planar && cat.type(ib).planar) ? 2 : 3;

    CountTable out;
    out.dim = dim;
    out.type_a = type_a;
    out.type_b = type_b;
    Budget budget(limits);
    detail::InteractionTable table(cat, dim);

    for (int n = 1; n <= n_max; ++n) {
        // One pass with supply {a: n, b: n} covers every i at once: a shape
        // with i cubes of b uses exactly n-i of a.
        std::vector<std::uint32_t> by_type(cat.size(), 0);
        by_type[ia] = std::uint32_t(n);
        by_type[ib] = std::uint32_t(n);

        detail::Enumerator splitter(n, dim, budget, table, by_type);
        std::vector<detail::EnumTask> tasks = detail::make_tasks(splitter, n, dim);
        std::vector<std::vector<BigCount>> counts(tasks.size(),
                                                  std::vector<BigCount>(std::size_t(n) + 1, 0));
        detail::parallel_for(tasks.size(), workers, [&](std::size_t t) {
            detail::Enumerator e(n, dim, budget, table, by_type);
            detail::Enumerator::EmitFn emit = [&](const std::vector<Cell>&,
                                                  const std::vector<std::uint8_t>& colors) {
                std::size_t i = 0;
                for (std::uint8_t c : colors) i += (c == std::uint8_t(ib));
                ++counts[t][i];
            };
            e.run(tasks[t], emit);
        });

        CountTable::Row row;
        row.n = n;
        row.fixed = count_fixed(n, dim, limits, workers);
        row.colored.assign(std::size_t(n) + 1, 0);
        for (const auto& c : counts)
            for (std::size_t i = 0; i <= std::size_t(n); ++i) row.colored[i] += c[i];
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace mmc
