#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "mmc/core.hpp"
#include "mmc/magnets.hpp"
#include "mmc/shapes.hpp"

namespace mmc {

// Cells [0, width) x [0, height); the surrounding ring is wall.
struct Workspace {
    int width = 11;
    int height = 11;
};

// One global command in the paper's shorthand: a repeated quarter-turn or
// unit translation, field frame.
struct Move {
    char op = 'n';  // r, n, e, s, w
    std::uint32_t count = 1;

    bool operator==(const Move&) const = default;
};

inline std::string format_moves(const std::vector<Move>& seq) {
    std::string out;
    for (const Move& m : seq) {
        if (!out.empty()) out += ", ";
        out += std::to_string(m.count);
        out += m.op;
    }
    return out;
}

inline std::vector<Move> parse_moves(const std::string& text) {
    std::vector<Move> out;
    if (text.empty()) return out;
    std::size_t pos = 0;
    std::size_t token = 1;
    for (;;) {
        std::size_t end = text.find(", ", pos);
        std::string tok = text.substr(pos, end == std::string::npos ? end : end - pos);
        std::size_t i = 0;
        while (i < tok.size() && tok[i] >= '0' && tok[i] <= '9') ++i;
        if (i == 0 || i + 1 != tok.size())
            throw DataError("malformed move token " + std::to_string(token) + ": '" + tok + "'");
        char op = tok[i];
        if (op != 'r' && op != 'n' && op != 'e' && op != 's' && op != 'w')
            throw DataError("invalid op in move token " + std::to_string(token) + ": '" + tok + "'");
        std::uint32_t count = 0;
        try {
            count = static_cast<std::uint32_t>(std::stoul(tok.substr(0, i)));
        } catch (const std::exception&) {
            throw DataError("invalid count in move token " + std::to_string(token));
        }
        if (count < 1) throw DataError("move count must be >= 1 in token " + std::to_string(token));
        out.push_back({op, count});
        if (end == std::string::npos) break;
        pos = end + 2;
        ++token;
    }
    return out;
}

// Cardinal indices n=0, e=1, s=2, w=3; a CW quarter turn is +1.
inline constexpr int kCardDx[4] = {0, 1, 0, -1};
inline constexpr int kCardDy[4] = {1, 0, -1, 0};
inline constexpr char kCardOp[4] = {'n', 'e', 's', 'w'};

inline int cardinal_index(char op) {
    switch (op) {
        case 'n': return 0;
        case 'e': return 1;
        case 's': return 2;
        case 'w': return 3;
    }
    throw DataError(std::string("not a cardinal op: '") + op + "'");
}

// Workspace-embedded cube poses plus the bonded-component partition. All
// cubes share one orientation, tracked as the CW quarter turns applied to
// the field so far.
struct Configuration {
    std::vector<PlacedCube> cubes;     // sorted by cell, z = 0
    std::vector<std::uint8_t> comp;    // component id per cube
    std::uint8_t rotation = 0;         // field rotation, 0..3
    std::uint8_t ncomp = 0;

    bool all_singletons() const { return ncomp == cubes.size(); }
    bool assembled() const { return ncomp == 1; }
};

class PlannerContext {
  public:
    PlannerContext(const Workspace& ws, const Catalog& cat) : ws_(ws), cat_(&cat) {
        if (ws.width < 1 || ws.height < 1) throw DataError("workspace must be at least 1x1");
        int t = int(cat.size());
        if (t < 1) throw DataError("catalog is empty");
        inter_.assign(std::size_t(16) * t * t, std::uint8_t(Interaction::Neutral));
        // Physical contact direction d maps to field direction (d - rot);
        // the face toward field north is R, toward field south L, the
        // side faces F/B.
        for (int rot = 0; rot < 4; ++rot)
            for (int d = 0; d < 4; ++d)
                for (int a = 0; a < t; ++a)
                    for (int b = 0; b < t; ++b) {
                        int f = (d - rot + 4) & 3;
                        Polarity pa = toward_field(cat.type(std::size_t(a)).arrangement, f);
                        Polarity pb = toward_field(cat.type(std::size_t(b)).arrangement, (f + 2) & 3);
                        inter_[index(rot, d, a, b)] =
                            std::uint8_t(face_interaction(pa, pb));
                    }
        pos_bits_ = 1;
        while ((1 << pos_bits_) < ws.width * ws.height) ++pos_bits_;
        type_bits_ = 1;
        while ((1 << type_bits_) < t) ++type_bits_;
    }

    const Workspace& workspace() const { return ws_; }
    const Catalog& catalog() const { return *cat_; }

    bool inside(int x, int y) const { return x >= 0 && x < ws_.width && y >= 0 && y < ws_.height; }

    Interaction contact(int rot, int dir, int type_a, int type_b) const {
        return Interaction(inter_[index(rot, dir, type_a, type_b)]);
    }

    // Packed state key: sorted cube (position, type) fields plus rotation.
    unsigned __int128 state_key(const Configuration& cfg) const {
        const int bits = pos_bits_ + type_bits_;
        if (std::size_t(bits) * cfg.cubes.size() + 2 > 126)
            throw DataError("configuration too large to plan");
        unsigned __int128 key = 0;
        for (const PlacedCube& c : cfg.cubes) {
            unsigned v = unsigned(c.cell.y * ws_.width + c.cell.x) << type_bits_ | c.type;
            key = (key << bits) | v;
        }
        return (key << 2) | cfg.rotation;
    }

  private:
    static Polarity toward_field(const Arrangement& a, int f) {
        switch (f) {
            case 0: return a.right;   // field north
            case 2: return a.left;    // field south
            default: return a.front_back;
        }
    }

    std::size_t index(int rot, int d, int a, int b) const {
        return ((std::size_t(rot) * 4 + d) * cat_->size() + std::size_t(a)) * cat_->size() +
               std::size_t(b);
    }

    Workspace ws_;
    const Catalog* cat_;
    std::vector<std::uint8_t> inter_;
    int pos_bits_ = 7, type_bits_ = 2;
};

namespace detail {

// Occupancy grid, cube index per cell or -1.
struct PlannerGrid {
    int w, h;
    std::vector<std::int16_t> at;

    explicit PlannerGrid(const Workspace& ws) : w(ws.width), h(ws.height) {
        at.assign(std::size_t(w) * h, -1);
    }

    std::int16_t get(int x, int y) const { return at[std::size_t(y) * w + x]; }
    void set(int x, int y, std::int16_t v) { at[std::size_t(y) * w + x] = v; }

    void fill(const Configuration& cfg) {
        std::fill(at.begin(), at.end(), std::int16_t(-1));
        for (std::size_t i = 0; i < cfg.cubes.size(); ++i)
            set(cfg.cubes[i].cell.x, cfg.cubes[i].cell.y, std::int16_t(i));
    }
};

// Recomputes the bonded-component partition; repelling contacts are an
// integrity violation. Component ids follow first appearance in cube order.
inline void rebuild_components(const PlannerContext& ctx, Configuration& cfg,
                               const PlannerGrid& grid) {
    const std::size_t n = cfg.cubes.size();
    std::vector<std::uint8_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = std::uint8_t(i);
    auto find = [&](std::uint8_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const PlacedCube& c = cfg.cubes[i];
        for (int d = 0; d < 4; ++d) {
            int nx = c.cell.x + kCardDx[d], ny = c.cell.y + kCardDy[d];
            if (!ctx.inside(nx, ny)) continue;
            std::int16_t j = grid.get(nx, ny);
            if (j < 0 || std::size_t(j) <= i) continue;
            Interaction w = ctx.contact(cfg.rotation, d, c.type, cfg.cubes[std::size_t(j)].type);
            if (w == Interaction::Repel)
                throw IntegrityError("repelling face contact between touching cubes");
            if (w == Interaction::Bond) {
                std::uint8_t ra = find(std::uint8_t(i)), rb = find(std::uint8_t(j));
                if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
            }
        }
    }
    cfg.comp.assign(n, 0);
    std::vector<std::int8_t> label(n, -1);
    std::uint8_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint8_t r = find(std::uint8_t(i));
        if (label[r] < 0) label[r] = std::int8_t(next++);
        cfg.comp[i] = std::uint8_t(label[r]);
    }
    cfg.ncomp = next;
}

// One simultaneous unit step in physical direction d. A component moves
// unless a wall, a non-moving component, or a repelling contact it would
// create with one stands in the way; blocking propagates to followers
// within the same step. Returns the number of components that moved.
inline int step_once(const PlannerContext& ctx, Configuration& cfg, PlannerGrid& grid, int d) {
    const int dx = kCardDx[d], dy = kCardDy[d];
    const std::size_t n = cfg.cubes.size();
    std::vector<std::uint8_t> movable(cfg.ncomp, 1);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::uint8_t c = cfg.comp[i];
            if (!movable[c]) continue;
            int tx = cfg.cubes[i].cell.x + dx, ty = cfg.cubes[i].cell.y + dy;
            bool blocked = false;
            if (!ctx.inside(tx, ty)) {
                blocked = true;
            } else {
                std::int16_t j = grid.get(tx, ty);
                if (j >= 0 && cfg.comp[std::size_t(j)] != c && !movable[cfg.comp[std::size_t(j)]])
                    blocked = true;
                // A step that would land face to face with a stationary
                // repelling cube stops one cell early instead.
                for (int f = 0; !blocked && f < 4; ++f) {
                    int rx = tx + kCardDx[f], ry = ty + kCardDy[f];
                    if (!ctx.inside(rx, ry)) continue;
                    std::int16_t k = grid.get(rx, ry);
                    if (k < 0 || cfg.comp[std::size_t(k)] == c || movable[cfg.comp[std::size_t(k)]])
                        continue;
                    if (ctx.contact(cfg.rotation, f, cfg.cubes[i].type,
                                    cfg.cubes[std::size_t(k)].type) == Interaction::Repel)
                        blocked = true;
                }
            }
            if (blocked) {
                movable[c] = 0;
                changed = true;
            }
        }
    }
    int moved = 0;
    for (std::uint8_t m : movable) moved += m;
    if (moved == 0) return 0;
    for (std::size_t i = 0; i < n; ++i)
        if (movable[cfg.comp[i]]) grid.set(cfg.cubes[i].cell.x, cfg.cubes[i].cell.y, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (!movable[cfg.comp[i]]) continue;
        cfg.cubes[i].cell.x += dx;
        cfg.cubes[i].cell.y += dy;
        grid.set(cfg.cubes[i].cell.x, cfg.cubes[i].cell.y, std::int16_t(i));
    }
    return moved;
}

inline void sort_cubes(Configuration& cfg, PlannerGrid& grid) {
    std::sort(cfg.cubes.begin(), cfg.cubes.end());
    grid.fill(cfg);
}

}  // namespace detail

// Builds a settled configuration: sorted, inside the workspace, no overlap,
// components resolved. Throws IntegrityError on a repelling contact.
inline Configuration make_configuration(const PlannerContext& ctx, std::vector<PlacedCube> cubes,
                                        std::uint8_t rotation = 0) {
    if (cubes.empty()) throw DataError("configuration needs at least one cube");
    Configuration cfg;
    cfg.rotation = rotation & 3;
    cfg.cubes = std::move(cubes);
    std::sort(cfg.cubes.begin(), cfg.cubes.end());
    for (const PlacedCube& c : cfg.cubes) {
        if (c.cell.z != 0) throw DataError("the planner workspace is two-dimensional (z must be 0)");
        if (!ctx.inside(c.cell.x, c.cell.y)) throw DataError("cube outside the workspace");
        if (c.type >= ctx.catalog().size()) throw DataError("cube type index out of range");
    }
    for (std::size_t i = 1; i < cfg.cubes.size(); ++i)
        if (cfg.cubes[i].cell == cfg.cubes[i - 1].cell) throw DataError("two cubes share a cell");
    detail::PlannerGrid grid(ctx.workspace());
    grid.fill(cfg);
    detail::rebuild_components(ctx, cfg, grid);
    return cfg;
}

// Merges bond-adjacent components (partition only ever coarsens).
inline Configuration resolve_bonds(const PlannerContext& ctx, Configuration cfg) {
    detail::PlannerGrid grid(ctx.workspace());
    grid.fill(cfg);
    detail::rebuild_components(ctx, cfg, grid);
    return cfg;
}

// In-place pivot of every cube by CW quarter turns. Only legal while all
// components are single cubes and before any translation.
inline Configuration rotate(const PlannerContext& ctx, Configuration cfg, int quarter_turns_cw) {
    if (quarter_turns_cw < 1 || quarter_turns_cw > 3)
        throw DataError("quarter_turns_cw must be 1..3");
    if (!cfg.all_singletons())
        throw DataError("rotation applies only to configurations of single unbonded cubes");
    cfg.rotation = std::uint8_t((cfg.rotation + quarter_turns_cw) & 3);
    detail::PlannerGrid grid(ctx.workspace());
    grid.fill(cfg);
    detail::rebuild_components(ctx, cfg, grid);
    return cfg;
}

struct SettleOutcome {
    Configuration config;
    bool terminal = false;      // false: intermediate stop (relative change)
    std::uint32_t steps = 0;    // unit steps advanced
};

// Advances all components one cell at a time in the commanded direction
// (field frame) until the relative configuration changes or everything is
// blocked. Bonds are resolved after every unit step.
inline SettleOutcome settle(const PlannerContext& ctx, Configuration cfg, char dir_op) {
    const int d = (cardinal_index(dir_op) + cfg.rotation) & 3;
    detail::PlannerGrid grid(ctx.workspace());
    grid.fill(cfg);
    SettleOutcome out;
    const int limit = ctx.workspace().width + ctx.workspace().height + 2;
    for (;;) {
        int before = cfg.ncomp;
        int moved = detail::step_once(ctx, cfg, grid, d);
        if (moved == 0) {
            out.terminal = true;
            break;
        }
        ++out.steps;
        detail::sort_cubes(cfg, grid);
        detail::rebuild_components(ctx, cfg, grid);
        if (moved < before) break;  // intermediate: some but not all struck an obstacle
        if (out.steps > std::uint32_t(limit)) throw IntegrityError("settle failed to terminate");
    }
    out.config = std::move(cfg);
    return out;
}

// Replays a move sequence: rotations first, then unit translations.
inline Configuration apply_moves(const PlannerContext& ctx, Configuration cfg,
                                 const std::vector<Move>& moves) {
    bool translated = false;
    detail::PlannerGrid grid(ctx.workspace());
    grid.fill(cfg);
    for (const Move& m : moves) {
        if (m.op == 'r') {
            if (translated) throw DataError("rotation after translation is not in the move model");
            for (std::uint32_t k = 0; k < m.count; ++k) cfg = rotate(ctx, std::move(cfg), 1);
            grid.fill(cfg);
            continue;
        }
        translated = true;
        const int d = (cardinal_index(m.op) + cfg.rotation) & 3;
        for (std::uint32_t k = 0; k < m.count; ++k) {
            detail::step_once(ctx, cfg, grid, d);
            detail::sort_cubes(cfg, grid);
            detail::rebuild_components(ctx, cfg, grid);
        }
    }
    return cfg;
}

// Configuration equivalence class: rotate the frame so magnetic north
// points up, then translate to the bounding-box corner.
inline std::vector<PlacedCube> relative_key(const Configuration& cfg) {
    std::vector<PlacedCube> cells = cfg.cubes;
    for (PlacedCube& c : cells) {
        int x = c.cell.x, y = c.cell.y;
        for (int r = 0; r < cfg.rotation; ++r) {
            int nx = -y, ny = x;  // CCW, undoing the CW field rotation
            x = nx;
            y = ny;
        }
        c.cell = {x, y, 0};
    }
    int minx = cells[0].cell.x, miny = cells[0].cell.y;
    for (const PlacedCube& c : cells) {
        minx = std::min(minx, c.cell.x);
        miny = std::min(miny, c.cell.y);
    }
    for (PlacedCube& c : cells) c.cell = {c.cell.x - minx, c.cell.y - miny, 0};
    std::sort(cells.begin(), cells.end());
    return cells;
}

// Canonical shape of a fully assembled configuration, north-up frame.
inline ColoredShape assembled_shape(const Configuration& cfg) {
    return canonicalize(relative_key(cfg));
}

struct PlanEntry {
    std::string moves;
    std::uint32_t translation_steps = 0;
    std::uint32_t rotations = 0;
};

struct PlanResult {
    std::map<ColoredShape, PlanEntry> shapes;
    std::uint64_t states_expanded = 0;
};

namespace detail {

struct U128Hash {
    std::size_t operator()(unsigned __int128 v) const {
        return std::size_t(mix64(std::uint64_t(v) ^ mix64(std::uint64_t(v >> 64))));
    }
};

struct SearchNode {
    Configuration cfg;
    std::uint32_t steps = 0;
    std::uint8_t rots = 0;
    std::string seq;
    std::uint32_t seq_prefix = 0;  // length of seq without its last token
    char last_op = 0;
    std::uint32_t last_count = 0;
};

inline bool cost_less(std::uint32_t s1, std::uint8_t r1, const std::string& q1, std::uint32_t s2,
                      std::uint8_t r2, const std::string& q2) {
    if (s1 != s2) return s1 < s2;
    if (r1 != r2) return r1 < r2;
    return q1 < q2;
}

}  // namespace detail

// Explores every configuration reachable by the pruned global-control moves:
// CW rotations only before any translation, settle runs in the four cardinal
// directions with direction changes at intermediate stops. Keeps the best
// (fewest translation steps, then fewest rotations, then lexicographically
// smallest shorthand) sequence per fully assembled shape.
inline PlanResult bfs_reachable(const PlannerContext& ctx, const Configuration& initial,
                                const Limits& limits = {}) {
    Budget budget(limits);
    std::vector<detail::SearchNode> nodes;
    std::unordered_map<unsigned __int128, std::uint32_t, detail::U128Hash> index;

    using QueueEntry = std::tuple<std::uint32_t, std::uint8_t, std::string, std::uint32_t>;
    auto cmp = [](const QueueEntry& a, const QueueEntry& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
        if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) > std::get<1>(b);
        if (std::get<2>(a) != std::get<2>(b)) return std::get<2>(a) > std::get<2>(b);
        return std::get<3>(a) > std::get<3>(b);
    };
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, decltype(cmp)> queue(cmp);

    auto relax = [&](detail::SearchNode&& node) {
        unsigned __int128 key = ctx.state_key(node.cfg);
        auto it = index.find(key);
        if (it == index.end()) {
            std::uint32_t id = std::uint32_t(nodes.size());
            queue.emplace(node.steps, node.rots, node.seq, id);
            nodes.push_back(std::move(node));
            index.emplace(key, id);
        } else {
            detail::SearchNode& cur = nodes[it->second];
            if (detail::cost_less(node.steps, node.rots, node.seq, cur.steps, cur.rots, cur.seq)) {
                cur = std::move(node);
                queue.emplace(cur.steps, cur.rots, cur.seq, it->second);
            }
        }
    };

    detail::SearchNode root;
    root.cfg = resolve_bonds(ctx, initial);
    bool singles = root.cfg.all_singletons();
    Configuration base = root.cfg;
    relax(std::move(root));
    if (singles) {
        // Rotation is free to prune to CW-only turns issued up front.
        for (int q = 1; q <= 3; ++q) {
            detail::SearchNode node;
            node.cfg = rotate(ctx, base, q);
            node.rots = std::uint8_t(q);
            node.seq = std::to_string(q) + "r";
            node.seq_prefix = 0;
            node.last_op = 'r';
            node.last_count = std::uint32_t(q);
            relax(std::move(node));
        }
    }

    PlanResult result;
    while (!queue.empty()) {
        auto [steps, rots, seq, id] = queue.top();
        queue.pop();
        // Copy: relaxing successors may grow the node vector.
        detail::SearchNode node = nodes[id];
        if (steps != node.steps || rots != node.rots || seq != node.seq) continue;  // stale
        budget.spend(1);
        ++result.states_expanded;

        if (node.cfg.assembled()) {
            ColoredShape shape = assembled_shape(node.cfg);
            auto it = result.shapes.find(shape);
            if (it == result.shapes.end() ||
                detail::cost_less(node.steps, node.rots, node.seq, it->second.translation_steps,
                                  std::uint8_t(it->second.rotations), it->second.moves)) {
                result.shapes[shape] = {node.seq, node.steps, node.rots};
            }
            continue;  // a finished assembly never changes shape again
        }

        for (int c = 0; c < 4; ++c) {
            const char op = kCardOp[c];
            SettleOutcome run = settle(ctx, node.cfg, op);
            if (run.steps == 0) continue;
            detail::SearchNode next;
            next.cfg = std::move(run.config);
            next.steps = node.steps + run.steps;
            next.rots = node.rots;
            if (node.last_op == op) {
                next.seq = node.seq.substr(0, node.seq_prefix);
                next.seq_prefix = node.seq_prefix;
                next.last_count = node.last_count + run.steps;
            } else {
                next.seq = node.seq.empty() ? node.seq : node.seq + ", ";
                next.seq_prefix = std::uint32_t(next.seq.size());
                next.last_count = run.steps;
            }
            next.last_op = op;
            next.seq += std::to_string(next.last_count);
            next.seq += op;
            relax(std::move(next));
        }
    }
    return result;
}

}  // namespace mmc
