#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mmc/core.hpp"
#include "mmc/magnets.hpp"

namespace mmc {

struct Cell {
    int x = 0, y = 0, z = 0;

    bool operator==(const Cell&) const = default;
    // (z, y, x): layer first, then row, then column.
    auto operator<=>(const Cell& o) const { return std::tie(z, y, x) <=> std::tie(o.z, o.y, o.x); }

    Cell offset(int dx, int dy, int dz) const { return {x + dx, y + dy, z + dz}; }
};

struct CellHash {
    std::size_t operator()(const Cell& c) const {
        std::uint64_t k = (std::uint64_t(std::uint16_t(c.x)) << 32) |
                          (std::uint64_t(std::uint16_t(c.y)) << 16) |
                          std::uint64_t(std::uint16_t(c.z));
        return static_cast<std::size_t>(mix64(k));
    }
};

// The six face directions, z-major to match the canonical cell order.
inline constexpr int kFaceDirs[6][3] = {{0, 0, -1}, {0, -1, 0}, {-1, 0, 0},
                                        {1, 0, 0},  {0, 1, 0},  {0, 0, 1}};

struct PlacedCube {
    Cell cell;
    std::uint8_t type = 0;  // index into a Catalog

    bool operator==(const PlacedCube&) const = default;
    auto operator<=>(const PlacedCube& o) const {
        return std::tie(cell, type) <=> std::tie(o.cell, o.type);
    }
};

// A translation-canonical colored shape: cells sorted by (z, y, x), with the
// lexicographically smallest cell at the origin. Orientation is implicit,
// all moments point +y.
class ColoredShape {
  public:
    ColoredShape() = default;

    // Trusted constructor: `cubes` must already be canonical.
    static ColoredShape from_canonical(std::vector<PlacedCube> cubes) {
        ColoredShape s;
        s.cubes_ = std::move(cubes);
        return s;
    }

    const std::vector<PlacedCube>& cubes() const { return cubes_; }
    std::size_t size() const { return cubes_.size(); }

    bool operator==(const ColoredShape&) const = default;
    auto operator<=>(const ColoredShape& o) const { return cubes_ <=> o.cubes_; }

    // Stable identifier, e.g. "0,0,0,magenta|0,1,0,cyan".
    std::string id(const Catalog& cat) const {
        std::string s;
        for (const PlacedCube& c : cubes_) {
            if (!s.empty()) s += '|';
            s += std::to_string(c.cell.x) + ',' + std::to_string(c.cell.y) + ',' +
                 std::to_string(c.cell.z) + ',' + cat.type(c.type).name;
        }
        return s;
    }

  private:
    std::vector<PlacedCube> cubes_;
};

inline bool cells_face_connected(const std::vector<PlacedCube>& cubes) {
    if (cubes.empty()) return false;
    std::unordered_map<Cell, int, CellHash> index;
    for (std::size_t i = 0; i < cubes.size(); ++i) index.emplace(cubes[i].cell, int(i));
    std::vector<bool> seen(cubes.size(), false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!q.empty()) {
        Cell c = cubes[std::size_t(q.front())].cell;
        q.pop();
        for (const auto& d : kFaceDirs) {
            auto it = index.find(c.offset(d[0], d[1], d[2]));
            if (it != index.end() && !seen[std::size_t(it->second)]) {
                seen[std::size_t(it->second)] = true;
                ++reached;
                q.push(it->second);
            }
        }
    }
    return reached == cubes.size();
}

// Translate so the (z, y, x)-minimal cell sits at the origin and sort.
// Throws on an empty, duplicated or disconnected cell set.
inline ColoredShape canonicalize(std::vector<PlacedCube> cubes) {
    if (cubes.empty()) throw DataError("cannot canonicalize an empty cell set");
    std::sort(cubes.begin(), cubes.end());
    for (std::size_t i = 1; i < cubes.size(); ++i)
        if (cubes[i].cell == cubes[i - 1].cell) throw DataError("duplicate cell in shape");
    if (!cells_face_connected(cubes)) throw DataError("shape cells are not face-connected");
    const Cell origin = cubes.front().cell;
    for (PlacedCube& c : cubes)
        c.cell = {c.cell.x - origin.x, c.cell.y - origin.y, c.cell.z - origin.z};
    return ColoredShape::from_canonical(std::move(cubes));
}

// One edge per adjacent pair whose shared faces bond, as index pairs (i < j)
// into the shape's cube list. A repelling contact means the shape was never
// valid and is reported as such.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> bond_graph(const ColoredShape& shape,
                                                                       const Catalog& cat) {
    const auto& cubes = shape.cubes();
    std::unordered_map<Cell, std::uint32_t, CellHash> index;
    for (std::uint32_t i = 0; i < cubes.size(); ++i) index.emplace(cubes[i].cell, i);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t i = 0; i < cubes.size(); ++i) {
        for (const auto& d : kFaceDirs) {
            auto it = index.find(cubes[i].cell.offset(d[0], d[1], d[2]));
            if (it == index.end() || it->second <= i) continue;
            Interaction w =
                pair_interaction(cat, cubes[i].type, cubes[it->second].type, d[0], d[1], d[2]);
            if (w == Interaction::Repel)
                throw IntegrityError("repelling face contact inside shape " + shape.id(cat));
            if (w == Interaction::Bond) edges.emplace_back(i, it->second);
        }
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

// BFS from the first cube over bonding faces only; true iff it reaches all
// n cubes. O(n).
inline bool is_magnetically_connected(const ColoredShape& shape, const Catalog& cat) {
    const auto& cubes = shape.cubes();
    if (cubes.empty()) return false;
    std::unordered_map<Cell, std::uint32_t, CellHash> index;
    for (std::uint32_t i = 0; i < cubes.size(); ++i) index.emplace(cubes[i].cell, i);
    std::vector<bool> seen(cubes.size(), false);
    std::queue<std::uint32_t> q;
    q.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!q.empty()) {
        std::uint32_t i = q.front();
        q.pop();
        for (const auto& d : kFaceDirs) {
            auto it = index.find(cubes[i].cell.offset(d[0], d[1], d[2]));
            if (it == index.end() || seen[it->second]) continue;
            if (pair_interaction(cat, cubes[i].type, cubes[it->second].type, d[0], d[1], d[2]) !=
                Interaction::Bond)
                continue;
            seen[it->second] = true;
            ++reached;
            q.push(it->second);
        }
    }
    return reached == cubes.size();
}

// Available cubes per type name.
struct Supply {
    std::map<std::string, std::uint32_t> counts;

    std::uint32_t total() const {
        std::uint32_t t = 0;
        for (const auto& [name, c] : counts) t += c;
        return t;
    }

    // Componentwise subset test.
    bool subset_of(const Supply& other) const {
        for (const auto& [name, c] : counts) {
            if (c == 0) continue;
            auto it = other.counts.find(name);
            if (it == other.counts.end() || it->second < c) return false;
        }
        return true;
    }
};

// Parses "cyan=1,magenta=3".
inline Supply parse_supply(const std::string& text) {
    Supply s;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        std::string item = text.substr(pos, comma - pos);
        std::size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw DataError("invalid supply item '" + item + "' (expected name=count)");
        std::string name = item.substr(0, eq);
        std::uint32_t count = 0;
        try {
            count = static_cast<std::uint32_t>(std::stoul(item.substr(eq + 1)));
        } catch (const std::exception&) {
            throw DataError("invalid supply count in '" + item + "'");
        }
        s.counts[name] += count;
        pos = comma + 1;
    }
    if (s.total() == 0) throw DataError("supply is empty");
    return s;
}

}  // namespace mmc
