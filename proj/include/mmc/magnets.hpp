#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "mmc/core.hpp"

namespace mmc {

// Outward pole of one cube face. None means the face carries no magnet.
enum class Polarity : std::uint8_t { South = 0, None = 1, North = 2 };

inline Polarity opposite(Polarity p) {
    switch (p) {
        case Polarity::South: return Polarity::North;
        case Polarity::North: return Polarity::South;
        default: return Polarity::None;
    }
}

inline char polarity_token(Polarity p) {
    switch (p) {
        case Polarity::South: return 'S';
        case Polarity::North: return 'N';
        default: return '0';
    }
}

inline Polarity parse_polarity(const std::string& tok) {
    if (tok == "S") return Polarity::South;
    if (tok == "N") return Polarity::North;
    if (tok == "0") return Polarity::None;
    throw DataError("invalid polarity token '" + tok + "' (expected \"N\", \"S\" or \"0\")");
}

// Face polarities {L, F/B, T/U, R}. Front/back and top/under are equal by the
// rotational symmetry of the design, so they are stored once each.
struct Arrangement {
    Polarity left = Polarity::None;
    Polarity front_back = Polarity::None;
    Polarity top_under = Polarity::None;
    Polarity right = Polarity::None;

    bool operator==(const Arrangement&) const = default;

    std::string label() const {
        std::string s;
        s += polarity_token(left);
        s += ',';
        s += polarity_token(front_back);
        s += ',';
        s += polarity_token(top_under);
        s += ',';
        s += polarity_token(right);
        return s;
    }
};

// One magnet on L and R, two on F/B and T/U (front+back, top+under).
inline int magnet_count(const Arrangement& a) {
    return (a.left != Polarity::None ? 1 : 0) + (a.front_back != Polarity::None ? 2 : 0) +
           (a.top_under != Polarity::None ? 2 : 0) + (a.right != Polarity::None ? 1 : 0);
}

// The net moment must point left-to-right: L is south or empty, R north or
// empty, and not both empty.
inline bool validate_arrangement(const Arrangement& a) {
    if (a.left == Polarity::North) return false;
    if (a.right == Polarity::South) return false;
    if (a.left == Polarity::None && a.right == Polarity::None) return false;
    return true;
}

// The raw 2*3*3*2 product space, including the net-moment-free tuples.
// Canonical order: lexicographic on (L, F/B, T/U, R) with S < 0 < N.
inline std::vector<Arrangement> raw_arrangement_tuples() {
    constexpr std::array<Polarity, 3> kOrder = {Polarity::South, Polarity::None, Polarity::North};
    std::vector<Arrangement> out;
    for (Polarity l : {Polarity::South, Polarity::None})
        for (Polarity fb : kOrder)
            for (Polarity tu : kOrder)
                for (Polarity r : {Polarity::None, Polarity::North})
                    out.push_back({l, fb, tu, r});
    return out;
}

inline std::vector<Arrangement> enumerate_arrangements(bool planar, int min_magnets) {
    if (min_magnets < 0 || min_magnets > 6) throw DataError("min_magnets must be in [0, 6]");
    std::vector<Arrangement> out;
    for (const Arrangement& a : raw_arrangement_tuples()) {
        if (!validate_arrangement(a)) continue;
        if (planar && a.top_under != Polarity::None) continue;
        if (magnet_count(a) < min_magnets) continue;
        out.push_back(a);
    }
    return out;
}

// Discrete contact classification for two touching faces.
enum class Interaction : std::uint8_t { Bond, Neutral, Repel };

inline Interaction face_interaction(Polarity outward_a, Polarity outward_b) {
    if (outward_a == Polarity::None || outward_b == Polarity::None) return Interaction::Neutral;
    return outward_a == outward_b ? Interaction::Repel : Interaction::Bond;
}

// A named arrangement ("color"). Planar types have no top/under magnets and
// assemble strictly in-plane.
struct CubeType {
    std::string name;
    Arrangement arrangement;
    bool planar = true;
};

class Catalog {
  public:
    Catalog() = default;

    explicit Catalog(std::vector<CubeType> types) : types_(std::move(types)) {
        for (std::size_t i = 0; i < types_.size(); ++i) {
            const CubeType& t = types_[i];
            if (t.name.empty()) throw DataError("catalog entry " + std::to_string(i) + " has an empty name");
            if (!validate_arrangement(t.arrangement))
                throw DataError("catalog type '" + t.name + "' violates the arrangement rules");
            if (t.planar && t.arrangement.top_under != Polarity::None)
                throw DataError("catalog type '" + t.name + "' is planar but has top/under magnets");
            if (!index_.emplace(t.name, i).second)
                throw DataError("catalog type '" + t.name + "' is defined twice");
        }
    }

    const std::vector<CubeType>& types() const { return types_; }
    std::size_t size() const { return types_.size(); }
    const CubeType& type(std::size_t i) const { return types_[i]; }

    std::size_t index_of(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw DataError("unknown cube type '" + name + "'");
        return it->second;
    }

    bool contains(const std::string& name) const { return index_.count(name) != 0; }

  private:
    std::vector<CubeType> types_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Face polarity of a cube seen along a lattice direction, in the shape frame
// where every moment points +y: R faces +y, L faces -y, F/B face +-x and
// T/U face +-z.
inline Polarity face_polarity(const Arrangement& a, int dx, int dy, int dz) {
    if (dy > 0) return a.right;
    if (dy < 0) return a.left;
    if (dx != 0) return a.front_back;
    if (dz != 0) return a.top_under;
    return Polarity::None;
}

// Contact class of the shared face between a cube of type `ta` and a
// neighbor of type `tb` displaced by (dx,dy,dz), shape frame.
inline Interaction pair_interaction(const Catalog& cat, std::size_t ta, std::size_t tb, int dx,
                                    int dy, int dz) {
    Polarity pa = face_polarity(cat.type(ta).arrangement, dx, dy, dz);
    Polarity pb = face_polarity(cat.type(tb).arrangement, -dx, -dy, -dz);
    return face_interaction(pa, pb);
}

struct FieldVector {
    double bx = 0.0, by = 0.0, bz = 0.0;
};

// Flux density from amplitude, pitch and yaw.
inline FieldVector field_vector(double amplitude, double pitch, double yaw) {
    if (amplitude < 0.0) throw DataError("field amplitude must be non-negative");
    return {amplitude * std::cos(pitch) * std::cos(yaw),
            amplitude * std::cos(pitch) * std::sin(yaw), amplitude * std::sin(pitch)};
}

// The shipped color assignments. The 2D four use at least two magnets, the
// 3D six at least four. Same-color magenta/magenta or cyan/cyan contacts
// bond only in series; mixed side-by-side contacts bond.
inline Catalog default_catalog() {
    using P = Polarity;
    return Catalog({
        {"magenta", {P::South, P::North, P::None, P::North}, true},
        {"cyan", {P::South, P::South, P::None, P::North}, true},
        {"brown", {P::South, P::None, P::None, P::North}, true},
        {"black", {P::None, P::North, P::None, P::North}, true},
        {"red", {P::South, P::North, P::North, P::North}, false},
        {"blue", {P::South, P::South, P::South, P::North}, false},
        {"green", {P::South, P::South, P::North, P::North}, false},
        {"yellow", {P::South, P::North, P::South, P::North}, false},
        {"purple", {P::South, P::North, P::North, P::None}, false},
        {"orange", {P::None, P::South, P::South, P::North}, false},
    });
}

}  // namespace mmc
