#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mmc {

// Bad input data: malformed files, unknown names, violated preconditions.
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Internal consistency violation, e.g. a repelling face contact inside a
// configuration that should never contain one.
class IntegrityError : public std::runtime_error {
  public:
    explicit IntegrityError(const std::string& what) : std::runtime_error(what) {}
};

// A node or wall-clock budget ran out before the computation finished.
class BudgetExceeded : public std::runtime_error {
  public:
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Counts can exceed 64 bits once colored tables grow past n ~ 16.
using BigCount = unsigned __int128;

inline std::string to_string(BigCount v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + static_cast<unsigned>(v % 10)));
        v /= 10;
    }
    return {s.rbegin(), s.rend()};
}

struct Limits {
    std::uint64_t max_nodes = 10'000'000'000ull;  // default node budget
    double max_seconds = 0.0;                     // 0 = no wall-clock limit
};

// Shared between workers; the node counter is approximate under contention
// but the limit check itself is exact enough for a safety valve.
class Budget {
  public:
    explicit Budget(const Limits& limits)
        : node_limit_(limits.max_nodes),
          deadline_(limits.max_seconds > 0.0
                        ? std::chrono::steady_clock::now() +
                              std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                  std::chrono::duration<double>(limits.max_seconds))
                        : std::chrono::steady_clock::time_point::max()) {}

    void spend(std::uint64_t n = 1) {
        std::uint64_t total = nodes_.fetch_add(n, std::memory_order_relaxed) + n;
        if (total > node_limit_) throw BudgetExceeded("node budget exceeded");
        if ((total & 0xFFF) < n && deadline_ != std::chrono::steady_clock::time_point::max() &&
            std::chrono::steady_clock::now() > deadline_) {
            throw BudgetExceeded("time budget exceeded");
        }
    }

    std::uint64_t nodes() const { return nodes_.load(std::memory_order_relaxed); }

  private:
    std::atomic<std::uint64_t> nodes_{0};
    std::uint64_t node_limit_;
    std::chrono::steady_clock::time_point deadline_;
};

// SplitMix64. Used everywhere a reproducible stream is needed; behaves the
// same on every platform, unlike the std distributions.
struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t lim = ~0ull - ~0ull % n;
        std::uint64_t r;
        do {
            r = next();
        } while (r >= lim);
        return r % n;
    }
};

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Stream for (trial, restart), splittable from one master seed.
inline SplitMix64 derive_stream(std::uint64_t master_seed, std::uint64_t trial,
                                std::uint64_t restart) {
    std::uint64_t s = mix64(master_seed + 0x9E3779B97F4A7C15ull * (trial + 1));
    s = mix64(s + 0xBF58476D1CE4E5B9ull * (restart + 1));
    return SplitMix64{s};
}

}  // namespace mmc
