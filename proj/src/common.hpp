#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ghost2 {

// Error codes shared with the C API (see include/ghost2/ghost2.h).
enum class ErrorCode : int {
    Ok = 0,
    Io = 1,
    MissingColumn = 2,
    NonNumericCell = 3,
    BadLabel = 4,
    EmptyDataset = 5,
    TooFewRows = 6,
    EmptyPointSet = 7,
    NotEnoughNeighbors = 8,
    TooFewMinority = 9,
    SingleClass = 10,
    NonFiniteLoss = 11,
    WidthMismatch = 12,
    LengthMismatch = 13,
    GridTooSmall = 14,
    TooFewLeaves = 15,
    UnsupportedModel = 16,
    InvalidArgument = 17,
    BadFormat = 18,
    CellFailed = 19,
    Internal = 20,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> vals;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), vals(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return vals[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return vals[r * cols + c]; }

    const double* row(std::size_t r) const { return vals.data() + r * cols; }
    double* row(std::size_t r) { return vals.data() + r * cols; }

    void push_row(const double* src) {
        vals.insert(vals.end(), src, src + cols);
        ++rows;
    }

    bool empty() const { return rows == 0 || cols == 0; }
};

inline double squared_distance(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = a[i] - b[i];
        s += diff * diff;
    }
    return s;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Counter-based seed fan-out: mixing in names (not indices) keeps a cell's
// stream stable when other projects or treatments are added to a run.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view name,
                                 std::uint64_t counter = 0) {
    return splitmix64(splitmix64(master) ^ fnv1a64(name) ^ splitmix64(counter));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
    return splitmix64(splitmix64(master) ^ splitmix64(counter ^ 0xd1b54a32d192ed03ULL));
}

// Seeded random source. All randomness in the library flows through this so
// runs are reproducible from a single seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed ^ 0x2545f4914f6cdd1dULL)) {}

    std::uint64_t next() { return gen_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // uniform in the open interval (0, 1)
    double uniform_open() {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    // uniform integer in [0, n)
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    // uniform integer in [lo, hi] inclusive
    long long uniform_int(long long lo, long long hi) {
        return lo + static_cast<long long>(uniform_index(static_cast<std::size_t>(hi - lo + 1)));
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_open();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[uniform_index(i)]);
        }
    }

    // k distinct indices drawn from [0, n), in draw order
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        std::vector<std::size_t> out;
        out.reserve(k);
        for (std::size_t i = 0; i < k && i < n; ++i) {
            std::size_t j = i + uniform_index(n - i);
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
        return out;
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline std::size_t ceil_sqrt(std::size_t n) {
    return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
}

inline std::size_t ceil_fourth_root(std::size_t n) {
    return static_cast<std::size_t>(std::ceil(std::sqrt(std::sqrt(static_cast<double>(n)))));
}

}  // namespace ghost2
