#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace boxgas {

// Stream contract: every random sequence in this project is fully determined
// by (root_seed, stream_id). Stream seeds are derived with splitmix64 and feed
// an mt19937_64 engine; the engine name is recorded in output metadata so runs
// can be reproduced byte for byte.

inline uint64_t splitmix64(uint64_t& s) {
    uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t derive_seed(uint64_t root, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t s = root;
    uint64_t h = splitmix64(s);
    s ^= a * 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(s);
    s ^= b * 0xd1b54a32d192ed03ULL;
    h ^= splitmix64(s);
    s ^= c * 0x8cb92ba72f3d8dd7ULL;
    h ^= splitmix64(s);
    return h;
}

class RngStream {
public:
    RngStream(uint64_t root_seed, uint64_t stream_id)
        : eng_(derive_seed(root_seed, stream_id)) {}

    static const char* engine_name() { return "mt19937_64/splitmix64-streams"; }

    // Uniform in [0,1) with the canonical 53-bit mapping (independent of any
    // library distribution implementation).
    double u01() { return (eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    // Uniform integer in [0, n).
    uint64_t integer(uint64_t n) {
        if (n == 0) throw std::invalid_argument("RngStream::integer: n must be > 0");
        // rejection to avoid modulo bias
        const uint64_t lim = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = eng_();
        } while (x >= lim);
        return x % n;
    }

    // Poisson(mean) conditioned on the result being <= cap, by rejection.
    int poisson_capped(double mean, int cap) {
        if (cap <= 0 || mean <= 0.0) return 0;
        for (;;) {
            const int k = poisson(mean);
            if (k <= cap) return k;
        }
    }

    int poisson(double mean) {
        // multiplication method; means here are small (a few tens at most)
        const double limit = std::exp(-mean);
        int k = 0;
        double prod = 1.0;
        do {
            ++k;
            prod *= u01();
        } while (prod > limit);
        return k - 1;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace boxgas
