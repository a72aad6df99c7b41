#pragma once

#include <cstdint>

namespace colmaps {

// Counter-based generator (splitmix64 finalizer over key + counter).
// Substreams are a pure function of (seed, stream index), so a trajectory
// draws the same numbers no matter which worker runs it; parallel and serial
// runs agree bit for bit.
class SubstreamRng {
  public:
    SubstreamRng(uint64_t seed, uint64_t stream) : key_(derive_key(seed, stream)) {}

    uint64_t next_u64() {
        uint64_t z = key_ + (++ctr_) * 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in {0,...,n-1}; n must be > 0
    uint64_t next_below(uint64_t n) {
        // rejection to avoid modulo bias
        uint64_t lim = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do { v = next_u64(); } while (v >= lim);
        return v % n;
    }

    static uint64_t derive_key(uint64_t seed, uint64_t stream) {
        uint64_t z = seed ^ (stream * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

  private:
    uint64_t key_;
    uint64_t ctr_ = 0;
};

}  // namespace colmaps
