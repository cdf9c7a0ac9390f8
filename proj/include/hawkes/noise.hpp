#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace hawkes {

// Identifies a deterministic realization of the unit-rate planar Poisson
// field. Same (seed, stream) reproduces the identical field; distinct
// streams are independent.
struct CanonicalNoise {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

std::uint64_t splitmix64(std::uint64_t& x);
std::uint64_t mix_u64(std::uint64_t a, std::uint64_t b, std::uint64_t c);

// Engine for auxiliary draws (cluster construction, attribution, forests),
// keyed off the noise identity plus a role tag.
std::mt19937_64 derived_engine(CanonicalNoise noise, std::uint64_t tag);

// Uniform helpers built from raw engine output; bit-stable across platforms.
double u_closed_open(std::mt19937_64& rng);  // [0, 1)
double u_open_closed(std::mt19937_64& rng);  // (0, 1]
double exp1(std::mt19937_64& rng);           // Exp(1)
std::uint64_t poisson_knuth(std::mt19937_64& rng, double mean);

// The planar field decomposed into unit-height horizontal strips.
// Strip k holds points (t, u) with u in [k, k+1), arriving at unit rate in
// time. Points are generated lazily, cached, and addressable by index, so a
// consumer can rewind.
class PlanarField {
  public:
    struct Point {
        double t;
        double u;
    };

    explicit PlanarField(CanonicalNoise noise) : noise_(noise) {}

    const Point& point(std::size_t strip, std::size_t idx);
    // Smallest index whose time is > t.
    std::size_t first_index_after(std::size_t strip, double t);
    CanonicalNoise noise() const { return noise_; }

  private:
    struct Strip {
        std::mt19937_64 rng;
        double last_t = 0.0;
        std::vector<Point> pts;
    };
    Strip& strip_at(std::size_t k);
    void extend(Strip& s, double t_needed, std::size_t idx_needed);

    CanonicalNoise noise_;
    std::vector<Strip> strips_;
};

}  // namespace hawkes
