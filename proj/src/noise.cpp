#include "hawkes/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hawkes {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t mix_u64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t x = a;
    std::uint64_t h = splitmix64(x);
    x ^= b + 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(x);
    x ^= c + 0xd1b54a32d192ed03ULL;
    h ^= splitmix64(x);
    return h;
}

std::mt19937_64 derived_engine(CanonicalNoise noise, std::uint64_t tag) {
    return std::mt19937_64(mix_u64(noise.seed, noise.stream, tag));
}

double u_closed_open(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double u_open_closed(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

double exp1(std::mt19937_64& rng) { return -std::log(u_open_closed(rng)); }

std::uint64_t poisson_knuth(std::mt19937_64& rng, double mean) {
    if (mean < 0.0 || !std::isfinite(mean))
        throw std::invalid_argument("poisson mean must be finite and >= 0");
    // Sequential arrivals: count Exp(1) gaps fitting below `mean`.
    std::uint64_t n = 0;
    double acc = 0.0;
    while (true) {
        acc += exp1(rng);
        if (acc > mean) return n;
        ++n;
        if (n > 100'000'000ULL)
            throw std::runtime_error("poisson draw exceeded sanity cap");
    }
}

PlanarField::Strip& PlanarField::strip_at(std::size_t k) {
    while (strips_.size() <= k) {
        Strip s;
        s.rng = std::mt19937_64(
            mix_u64(noise_.seed, noise_.stream,
                    0x5354524950000000ULL + strips_.size()));
        strips_.push_back(std::move(s));
    }
    return strips_[k];
}

void PlanarField::extend(Strip& s, double t_needed, std::size_t idx_needed) {
    const std::size_t k = static_cast<std::size_t>(&s - strips_.data());
    while (s.last_t <= t_needed || s.pts.size() <= idx_needed) {
        const double gap = exp1(s.rng);
        const double u = u_closed_open(s.rng);
        s.last_t += gap;
        s.pts.push_back(Point{s.last_t, static_cast<double>(k) + u});
        if (s.pts.size() > 200'000'000ULL)
            throw std::runtime_error("planar field strip exceeded sanity cap");
    }
}

const PlanarField::Point& PlanarField::point(std::size_t strip,
                                             std::size_t idx) {
    Strip& s = strip_at(strip);
    if (s.pts.size() <= idx) extend(s, 0.0, idx);
    return s.pts[idx];
}

std::size_t PlanarField::first_index_after(std::size_t strip, double t) {
    Strip& s = strip_at(strip);
    if (s.last_t <= t) extend(s, t, 0);
    const auto it = std::upper_bound(
        s.pts.begin(), s.pts.end(), t,
        [](double lhs, const Point& p) { return lhs < p.t; });
    return static_cast<std::size_t>(it - s.pts.begin());
}

}  // namespace hawkes
