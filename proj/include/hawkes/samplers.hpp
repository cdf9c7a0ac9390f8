#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hawkes/intensity.hpp"
#include "hawkes/kernel.hpp"
#include "hawkes/noise.hpp"
#include "hawkes/state.hpp"

namespace hawkes {

struct SimConfig {
    double horizon = 0.0;
    Kernel kernel = Kernel::zero();
    IntensityFn intensity = IntensityFn::linear(0.0, 0.0);
    InitialCondition g0 = InitialCondition::zero();
    std::uint64_t max_events = 10'000'000;
    std::optional<double> user_envelope;  // constant dominating rate
};

// Exact sample of the Hawkes law on [0, horizon] by thinning the canonical
// planar field. Deterministic given (cfg, noise).
EventStream simulate_thinning(const SimConfig& cfg, CanonicalNoise noise);

enum class HorizonMode { GenerateThenDiscard, SuppressByHorizon };

struct ClusterOptions {
    HorizonMode horizon_mode = HorizonMode::GenerateThenDiscard;
};

struct ClusterResult {
    EventStream events;  // sorted, with parent and generation marks
    // Offspring count drawn per processed event (pre horizon filter in
    // GenerateThenDiscard mode), pooled over roots and children.
    std::vector<std::uint32_t> offspring_counts;
};

// Branching construction for Linear(A, B) intensity: roots from an
// inhomogeneous Poisson with rate A + B g0(t), Poisson(B ||h||) children per
// event with ages drawn from the density h / ||h||.
ClusterResult simulate_cluster(const SimConfig& cfg, CanonicalNoise noise,
                               ClusterOptions options = {});

// The probability vector (root, parent=0, parent=1, ..., parent=i-1) for
// event i given the earlier events.
std::vector<double> parent_distribution(const EventStream& events,
                                        std::size_t i, const SimConfig& cfg);

// Randomized parent attribution; fills parent and generation marks.
EventStream attribute_parents(const EventStream& events, const SimConfig& cfg,
                              CanonicalNoise noise);

}  // namespace hawkes
