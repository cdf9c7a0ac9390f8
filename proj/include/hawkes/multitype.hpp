#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hawkes/intensity.hpp"
#include "hawkes/kernel.hpp"
#include "hawkes/noise.hpp"
#include "hawkes/state.hpp"
#include "hawkes/thinning.hpp"

namespace hawkes {

// Finitely many point types. Events of type i feed every component z_ij
// through the kernel h_ij; the rate of type e is a monotone scalar map
// applied to the weighted load sum_ij w^e_ij z_ij, which certifies the
// affine envelope lambda_e <= c_e + sum_ij k^e_ij z_ij with
// k^e_ij = B_e w^e_ij.
struct MultiTypeModel {
    int d = 1;
    std::vector<std::vector<Kernel>> kernels;            // h[i][j]
    std::vector<std::vector<InitialCondition>> initial;  // g[i][j]
    std::vector<IntensityFn> rate_map;                   // scalar map per type
    std::vector<std::vector<std::vector<double>>> weights;  // w[e][i][j]
    bool paper_normalization = false;  // require ||h_ij|| = 1/d

    void validate() const;  // throws on shape or normalization violations
    // Affine envelope coefficient k^e_ij.
    double envelope_k(int e, int i, int j) const;
    double envelope_c(int e) const { return rate_map[e].envelope().A; }
    TypedThinningState make_state() const;

    nlohmann::json to_json() const;
    static MultiTypeModel from_json(const nlohmann::json& j);
};

// Convenience builder for affine rates lambda_e = c_e + sum_ij k_ij z_ij.
MultiTypeModel affine_multitype(
    std::vector<std::vector<Kernel>> kernels,
    std::vector<std::vector<InitialCondition>> initial, std::vector<double> c,
    std::vector<std::vector<std::vector<double>>> k,
    bool paper_normalization = false);

// Assembles z(t) from the typed history held in `state` and evaluates the
// type-e rate.
double typed_rate(const MultiTypeModel& model, const TypedThinningState& state,
                  int e, double t);

struct StabilityReport {
    std::vector<std::vector<double>> m;  // m[i][e] = sum_j k^e_ij
    double radius = 0.0;
    bool stable = false;
    std::string method;  // "power-iteration" or "gershgorin (bounded-only)"
};

StabilityReport stability_matrix(const MultiTypeModel& model);

// Superposed per-type thinning; one planar stream per type; exact law.
// Refuses spectral radius >= 1 unless override_stability is set.
EventStream simulate_multitype(const MultiTypeModel& model, double horizon,
                               CanonicalNoise noise,
                               std::uint64_t max_events = 10'000'000,
                               bool override_stability = false);

}  // namespace hawkes
