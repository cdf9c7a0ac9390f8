#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hawkes/intensity.hpp"
#include "hawkes/noise.hpp"
#include "hawkes/samplers.hpp"
#include "hawkes/state.hpp"

namespace hawkes {

// Two thinning legs driven by the same planar field.
struct CouplingRecord {
    EventStream stream_a;
    EventStream stream_b;
    CanonicalNoise shared_noise;
    Discrepancy delta;                    // symmetric difference on (0, T]
    std::optional<double> last_discrepancy;  // L
};

// Both legs must share the kernel family and horizon.
CouplingRecord couple(const SimConfig& cfg_a, const SimConfig& cfg_b,
                      CanonicalNoise noise);

struct DominationCheck {
    bool holds = false;
    std::optional<double> violation_time;
};

// Requires the ordering hypotheses (h_a <= h_b, g_a <= g_b pointwise and
// lambda_a(x) <= lambda_b(y) for x <= y); throws std::invalid_argument when
// they fail on the verification grids. Then checks stream_a <= stream_b as
// sets and the rate ordering at every event time.
DominationCheck verify_domination(const CouplingRecord& rec,
                                  const SimConfig& cfg_a,
                                  const SimConfig& cfg_b);

struct OverlapReport {
    double empirical_overlap = 0.0;
    double jensen_lower_bound = 0.0;
    double sigma = 0.0;  // binomial std error of the empirical estimate
    int replicas = 0;
    double integral_phi_f = 0.0;
};

// Empirical overlap of the laws started from f and from zero, against the
// Jensen bound exp(-int phi(f)). When mu0_burn_in > 0 each replica couples
// g_proxy + f against g_proxy, where g_proxy is the impulse state of a
// zero-start run after the burn-in (a stand-in for a mu_0-distributed start).
OverlapReport overlap_estimate(const InitialCondition& f, const SimConfig& base,
                               const Modulus& phi, int replicas,
                               CanonicalNoise noise, int threads = 1,
                               double mu0_burn_in = 0.0);

// K = max(stationary mean rate of the dominating linear model, 1) * C with
// C = int phi(H(s)) ds.
double compute_K(double A, double B, const Modulus& phi, const Kernel& k);

struct RecurrenceLog {
    struct Attempt {
        double sigma_time = 0.0;            // entry into C'
        std::optional<double> upsilon_time; // first decoupling event
    };
    std::vector<Attempt> attempts;
    enum class Outcome { CoupledForever, ExhaustedBudget } outcome =
        Outcome::ExhaustedBudget;
    void validate() const;  // throws unless s1 <= u1 <= s2 <= ... interleaves
};

// Theorem-style recurrence scheme: track the (subadditive upper bound of)
// J(t) = int phi(g_t(s)) ds, enter C' when J <= K, attempt a canonical
// coupling against a zero-start leg, record the decoupling time, repeat.
RecurrenceLog recurrence_run(const InitialCondition& g0, const SimConfig& cfg,
                             const Modulus& phi, double K, int budget,
                             CanonicalNoise noise);

}  // namespace hawkes
