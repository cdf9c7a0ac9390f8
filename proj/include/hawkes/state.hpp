#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "json.hpp"

#include "hawkes/kernel.hpp"

namespace hawkes {

class Modulus;

// The initial condition g0: a non-negative locally integrable function,
// either zero, a kernel-shaped closed form, or assembled from a pre-history
// point set as g0(t) = sum_{tau in S0} h(t - tau) with tau < 0.
class InitialCondition {
  public:
    static InitialCondition zero();
    static InitialCondition from_kernel(Kernel k);
    static InitialCondition from_prehistory(Kernel k, std::vector<double> past);
    static InitialCondition sum(std::vector<InitialCondition> parts);

    double value(double t) const;
    bool is_zero() const { return kind_ == Kind::Zero; }
    bool non_increasing() const;
    double sup_on(double a, double b) const;
    // int_0^inf phi(g0(t)) dt; +inf when divergent.
    double integral_phi(const Modulus& phi) const;
    double integral_phi_tail(const Modulus& phi, double from) const;

    nlohmann::json to_json() const;
    static InitialCondition from_json(const nlohmann::json& j);
    bool operator==(const InitialCondition& o) const {
        return to_json() == o.to_json();
    }

  private:
    enum class Kind { Zero, KernelShaped, PreHistory, Sum } kind_ = Kind::Zero;
    Kernel kernel_ = Kernel::zero();
    std::vector<double> past_;
    std::vector<InitialCondition> parts_;
};

inline constexpr std::int64_t kParentRoot = -1;
inline constexpr std::int64_t kParentUnset = -2;

struct Event {
    double time = 0.0;
    std::int64_t parent = kParentUnset;
    std::int32_t generation = -1;
    std::int32_t type = 0;
};

// Ordered event times with optional parent/generation/type marks.
struct EventStream {
    std::vector<Event> events;

    std::size_t size() const { return events.size(); }
    bool empty() const { return events.empty(); }
    const Event& operator[](std::size_t i) const { return events[i]; }
    void push(Event e) { events.push_back(e); }
    std::vector<double> times() const;
    // Throws when ordering/mark invariants are violated.
    void validate() const;
    bool has_marks() const;
};

struct Discrepancy {
    std::int64_t delta_count = 0;
    std::optional<double> last;  // max symmetric-difference time > T
};

// Symmetric difference of the two streams restricted to times > T.
Discrepancy discrepancy_after(const EventStream& a, const EventStream& b,
                              double T);

// The Markov state g_t: initial condition plus recorded events,
// evaluated as g_t(s) = g0(now + s) + sum_tau h(now + s - tau).
class ImpulseState {
  public:
    ImpulseState(InitialCondition g0, Kernel kernel, double t0 = 0.0);

    double evaluate(double s) const;         // fast path when available
    double evaluate_direct(double s) const;  // always the explicit sum
    double z() const { return evaluate(0.0); }
    void advance(double delta);  // delta > 0
    void jump();                 // append event at `now`
    double now() const { return now_; }
    std::int64_t n_events() const { return static_cast<std::int64_t>(events_.size()); }
    const std::vector<double>& event_times() const { return events_; }
    const Kernel& kernel() const { return kernel_; }
    const InitialCondition& initial() const { return g0_; }

    nlohmann::json snapshot() const;
    static ImpulseState restore(const nlohmann::json& j);

  private:
    InitialCondition g0_;
    Kernel kernel_;
    double now_ = 0.0;
    std::vector<double> events_;
    // Exponential fast path: accum_ = sum exp(-beta (now - tau)).
    bool exp_fast_ = false;
    double beta_ = 0.0, coeff_ = 0.0, accum_ = 0.0;
};

struct MetricResult {
    double value = 0.0;
    double remainder_bound = 0.0;
};

// L1-loc metric: sum_{n=1}^{n_max} 2^-n I_n / (1 + I_n), I_n = int_0^n |g-f|.
MetricResult metric_dX(const std::function<double(double)>& g,
                       const std::function<double(double)>& f, int n_max = 30);

}  // namespace hawkes
