#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hawkes/intensity.hpp"
#include "hawkes/kernel.hpp"
#include "hawkes/noise.hpp"
#include "hawkes/state.hpp"

namespace hawkes {

struct EnvelopeViolation : std::runtime_error {
    EnvelopeViolation(double t, int type_, double rate_, double env)
        : std::runtime_error("thinning envelope violated at t=" +
                             std::to_string(t) + " (type " +
                             std::to_string(type_) + "): rate " +
                             std::to_string(rate_) + " > envelope " +
                             std::to_string(env)),
          time(t),
          type(type_) {}
    double time;
    int type;
};

struct ExplosionError : std::runtime_error {
    explicit ExplosionError(std::uint64_t cap)
        : std::runtime_error(
              "event cap " + std::to_string(cap) +
              " exceeded; check subcriticality (envelope slope B < 1)") {}
};

// One component of the excitation state: an initial condition plus the
// kernel-weighted load of one source type's events. Exponential kernels get
// an O(1) decaying-accumulator path.
class ExcitationCell {
  public:
    ExcitationCell(Kernel h, InitialCondition g0);
    double value(double t) const;  // g0(t) + sum_tau h(t - tau), t >= last event
    void add_event(double t);
    bool natural_envelope_ok() const {
        return h_.non_increasing() && g0_.non_increasing();
    }
    const Kernel& kernel() const { return h_; }
    const InitialCondition& initial() const { return g0_; }

  private:
    Kernel h_;
    InitialCondition g0_;
    std::vector<double> events_;
    bool exp_fast_ = false;
    double beta_ = 0.0, coeff_ = 0.0;
    double accum_ = 0.0, accum_t_ = 0.0;
};

// State of a d-type model under the canonical planar construction:
// z_ij(t) = g_ij(t) + sum_{tau in S_i} h_ij(t - tau), with the rate of type e
// given by f_e applied to the weighted load sum_ij w^e_ij z_ij.
class TypedThinningState {
  public:
    TypedThinningState(std::vector<std::vector<ExcitationCell>> cells,
                       std::vector<IntensityFn> f,
                       std::vector<std::vector<std::vector<double>>> w);

    int types() const { return static_cast<int>(f_.size()); }
    double z(int i, int j, double t) const { return cells_[i][j].value(t); }
    double loaded(int e, double t) const;  // sum_ij w^e_ij z_ij(t)
    double rate(int e, double t) const { return f_[e].rate(loaded(e, t), t); }
    // Dominating constant rate for type e from time t on (natural envelope).
    double envelope(int e, double t) const;
    void apply_event(int type, double t);
    bool natural_envelope_ok() const;
    const IntensityFn& intensity(int e) const { return f_[e]; }

  private:
    std::vector<std::vector<ExcitationCell>> cells_;
    std::vector<IntensityFn> f_;
    std::vector<std::vector<std::vector<double>>> w_;
};

// Exact thinning against per-type planar fields. Type e consumes the field
// with stream id noise.stream + e. Deterministic given (state, noise).
// A constant user_envelope overrides the natural one (single-type use).
EventStream run_thinning(TypedThinningState& state, double t_start,
                         double horizon, std::uint64_t max_events,
                         CanonicalNoise noise,
                         std::optional<double> user_envelope = std::nullopt);

}  // namespace hawkes
