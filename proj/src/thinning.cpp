#include "hawkes/thinning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hawkes {

ExcitationCell::ExcitationCell(Kernel h, InitialCondition g0)
    : h_(std::move(h)), g0_(std::move(g0)) {
    if (h_.family() == KernelFamily::Exponential) {
        exp_fast_ = true;
        beta_ = h_.param("beta");
        coeff_ = h_.scale() * beta_;
    }
}

double ExcitationCell::value(double t) const {
    if (exp_fast_)
        return g0_.value(t) + coeff_ * accum_ * std::exp(-beta_ * (t - accum_t_));
    double sum = g0_.value(t);
    for (double tau : events_) sum += h_.eval(t - tau);
    return sum;
}

void ExcitationCell::add_event(double t) {
    if (exp_fast_) {
        accum_ = accum_ * std::exp(-beta_ * (t - accum_t_)) + 1.0;
        accum_t_ = t;
    } else {
        events_.push_back(t);
    }
}

TypedThinningState::TypedThinningState(
    std::vector<std::vector<ExcitationCell>> cells, std::vector<IntensityFn> f,
    std::vector<std::vector<std::vector<double>>> w)
    : cells_(std::move(cells)), f_(std::move(f)), w_(std::move(w)) {
    const std::size_t d = f_.size();
    if (d == 0 || cells_.size() != d || w_.size() != d)
        throw std::invalid_argument("typed state: inconsistent dimensions");
    for (const auto& row : cells_)
        if (row.size() != d)
            throw std::invalid_argument("typed state: cells must be d x d");
    for (const auto& we : w_) {
        if (we.size() != d)
            throw std::invalid_argument("typed state: weights must be d x d");
        for (const auto& row : we) {
            if (row.size() != d)
                throw std::invalid_argument("typed state: weights must be d x d");
            for (double v : row)
                if (v < 0.0)
                    throw std::invalid_argument("typed state: weights must be >= 0");
        }
    }
}

double TypedThinningState::loaded(int e, double t) const {
    const std::size_t d = f_.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const double wij = w_[e][i][j];
            if (wij != 0.0) acc += wij * cells_[i][j].value(t);
        }
    return acc;
}

double TypedThinningState::envelope(int e, double t) const {
    // z_ij is non-increasing between events, so the loaded value at t
    // dominates later values; modulators enter through their bounds.
    const double u = loaded(e, t);
    return f_[e].value(u + f_[e].p_bound()) + f_[e].q_bound();
}

void TypedThinningState::apply_event(int type, double t) {
    for (auto& cell : cells_[type]) cell.add_event(t);
}

bool TypedThinningState::natural_envelope_ok() const {
    for (const auto& row : cells_)
        for (const auto& cell : row)
            if (!cell.natural_envelope_ok()) return false;
    for (const auto& f : f_)
        if (!f.monotone()) return false;
    return true;
}

namespace {

struct Candidate {
    double t = std::numeric_limits<double>::infinity();
    double u = 0.0;
    int type = -1;
};

// Earliest field point of one type after t_cur with u below the envelope,
// restricted to times <= limit.
Candidate find_candidate(PlanarField& field, double t_cur, double envelope,
                         double limit, int type) {
    Candidate best;
    if (!(envelope > 0.0)) return best;
    if (envelope > 1e7)
        throw std::runtime_error(
            "thinning envelope exceeded 1e7; process looks supercritical");
    const std::size_t strips = static_cast<std::size_t>(std::ceil(envelope));
    for (std::size_t k = 0; k < strips; ++k) {
        std::size_t idx = field.first_index_after(k, t_cur);
        while (true) {
            const auto& p = field.point(k, idx);
            if (p.t > limit || p.t >= best.t) break;
            if (p.u < envelope) {
                best = Candidate{p.t, p.u, type};
                break;
            }
            ++idx;  // above the envelope at its own time: not a candidate
        }
    }
    return best;
}

}  // namespace

EventStream run_thinning(TypedThinningState& state, double t_start,
                         double horizon, std::uint64_t max_events,
                         CanonicalNoise noise,
                         std::optional<double> user_envelope) {
    if (!(horizon > t_start))
        throw std::invalid_argument("thinning: horizon must exceed start time");
    if (!user_envelope && !state.natural_envelope_ok())
        throw std::invalid_argument(
            "thinning: kernel or initial condition is not non-increasing; "
            "supply an explicit envelope");

    const int d = state.types();
    std::vector<PlanarField> fields;
    fields.reserve(d);
    for (int e = 0; e < d; ++e)
        fields.emplace_back(CanonicalNoise{noise.seed, noise.stream + static_cast<std::uint64_t>(e)});

    std::vector<double> env(d);
    for (int e = 0; e < d; ++e)
        env[e] = user_envelope ? *user_envelope : state.envelope(e, t_start);

    EventStream out;
    double t_cur = t_start;
    std::uint64_t guard = 0;
    while (true) {
        if (++guard > 50'000'000ULL) throw ExplosionError(max_events);
        Candidate best;
        for (int e = 0; e < d; ++e) {
            const Candidate c =
                find_candidate(fields[e], t_cur, env[e], horizon, e);
            if (c.type >= 0 && c.t < best.t) best = c;
        }
        if (best.type < 0) break;

        const double r = state.rate(best.type, best.t);
        if (r > env[best.type])
            throw EnvelopeViolation(best.t, best.type, r, env[best.type]);
        if (best.u < r) {
            state.apply_event(best.type, best.t);
            Event ev;
            ev.time = best.t;
            ev.type = best.type;
            out.push(ev);
            if (out.size() >= max_events) throw ExplosionError(max_events);
            if (!user_envelope)
                for (int e = 0; e < d; ++e) env[e] = state.envelope(e, best.t);
        }
        t_cur = best.t;
    }
    return out;
}

}  // namespace hawkes
