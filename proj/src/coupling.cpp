#include "hawkes/coupling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hawkes/parallel.hpp"
#include "hawkes/quad.hpp"
#include "hawkes/stats.hpp"
#include "hawkes/thinning.hpp"

namespace hawkes {

namespace {

std::vector<double> check_grid() {
    std::vector<double> g;
    g.push_back(0.0);
    for (int i = 0; i < 400; ++i)
        g.push_back(1e-6 * std::pow(1e9 / 1e-6, i / 399.0));
    return g;
}

EventStream run_leg(const SimConfig& cfg, CanonicalNoise noise,
                    double t_start) {
    std::vector<std::vector<ExcitationCell>> cells;
    cells.push_back({ExcitationCell(cfg.kernel, cfg.g0)});
    TypedThinningState state(std::move(cells), {cfg.intensity}, {{{1.0}}});
    return run_thinning(state, t_start, cfg.horizon, cfg.max_events, noise,
                        cfg.user_envelope);
}

}  // namespace

CouplingRecord couple(const SimConfig& cfg_a, const SimConfig& cfg_b,
                      CanonicalNoise noise) {
    if (cfg_a.horizon != cfg_b.horizon)
        throw std::invalid_argument("couple: legs must share the horizon");
    if (cfg_a.kernel.family() != cfg_b.kernel.family())
        throw std::invalid_argument("couple: legs must share the kernel family");
    CouplingRecord rec;
    rec.shared_noise = noise;
    rec.stream_a = run_leg(cfg_a, noise, 0.0);
    rec.stream_b = run_leg(cfg_b, noise, 0.0);
    rec.delta = discrepancy_after(rec.stream_a, rec.stream_b, 0.0);
    rec.last_discrepancy = rec.delta.last;
    return rec;
}

DominationCheck verify_domination(const CouplingRecord& rec,
                                  const SimConfig& cfg_a,
                                  const SimConfig& cfg_b) {
    // Ordering hypotheses on verification grids.
    for (double x : check_grid()) {
        if (cfg_a.kernel.eval(x) > cfg_b.kernel.eval(x) + 1e-12)
            throw std::invalid_argument(
                "domination preconditions: h_a > h_b at t=" + std::to_string(x));
        if (cfg_a.g0.value(x) > cfg_b.g0.value(x) + 1e-12)
            throw std::invalid_argument(
                "domination preconditions: g_a > g_b at t=" + std::to_string(x));
        // lambda_b non-decreasing, so lambda_a(x) <= lambda_b(x) gives the
        // two-variable ordering lambda_a(x) <= lambda_b(y) for x <= y.
        if (cfg_a.intensity.value(x) > cfg_b.intensity.value(x) + 1e-12)
            throw std::invalid_argument(
                "domination preconditions: lambda_a > lambda_b at z=" +
                std::to_string(x));
    }
    if (cfg_a.intensity.has_modulators() || cfg_b.intensity.has_modulators())
        throw std::invalid_argument(
            "domination check does not cover modulated rates");

    DominationCheck out;
    out.holds = true;
    // Pathwise subset: every a-event time must appear in b.
    std::size_t j = 0;
    for (std::size_t i = 0; i < rec.stream_a.size(); ++i) {
        const double t = rec.stream_a[i].time;
        while (j < rec.stream_b.size() && rec.stream_b[j].time < t) ++j;
        if (j >= rec.stream_b.size() || rec.stream_b[j].time != t) {
            out.holds = false;
            out.violation_time = t;
            return out;
        }
    }
    // Rate ordering at every event time (left limits).
    ExcitationCell cell_a(cfg_a.kernel, cfg_a.g0);
    ExcitationCell cell_b(cfg_b.kernel, cfg_b.g0);
    std::size_t ia = 0;
    for (std::size_t ib = 0; ib < rec.stream_b.size(); ++ib) {
        const double t = rec.stream_b[ib].time;
        const double ra = cfg_a.intensity.value(cell_a.value(t));
        const double rb = cfg_b.intensity.value(cell_b.value(t));
        if (ra > rb) {
            out.holds = false;
            out.violation_time = t;
            return out;
        }
        if (ia < rec.stream_a.size() && rec.stream_a[ia].time == t) {
            cell_a.add_event(t);
            ++ia;
        }
        cell_b.add_event(t);
    }
    return out;
}

OverlapReport overlap_estimate(const InitialCondition& f, const SimConfig& base,
                               const Modulus& phi, int replicas,
                               CanonicalNoise noise, int threads,
                               double mu0_burn_in) {
    if (replicas <= 0)
        throw std::invalid_argument("overlap_estimate: replicas must be > 0");
    OverlapReport rep;
    rep.replicas = replicas;
    rep.integral_phi_f = f.integral_phi(phi);
    rep.jensen_lower_bound = std::exp(-rep.integral_phi_f);

    std::atomic<std::int64_t> successes{0};
    parallel_for_index(
        static_cast<std::size_t>(replicas), threads, [&](std::size_t r) {
            CanonicalNoise leg_noise{noise.seed, noise.stream + r};
            SimConfig a = base;
            SimConfig b = base;
            if (mu0_burn_in > 0.0) {
                // Proxy for a mu_0-distributed start: the impulse state of a
                // zero-start run after the burn-in, re-expressed as a
                // pre-history initial condition.
                SimConfig warm = base;
                warm.g0 = InitialCondition::zero();
                warm.horizon = mu0_burn_in;
                CanonicalNoise warm_noise{
                    mix_u64(noise.seed, 0xB0B0, r), 0};
                EventStream pre = simulate_thinning(warm, warm_noise);
                std::vector<double> shifted;
                for (const auto& e : pre.events)
                    shifted.push_back(e.time - mu0_burn_in);
                InitialCondition proxy =
                    shifted.empty()
                        ? InitialCondition::zero()
                        : InitialCondition::from_prehistory(base.kernel,
                                                            std::move(shifted));
                a.g0 = InitialCondition::sum({proxy, f});
                b.g0 = proxy;
            } else {
                a.g0 = f;
                b.g0 = InitialCondition::zero();
            }
            const CouplingRecord rec = couple(a, b, leg_noise);
            if (rec.delta.delta_count == 0) ++successes;
        });
    rep.empirical_overlap =
        static_cast<double>(successes.load()) / static_cast<double>(replicas);
    rep.sigma = binomial_sigma(rep.empirical_overlap,
                               static_cast<std::size_t>(replicas));
    return rep;
}

double compute_K(double A, double B, const Modulus& phi, const Kernel& k) {
    if (!(B < 1.0))
        throw std::invalid_argument("compute_K: needs subcritical B < 1");
    const auto ci = integrate_to_infinity(
        [&](double s) { return phi.value(k.tail_integral(s)); });
    if (ci.diverged)
        throw std::invalid_argument("compute_K: int phi(H) diverges");
    const double stationary_rate = A / (1.0 - B);
    return std::max(stationary_rate, 1.0) * ci.value;
}

void RecurrenceLog::validate() const {
    double prev = -1.0;
    for (std::size_t i = 0; i < attempts.size(); ++i) {
        const auto& a = attempts[i];
        if (!(a.sigma_time >= prev))
            throw std::runtime_error("recurrence log: stopping times not interleaved");
        if (a.upsilon_time) {
            if (!(*a.upsilon_time >= a.sigma_time))
                throw std::runtime_error("recurrence log: upsilon before sigma");
            prev = *a.upsilon_time;
        } else if (i + 1 != attempts.size()) {
            throw std::runtime_error("recurrence log: open attempt not last");
        }
    }
}

RecurrenceLog recurrence_run(const InitialCondition& g0, const SimConfig& cfg,
                             const Modulus& phi, double K, int budget,
                             CanonicalNoise noise) {
    if (budget <= 0)
        throw std::invalid_argument("recurrence_run: budget must be > 0");
    SimConfig main_cfg = cfg;
    main_cfg.g0 = g0;
    const EventStream main = simulate_thinning(main_cfg, noise);
    const double T = cfg.horizon;

    // J upper bound via subadditivity:
    //   J(t) <= int_t^inf phi(g0) + sum_{tau <= t} int_{t-tau}^inf phi(h).
    // Identity moduli admit closed forms; anything else goes through a
    // precomputed monotone table.
    const bool id_phi = phi.is_identity();
    const double Lphi = id_phi ? phi.lipschitz() : 0.0;
    auto phi_h_tail = [&](double x) -> double {
        if (id_phi) return Lphi * cfg.kernel.tail_integral(x);
        const auto res = integrate_to_infinity(
            [&](double u) { return phi.value(cfg.kernel.eval(u)); }, x);
        return res.diverged ? std::numeric_limits<double>::infinity()
                            : res.value;
    };
    // g0 tail table on a uniform ladder over [0, T].
    const int kNodes = 256;
    std::vector<double> g0_tail(kNodes + 1);
    for (int i = 0; i <= kNodes; ++i)
        g0_tail[i] = g0.integral_phi_tail(phi, T * i / kNodes);
    auto g0_tail_at = [&](double t) -> double {
        const double x = std::clamp(t / T * kNodes, 0.0, double(kNodes));
        const int i = std::min(static_cast<int>(x), kNodes - 1);
        const double w = x - i;
        return g0_tail[i] + w * (g0_tail[i + 1] - g0_tail[i]);
    };
    std::vector<double> h_tail_tab(kNodes + 1);
    for (int i = 0; i <= kNodes; ++i) h_tail_tab[i] = phi_h_tail(T * i / kNodes);
    auto h_tail_at = [&](double x) -> double {
        if (x >= T) return h_tail_tab[kNodes];
        const double y = std::clamp(x / T * kNodes, 0.0, double(kNodes));
        const int i = std::min(static_cast<int>(y), kNodes - 1);
        const double w = y - i;
        return h_tail_tab[i] + w * (h_tail_tab[i + 1] - h_tail_tab[i]);
    };
    const auto& times = main.events;
    auto J_ub = [&](double t) -> double {
        double j = g0_tail_at(t);
        for (const auto& e : times) {
            if (e.time > t) break;
            j += h_tail_at(t - e.time);
        }
        return j;
    };

    RecurrenceLog log;
    double scan_from = 0.0;
    while (static_cast<int>(log.attempts.size()) < budget) {
        // Find the next entry into C' at or after scan_from. J_ub decreases
        // between events and jumps up at events.
        std::optional<double> sigma;
        double seg_start = scan_from;
        std::size_t next_ev = 0;
        while (next_ev < times.size() && times[next_ev].time <= scan_from)
            ++next_ev;
        while (true) {
            const double seg_end =
                next_ev < times.size() ? times[next_ev].time : T;
            if (J_ub(seg_start) <= K) {
                sigma = seg_start;
                break;
            }
            if (J_ub(std::nextafter(seg_end, seg_start)) <= K) {
                // bisect the crossing J_ub = K inside (seg_start, seg_end)
                double lo = seg_start, hi = seg_end;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (J_ub(mid) > K ? lo : hi) = mid;
                }
                sigma = hi;
                break;
            }
            if (next_ev >= times.size()) break;
            seg_start = times[next_ev].time;
            ++next_ev;
        }
        if (!sigma || *sigma >= T) {
            log.outcome = RecurrenceLog::Outcome::ExhaustedBudget;
            break;
        }

        // Coupling attempt: a zero-start leg replaying the shared field from
        // sigma. The main leg dominates it, so the first decoupling event is
        // the first main event missing from the zero leg.
        std::vector<std::vector<ExcitationCell>> cells;
        cells.push_back(
            {ExcitationCell(cfg.kernel, InitialCondition::zero())});
        TypedThinningState zero_state(std::move(cells), {cfg.intensity},
                                      {{{1.0}}});
        const EventStream zero_leg = run_thinning(
            zero_state, *sigma, T, cfg.max_events, noise, cfg.user_envelope);

        std::optional<double> upsilon;
        std::size_t jz = 0;
        for (const auto& e : times) {
            if (e.time <= *sigma) continue;
            while (jz < zero_leg.size() && zero_leg[jz].time < e.time) ++jz;
            if (jz >= zero_leg.size() || zero_leg[jz].time != e.time) {
                upsilon = e.time;
                break;
            }
        }
        log.attempts.push_back({*sigma, upsilon});
        if (!upsilon) {
            log.outcome = RecurrenceLog::Outcome::CoupledForever;
            break;
        }
        scan_from = *upsilon;
        if (static_cast<int>(log.attempts.size()) >= budget) {
            log.outcome = RecurrenceLog::Outcome::ExhaustedBudget;
            break;
        }
    }
    log.validate();
    return log;
}

}  // namespace hawkes
