#include "hawkes/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hawkes/thinning.hpp"

namespace hawkes {

namespace {
constexpr std::uint64_t kClusterTag = 0xC1057E6;
constexpr std::uint64_t kAttributionTag = 0xA77617;
}  // namespace

EventStream simulate_thinning(const SimConfig& cfg, CanonicalNoise noise) {
    std::vector<std::vector<ExcitationCell>> cells;
    cells.push_back({ExcitationCell(cfg.kernel, cfg.g0)});
    TypedThinningState state(std::move(cells), {cfg.intensity}, {{{1.0}}});
    return run_thinning(state, 0.0, cfg.horizon, cfg.max_events, noise,
                        cfg.user_envelope);
}

ClusterResult simulate_cluster(const SimConfig& cfg, CanonicalNoise noise,
                               ClusterOptions options) {
    if (cfg.intensity.family() != IntensityFamily::Linear)
        throw std::invalid_argument(
            "cluster sampler: intensity must be Linear(A, B)");
    if (cfg.intensity.has_modulators())
        throw std::invalid_argument(
            "cluster sampler: modulators are not part of the branching form");
    const double A = cfg.intensity.linear_A();
    const double B = cfg.intensity.linear_B();
    const double mass = cfg.kernel.total_mass();
    const double offspring_mean = B * mass;
    if (offspring_mean >= 1.0)
        throw std::invalid_argument(
            "cluster sampler: B ||h|| = " + std::to_string(offspring_mean) +
            " >= 1, supercritical cluster explosion");
    const double T = cfg.horizon;
    if (!(T > 0.0)) throw std::invalid_argument("cluster sampler: horizon must be > 0");

    auto rng = derived_engine(noise, kClusterTag);
    ClusterResult out;

    struct Pending {
        double time;
        std::int64_t parent;  // index into `raw`
        std::int32_t generation;
    };
    std::vector<Pending> raw;

    // Roots: inhomogeneous Poisson with rate A + B g0(t), thinned against a
    // constant bound.
    const double root_env = A + B * cfg.g0.sup_on(0.0, T);
    if (root_env > 0.0) {
        double t = 0.0;
        while (true) {
            t += exp1(rng) / root_env;
            if (t > T) break;
            const double u = u_closed_open(rng) * root_env;
            if (u < A + B * cfg.g0.value(t))
                raw.push_back({t, kParentRoot, 0});
        }
    }

    // Children, processed in creation order.
    const bool discard = options.horizon_mode == HorizonMode::GenerateThenDiscard;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const Pending cur = raw[i];
        std::uint32_t count = 0;
        if (discard) {
            const std::uint64_t n = poisson_knuth(rng, offspring_mean);
            count = static_cast<std::uint32_t>(n);
            for (std::uint64_t c = 0; c < n; ++c) {
                const double age = cfg.kernel.sample_age(rng);
                const double tc = cur.time + age;
                if (tc <= T)
                    raw.push_back({tc, static_cast<std::int64_t>(i),
                                   cur.generation + 1});
            }
        } else {
            const double kept_mass =
                mass - cfg.kernel.tail_integral(std::max(T - cur.time, 0.0));
            const double kept_mean = B * kept_mass;
            const std::uint64_t n = poisson_knuth(rng, kept_mean);
            count = static_cast<std::uint32_t>(n);
            for (std::uint64_t c = 0; c < n; ++c) {
                // age from h restricted to [0, T - cur.time]
                double age;
                int tries = 0;
                do {
                    age = cfg.kernel.sample_age(rng);
                    if (++tries > 100000)
                        throw std::runtime_error(
                            "cluster sampler: truncated age rejection stalled");
                } while (cur.time + age > T);
                raw.push_back({cur.time + age, static_cast<std::int64_t>(i),
                               cur.generation + 1});
            }
        }
        out.offspring_counts.push_back(count);
        if (raw.size() >= cfg.max_events) throw ExplosionError(cfg.max_events);
    }

    // Sort by time and remap parent indices.
    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return raw[a].time < raw[b].time;
    });
    std::vector<std::int64_t> new_index(raw.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        new_index[order[pos]] = static_cast<std::int64_t>(pos);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const Pending& p = raw[order[pos]];
        Event e;
        e.time = p.time;
        e.parent = p.parent == kParentRoot ? kParentRoot
                                           : new_index[static_cast<std::size_t>(p.parent)];
        e.generation = p.generation;
        out.events.push(e);
    }
    return out;
}

std::vector<double> parent_distribution(const EventStream& events,
                                        std::size_t i, const SimConfig& cfg) {
    if (i >= events.size())
        throw std::invalid_argument("parent_distribution: index out of range");
    if (cfg.intensity.has_modulators())
        throw std::invalid_argument(
            "attribution assumes an unmodulated rate map");
    const double ti = events[i].time;
    // z at the left limit: contributions of strictly earlier events
    double z = cfg.g0.value(ti);
    std::vector<double> h_terms(i);
    double kahan_c = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
        h_terms[j] = cfg.kernel.eval(ti - events[j].time);
        const double y = h_terms[j] - kahan_c;
        const double t = z + y;
        kahan_c = (t - z) - y;
        z = t;
    }
    std::vector<double> p(i + 1, 0.0);
    if (z <= 0.0) {
        p[0] = 1.0;  // the lambda_0 branch carries weight zero in the limit
        return p;
    }
    const double lam = cfg.intensity.value(z);
    const double lam0 = cfg.intensity.lambda0(z);
    p[0] = cfg.intensity.value(0.0) / lam +
           (lam0 / lam) * (cfg.g0.value(ti) / z);
    for (std::size_t j = 0; j < i; ++j)
        p[j + 1] = (lam0 / lam) * h_terms[j] / z;
    double sum = 0.0;
    for (double v : p) sum += v;
    const double residual = std::abs(1.0 - sum);
    if (residual > 1e-12)
        throw std::runtime_error(
            "parent attribution: probability residual " +
            std::to_string(residual) + " exceeds 1e-12 at event " +
            std::to_string(i));
    for (double& v : p) v /= sum;
    return p;
}

EventStream attribute_parents(const EventStream& events, const SimConfig& cfg,
                              CanonicalNoise noise) {
    auto rng = derived_engine(noise, kAttributionTag);
    EventStream out = events;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto p = parent_distribution(events, i, cfg);
        const double u = u_closed_open(rng);
        double acc = 0.0;
        std::size_t pick = 0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            acc += p[j];
            if (u < acc) {
                pick = j;
                break;
            }
            pick = j;  // saturates at the last entry
        }
        Event& e = out.events[i];
        if (pick == 0) {
            e.parent = kParentRoot;
            e.generation = 0;
        } else {
            e.parent = static_cast<std::int64_t>(pick - 1);
            e.generation = out.events[pick - 1].generation + 1;
        }
    }
    return out;
}

}  // namespace hawkes
