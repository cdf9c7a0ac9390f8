#include "hawkes/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "hawkes/parallel.hpp"
#include "hawkes/stats.hpp"
#include "hawkes/state.hpp"
#include "hawkes/thinning.hpp"

namespace hawkes {

VolterraSolution solve_lambda_theta(const Kernel& k, double A, double B,
                                    double theta, double step,
                                    std::size_t len) {
    if (!(step > 0.0) || len < 2)
        throw std::invalid_argument("volterra: bad grid");
    if (theta < 0.0) throw std::invalid_argument("volterra: theta must be >= 0");
    if (B < 0.0 || A < 0.0)
        throw std::invalid_argument("volterra: A, B must be >= 0");
    VolterraSolution sol;
    std::vector<double> h(len), lam(len, 0.0);
    for (std::size_t i = 0; i < len; ++i) h[i] = k.eval(step * i);

    constexpr double kOverflow = 200.0;
    for (std::size_t i = 0; i < len; ++i) {
        // trapezoid over [0, t_i] of (e^{Lambda(t_i-s)} - 1) h(s); the s = 0
        // node carries the unknown Lambda(t_i) itself.
        double fixed_part = 0.0;
        if (i > 0) {
            for (std::size_t j = 1; j < i; ++j)
                fixed_part += (std::expm1(lam[i - j])) * h[j];
            fixed_part += 0.5 * std::expm1(lam[0]) * h[i];
        }
        double x = theta * h[i];
        if (B > 0.0 && i > 0) {
            for (int it = 0; it < 200; ++it) {
                const double rhs =
                    theta * h[i] +
                    B * step * (0.5 * std::expm1(x) * h[0] + fixed_part);
                if (std::abs(rhs - x) < 1e-12) {
                    x = rhs;
                    break;
                }
                x = rhs;
                if (x > kOverflow) break;
            }
        }
        if (x > kOverflow || !std::isfinite(x)) {
            sol.diverged = true;
            sol.diverged_at = i;
            lam.resize(i);
            break;
        }
        lam[i] = x;
    }
    sol.lambda_t = GridFunction(step, std::move(lam));
    if (!sol.diverged) {
        double acc = 0.0;
        const auto& v = sol.lambda_t.values;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double w = (i == 0 || i + 1 == v.size()) ? 0.5 : 1.0;
            acc += w * std::expm1(v[i]);
        }
        sol.lambda_total = A * acc * step;
    }
    return sol;
}

TvBound tv_bound(const GridFunction& g_tilde, const GridFunction& h_tilde,
                 double B_tilde, double B, const std::vector<double>& t_grid) {
    if (!(B_tilde < 1.0))
        throw std::invalid_argument("tv_bound: B_tilde must be < 1");
    if (B_tilde < 0.0 || B < 0.0)
        throw std::invalid_argument("tv_bound: negative coefficient");
    if (g_tilde.step != h_tilde.step)
        throw std::invalid_argument("tv_bound: grid step mismatch");
    const LatticeMeasure g = to_lattice(g_tilde);
    const LatticeMeasure h = to_lattice(h_tilde);
    for (double t : t_grid)
        if (t > g_tilde.t_max())
            throw std::invalid_argument(
                "tv_bound: requested t exceeds the grid length");

    TvBound out;
    out.resolvent = g;
    LatticeMeasure term = g;
    double weight = 1.0;
    out.terms_used = 1;
    for (int n = 1; n < 400; ++n) {
        term = term.convolve(h);
        weight *= B_tilde;
        const double add_mass = weight * term.total();
        if (add_mass < 1e-13 * std::max(out.resolvent.total(), 1e-300)) break;
        for (std::size_t kk = 0; kk < out.resolvent.atom.size(); ++kk)
            out.resolvent.atom[kk] += weight * term.atom[kk];
        ++out.terms_used;
    }
    out.series_total_mass = out.resolvent.total();

    out.t = t_grid;
    out.bound.resize(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i)
        out.bound[i] = B * out.resolvent.tail_after(t_grid[i]);

    // Tail-ratio diagnostic on the largest decade of the grid:
    // bound(t) / int_{t/2}^inf (g~ + phi(h)) with phi(h) = (B_tilde/B) h~.
    if (!t_grid.empty() && B > 0.0) {
        const double t_hi = t_grid.back();
        double worst = 0.0;
        double tg = 0.0, th = 0.0;
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            const double t = t_grid[i];
            if (t < t_hi / 10.0) continue;
            tg = g_tilde.tail_mass(0.5 * t);
            th = (B_tilde / B) * h_tilde.tail_mass(0.5 * t);
            const double denom = tg + th;
            if (denom > 0.0) worst = std::max(worst, out.bound[i] / denom);
        }
        out.tail_ratio = worst;
        out.tail_g = tg;
        out.tail_h = th;
    }
    return out;
}

LatticeMeasure solve_renewal(const LatticeMeasure& g, const LatticeMeasure& h,
                             double B_tilde) {
    if (g.step != h.step)
        throw std::invalid_argument("solve_renewal: step mismatch");
    if (h.atom.empty() || h.atom[0] != 0.0)
        throw std::invalid_argument("solve_renewal: h must place no atom at 0");
    LatticeMeasure r;
    r.step = g.step;
    r.atom.assign(g.atom.size(), 0.0);
    for (std::size_t k = 0; k < g.atom.size(); ++k) {
        double acc = g.atom[k];
        const std::size_t jmax = std::min(k, h.atom.size() - 1);
        for (std::size_t j = 1; j <= jmax; ++j)
            acc += B_tilde * h.atom[j] * r.atom[k - j];
        r.atom[k] = acc;
    }
    return r;
}

namespace {

// Inverse-CDF sampler over lattice atoms.
struct LatticeSampler {
    double step;
    std::vector<double> cum;
    double total;
    explicit LatticeSampler(const LatticeMeasure& m)
        : step(m.step), cum(m.atom.size()), total(0.0) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m.atom.size(); ++i) {
            acc += m.atom[i];
            cum[i] = acc;
        }
        total = acc;
    }
    double draw(std::mt19937_64& rng) const {
        const double target = u_closed_open(rng) * total;
        const auto it = std::upper_bound(cum.begin(), cum.end(), target);
        const std::size_t i =
            std::min(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
        return step * static_cast<double>(i);
    }
};

}  // namespace

ForestSurvival dominating_tree_mc(const GridFunction& g_tilde,
                                  const GridFunction& h_tilde, double B_tilde,
                                  int replicas,
                                  const std::vector<double>& t_grid,
                                  CanonicalNoise noise, int threads) {
    if (!(B_tilde < 1.0))
        throw std::invalid_argument("dominating_tree_mc: B_tilde must be < 1");
    if (replicas <= 0)
        throw std::invalid_argument("dominating_tree_mc: replicas must be > 0");
    const LatticeMeasure g = to_lattice(g_tilde);
    const LatticeMeasure h = to_lattice(h_tilde);
    const LatticeSampler g_sampler(g);
    const LatticeSampler h_sampler(h);
    const double root_mean = g.total();
    const double child_mean = B_tilde;  // h~ carries unit (lattice) mass

    std::vector<double> last(replicas, -1.0);
    parallel_for_index(
        static_cast<std::size_t>(replicas), threads, [&](std::size_t r) {
            auto rng = derived_engine({noise.seed, noise.stream + r}, 0xD07);
            std::vector<double> queue;
            const std::uint64_t roots = poisson_knuth(rng, root_mean);
            for (std::uint64_t i = 0; i < roots; ++i)
                queue.push_back(g_sampler.draw(rng));
            double L = -1.0;
            std::size_t head = 0;
            while (head < queue.size()) {
                const double t = queue[head++];
                L = std::max(L, t);
                const std::uint64_t kids = poisson_knuth(rng, child_mean);
                for (std::uint64_t c = 0; c < kids; ++c)
                    queue.push_back(t + h_sampler.draw(rng));
                if (queue.size() > 2'000'000)
                    throw ExplosionError(2'000'000);
            }
            last[r] = L;
        });

    ForestSurvival out;
    out.replicas = replicas;
    out.t = t_grid;
    out.survival.resize(t_grid.size());
    out.sigma.resize(t_grid.size());
    for (double l : last)
        if (l < 0.0) ++out.empty_forests;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        std::int64_t n = 0;
        for (double l : last)
            if (l > t_grid[i]) ++n;
        const double p = static_cast<double>(n) / replicas;
        out.survival[i] = p;
        out.sigma[i] = binomial_sigma(p, static_cast<std::size_t>(replicas));
    }
    return out;
}

MeanFieldReport mean_field_check(const SimConfig& cfg, double burn_in,
                                 int replicas,
                                 const std::vector<double>& s_grid,
                                 CanonicalNoise noise, int threads) {
    if (!(burn_in >= 0.0) || !(cfg.horizon > burn_in))
        throw std::invalid_argument("mean_field_check: need horizon > burn_in >= 0");
    if (replicas <= 0)
        throw std::invalid_argument("mean_field_check: replicas must be > 0");
    const double sample_dt = 1.0;
    const std::size_t ns = s_grid.size();

    // Per-replica time averages.
    std::vector<std::vector<double>> g_mean(replicas,
                                            std::vector<double>(ns, 0.0));
    std::vector<double> lam_mean(replicas, 0.0);
    std::vector<double> lam_first_half(replicas, 0.0);
    std::vector<double> lam_second_half(replicas, 0.0);

    parallel_for_index(
        static_cast<std::size_t>(replicas), threads, [&](std::size_t r) {
            CanonicalNoise rn{noise.seed, noise.stream + r};
            const EventStream ev = simulate_thinning(cfg, rn);
            ImpulseState st(cfg.g0, cfg.kernel);
            std::size_t next_ev = 0;
            std::int64_t count = 0, count1 = 0, count2 = 0;
            const double mid = burn_in + 0.5 * (cfg.horizon - burn_in);
            for (double t = burn_in; t <= cfg.horizon; t += sample_dt) {
                while (next_ev < ev.size() && ev[next_ev].time <= t) {
                    const double et = ev[next_ev].time;
                    if (et > st.now()) st.advance(et - st.now());
                    st.jump();
                    ++next_ev;
                }
                if (t > st.now()) st.advance(t - st.now());
                const double z = st.evaluate(0.0);
                const double lam = cfg.intensity.rate(z, t);
                lam_mean[r] += lam;
                ++count;
                if (t < mid) {
                    lam_first_half[r] += lam;
                    ++count1;
                } else {
                    lam_second_half[r] += lam;
                    ++count2;
                }
                for (std::size_t si = 0; si < ns; ++si)
                    g_mean[r][si] += st.evaluate(s_grid[si]);
            }
            lam_mean[r] /= count;
            if (count1 > 0) lam_first_half[r] /= count1;
            if (count2 > 0) lam_second_half[r] /= count2;
            for (std::size_t si = 0; si < ns; ++si) g_mean[r][si] /= count;
        });

    MeanFieldReport rep;
    rep.s = s_grid;
    rep.stationary_rate = mean_of(lam_mean);
    const double lam_se =
        std::sqrt(variance_of(lam_mean) / static_cast<double>(replicas));
    const double drift =
        std::abs(mean_of(lam_second_half) - mean_of(lam_first_half));
    const double drift_se = std::sqrt(
        (variance_of(lam_first_half) + variance_of(lam_second_half)) /
        static_cast<double>(replicas));
    rep.drift_flag = drift > 3.0 * std::max(drift_se, 1e-12) + 3.0 * lam_se;

    rep.e_g.resize(ns);
    rep.e_lam_H.resize(ns);
    rep.rel_err.resize(ns);
    rep.diff_sigma.resize(ns);
    for (std::size_t si = 0; si < ns; ++si) {
        const double H = cfg.kernel.tail_integral(s_grid[si]);
        std::vector<double> per_rep_g(replicas), per_rep_diff(replicas);
        for (int r = 0; r < replicas; ++r) {
            per_rep_g[r] = g_mean[r][si];
            per_rep_diff[r] = g_mean[r][si] - lam_mean[r] * H;
        }
        rep.e_g[si] = mean_of(per_rep_g);
        rep.e_lam_H[si] = rep.stationary_rate * H;
        const double denom = std::max(std::abs(rep.e_lam_H[si]), 1e-12);
        rep.rel_err[si] = std::abs(rep.e_g[si] - rep.e_lam_H[si]) / denom;
        rep.diff_sigma[si] = std::sqrt(variance_of(per_rep_diff) /
                                       static_cast<double>(replicas));
        rep.max_rel_err = std::max(rep.max_rel_err, rep.rel_err[si]);
    }
    return rep;
}

std::vector<double> stationary_z_samples(const SimConfig& cfg, double burn_in,
                                         double sample_dt, int replicas,
                                         CanonicalNoise noise, int threads) {
    if (!(sample_dt > 0.0))
        throw std::invalid_argument("stationary_z_samples: sample_dt must be > 0");
    std::vector<std::vector<double>> per_rep(replicas);
    parallel_for_index(
        static_cast<std::size_t>(replicas), threads, [&](std::size_t r) {
            CanonicalNoise rn{noise.seed, noise.stream + r};
            const EventStream ev = simulate_thinning(cfg, rn);
            ImpulseState st(cfg.g0, cfg.kernel);
            std::size_t next_ev = 0;
            for (double t = burn_in; t <= cfg.horizon; t += sample_dt) {
                while (next_ev < ev.size() && ev[next_ev].time <= t) {
                    const double et = ev[next_ev].time;
                    if (et > st.now()) st.advance(et - st.now());
                    st.jump();
                    ++next_ev;
                }
                if (t > st.now()) st.advance(t - st.now());
                per_rep[r].push_back(st.evaluate(0.0));
            }
        });
    std::vector<double> all;
    for (const auto& v : per_rep) all.insert(all.end(), v.begin(), v.end());
    return all;
}

TailReport tail_estimate(const std::vector<double>& z_samples,
                         const IntensityFn& lambda, const Kernel& k) {
    if (z_samples.size() < 16)
        throw std::invalid_argument("tail_estimate: too few samples");
    TailReport rep;
    std::vector<double> z = z_samples;
    std::sort(z.begin(), z.end());
    const std::size_t n = z.size();

    // Slope of log nu[z, inf) over the upper decade [q90, q999].
    {
        std::vector<double> xs, ys;
        const std::size_t lo = static_cast<std::size_t>(0.90 * n);
        const std::size_t hi =
            std::min(n - 1, static_cast<std::size_t>(0.999 * n));
        for (std::size_t i = lo; i <= hi; ++i) {
            const double surv =
                static_cast<double>(n - i) / static_cast<double>(n);
            xs.push_back(z[i]);
            ys.push_back(std::log(surv));
        }
        const double mx = mean_of(xs), my = mean_of(ys);
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
        }
        rep.fitted_slope = sxx > 0.0 ? -sxy / sxx : 0.0;
        rep.tail_samples = n - lo;
        rep.low_power = rep.tail_samples < 100;
    }

    // Histogram density (mass normalized to 1).
    {
        const double q25 = z[static_cast<std::size_t>(0.25 * n)];
        const double q75 = z[static_cast<std::size_t>(0.75 * n)];
        double width = 2.0 * (q75 - q25) * std::pow(n, -1.0 / 3.0);
        if (!(width > 0.0)) width = (z.back() - z.front()) / 32.0 + 1e-12;
        const double zmin = z.front();
        const std::size_t bins = std::max<std::size_t>(
            4, static_cast<std::size_t>((z.back() - zmin) / width) + 1);
        std::vector<double> counts(bins, 0.0);
        for (double v : z) {
            std::size_t b = static_cast<std::size_t>((v - zmin) / width);
            if (b >= bins) b = bins - 1;
            counts[b] += 1.0;
        }
        rep.bin_width = width;
        for (std::size_t b = 0; b < bins; ++b) {
            rep.hist_center.push_back(zmin + (b + 0.5) * width);
            rep.hist_density.push_back(counts[b] / (n * width));
        }
    }

    // Minimal feasible c' in psi(z) <= c' lambda(z) nu[z + h(0), inf).
    {
        const double h0 = k.eval(0.0);
        double cmax = 0.0;
        for (std::size_t b = 0; b < rep.hist_center.size(); ++b) {
            const double zc = std::max(rep.hist_center[b], 0.0);
            const double psi = rep.hist_density[b];
            if (psi <= 0.0) continue;
            const double threshold = zc + h0;
            const std::size_t idx = static_cast<std::size_t>(
                std::lower_bound(z.begin(), z.end(), threshold) - z.begin());
            const double tail =
                static_cast<double>(n - idx) / static_cast<double>(n);
            if (tail * n < 20.0) continue;  // too little mass to calibrate
            const double lam = lambda.value(zc);
            if (lam > 0.0 && tail > 0.0)
                cmax = std::max(cmax, psi / (lam * tail));
        }
        rep.c_prime = cmax;
    }

    // Plug-in MGF at half the fitted slope.
    {
        const double th = 0.5 * std::max(rep.fitted_slope, 0.0);
        double acc = 0.0;
        for (double v : z) acc += std::exp(th * v);
        rep.mgf_at_half_slope = acc / static_cast<double>(n);
    }
    return rep;
}

}  // namespace hawkes
