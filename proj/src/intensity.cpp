#include "hawkes/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hawkes/quad.hpp"
#include "hawkes/state.hpp"

namespace hawkes {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Geometric grid on [1e-6, hi] plus 0.
std::vector<double> geometric_grid(double hi, int n = 1000) {
    std::vector<double> g;
    g.push_back(0.0);
    const double lo = 1e-6;
    for (int i = 0; i < n; ++i)
        g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    return g;
}
}  // namespace

Modulator Modulator::constant(double c) {
    if (c < 0.0) throw std::invalid_argument("modulator: constant must be >= 0");
    Modulator m;
    m.constant_ = true;
    m.offset_ = c;
    return m;
}

Modulator Modulator::sinusoid(double offset, double amplitude, double period,
                              double phase) {
    if (amplitude < 0.0 || offset < amplitude)
        throw std::invalid_argument("modulator: need offset >= amplitude >= 0");
    if (!(period > 0.0)) throw std::invalid_argument("modulator: period must be > 0");
    Modulator m;
    m.constant_ = false;
    m.offset_ = offset;
    m.amplitude_ = amplitude;
    m.period_ = period;
    m.phase_ = phase;
    return m;
}

double Modulator::value(double t) const {
    if (constant_) return offset_;
    return offset_ +
           amplitude_ * std::sin(2.0 * std::numbers::pi * t / period_ + phase_);
}

nlohmann::json Modulator::to_json() const {
    if (constant_) return {{"kind", "constant"}, {"value", offset_}};
    return {{"kind", "sinusoid"},
            {"offset", offset_},
            {"amplitude", amplitude_},
            {"period", period_},
            {"phase", phase_}};
}

Modulator Modulator::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return constant(j.at("value").get<double>());
    if (kind == "sinusoid")
        return sinusoid(j.at("offset").get<double>(),
                        j.at("amplitude").get<double>(),
                        j.at("period").get<double>(), j.value("phase", 0.0));
    throw std::invalid_argument("unknown modulator kind: " + kind);
}

Modulus Modulus::identity(double L) {
    if (!(L > 0.0)) throw std::invalid_argument("modulus: L must be > 0");
    Modulus m;
    m.kind_ = Kind::Identity;
    m.L_ = L;
    return m;
}

Modulus Modulus::power(double alpha, double c) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("modulus: alpha must be in (0, 1]");
    if (!(c > 0.0)) throw std::invalid_argument("modulus: c must be > 0");
    Modulus m;
    m.kind_ = Kind::Power;
    m.alpha_ = alpha;
    m.c_ = c;
    return m;
}

Modulus Modulus::concave_tabulated(std::vector<double> grid,
                                   std::vector<double> values) {
    if (grid.size() != values.size() || grid.size() < 2)
        throw std::invalid_argument("modulus: need >= 2 nodes");
    if (grid.front() != 0.0 || values.front() != 0.0)
        throw std::invalid_argument("modulus: phi(0) must be 0");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!(grid[i] < grid[i + 1]))
            throw std::invalid_argument("modulus: grid must increase");
        if (values[i + 1] < values[i])
            throw std::invalid_argument("modulus: phi must be non-decreasing");
    }
    // concavity via slopes of consecutive chords
    for (std::size_t i = 0; i + 2 < grid.size(); ++i) {
        const double s0 = (values[i + 1] - values[i]) / (grid[i + 1] - grid[i]);
        const double s1 =
            (values[i + 2] - values[i + 1]) / (grid[i + 2] - grid[i + 1]);
        if (s1 > s0 + 1e-12)
            throw std::invalid_argument("modulus: tabulated phi is not concave");
    }
    Modulus m;
    m.kind_ = Kind::Tabulated;
    m.grid_ = std::move(grid);
    m.values_ = std::move(values);
    return m;
}

double Modulus::value(double s) const {
    if (s < 0.0) throw std::domain_error("modulus: s must be >= 0");
    switch (kind_) {
        case Kind::Identity:
            return L_ * s;
        case Kind::Power:
            return c_ * std::pow(s, alpha_);
        case Kind::Tabulated: {
            if (s >= grid_.back()) {
                // continue with the final chord slope (keeps concavity)
                const std::size_t n = grid_.size();
                const double slope = (values_[n - 1] - values_[n - 2]) /
                                     (grid_[n - 1] - grid_[n - 2]);
                return values_.back() + slope * (s - grid_.back());
            }
            const auto it = std::upper_bound(grid_.begin(), grid_.end(), s);
            const std::size_t i =
                it == grid_.begin() ? 0 : static_cast<std::size_t>(it - grid_.begin()) - 1;
            const double w = (s - grid_[i]) / (grid_[i + 1] - grid_[i]);
            return values_[i] + w * (values_[i + 1] - values_[i]);
        }
    }
    return 0.0;
}

nlohmann::json Modulus::to_json() const {
    switch (kind_) {
        case Kind::Identity:
            return {{"family", "identity"}, {"params", {{"L", L_}}}};
        case Kind::Power:
            return {{"family", "power"},
                    {"params", {{"alpha", alpha_}, {"c", c_}}}};
        case Kind::Tabulated:
            return {{"family", "tabulated"},
                    {"params", {{"grid", grid_}, {"values", values_}}}};
    }
    return {};
}

Modulus Modulus::from_json(const nlohmann::json& j) {
    const std::string fam = j.at("family").get<std::string>();
    const auto& p = j.at("params");
    if (fam == "identity") return identity(p.at("L").get<double>());
    if (fam == "power")
        return power(p.at("alpha").get<double>(), p.at("c").get<double>());
    if (fam == "tabulated")
        return concave_tabulated(p.at("grid").get<std::vector<double>>(),
                                 p.at("values").get<std::vector<double>>());
    throw std::invalid_argument("unknown modulus family: " + fam);
}

IntensityFn IntensityFn::linear(double A, double B) {
    if (A < 0.0 || B < 0.0)
        throw std::invalid_argument("linear intensity: A, B must be >= 0");
    IntensityFn f;
    f.family_ = IntensityFamily::Linear;
    f.A_ = A;
    f.B_ = B;
    f.env_ = {A, B};
    return f;
}

IntensityFn IntensityFn::sqrt_cap(double base, double slope, double cap,
                                  std::optional<Envelope> env) {
    if (base < 0.0 || slope < 0.0 || cap < 0.0)
        throw std::invalid_argument("sqrt intensity: parameters must be >= 0");
    IntensityFn f;
    f.family_ = IntensityFamily::SqrtCap;
    f.base_ = base;
    f.slope_ = slope;
    f.cap_ = cap;
    if (env) {
        f.env_ = *env;
    } else if (std::isfinite(cap)) {
        f.env_ = {base + slope * std::sqrt(cap), 0.0};
    } else {
        // slope*sqrt(z) <= slope^2/4 + z
        f.env_ = {base + 0.25 * slope * slope, 1.0};
    }
    f.certify_envelope();
    return f;
}

IntensityFn IntensityFn::piecewise_step(std::vector<double> jumps,
                                        std::vector<double> levels) {
    if (jumps.size() + 1 != levels.size() || levels.empty())
        throw std::invalid_argument("step intensity: need n jumps for n+1 levels");
    for (std::size_t i = 0; i + 1 < jumps.size(); ++i)
        if (!(jumps[i] < jumps[i + 1]))
            throw std::invalid_argument("step intensity: jumps must increase");
    for (std::size_t i = 0; i + 1 < levels.size(); ++i)
        if (levels[i] > levels[i + 1])
            throw std::invalid_argument("step intensity: levels must be non-decreasing");
    if (!jumps.empty() && jumps.front() <= 0.0)
        throw std::invalid_argument("step intensity: jumps must be > 0");
    for (double v : levels)
        if (v < 0.0) throw std::invalid_argument("step intensity: levels must be >= 0");
    IntensityFn f;
    f.family_ = IntensityFamily::PiecewiseStep;
    f.jumps_ = std::move(jumps);
    f.levels_ = std::move(levels);
    f.env_ = {f.levels_.back(), 0.0};
    return f;
}

IntensityFn IntensityFn::custom_tabulated(std::vector<double> grid,
                                          std::vector<double> values,
                                          Envelope env) {
    if (grid.size() != values.size() || grid.size() < 2)
        throw std::invalid_argument("tabulated intensity: need >= 2 nodes");
    if (grid.front() != 0.0)
        throw std::invalid_argument("tabulated intensity: grid must start at 0");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!(grid[i] < grid[i + 1]))
            throw std::invalid_argument("tabulated intensity: grid must increase");
        if (values[i + 1] < values[i])
            throw std::invalid_argument("tabulated intensity: values must be non-decreasing");
    }
    for (double v : values)
        if (v < 0.0)
            throw std::invalid_argument("tabulated intensity: values must be >= 0");
    IntensityFn f;
    f.family_ = IntensityFamily::CustomTabulated;
    f.grid_ = std::move(grid);
    f.values_ = std::move(values);
    f.env_ = env;
    f.certify_envelope();
    return f;
}

void IntensityFn::certify_envelope() const {
    for (double z : geometric_grid(1e6)) {
        const double gap = env_.A + env_.B * z - value(z);
        if (gap < -1e-12)
            throw std::invalid_argument(
                "intensity envelope does not dominate lambda at z=" +
                std::to_string(z));
    }
}

double IntensityFn::value(double z) const {
    if (z < 0.0) throw std::domain_error("intensity: z must be >= 0");
    switch (family_) {
        case IntensityFamily::Linear:
            return A_ + B_ * z;
        case IntensityFamily::SqrtCap:
            return base_ + slope_ * std::sqrt(std::min(z, cap_));
        case IntensityFamily::PiecewiseStep: {
            const auto it = std::upper_bound(jumps_.begin(), jumps_.end(), z);
            return levels_[static_cast<std::size_t>(it - jumps_.begin())];
        }
        case IntensityFamily::CustomTabulated: {
            if (z >= grid_.back()) return values_.back();
            const auto it = std::upper_bound(grid_.begin(), grid_.end(), z);
            const std::size_t i = static_cast<std::size_t>(it - grid_.begin()) - 1;
            const double w = (z - grid_[i]) / (grid_[i + 1] - grid_[i]);
            return values_[i] + w * (values_[i + 1] - values_[i]);
        }
    }
    return 0.0;
}

double IntensityFn::rate(double z, double t) const {
    const double p = p_ ? p_->value(t) : 0.0;
    const double q = q_ ? q_->value(t) : 0.0;
    return value(z + p) + q;
}

bool IntensityFn::monotone() const {
    return true;  // every supported family is non-decreasing by construction
}

double IntensityFn::linear_A() const {
    if (family_ != IntensityFamily::Linear)
        throw std::invalid_argument("intensity is not linear");
    return A_;
}

double IntensityFn::linear_B() const {
    if (family_ != IntensityFamily::Linear)
        throw std::invalid_argument("intensity is not linear");
    return B_;
}

nlohmann::json IntensityFn::to_json() const {
    nlohmann::json j;
    j["envelope"] = {env_.A, env_.B};
    switch (family_) {
        case IntensityFamily::Linear:
            j["family"] = "linear";
            j["params"] = {{"A", A_}, {"B", B_}};
            break;
        case IntensityFamily::SqrtCap:
            j["family"] = "sqrtcap";
            j["params"] = {{"base", base_}, {"slope", slope_}, {"cap", cap_}};
            break;
        case IntensityFamily::PiecewiseStep:
            j["family"] = "piecewisestep";
            j["params"] = {{"jumps", jumps_}, {"levels", levels_}};
            break;
        case IntensityFamily::CustomTabulated:
            j["family"] = "tabulated";
            j["params"] = {{"grid", grid_}, {"values", values_}};
            break;
    }
    if (p_) j["modulator_p"] = p_->to_json();
    if (q_) j["modulator_q"] = q_->to_json();
    return j;
}

IntensityFn IntensityFn::from_json(const nlohmann::json& j) {
    const std::string fam = j.at("family").get<std::string>();
    const auto& p = j.at("params");
    IntensityFn f;
    std::optional<Envelope> env;
    if (j.contains("envelope")) {
        const auto e = j.at("envelope").get<std::vector<double>>();
        if (e.size() != 2)
            throw std::invalid_argument("envelope must be [A, B]");
        env = Envelope{e[0], e[1]};
    }
    if (fam == "linear") {
        f = linear(p.at("A").get<double>(), p.at("B").get<double>());
        if (env) {
            f.env_ = *env;
            f.certify_envelope();
        }
    } else if (fam == "sqrtcap") {
        double cap = kInf;
        if (p.contains("cap") && !p.at("cap").is_null()) {
            cap = p.at("cap").get<double>();
        }
        f = sqrt_cap(p.at("base").get<double>(), p.at("slope").get<double>(),
                     cap, env);
    } else if (fam == "piecewisestep") {
        f = piecewise_step(p.at("jumps").get<std::vector<double>>(),
                           p.at("levels").get<std::vector<double>>());
        if (env) {
            f.env_ = *env;
            f.certify_envelope();
        }
    } else if (fam == "tabulated") {
        if (!env) throw std::invalid_argument("tabulated intensity needs an envelope");
        f = custom_tabulated(p.at("grid").get<std::vector<double>>(),
                             p.at("values").get<std::vector<double>>(), *env);
    } else {
        throw std::invalid_argument("unknown intensity family: " + fam);
    }
    if (j.contains("modulator_p"))
        f.set_modulator_p(Modulator::from_json(j.at("modulator_p")));
    if (j.contains("modulator_q"))
        f.set_modulator_q(Modulator::from_json(j.at("modulator_q")));
    return f;
}

Hyp1Report check_hyp1(const IntensityFn& f) {
    Hyp1Report r;
    const Envelope env = f.envelope();
    r.A = env.A;
    r.B = env.B;
    r.subcritical = env.B < 1.0;
    r.worst_gap = kInf;
    for (double z : geometric_grid(1e6)) {
        r.worst_gap = std::min(r.worst_gap, env.A + env.B * z - f.value(z));
    }
    r.holds = r.worst_gap >= -1e-12;
    switch (f.family()) {
        case IntensityFamily::Linear:
        case IntensityFamily::SqrtCap:
        case IntensityFamily::PiecewiseStep:
            r.verdict = "certified";
            break;
        default:
            r.verdict = "numerical";
            break;
    }
    return r;
}

Hyp2Report check_hyp2(const IntensityFn& f, const Modulus& phi,
                      const Kernel& k) {
    if (!f.monotone())
        throw std::invalid_argument("hypothesis 2 requires a non-decreasing lambda");
    Hyp2Report r;
    // Certified combinations first.
    if (f.family() == IntensityFamily::Linear && phi.is_identity()) {
        r.modulus_valid = f.linear_B() <= phi.lipschitz() + 1e-15;
        r.verdict = "certified";
    } else if (f.family() == IntensityFamily::PiecewiseStep) {
        // any positive level jump breaks sup_x(lambda(x+s)-lambda(x)) <= phi(s)
        // as s -> 0 because phi(0) = 0
        r.modulus_valid = true;
        const auto j = f.to_json();
        const auto levels = j["params"]["levels"].get<std::vector<double>>();
        for (std::size_t i = 0; i + 1 < levels.size(); ++i)
            if (levels[i + 1] > levels[i]) r.modulus_valid = false;
        r.verdict = "certified";
    } else {
        r.modulus_valid = true;
        r.verdict = "numerical";
        for (double s : geometric_grid(1e3, 200)) {
            if (s == 0.0) continue;
            const double bound = phi.value(s);
            for (double x : geometric_grid(1e3, 200)) {
                const double incr = f.value(x + s) - f.value(x);
                if (incr > bound + 1e-9 * std::max(1.0, bound)) {
                    r.modulus_valid = false;
                    break;
                }
            }
            if (!r.modulus_valid) break;
        }
    }
    const auto ci = integrate_to_infinity(
        [&](double s) { return phi.value(k.tail_integral(s)); });
    r.C_finite = !ci.diverged;
    r.C = ci.diverged ? kInf : ci.value;
    return r;
}

namespace {
// H_tilde(t) = int_t^inf phi(h(u)) du, normalized to mass 1.
double phi_h_tail(const Modulus& phi, const Kernel& k, double t) {
    if (phi.is_identity()) return phi.lipschitz() * k.tail_integral(t);
    const auto res = integrate_to_infinity(
        [&](double u) { return phi.value(k.eval(u)); }, t);
    return res.diverged ? kInf : res.value;
}
}  // namespace

Hyp4Report check_hyp4(const IntensityFn& f, const Modulus& phi, const Kernel& k,
                      const InitialCondition& g0) {
    Hyp4Report r;
    const double B = f.envelope().B;
    const double phi_h_mass = phi_h_tail(phi, k, 0.0);
    r.B_tilde = B * phi_h_mass;
    r.subcritical_tilde = r.B_tilde < 1.0;

    // h_tilde as a tabulated kernel: grid out to where the phi(h) tail is lost.
    {
        double t_end = k.support_end();
        if (!std::isfinite(t_end)) {
            t_end = 1.0;
            while (phi_h_tail(phi, k, t_end) > 1e-10 * phi_h_mass && t_end < 1e5)
                t_end *= 2.0;
        }
        const std::size_t nodes = 4096;
        std::vector<double> grid, vals;
        grid.reserve(nodes + 1);
        vals.reserve(nodes + 1);
        for (std::size_t i = 0; i <= nodes; ++i) {
            const double t = t_end * static_cast<double>(i) / nodes;
            grid.push_back(t);
            vals.push_back(r.B_tilde > 0.0
                               ? B * phi.value(k.eval(t)) / r.B_tilde
                               : 0.0);
        }
        r.h_tilde = Kernel::tabulated(std::move(grid), std::move(vals));
    }

    // C4 ladder: ratio of the weighted iterated tails to the plain tail,
    // geometrically spaced t, series truncated once B^n n < 1e-12.
    if (r.subcritical_tilde && r.B_tilde > 0.0 && std::isfinite(phi_h_mass)) {
        double t_max = 16384.0;
        const double support = k.support_end();
        if (std::isfinite(support)) t_max = std::min(t_max, 0.25 * support);
        // keep the denominator representable
        while (t_max > 2.0 && phi_h_tail(phi, k, t_max) < 1e-280 * phi_h_mass)
            t_max *= 0.5;
        const double bt = r.B_tilde;
        for (double t = 1.0; t <= t_max * 1.0000001; t *= std::sqrt(2.0)) {
            const double den = phi_h_tail(phi, k, t) / phi_h_mass;
            if (!(den > 0.0)) break;
            double num = 0.0;
            double w = 1.0;
            for (int n = 1; n < 400; ++n) {
                w *= bt;
                if (w * n < 1e-12) break;
                num += w * n * phi_h_tail(phi, k, t / (2.0 * n)) / phi_h_mass;
            }
            r.ratio_t.push_back(t);
            r.ratio_value.push_back(num / den);
        }
        double last_decade = 0.0, prev_decade = 0.0;
        for (std::size_t i = 0; i < r.ratio_t.size(); ++i) {
            const double t = r.ratio_t[i];
            if (t >= t_max / 10.0)
                last_decade = std::max(last_decade, r.ratio_value[i]);
            else if (t >= t_max / 100.0)
                prev_decade = std::max(prev_decade, r.ratio_value[i]);
        }
        r.C4_estimate = last_decade;
        r.c4_stabilized = prev_decade > 0.0 && std::isfinite(last_decade) &&
                          last_decade <= 1.25 * prev_decade;
    } else if (r.B_tilde == 0.0) {
        r.C4_estimate = 0.0;  // no cascade terms in the ratio
        r.c4_stabilized = true;
    } else {
        r.C4_estimate = kInf;
        r.c4_stabilized = false;
    }

    r.g_tilde_mass = g0.integral_phi(phi);
    r.g_tilde_integrable = std::isfinite(r.g_tilde_mass);
    return r;
}

}  // namespace hawkes
