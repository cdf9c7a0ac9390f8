#include "hawkes/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hawkes/intensity.hpp"
#include "hawkes/quad.hpp"

namespace hawkes {

InitialCondition InitialCondition::zero() { return InitialCondition(); }

InitialCondition InitialCondition::from_kernel(Kernel k) {
    InitialCondition g;
    g.kind_ = Kind::KernelShaped;
    g.kernel_ = std::move(k);
    return g;
}

InitialCondition InitialCondition::from_prehistory(Kernel k,
                                                   std::vector<double> past) {
    for (double tau : past)
        if (!(tau < 0.0))
            throw std::invalid_argument("pre-history points must be < 0");
    std::sort(past.begin(), past.end());
    InitialCondition g;
    g.kind_ = Kind::PreHistory;
    g.kernel_ = std::move(k);
    g.past_ = std::move(past);
    return g;
}

InitialCondition InitialCondition::sum(std::vector<InitialCondition> parts) {
    InitialCondition g;
    g.kind_ = Kind::Sum;
    g.parts_ = std::move(parts);
    return g;
}

double InitialCondition::value(double t) const {
    if (t < 0.0) throw std::domain_error("initial condition: t must be >= 0");
    switch (kind_) {
        case Kind::Zero:
            return 0.0;
        case Kind::KernelShaped:
            return kernel_.eval(t);
        case Kind::PreHistory: {
            double s = 0.0;
            for (double tau : past_) s += kernel_.eval(t - tau);
            return s;
        }
        case Kind::Sum: {
            double s = 0.0;
            for (const auto& p : parts_) s += p.value(t);
            return s;
        }
    }
    return 0.0;
}

bool InitialCondition::non_increasing() const {
    switch (kind_) {
        case Kind::Zero:
            return true;
        case Kind::KernelShaped:
        case Kind::PreHistory:
            return kernel_.non_increasing();
        case Kind::Sum:
            for (const auto& p : parts_)
                if (!p.non_increasing()) return false;
            return true;
    }
    return false;
}

double InitialCondition::sup_on(double a, double b) const {
    if (kind_ == Kind::Zero) return 0.0;
    if (non_increasing()) return value(a);
    double m = 0.0;
    const int n = 2048;
    for (int i = 0; i <= n; ++i)
        m = std::max(m, value(a + (b - a) * i / n));
    return m;
}

double InitialCondition::integral_phi(const Modulus& phi) const {
    return integral_phi_tail(phi, 0.0);
}

double InitialCondition::integral_phi_tail(const Modulus& phi,
                                           double from) const {
    if (kind_ == Kind::Zero) return 0.0;
    const auto res = integrate_to_infinity(
        [&](double t) { return phi.value(value(t)); }, from);
    if (res.diverged) return std::numeric_limits<double>::infinity();
    return res.value;
}

nlohmann::json InitialCondition::to_json() const {
    nlohmann::json j;
    switch (kind_) {
        case Kind::Zero:
            j["kind"] = "zero";
            break;
        case Kind::KernelShaped:
            j["kind"] = "kernel";
            j["kernel"] = kernel_.to_json();
            break;
        case Kind::PreHistory:
            j["kind"] = "prehistory";
            j["kernel"] = kernel_.to_json();
            j["points"] = past_;
            break;
        case Kind::Sum: {
            j["kind"] = "sum";
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& p : parts_) arr.push_back(p.to_json());
            j["parts"] = arr;
            break;
        }
    }
    return j;
}

InitialCondition InitialCondition::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return zero();
    if (kind == "kernel") return from_kernel(Kernel::from_json(j.at("kernel")));
    if (kind == "prehistory")
        return from_prehistory(Kernel::from_json(j.at("kernel")),
                               j.at("points").get<std::vector<double>>());
    if (kind == "sum") {
        std::vector<InitialCondition> parts;
        for (const auto& pj : j.at("parts")) parts.push_back(from_json(pj));
        return sum(std::move(parts));
    }
    throw std::invalid_argument("unknown initial-condition kind: " + kind);
}

std::vector<double> EventStream::times() const {
    std::vector<double> t;
    t.reserve(events.size());
    for (const auto& e : events) t.push_back(e.time);
    return t;
}

void EventStream::validate() const {
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (i > 0 && !(events[i - 1].time < e.time))
            throw std::runtime_error("event stream: times must strictly increase");
        if (e.parent >= 0) {
            if (static_cast<std::size_t>(e.parent) >= i)
                throw std::runtime_error("event stream: parent must precede child");
            const auto& p = events[static_cast<std::size_t>(e.parent)];
            if (p.generation >= 0 && e.generation >= 0 &&
                e.generation != p.generation + 1)
                throw std::runtime_error("event stream: generation mismatch");
        }
    }
}

bool EventStream::has_marks() const {
    for (const auto& e : events)
        if (e.parent != kParentUnset) return true;
    return false;
}

Discrepancy discrepancy_after(const EventStream& a, const EventStream& b,
                              double T) {
    Discrepancy d;
    double last = -std::numeric_limits<double>::infinity();
    std::size_t i = 0, j = 0;
    auto take = [&](double t) {
        if (t > T) {
            ++d.delta_count;
            last = std::max(last, t);
        }
    };
    while (i < a.size() || j < b.size()) {
        if (i < a.size() && j < b.size() && a[i].time == b[j].time) {
            ++i;
            ++j;
        } else if (j >= b.size() || (i < a.size() && a[i].time < b[j].time)) {
            take(a[i].time);
            ++i;
        } else {
            take(b[j].time);
            ++j;
        }
    }
    if (d.delta_count > 0) d.last = last;
    return d;
}

ImpulseState::ImpulseState(InitialCondition g0, Kernel kernel, double t0)
    : g0_(std::move(g0)), kernel_(std::move(kernel)), now_(t0) {
    if (t0 < 0.0) throw std::invalid_argument("impulse state: t0 must be >= 0");
    if (kernel_.family() == KernelFamily::Exponential) {
        exp_fast_ = true;
        beta_ = kernel_.param("beta");
        coeff_ = kernel_.scale() * beta_;
    }
}

double ImpulseState::evaluate(double s) const {
    if (s < 0.0) throw std::domain_error("impulse state: s must be >= 0");
    if (exp_fast_)
        return g0_.value(now_ + s) + coeff_ * std::exp(-beta_ * s) * accum_;
    return evaluate_direct(s);
}

double ImpulseState::evaluate_direct(double s) const {
    if (s < 0.0) throw std::domain_error("impulse state: s must be >= 0");
    double sum = g0_.value(now_ + s);
    for (double tau : events_) sum += kernel_.eval(now_ + s - tau);
    return sum;
}

void ImpulseState::advance(double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("advance: delta must be > 0");
    now_ += delta;
    if (exp_fast_) accum_ *= std::exp(-beta_ * delta);
}

void ImpulseState::jump() {
    if (!events_.empty() && events_.back() == now_ &&
        !std::isfinite(kernel_.eval(0.0)))
        throw std::runtime_error("jump: repeated time needs a kernel bounded at 0");
    events_.push_back(now_);
    if (exp_fast_) accum_ += 1.0;
}

nlohmann::json ImpulseState::snapshot() const {
    nlohmann::json j;
    j["base"] = g0_.to_json();
    j["kernel"] = kernel_.to_json();
    j["events"] = events_;
    j["now"] = now_;
    return j;
}

ImpulseState ImpulseState::restore(const nlohmann::json& j) {
    ImpulseState st(InitialCondition::from_json(j.at("base")),
                    Kernel::from_json(j.at("kernel")));
    st.now_ = j.at("now").get<double>();
    for (double tau : j.at("events").get<std::vector<double>>()) {
        if (tau > st.now_)
            throw std::invalid_argument("snapshot: event after `now`");
        st.events_.push_back(tau);
        if (st.exp_fast_) st.accum_ += std::exp(-st.beta_ * (st.now_ - tau));
    }
    return st;
}

MetricResult metric_dX(const std::function<double(double)>& g,
                       const std::function<double(double)>& f, int n_max) {
    MetricResult out;
    double weight = 1.0;
    double In = 0.0;
    const int sub = 64;  // fixed grid per unit interval
    for (int n = 1; n <= n_max; ++n) {
        // composite trapezoid of |g - f| on [n-1, n]
        double acc = 0.0;
        const double a = n - 1.0;
        const double h = 1.0 / sub;
        double prev = std::abs(g(a) - f(a));
        for (int i = 1; i <= sub; ++i) {
            const double x = a + h * i;
            const double cur = std::abs(g(x) - f(x));
            acc += 0.5 * (prev + cur) * h;
            prev = cur;
        }
        In += acc;
        weight *= 0.5;
        out.value += weight * In / (1.0 + In);
    }
    out.remainder_bound = weight;  // sum of remaining 2^-n terms
    return out;
}

}  // namespace hawkes
