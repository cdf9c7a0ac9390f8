#include "hawkes/multitype.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace hawkes {

void MultiTypeModel::validate() const {
    if (d < 1) throw std::invalid_argument("multitype: d must be >= 1");
    const std::size_t dd = static_cast<std::size_t>(d);
    if (kernels.size() != dd || initial.size() != dd ||
        rate_map.size() != dd || weights.size() != dd)
        throw std::invalid_argument("multitype: blocks must all have d rows");
    for (const auto& row : kernels)
        if (row.size() != dd)
            throw std::invalid_argument("multitype: kernels must be d x d");
    for (const auto& row : initial)
        if (row.size() != dd)
            throw std::invalid_argument("multitype: initial must be d x d");
    for (const auto& we : weights) {
        if (we.size() != dd)
            throw std::invalid_argument("multitype: weights must be d x d per type");
        for (const auto& row : we) {
            if (row.size() != dd)
                throw std::invalid_argument("multitype: weights must be d x d per type");
            for (double v : row)
                if (v < 0.0 || !std::isfinite(v))
                    throw std::invalid_argument(
                        "multitype: weights must be finite and >= 0");
        }
    }
    if (paper_normalization) {
        for (const auto& row : kernels)
            for (const auto& k : row) {
                const double want = 1.0 / d;
                if (std::abs(k.total_mass() - want) > 1e-8)
                    throw std::invalid_argument(
                        "multitype: ||h_ij|| must equal 1/d under the "
                        "normalization flag");
            }
    }
}

double MultiTypeModel::envelope_k(int e, int i, int j) const {
    return rate_map[e].envelope().B * weights[e][i][j];
}

TypedThinningState MultiTypeModel::make_state() const {
    validate();
    std::vector<std::vector<ExcitationCell>> cells;
    for (int i = 0; i < d; ++i) {
        std::vector<ExcitationCell> row;
        for (int j = 0; j < d; ++j)
            row.emplace_back(kernels[i][j], initial[i][j]);
        cells.push_back(std::move(row));
    }
    return TypedThinningState(std::move(cells), rate_map, weights);
}

MultiTypeModel affine_multitype(
    std::vector<std::vector<Kernel>> kernels,
    std::vector<std::vector<InitialCondition>> initial, std::vector<double> c,
    std::vector<std::vector<std::vector<double>>> k, bool paper_normalization) {
    MultiTypeModel m;
    m.d = static_cast<int>(c.size());
    m.kernels = std::move(kernels);
    m.initial = std::move(initial);
    for (double ce : c) m.rate_map.push_back(IntensityFn::linear(ce, 1.0));
    m.weights = std::move(k);
    m.paper_normalization = paper_normalization;
    m.validate();
    return m;
}

double typed_rate(const MultiTypeModel& model, const TypedThinningState& state,
                  int e, double t) {
    if (e < 0 || e >= model.d)
        throw std::invalid_argument("typed_rate: type out of range");
    return state.rate(e, t);
}

namespace {

double max_row_sum(const std::vector<std::vector<double>>& m) {
    double best = 0.0;
    for (const auto& row : m) {
        double s = 0.0;
        for (double v : row) s += v;
        best = std::max(best, s);
    }
    return best;
}

double max_diag(const std::vector<std::vector<double>>& m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) best = std::max(best, m[i][i]);
    return best;
}

// Power iteration for the Perron root of a non-negative matrix; returns
// false on non-convergence. Iterating the unit-shifted matrix keeps cyclic
// spectra from oscillating.
bool power_iteration(const std::vector<std::vector<double>>& m, double shift,
                     std::vector<double> x, double tol, int cap,
                     double* out_radius) {
    const std::size_t n = m.size();
    double prev = -1.0;
    for (int it = 0; it < cap; ++it) {
        std::vector<double> y(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) y[i] += m[i][j] * x[j];
            y[i] += shift * x[i];
        }
        double norm = 0.0;
        for (double v : y) norm = std::max(norm, std::abs(v));
        if (norm == 0.0) {
            *out_radius = -shift;  // zero matrix
            return true;
        }
        for (double& v : y) v /= norm;
        if (std::abs(norm - prev) < tol) {
            *out_radius = norm - shift;
            return true;
        }
        prev = norm;
        x = std::move(y);
    }
    return false;
}

}  // namespace

StabilityReport stability_matrix(const MultiTypeModel& model) {
    model.validate();
    StabilityReport rep;
    const std::size_t d = static_cast<std::size_t>(model.d);
    rep.m.assign(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t e = 0; e < d; ++e) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                s += model.envelope_k(static_cast<int>(e), static_cast<int>(i),
                                      static_cast<int>(j));
            rep.m[i][e] = s;
        }

    const double tol = 1e-12;
    std::vector<double> start(d, 1.0);
    double radius = 0.0;
    bool ok = power_iteration(rep.m, 0.0, start, tol, 20000, &radius);
    if (!ok) {
        // randomized restart for cyclic / defective cases
        std::mt19937_64 rng(0x57AB1E);
        for (int attempt = 0; attempt < 3 && !ok; ++attempt) {
            for (auto& v : start)
                v = 0.5 + static_cast<double>(rng() >> 11) * 0x1.0p-53;
            ok = power_iteration(rep.m, 0.0, start, tol, 20000, &radius);
        }
    }
    if (!ok) {
        std::vector<double> ones(d, 1.0);
        ok = power_iteration(rep.m, 1.0, ones, tol, 200000, &radius);
    }
    if (ok) {
        rep.radius = radius;
        rep.method = "power-iteration";
    } else {
        rep.radius = max_row_sum(rep.m);
        rep.method = "gershgorin (bounded-only)";
    }
    // Sanity rails for a non-negative matrix.
    if (rep.radius < max_diag(rep.m) - 1e-9 ||
        rep.radius > max_row_sum(rep.m) + 1e-9)
        throw std::runtime_error("stability: spectral radius outside [max diag, max row sum]");
    rep.stable = rep.radius < 1.0;
    return rep;
}

EventStream simulate_multitype(const MultiTypeModel& model, double horizon,
                               CanonicalNoise noise, std::uint64_t max_events,
                               bool override_stability) {
    const StabilityReport stab = stability_matrix(model);
    if (!stab.stable && !override_stability)
        throw std::invalid_argument(
            "simulate_multitype: spectral radius " +
            std::to_string(stab.radius) +
            " >= 1; pass override_stability to force");
    TypedThinningState state = model.make_state();
    return run_thinning(state, 0.0, horizon, max_events, noise);
}

nlohmann::json MultiTypeModel::to_json() const {
    nlohmann::json j;
    j["d"] = d;
    nlohmann::json ks = nlohmann::json::array();
    for (const auto& row : kernels) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& k : row) r.push_back(k.to_json());
        ks.push_back(r);
    }
    j["kernels"] = ks;
    nlohmann::json is = nlohmann::json::array();
    for (const auto& row : initial) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& g : row) r.push_back(g.to_json());
        is.push_back(r);
    }
    j["init"] = is;
    nlohmann::json ls = nlohmann::json::array();
    for (const auto& f : rate_map) ls.push_back(f.to_json());
    j["lambdas"] = ls;
    j["weights"] = weights;
    j["paper_normalization"] = paper_normalization;
    return j;
}

MultiTypeModel MultiTypeModel::from_json(const nlohmann::json& j) {
    MultiTypeModel m;
    m.d = j.at("d").get<int>();
    for (const auto& row : j.at("kernels")) {
        std::vector<Kernel> r;
        for (const auto& kj : row) r.push_back(Kernel::from_json(kj));
        m.kernels.push_back(std::move(r));
    }
    for (const auto& row : j.at("init")) {
        std::vector<InitialCondition> r;
        for (const auto& gj : row) r.push_back(InitialCondition::from_json(gj));
        m.initial.push_back(std::move(r));
    }
    for (const auto& fj : j.at("lambdas"))
        m.rate_map.push_back(IntensityFn::from_json(fj));
    m.weights =
        j.at("weights").get<std::vector<std::vector<std::vector<double>>>>();
    m.paper_normalization = j.value("paper_normalization", false);
    m.validate();
    return m;
}

}  // namespace hawkes
