#include "hawkes/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hawkes {

GridFunction::GridFunction(double step_, std::vector<double> values_)
    : step(step_), values(std::move(values_)) {
    if (!(step > 0.0)) throw std::invalid_argument("grid function: step must be > 0");
    for (double v : values)
        if (v < 0.0 || !std::isfinite(v))
            throw std::invalid_argument("grid function: values must be finite and >= 0");
}

GridFunction GridFunction::sample(const std::function<double(double)>& f,
                                  double step, std::size_t len) {
    std::vector<double> v(len);
    for (std::size_t i = 0; i < len; ++i) v[i] = f(step * static_cast<double>(i));
    return GridFunction(step, std::move(v));
}

double GridFunction::mass() const {
    if (values.size() < 2) return 0.0;
    double acc = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) acc += values[i];
    return acc * step;
}

double GridFunction::tail_mass(double t) const {
    if (values.size() < 2) return 0.0;
    if (t <= 0.0) return mass();
    if (t >= t_max()) return 0.0;
    const std::size_t k = static_cast<std::size_t>(std::ceil(t / step));
    double acc = 0.5 * (values[k] + values.back());
    for (std::size_t i = k + 1; i + 1 < values.size(); ++i) acc += values[i];
    acc *= step;
    // partial cell [t, k*step]
    const double tk = step * static_cast<double>(k);
    if (tk > t) {
        const double vt = value(t);
        acc += 0.5 * (vt + values[k]) * (tk - t);
    }
    return acc;
}

double GridFunction::value(double t) const {
    if (t < 0.0 || t > t_max() || values.empty()) return 0.0;
    const double x = t / step;
    const std::size_t i = std::min(static_cast<std::size_t>(x), values.size() - 2);
    const double w = x - static_cast<double>(i);
    return values[i] + w * (values[i + 1] - values[i]);
}

double LatticeMeasure::total() const {
    double acc = 0.0;
    for (double a : atom) acc += a;
    return acc;
}

double LatticeMeasure::tail_after(double t) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < atom.size(); ++k)
        if (step * static_cast<double>(k) > t) acc += atom[k];
    return acc;
}

LatticeMeasure LatticeMeasure::convolve(const LatticeMeasure& other) const {
    if (step != other.step)
        throw std::invalid_argument("lattice convolution: step mismatch");
    LatticeMeasure out;
    out.step = step;
    out.atom.assign(atom.size(), 0.0);
    const std::size_t n = atom.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (atom[i] == 0.0) continue;
        const std::size_t jmax = std::min(other.atom.size(), n - i);
        for (std::size_t j = 0; j < jmax; ++j)
            out.atom[i + j] += atom[i] * other.atom[j];
    }
    return out;
}

LatticeMeasure to_lattice(const GridFunction& f) {
    LatticeMeasure m;
    m.step = f.step;
    m.atom.assign(f.size(), 0.0);
    for (std::size_t k = 0; k + 1 < f.size(); ++k)
        m.atom[k + 1] = 0.5 * (f.values[k] + f.values[k + 1]) * f.step;
    return m;
}

}  // namespace hawkes
