#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace hawkes {

// Non-negative function sampled on the uniform grid {0, step, 2*step, ...},
// zero beyond the last node.
struct GridFunction {
    double step = 0.0;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(double step_, std::vector<double> values_);
    static GridFunction sample(const std::function<double(double)>& f,
                               double step, std::size_t len);

    std::size_t size() const { return values.size(); }
    double t_max() const { return step * (values.empty() ? 0 : values.size() - 1); }
    double at(std::size_t i) const { return values[i]; }
    double mass() const;                  // trapezoid over the grid
    double tail_mass(double t) const;     // trapezoid over [t, t_max]
    double value(double t) const;         // linear interpolation, 0 beyond
};

// Purely atomic measure on the lattice {0, step, 2*step, ...}. Used for the
// resolvent series: the lattice convolution of two atom vectors is exact, so
// mass identities hold to roundoff.
struct LatticeMeasure {
    double step = 0.0;
    std::vector<double> atom;

    double total() const;
    double tail_after(double t) const;  // sum of atoms at positions > t
    LatticeMeasure convolve(const LatticeMeasure& other) const;
};

// Cell mass of [k*step, (k+1)*step) placed on the right edge (k+1)*step,
// so lattice lags stochastically dominate the continuum ones.
LatticeMeasure to_lattice(const GridFunction& f);

}  // namespace hawkes
