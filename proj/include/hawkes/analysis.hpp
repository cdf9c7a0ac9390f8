#pragma once

#include <cstdint>
#include <vector>

#include "hawkes/grid_function.hpp"
#include "hawkes/intensity.hpp"
#include "hawkes/kernel.hpp"
#include "hawkes/noise.hpp"
#include "hawkes/samplers.hpp"

namespace hawkes {

struct VolterraSolution {
    GridFunction lambda_t;     // Lambda_theta(t) on the grid
    double lambda_total = 0.0; // A int (e^Lambda - 1)
    bool diverged = false;
    std::size_t diverged_at = 0;
};

// Lambda_theta(t) = theta h(t) + B int_0^t (e^{Lambda_theta(t-s)} - 1) h(s) ds,
// stepped on a uniform grid with within-step fixed-point iteration (1e-12).
VolterraSolution solve_lambda_theta(const Kernel& k, double A, double B,
                                    double theta, double step, std::size_t len);

struct TvBound {
    LatticeMeasure resolvent;        // r = sum B~^n h~*n * g~
    std::vector<double> t;
    std::vector<double> bound;       // B * tail of r beyond t
    double series_total_mass = 0.0;  // lattice mass of r
    int terms_used = 0;
    // tail-ratio diagnostic on the largest decade of the grid
    double tail_ratio = 0.0;
    double tail_g = 0.0, tail_h = 0.0;
};

// Speed-of-convergence bound via the Neumann series of the convolution
// resolvent. Refuses B_tilde >= 1; throws when the t grid exceeds the lattice.
TvBound tv_bound(const GridFunction& g_tilde, const GridFunction& h_tilde,
                 double B_tilde, double B, const std::vector<double>& t_grid);

// Independent route: renewal stepping of r = g + B_tilde (h (*) r).
LatticeMeasure solve_renewal(const LatticeMeasure& g, const LatticeMeasure& h,
                             double B_tilde);

struct ForestSurvival {
    std::vector<double> t;
    std::vector<double> survival;  // empirical P[L_D > t]
    std::vector<double> sigma;
    int replicas = 0;
    std::int64_t empty_forests = 0;
};

// Monte Carlo of the dominating forest: roots with mean measure g~ on the
// lattice, each node spawning Poisson(B_tilde) children with lattice ages
// from h~. L_D is the last node time.
ForestSurvival dominating_tree_mc(const GridFunction& g_tilde,
                                  const GridFunction& h_tilde, double B_tilde,
                                  int replicas,
                                  const std::vector<double>& t_grid,
                                  CanonicalNoise noise, int threads = 1);

struct MeanFieldReport {
    std::vector<double> s;
    std::vector<double> e_g;        // E[g(s)]
    std::vector<double> e_lam_H;    // E[lambda(z)] H(s)
    std::vector<double> rel_err;
    std::vector<double> diff_sigma; // std error of the per-replica difference
    double max_rel_err = 0.0;
    double stationary_rate = 0.0;   // E[lambda(z)]
    bool drift_flag = false;        // two-window stationarity diagnostic
};

MeanFieldReport mean_field_check(const SimConfig& cfg, double burn_in,
                                 int replicas, const std::vector<double>& s_grid,
                                 CanonicalNoise noise, int threads = 1);

// Stationary samples of z = g_t(0) pooled over replicas, post burn-in.
std::vector<double> stationary_z_samples(const SimConfig& cfg, double burn_in,
                                         double sample_dt, int replicas,
                                         CanonicalNoise noise, int threads = 1);

struct TailReport {
    double fitted_slope = 0.0;       // theta_1 estimate from log nu[z, inf)
    double c_prime = 0.0;            // minimal feasible c' in the density bound
    std::vector<double> hist_center;
    std::vector<double> hist_density;
    double bin_width = 0.0;
    bool low_power = false;
    double mgf_at_half_slope = 0.0;
    std::size_t tail_samples = 0;
};

TailReport tail_estimate(const std::vector<double>& z_samples,
                         const IntensityFn& lambda, const Kernel& k);

}  // namespace hawkes
