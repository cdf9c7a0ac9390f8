#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace hawkes {

double mean_of(const std::vector<double>& x);
double variance_of(const std::vector<double>& x);  // unbiased

// Upper regularized incomplete gamma Q(a, x).
double gamma_q(double a, double x);
// Survival function of the chi-square distribution with k dof.
double chi2_sf(double x, double k);

// Two-sample chi-square homogeneity test on integer-valued samples.
// Bins are merged so every pooled expected count is >= min_expected.
struct Chi2Result {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};
Chi2Result chi2_two_sample(const std::vector<std::int64_t>& a,
                           const std::vector<std::int64_t>& b,
                           double min_expected = 10.0);

// Chi-square independence test on a contingency table.
Chi2Result chi2_independence(const std::vector<std::vector<double>>& table);

// One-sample Kolmogorov-Smirnov statistic against a reference cdf.
double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf);
// Critical value at significance alpha (asymptotic).
double ks_critical(double alpha, std::size_t n);

double binomial_sigma(double p_hat, std::size_t n);

}  // namespace hawkes
