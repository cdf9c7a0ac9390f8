#include "hawkes/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

namespace hawkes {

double mean_of(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double variance_of(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    const double m = mean_of(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

namespace {

double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 1000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    // Lentz continued fraction for Q(a, x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0)
        throw std::invalid_argument("gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi2_sf(double x, double k) { return gamma_q(0.5 * k, 0.5 * x); }

Chi2Result chi2_two_sample(const std::vector<std::int64_t>& a,
                           const std::vector<std::int64_t>& b,
                           double min_expected) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("chi2_two_sample: empty sample");
    std::map<std::int64_t, std::array<double, 2>> counts;
    for (auto v : a) counts[v][0] += 1.0;
    for (auto v : b) counts[v][1] += 1.0;

    // Merge adjacent value-bins until the pooled count is large enough.
    std::vector<std::array<double, 2>> bins;
    std::array<double, 2> acc{0.0, 0.0};
    for (const auto& [value, c] : counts) {
        (void)value;
        acc[0] += c[0];
        acc[1] += c[1];
        if (acc[0] + acc[1] >= min_expected * 2.0) {
            bins.push_back(acc);
            acc = {0.0, 0.0};
        }
    }
    if (acc[0] + acc[1] > 0.0) {
        if (!bins.empty()) {
            bins.back()[0] += acc[0];
            bins.back()[1] += acc[1];
        } else {
            bins.push_back(acc);
        }
    }
    Chi2Result r;
    if (bins.size() < 2) {
        r.p_value = 1.0;
        return r;
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double n = na + nb;
    for (const auto& bin : bins) {
        const double row = bin[0] + bin[1];
        const double ea = row * na / n;
        const double eb = row * nb / n;
        r.statistic += (bin[0] - ea) * (bin[0] - ea) / ea;
        r.statistic += (bin[1] - eb) * (bin[1] - eb) / eb;
    }
    r.dof = static_cast<int>(bins.size()) - 1;
    r.p_value = chi2_sf(r.statistic, r.dof);
    return r;
}

Chi2Result chi2_independence(const std::vector<std::vector<double>>& table) {
    const std::size_t rows = table.size();
    if (rows < 2) throw std::invalid_argument("chi2_independence: need >= 2 rows");
    const std::size_t cols = table.front().size();
    std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        if (table[i].size() != cols)
            throw std::invalid_argument("chi2_independence: ragged table");
        for (std::size_t j = 0; j < cols; ++j) {
            row_sum[i] += table[i][j];
            col_sum[j] += table[i][j];
            total += table[i][j];
        }
    }
    Chi2Result r;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const double e = row_sum[i] * col_sum[j] / total;
            if (e > 0.0) r.statistic += (table[i][j] - e) * (table[i][j] - e) / e;
        }
    r.dof = static_cast<int>((rows - 1) * (cols - 1));
    r.p_value = chi2_sf(r.statistic, r.dof);
    return r;
}

double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf) {
    const std::size_t n = sample.size();
    if (n == 0) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(sample.begin(), sample.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double F = cdf(sample[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(std::abs(F - lo), std::abs(hi - F)));
    }
    return d;
}

double ks_critical(double alpha, std::size_t n) {
    const double c = std::sqrt(-0.5 * std::log(0.5 * alpha));
    return c / std::sqrt(static_cast<double>(n));
}

double binomial_sigma(double p_hat, std::size_t n) {
    if (n == 0) return 0.0;
    return std::sqrt(std::max(p_hat * (1.0 - p_hat), 1e-12) /
                     static_cast<double>(n));
}

}  // namespace hawkes
