#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hawkes/kernel.hpp"

namespace hawkes {

struct Envelope {
    double A = 0.0;
    double B = 0.0;
};

// Bounded non-negative deterministic signal, used for the stationary
// modulators p(t) (inside lambda) and q(t) (outside lambda).
class Modulator {
  public:
    static Modulator constant(double c);
    static Modulator sinusoid(double offset, double amplitude, double period,
                              double phase = 0.0);
    double value(double t) const;
    double bound() const { return offset_ + amplitude_; }
    nlohmann::json to_json() const;
    static Modulator from_json(const nlohmann::json& j);
    bool operator==(const Modulator& o) const { return to_json() == o.to_json(); }

  private:
    bool constant_ = true;
    double offset_ = 0.0;
    double amplitude_ = 0.0;
    double period_ = 1.0;
    double phase_ = 0.0;
};

// Concave non-decreasing modulus of continuity phi with phi(0) = 0.
class Modulus {
  public:
    static Modulus identity(double L = 1.0);            // phi(s) = L s
    static Modulus power(double alpha, double c = 1.0); // phi(s) = c s^alpha
    static Modulus concave_tabulated(std::vector<double> grid,
                                     std::vector<double> values);
    double value(double s) const;
    bool is_identity() const { return kind_ == Kind::Identity; }
    double lipschitz() const { return L_; }
    nlohmann::json to_json() const;
    static Modulus from_json(const nlohmann::json& j);
    bool operator==(const Modulus& o) const { return to_json() == o.to_json(); }

  private:
    enum class Kind { Identity, Power, Tabulated } kind_ = Kind::Identity;
    double L_ = 1.0;
    double alpha_ = 1.0, c_ = 1.0;
    std::vector<double> grid_, values_;
};

enum class IntensityFamily { Linear, SqrtCap, PiecewiseStep, CustomTabulated };

struct Hyp1Report {
    bool holds = false;
    double A = 0.0, B = 0.0;
    bool subcritical = false;
    std::string verdict;
    double worst_gap = 0.0;  // min over grid of (A + B z - lambda(z))
};

struct Hyp2Report {
    bool modulus_valid = false;
    double C = 0.0;  // +inf marker when divergent
    bool C_finite = false;
    std::string verdict;
};

struct Hyp4Report {
    double B_tilde = 0.0;
    bool subcritical_tilde = false;
    double C4_estimate = 0.0;
    bool c4_stabilized = false;
    bool g_tilde_integrable = false;
    double g_tilde_mass = 0.0;  // int phi(g0)
    Kernel h_tilde = Kernel::zero();
    std::vector<double> ratio_t, ratio_value;  // diagnostic ladder
};

// Rate map lambda with certified affine envelope and optional modulators.
class IntensityFn {
  public:
    static IntensityFn linear(double A, double B);
    static IntensityFn sqrt_cap(double base, double slope,
                                double cap = std::numeric_limits<double>::infinity(),
                                std::optional<Envelope> env = std::nullopt);
    static IntensityFn piecewise_step(std::vector<double> jumps,
                                      std::vector<double> levels);
    static IntensityFn custom_tabulated(std::vector<double> grid,
                                        std::vector<double> values,
                                        Envelope env);

    double value(double z) const;             // lambda(z); z < 0 is a domain error
    double rate(double z, double t) const;    // lambda(z + p(t)) + q(t)
    double lambda0(double z) const { return value(z) - value(0.0); }
    Envelope envelope() const { return env_; }
    bool monotone() const;
    IntensityFamily family() const { return family_; }
    double linear_A() const;
    double linear_B() const;
    bool has_modulators() const { return p_.has_value() || q_.has_value(); }
    double p_bound() const { return p_ ? p_->bound() : 0.0; }
    double q_bound() const { return q_ ? q_->bound() : 0.0; }
    void set_modulator_p(Modulator m) { p_ = std::move(m); }
    void set_modulator_q(Modulator m) { q_ = std::move(m); }
    const std::optional<Modulator>& modulator_p() const { return p_; }
    const std::optional<Modulator>& modulator_q() const { return q_; }

    nlohmann::json to_json() const;
    static IntensityFn from_json(const nlohmann::json& j);
    bool operator==(const IntensityFn& o) const { return to_json() == o.to_json(); }

  private:
    IntensityFn() = default;
    void certify_envelope() const;

    IntensityFamily family_ = IntensityFamily::Linear;
    Envelope env_;
    double A_ = 0.0, B_ = 0.0;             // Linear
    double base_ = 0.0, slope_ = 0.0, cap_ = 0.0;  // SqrtCap
    std::vector<double> jumps_, levels_;   // PiecewiseStep
    std::vector<double> grid_, values_;    // CustomTabulated
    std::optional<Modulator> p_, q_;
};

Hyp1Report check_hyp1(const IntensityFn& f);
// Throws std::invalid_argument for non-monotone lambda.
Hyp2Report check_hyp2(const IntensityFn& f, const Modulus& phi, const Kernel& k);

class InitialCondition;  // state.hpp
Hyp4Report check_hyp4(const IntensityFn& f, const Modulus& phi, const Kernel& k,
                      const InitialCondition& g0);

}  // namespace hawkes
