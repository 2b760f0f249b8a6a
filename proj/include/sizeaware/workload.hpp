#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sizeaware {

/// A moment that may legitimately diverge (E[1/X] for densities touching 0)
/// or be undefined (conditioning on an empty event).
class ExtendedValue {
public:
    enum class State { finite, infinite, undefined };

    static ExtendedValue finite(double v) { return ExtendedValue(State::finite, v); }
    static ExtendedValue infinite() {
        return ExtendedValue(State::infinite, std::numeric_limits<double>::infinity());
    }
    static ExtendedValue undefined() {
        return ExtendedValue(State::undefined, std::numeric_limits<double>::quiet_NaN());
    }
    /// +inf maps to infinite, NaN to undefined.
    static ExtendedValue from_double(double v);

    State state() const { return state_; }
    bool is_finite() const { return state_ == State::finite; }
    bool is_infinite() const { return state_ == State::infinite; }
    bool is_undefined() const { return state_ == State::undefined; }

    /// Throws std::domain_error unless finite.
    double value() const;
    /// inf for infinite, NaN for undefined.
    double raw() const { return value_; }

    std::string to_string() const;

private:
    ExtendedValue(State s, double v) : state_(s), value_(v) {}
    State state_;
    double value_;
};

struct BoundedPareto {
    double k;
    double p;
    double alpha;
};

struct Uniform {
    double a;
    double b;
};

struct Exponential {
    double mean;
};

struct Deterministic {
    double x;
};

struct Atom {
    double size;
    double prob;
};

struct Discrete {
    std::vector<Atom> atoms;
};

using SizeLaw = std::variant<BoundedPareto, Uniform, Exponential, Deterministic, Discrete>;

inline constexpr std::size_t max_discrete_atoms = 64;

/// Deterministic random stream. 53-bit uniforms so that sample paths do not
/// depend on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }
    double exponential(double rate) { return -std::log(uniform()) / rate; }
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Derives independent stream seeds from one experiment seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Job-size law X = scale * Z conditioned on X in (lower_cut, upper_cut],
/// where Z follows one of the parametric laws. Immutable.
class JobSizeDistribution {
public:
    explicit JobSizeDistribution(SizeLaw law);

    static JobSizeDistribution bounded_pareto(double k, double p, double alpha);
    static JobSizeDistribution uniform(double a, double b);
    static JobSizeDistribution exponential(double mean);
    static JobSizeDistribution deterministic(double x);
    static JobSizeDistribution discrete(std::vector<Atom> atoms);

    const SizeLaw& law() const { return law_; }
    double scale() const { return scale_; }
    double lower_cut() const { return lower_cut_; }
    double upper_cut() const { return upper_cut_; }

    /// Distribution of factor * X.
    JobSizeDistribution scaled(double factor) const;
    /// Distribution of X given a < X <= b. Throws if that event has zero probability.
    JobSizeDistribution conditioned(double a, double b) const;

    /// E[X^k ; X < x] for k in {-1, 0, 1, 2}. +inf when the integral diverges.
    double partial_moment(int k, double x) const;
    /// E[X^k ; X <= x].
    double partial_moment_le(int k, double x) const;
    /// E[X^k ; a < X <= b].
    double interval_moment(int k, double a, double b) const;
    double moment(int k) const;

    double cdf(double x) const { return partial_moment_le(0, x); }
    double prob_below(double x) const { return partial_moment(0, x); }
    /// Density of the continuous part.
    double pdf(double x) const;
    double quantile(double u) const;
    double sample(Rng& rng) const { return quantile(rng.uniform()); }

    /// Atoms inside the window, rescaled and renormalised.
    std::span<const Atom> atoms() const { return atoms_; }
    bool has_atoms() const { return !atoms_.empty(); }
    bool is_continuous() const { return atoms_.empty(); }
    /// Probability mass at exactly x.
    double atom_mass(double x) const;

    double support_min() const { return support_min_; }
    double support_max() const { return support_max_; }

    std::string kind_name() const;
    std::string describe() const;

private:
    JobSizeDistribution(SizeLaw law, double scale, double lower, double upper);
    void init();
    // Unnormalised E[X^k ; from <(=) X <(=) to] on the X scale, window ignored.
    double raw_integral(int k, double from, bool from_inclusive, double to, bool to_inclusive) const;
    double base_cont_integral(int k, double z1, double z2) const;
    double base_density(double z) const;
    double base_quantile(double u) const;
    double base_cdf_le(double z) const;

    SizeLaw law_;
    double scale_ = 1.0;
    double lower_cut_ = 0.0;
    double upper_cut_ = std::numeric_limits<double>::infinity();
    double window_mass_ = 1.0;
    double window_cdf_lo_ = 0.0;  // base P{Z <= lower_cut/scale}
    std::vector<Atom> base_atoms_;
    std::vector<Atom> atoms_;
    double support_min_ = 0.0;
    double support_max_ = 0.0;
};

class HoldingCostModel {
public:
    enum class Kind { sojourn, slowdown, custom };

    static HoldingCostModel sojourn() { return HoldingCostModel(Kind::sojourn, {}, "sojourn"); }
    static HoldingCostModel slowdown() { return HoldingCostModel(Kind::slowdown, {}, "slowdown"); }
    static HoldingCostModel custom(std::function<double(double)> rate, std::string name = "custom");

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }

    double rate(double x) const;
    /// E[c(X)]; infinite for slowdown when E[1/X] diverges.
    ExtendedValue mean_rate(const JobSizeDistribution& dist) const;
    /// Throws if a custom rate is not strictly positive on the support.
    void check_positive_on(const JobSizeDistribution& dist) const;

private:
    HoldingCostModel(Kind k, std::function<double(double)> f, std::string name)
        : kind_(k), rate_(std::move(f)), name_(std::move(name)) {}
    Kind kind_;
    std::function<double(double)> rate_;
    std::string name_;
};

struct Moments {
    double mean;
    double second;
    ExtendedValue inv_mean;
};

/// lambda(x), m(x), rho(x) for jobs strictly shorter than x.
struct PartialStats {
    double arrival_rate_below;
    double mean_below;
    double load_below;
};

struct TruncatedStats {
    double prob;
    ExtendedValue mean;
    ExtendedValue second;
    ExtendedValue inv_mean;
};

Moments moments(const JobSizeDistribution& dist);
PartialStats partial_stats(const JobSizeDistribution& dist, double lambda, double x);
/// Moments of X conditioned on a < X <= b.
TruncatedStats truncated_stats(const JobSizeDistribution& dist, double a, double b);

}  // namespace sizeaware
