#include "sizeaware/workload.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/expint.hpp>

#include "sizeaware/numerics.hpp"

namespace sizeaware {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// (z2^e - z1^e) / e without cancellation as e -> 0; equals log(z2/z1) at e == 0.
double power_difference(double z1, double z2, double e) {
    const double l = std::log(z2 / z1);
    if (std::abs(e * l) < 1e-300) return l;
    return std::pow(z1, e) * std::expm1(e * l) / e;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

ExtendedValue ExtendedValue::from_double(double v) {
    if (std::isnan(v)) return undefined();
    if (std::isinf(v)) return infinite();
    return finite(v);
}

double ExtendedValue::value() const {
    if (state_ != State::finite)
        throw std::domain_error(state_ == State::infinite ? "value is infinite" : "value is undefined");
    return value_;
}

std::string ExtendedValue::to_string() const {
    switch (state_) {
    case State::infinite: return "inf";
    case State::undefined: return "undefined";
    default: {
        std::ostringstream os;
        os.precision(17);
        os << value_;
        return os.str();
    }
    }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finaliser
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

JobSizeDistribution::JobSizeDistribution(SizeLaw law) : law_(std::move(law)) {
    std::visit(overloaded{
                   [](const BoundedPareto& d) {
                       require(d.k > 0 && d.p > d.k && d.alpha > 0,
                               "bounded_pareto requires 0 < k < p and alpha > 0");
                   },
                   [](const Uniform& d) {
                       require(d.a >= 0 && d.b > d.a, "uniform requires 0 <= a < b");
                   },
                   [](const Exponential& d) { require(d.mean > 0, "exponential requires mean > 0"); },
                   [](const Deterministic& d) { require(d.x > 0, "deterministic requires x > 0"); },
                   [](const Discrete& d) {
                       require(!d.atoms.empty(), "discrete requires at least one atom");
                       require(d.atoms.size() <= max_discrete_atoms, "discrete supports at most 64 atoms");
                       double total = 0.0;
                       for (std::size_t i = 0; i < d.atoms.size(); ++i) {
                           require(d.atoms[i].size > 0, "discrete sizes must be positive");
                           require(d.atoms[i].prob >= 0, "discrete probabilities must be nonnegative");
                           if (i > 0)
                               require(d.atoms[i].size > d.atoms[i - 1].size,
                                       "discrete sizes must be strictly increasing");
                           total += d.atoms[i].prob;
                       }
                       require(std::abs(total - 1.0) <= 1e-12, "discrete probabilities must sum to 1");
                   },
               },
               law_);
    init();
}

JobSizeDistribution::JobSizeDistribution(SizeLaw law, double scale, double lower, double upper)
    : law_(std::move(law)), scale_(scale), lower_cut_(lower), upper_cut_(upper) {
    init();
}

JobSizeDistribution JobSizeDistribution::bounded_pareto(double k, double p, double alpha) {
    return JobSizeDistribution(BoundedPareto{k, p, alpha});
}
JobSizeDistribution JobSizeDistribution::uniform(double a, double b) {
    return JobSizeDistribution(Uniform{a, b});
}
JobSizeDistribution JobSizeDistribution::exponential(double mean) {
    return JobSizeDistribution(Exponential{mean});
}
JobSizeDistribution JobSizeDistribution::deterministic(double x) {
    return JobSizeDistribution(Deterministic{x});
}
JobSizeDistribution JobSizeDistribution::discrete(std::vector<Atom> atoms) {
    return JobSizeDistribution(Discrete{std::move(atoms)});
}

void JobSizeDistribution::init() {
    base_atoms_.clear();
    if (auto d = std::get_if<Deterministic>(&law_)) base_atoms_.push_back({d->x, 1.0});
    if (auto d = std::get_if<Discrete>(&law_))
        for (const auto& a : d->atoms)
            if (a.prob > 0) base_atoms_.push_back(a);

    window_mass_ = raw_integral(0, lower_cut_, false, upper_cut_, true);
    if (!(window_mass_ > 0))
        throw std::invalid_argument("conditioning event has zero probability");
    window_cdf_lo_ = lower_cut_ > 0 ? base_cdf_le(lower_cut_ / scale_) : 0.0;

    atoms_.clear();
    for (const auto& a : base_atoms_) {
        const double x = a.size * scale_;
        if (x > lower_cut_ && x <= upper_cut_) atoms_.push_back({x, a.prob / window_mass_});
    }

    double zmin = 0.0, zmax = inf;
    std::visit(overloaded{
                   [&](const BoundedPareto& d) { zmin = d.k, zmax = d.p; },
                   [&](const Uniform& d) { zmin = d.a, zmax = d.b; },
                   [&](const Exponential&) { zmin = 0.0, zmax = inf; },
                   [&](const auto&) {},
               },
               law_);
    if (!base_atoms_.empty()) {
        support_min_ = atoms_.front().size;
        support_max_ = atoms_.back().size;
    } else {
        support_min_ = std::max(zmin * scale_, lower_cut_);
        support_max_ = std::min(zmax * scale_, upper_cut_);
    }
}

JobSizeDistribution JobSizeDistribution::scaled(double factor) const {
    require(factor > 0 && std::isfinite(factor), "scale factor must be positive");
    return JobSizeDistribution(law_, scale_ * factor, lower_cut_ * factor, upper_cut_ * factor);
}

JobSizeDistribution JobSizeDistribution::conditioned(double a, double b) const {
    require(a >= 0 && b > a, "conditioning interval must satisfy 0 <= a < b");
    return JobSizeDistribution(law_, scale_, std::max(a, lower_cut_), std::min(b, upper_cut_));
}

double JobSizeDistribution::base_cont_integral(int k, double z1, double z2) const {
    return std::visit(
        overloaded{
            [&](const BoundedPareto& d) -> double {
                z1 = std::max(z1, d.k);
                z2 = std::min(z2, d.p);
                if (!(z2 > z1)) return 0.0;
                const double c = d.alpha * std::pow(d.k, d.alpha) / (1.0 - std::pow(d.k / d.p, d.alpha));
                return c * power_difference(z1, z2, k - d.alpha);
            },
            [&](const Uniform& d) -> double {
                z1 = std::max(z1, d.a);
                z2 = std::min(z2, d.b);
                if (!(z2 > z1)) return 0.0;
                const double w = d.b - d.a;
                if (k == -1) return z1 <= 0.0 ? inf : std::log(z2 / z1) / w;
                return (std::pow(z2, k + 1) - std::pow(z1, k + 1)) / ((k + 1) * w);
            },
            [&](const Exponential& d) -> double {
                z1 = std::max(z1, 0.0);
                if (!(z2 > z1)) return 0.0;
                const double mu = d.mean;
                if (k == -1) {
                    if (z1 <= 0.0) return inf;
                    const double e2 = std::isinf(z2) ? 0.0 : boost::math::expint(1, z2 / mu);
                    return (boost::math::expint(1, z1 / mu) - e2) / mu;
                }
                // Upper tail integral of t^k f(t) from z.
                auto tail = [&](double z) -> double {
                    if (std::isinf(z)) return 0.0;
                    const double e = std::exp(-z / mu);
                    switch (k) {
                    case 0: return e;
                    case 1: return e * (z + mu);
                    case 2: return e * (z * z + 2 * mu * z + 2 * mu * mu);
                    default: throw std::invalid_argument("moment order out of range");
                    }
                };
                if (z1 == 0.0) {
                    // Lower incomplete form keeps precision for small z2.
                    const double r = z2 / mu;
                    if (std::isinf(z2)) return k == 0 ? 1.0 : (k == 1 ? mu : 2 * mu * mu);
                    const double em1 = -std::expm1(-r);  // 1 - e^{-r}
                    switch (k) {
                    case 0: return em1;
                    case 1: return mu * (em1 - r * std::exp(-r));
                    case 2: return mu * mu * (2 * em1 - std::exp(-r) * (2 * r + r * r));
                    default: throw std::invalid_argument("moment order out of range");
                    }
                }
                return tail(z1) - tail(z2);
            },
            [&](const auto&) -> double { return 0.0; },
        },
        law_);
}

double JobSizeDistribution::raw_integral(int k, double from, bool from_inclusive, double to,
                                         bool to_inclusive) const {
    require(k >= -1 && k <= 2, "moment order must be in {-1,0,1,2}");
    if (to < from || (to == from && !(from_inclusive && to_inclusive))) return 0.0;
    double sum = 0.0;
    const double cont = base_cont_integral(k, from / scale_, to / scale_);
    if (cont != 0.0) sum += std::pow(scale_, k) * cont;
    for (const auto& a : base_atoms_) {
        const double x = a.size * scale_;
        const bool above = from_inclusive ? x >= from : x > from;
        const bool below = to_inclusive ? x <= to : x < to;
        if (above && below) sum += a.prob * std::pow(x, k);
    }
    return sum;
}

double JobSizeDistribution::partial_moment(int k, double x) const {
    if (x <= lower_cut_) return 0.0;
    const double v = x <= upper_cut_ ? raw_integral(k, lower_cut_, false, x, false)
                                     : raw_integral(k, lower_cut_, false, upper_cut_, true);
    return v / window_mass_;
}

double JobSizeDistribution::partial_moment_le(int k, double x) const {
    if (x <= lower_cut_) return 0.0;
    return raw_integral(k, lower_cut_, false, std::min(x, upper_cut_), true) / window_mass_;
}

double JobSizeDistribution::interval_moment(int k, double a, double b) const {
    const double lo = std::max(a, lower_cut_);
    const double hi = std::min(b, upper_cut_);
    if (!(hi > lo)) return 0.0;
    return raw_integral(k, lo, false, hi, true) / window_mass_;
}

double JobSizeDistribution::moment(int k) const {
    return raw_integral(k, lower_cut_, false, upper_cut_, true) / window_mass_;
}

double JobSizeDistribution::base_density(double z) const {
    return std::visit(overloaded{
                          [&](const BoundedPareto& d) -> double {
                              if (z < d.k || z > d.p) return 0.0;
                              const double c = d.alpha * std::pow(d.k, d.alpha) /
                                               (1.0 - std::pow(d.k / d.p, d.alpha));
                              return c * std::pow(z, -d.alpha - 1.0);
                          },
                          [&](const Uniform& d) -> double {
                              return (z < d.a || z > d.b) ? 0.0 : 1.0 / (d.b - d.a);
                          },
                          [&](const Exponential& d) -> double {
                              return z < 0 ? 0.0 : std::exp(-z / d.mean) / d.mean;
                          },
                          [&](const auto&) -> double { return 0.0; },
                      },
                      law_);
}

double JobSizeDistribution::pdf(double x) const {
    if (x <= lower_cut_ || x > upper_cut_) return 0.0;
    return base_density(x / scale_) / scale_ / window_mass_;
}

double JobSizeDistribution::base_cdf_le(double z) const {
    double c = base_cont_integral(0, -inf, z);
    for (const auto& a : base_atoms_)
        if (a.size <= z) c += a.prob;
    return c;
}

double JobSizeDistribution::base_quantile(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    return std::visit(
        overloaded{
            [&](const BoundedPareto& d) -> double {
                const double tail = 1.0 - std::pow(d.k / d.p, d.alpha);
                return std::min(d.p, d.k * std::pow(1.0 - u * tail, -1.0 / d.alpha));
            },
            [&](const Uniform& d) -> double { return d.a + u * (d.b - d.a); },
            [&](const Exponential& d) -> double { return -d.mean * std::log1p(-u); },
            [&](const auto&) -> double {
                double c = 0.0;
                for (const auto& a : base_atoms_) {
                    c += a.prob;
                    if (c >= u - 1e-15) return a.size;
                }
                return base_atoms_.back().size;
            },
        },
        law_);
}

double JobSizeDistribution::quantile(double u) const {
    const double target = window_cdf_lo_ + std::clamp(u, 0.0, 1.0) * window_mass_;
    if (!base_atoms_.empty()) {
        double c = 0.0;
        for (const auto& a : base_atoms_) {
            c += a.prob;
            const double x = a.size * scale_;
            if (x > lower_cut_ && x <= upper_cut_ && c >= target - 1e-15) return x;
        }
        return atoms_.back().size;
    }
    const double x = scale_ * base_quantile(target);
    return std::clamp(x, support_min_, support_max_);
}

double JobSizeDistribution::atom_mass(double x) const {
    for (const auto& a : atoms_)
        if (a.size == x) return a.prob;
    return 0.0;
}

std::string JobSizeDistribution::kind_name() const {
    return std::visit(overloaded{
                          [](const BoundedPareto&) { return std::string("bounded_pareto"); },
                          [](const Uniform&) { return std::string("uniform"); },
                          [](const Exponential&) { return std::string("exponential"); },
                          [](const Deterministic&) { return std::string("deterministic"); },
                          [](const Discrete&) { return std::string("discrete"); },
                      },
                      law_);
}

std::string JobSizeDistribution::describe() const {
    std::ostringstream os;
    os.precision(10);
    std::visit(overloaded{
                   [&](const BoundedPareto& d) {
                       os << "bounded_pareto(k=" << d.k << ", p=" << d.p << ", alpha=" << d.alpha << ")";
                   },
                   [&](const Uniform& d) { os << "uniform(a=" << d.a << ", b=" << d.b << ")"; },
                   [&](const Exponential& d) { os << "exponential(mean=" << d.mean << ")"; },
                   [&](const Deterministic& d) { os << "deterministic(x=" << d.x << ")"; },
                   [&](const Discrete& d) { os << "discrete(" << d.atoms.size() << " atoms)"; },
               },
               law_);
    if (scale_ != 1.0) os << " * " << scale_;
    if (lower_cut_ > 0 || std::isfinite(upper_cut_)) os << " | (" << lower_cut_ << ", " << upper_cut_ << "]";
    return os.str();
}

HoldingCostModel HoldingCostModel::custom(std::function<double(double)> rate, std::string name) {
    require(static_cast<bool>(rate), "custom holding cost needs a rate function");
    return HoldingCostModel(Kind::custom, std::move(rate), std::move(name));
}

double HoldingCostModel::rate(double x) const {
    switch (kind_) {
    case Kind::sojourn: return 1.0;
    case Kind::slowdown: return 1.0 / x;
    default: return rate_(x);
    }
}

ExtendedValue HoldingCostModel::mean_rate(const JobSizeDistribution& dist) const {
    switch (kind_) {
    case Kind::sojourn: return ExtendedValue::finite(1.0);
    case Kind::slowdown: return ExtendedValue::from_double(dist.moment(-1));
    default: break;
    }
    double total = 0.0;
    for (const auto& a : dist.atoms()) total += a.prob * rate_(a.size);
    if (dist.is_continuous()) {
        const double lo = dist.support_min();
        const double hi = std::isfinite(dist.support_max()) ? dist.support_max() : dist.quantile(1.0 - 1e-16);
        // Geometric pieces keep heavy-tailed densities well resolved.
        const int pieces = 64;
        const double start = lo > 0 ? lo : hi * 1e-12;
        if (lo <= 0) total += numerics::integrate([&](double t) { return rate_(t) * dist.pdf(t); }, 0.0, start);
        const double ratio = std::pow(hi / start, 1.0 / pieces);
        double a = start;
        for (int i = 0; i < pieces; ++i) {
            const double b = i + 1 == pieces ? hi : a * ratio;
            total += numerics::integrate([&](double t) { return rate_(t) * dist.pdf(t); }, a, b);
            a = b;
        }
    }
    return ExtendedValue::from_double(total);
}

void HoldingCostModel::check_positive_on(const JobSizeDistribution& dist) const {
    if (kind_ != Kind::custom) return;
    auto check = [&](double x) {
        const double c = rate_(x);
        if (!(c > 0) || !std::isfinite(c))
            throw std::invalid_argument("custom holding cost must be positive on the support");
    };
    for (const auto& a : dist.atoms()) check(a.size);
    if (dist.is_continuous())
        for (int i = 1; i <= 256; ++i) check(dist.quantile(i / 257.0));
}

Moments moments(const JobSizeDistribution& dist) {
    return {dist.moment(1), dist.moment(2), ExtendedValue::from_double(dist.moment(-1))};
}

PartialStats partial_stats(const JobSizeDistribution& dist, double lambda, double x) {
    require(lambda >= 0 && x >= 0, "partial_stats requires lambda >= 0 and x >= 0");
    const double p = dist.prob_below(x);
    if (p <= 0) return {0.0, 0.0, 0.0};
    const double first = dist.partial_moment(1, x);
    return {lambda * p, first / p, lambda * first};
}

TruncatedStats truncated_stats(const JobSizeDistribution& dist, double a, double b) {
    require(a >= 0 && b > a, "truncated_stats requires 0 <= a < b");
    const double prob = dist.interval_moment(0, a, b);
    if (!(prob > 0))
        return {0.0, ExtendedValue::undefined(), ExtendedValue::undefined(), ExtendedValue::undefined()};
    return {prob, ExtendedValue::finite(dist.interval_moment(1, a, b) / prob),
            ExtendedValue::finite(dist.interval_moment(2, a, b) / prob),
            ExtendedValue::from_double(dist.interval_moment(-1, a, b) / prob)};
}

}  // namespace sizeaware
