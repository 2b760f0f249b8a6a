#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "sizeaware/analytic.hpp"
#include "sizeaware/tables.hpp"

using namespace sizeaware;

namespace {

constexpr double bp_k = 0.33959, bp_p = 1000.0, bp_a = 1.5;
const double bp_c = bp_a * std::pow(bp_k, bp_a) / (1.0 - std::pow(bp_k / bp_p, bp_a));

double bp_pdf(double t) { return t < bp_k || t > bp_p ? 0.0 : bp_c * std::pow(t, -bp_a - 1.0); }

/// lambda * int_0^t s f(s) ds in closed form.
double bp_rho(double lambda, double t) {
    t = std::min(t, bp_p);
    if (t <= bp_k) return 0.0;
    return lambda * bp_c * (std::pow(bp_k, 1.0 - bp_a) - std::pow(t, 1.0 - bp_a)) / (bp_a - 1.0);
}

double oracle_F(int k, double lambda, double x) {
    const double hi = std::min(x, bp_p);
    if (hi <= bp_k) return 0.0;
    auto f = [&](double t) {
        const double r = 1.0 - bp_rho(lambda, t);
        return std::pow(t, k) * (1.0 / t) * bp_pdf(t) / (r * r);
    };
    return oracle::simpson_log(f, bp_k, hi, 1e-14);
}

double oracle_G(int d, double lambda, double x) {
    const double head = std::min(x, bp_k);
    double v = std::pow(head, d + 1) / (d + 1);
    if (x > bp_k) v += oracle::simpson_log([&](double t) { return std::pow(t, d) / (1.0 - bp_rho(lambda, t)); }, bp_k, x, 1e-14);
    return v;
}

}  // namespace

TEST_CASE("no arrivals") {
    const IntegralTables t(0.0, JobSizeDistribution::uniform(0.5, 1.5), HoldingCostModel::sojourn());
    for (double x : {0.0, 0.3, 1.0, 1.7, 25.0}) {
        CHECK(t.G(0, x) == doctest::Approx(x).epsilon(1e-12));
        CHECK(t.G(1, x) == doctest::Approx(x * x / 2).epsilon(1e-12));
        CHECK(t.F(0, x) == doctest::Approx(std::clamp(x - 0.5, 0.0, 1.0)).epsilon(1e-10));
    }
}

TEST_CASE("deterministic sizes put a jump at the atom") {
    const IntegralTables t(0.5, JobSizeDistribution::deterministic(1.0), HoldingCostModel::sojourn());
    CHECK(t.F(0, 1.0) == 0.0);
    CHECK(t.F_le(0, 1.0) - t.F(0, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(t.F_total(0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(t.F(0, 0.999) == 0.0);
    CHECK(t.F(0, 1.001) == doctest::Approx(2.0));
    CHECK(t.rho_below(1.0) == 0.0);
    CHECK(t.rho_at_or_below(1.0) == doctest::Approx(0.5));
    // G grows at rate 1 below the atom and 1/(1 - rho) = 2 above it.
    CHECK(t.G(0, 0.5) == doctest::Approx(0.5));
    CHECK(t.G(0, 3.0) == doctest::Approx(1.0 + 2.0 * 2.0));
}

TEST_CASE("tables match direct quadrature at random probes") {
    const double lambda = 0.5;
    const IntegralTables t(lambda, JobSizeDistribution::bounded_pareto(bp_k, bp_p, bp_a), HoldingCostModel::slowdown());
    CHECK(t.grid().size() >= 512);
    Rng rng(23);
    for (int i = 0; i < 100; ++i) {
        const double x = std::exp(std::log(0.2) + rng.uniform() * (std::log(1500.0) - std::log(0.2)));
        INFO("x = ", x);
        for (int k : {0, 2, 4}) {
            const double want = oracle_F(k, lambda, x);
            if (want == 0.0)
                CHECK(t.F(k, x) == 0.0);
            else
                CHECK(t.F(k, x) == doctest::Approx(want).epsilon(1e-6));
        }
        for (int d : {0, 1}) CHECK(t.G(d, x) == doctest::Approx(oracle_G(d, lambda, x)).epsilon(1e-6));
        CHECK(t.rho_below(x) == doctest::Approx(bp_rho(lambda, x)).epsilon(1e-10));
    }
}

TEST_CASE("tables are zero at the origin, nondecreasing and flat past the support") {
    const IntegralTables t(0.7, JobSizeDistribution::bounded_pareto(bp_k, bp_p, bp_a), HoldingCostModel::slowdown());
    for (int k : {0, 2, 4}) {
        CHECK(t.F(k, 0.0) == 0.0);
        double prev = 0.0;
        for (double x = 0.01; x < 3000.0; x *= 1.05) {
            const double v = t.F(k, x);
            CHECK(v >= prev);
            prev = v;
        }
        CHECK(t.F(k, 2000.0) == doctest::Approx(t.F_total(k)).epsilon(1e-12));
    }
    for (int d : {0, 1}) {
        CHECK(t.G(d, 0.0) == 0.0);
        double prev = 0.0;
        for (double x = 0.01; x < 3000.0; x *= 1.05) {
            const double v = t.G(d, x);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("unstable or non-integrable inputs are rejected") {
    CHECK_THROWS_AS(IntegralTables(1.0, JobSizeDistribution::deterministic(1.0), HoldingCostModel::sojourn()),
                    InstabilityError);
    CHECK_THROWS(IntegralTables(0.5, JobSizeDistribution::exponential(1.0), HoldingCostModel::slowdown()));
}
