#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "oracles.hpp"
#include "sizeaware/analytic.hpp"
#include "sizeaware/sim.hpp"
#include "sizeaware/value.hpp"

using namespace sizeaware;

namespace {

const JobSizeDistribution pareto = JobSizeDistribution::bounded_pareto(0.33959, 1000.0, 1.5);
const JobSizeDistribution det1 = JobSizeDistribution::deterministic(1.0);

using Jobs = std::vector<ValueJob>;

Jobs with(Jobs z, ValueJob j) {
    z.push_back(j);
    return z;
}

/// Random FIFO/LIFO-style state: jobs fresh except possibly the head.
Jobs random_state(Rng& rng, const JobSizeDistribution& dist, const HoldingCostModel& model, std::size_t max_jobs) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * max_jobs);
    Jobs z;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = dist.sample(rng);
        const double rem = i == 0 ? x * rng.uniform() : x;
        z.push_back({rem, x, model.rate(x)});
    }
    return z;
}

void check_against_oracle(Discipline d, const ValueContext& ctx, const Jobs& z, std::uint64_t seed) {
    PairedEstimatorOptions opts;
    opts.max_replications = 4000000;
    const ValueEstimate est = estimate_value_paired(d, ctx, z, seed, opts);
    const double closed = value_of(ctx, d, z);
    INFO(to_string(d), " closed=", closed, " estimate=", est.estimate, "+-", est.half_width, " reps=",
         est.replications);
    CHECK(est.half_width <= 0.02 * std::abs(est.estimate));
    CHECK(std::abs(closed - est.estimate) <= est.half_width);
}

}  // namespace

TEST_CASE("FIFO value and admittance cost") {
    const ValueContext ctx(0.5, det1, 1.0, HoldingCostModel::sojourn());
    CHECK(ctx.rho() == doctest::Approx(0.5));
    CHECK(ctx.mean_holding() == doctest::Approx(1.0));
    CHECK(value_fifo(ctx, Jobs{}) == 0.0);
    CHECK(value_fifo(ctx, Jobs{{1, 1, 1}}) == doctest::Approx(1.5));
    CHECK(value_fifo(ctx, Jobs{{1, 1, 1}, {2, 2, 1}}) == doctest::Approx(8.5));

    for (double x : {0.5, 1.0, 3.0}) CHECK(admit_fifo(ctx, Jobs{}, x) == doctest::Approx(x + 0.5 * x * x / 1.0));

    const ValueContext slow(0.5, det1, 1.0, HoldingCostModel::slowdown());
    CHECK(admit_fifo(slow, Jobs{{2, 2, 0.5}}, 1.0) == doctest::Approx(5.5));
}

TEST_CASE("LIFO value and admittance cost") {
    const ValueContext ctx(0.5, det1, 1.0, HoldingCostModel::slowdown());
    CHECK(value_lifo(ctx, Jobs{}) == 0.0);
    CHECK(value_lifo(ctx, Jobs{{1, 1, 1}}) == doctest::Approx(2.0));
    CHECK(admit_lifo(ctx, Jobs{}, 1.0) == doctest::Approx(lifo_conditional_slowdown(0.5)));
    CHECK(admit_lifo(ctx, Jobs{{0.3, 1, 1}, {2, 2, 0.5}}, 1.0) == doctest::Approx(5.0));
    // Only the original sizes matter.
    CHECK(admit_lifo(ctx, Jobs{{0.9, 1, 1}, {0.1, 2, 0.5}}, 1.0) == doctest::Approx(5.0));

    const ValueContext soj(0.2, det1, 1.0, HoldingCostModel::sojourn());
    CHECK(admit_lifo(soj, Jobs{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}, 2.0) == doctest::Approx(10.0));

    // Permuting deeper jobs changes the value through the partial sums.
    const Jobs a{{1, 1, 1}, {2, 2, 1}, {3, 3, 2}}, b{{1, 1, 1}, {3, 3, 2}, {2, 2, 1}};
    CHECK(value_lifo(ctx, a) == doctest::Approx((1 + 3 + 2 * 6) / 0.5));
    CHECK(value_lifo(ctx, b) == doctest::Approx((1 + 2 * 4 + 6) / 0.5));
}

TEST_CASE("admittance cost equals the value difference") {
    Rng rng(31);
    const ValueContext soj(0.6 / pareto.moment(1), pareto, 1.0, HoldingCostModel::sojourn());
    const ValueContext slow(0.6 / pareto.moment(1), pareto, 1.0, HoldingCostModel::slowdown());
    for (const ValueContext* ctx : {&soj, &slow}) {
        for (int rep = 0; rep < 100; ++rep) {
            const Jobs z = random_state(rng, pareto, ctx->model(), 5);
            const double x = pareto.sample(rng);
            const ValueJob j{x, x, ctx->holding(x)};
            CHECK(admit_fifo(*ctx, z, x) == doctest::Approx(value_fifo(*ctx, with(z, j)) - value_fifo(*ctx, z)).epsilon(1e-9));
            Jobs pushed{j};
            pushed.insert(pushed.end(), z.begin(), z.end());
            CHECK(admit_lifo(*ctx, z, x) == doctest::Approx(value_lifo(*ctx, pushed) - value_lifo(*ctx, z)).epsilon(1e-9));
        }
    }
}

TEST_CASE("generic holding cost path matches the slowdown closed form") {
    const double lambda = 0.5 / pareto.moment(1);
    const ValueContext closed(lambda, pareto, 1.0, HoldingCostModel::slowdown());
    const ValueContext generic(lambda, pareto, 1.0, HoldingCostModel::custom([](double x) { return 1.0 / x; }));
    CHECK(generic.mean_holding() == doctest::Approx(closed.mean_holding()).epsilon(1e-9));
    Rng rng(37);
    for (int rep = 0; rep < 100; ++rep) {
        const Jobs z = random_state(rng, pareto, closed.model(), 5);
        const double x = pareto.sample(rng);
        CHECK(admit_fifo(generic, z, x) == doctest::Approx(admit_fifo(closed, z, x)).epsilon(1e-9));
    }
}

TEST_CASE("FIFO admittance cost is nondecreasing in the backlog") {
    const ValueContext ctx(0.7 / pareto.moment(1), pareto, 1.0, HoldingCostModel::slowdown());
    Rng rng(41);
    for (int rep = 0; rep < 200; ++rep) {
        Jobs a = random_state(rng, pareto, ctx.model(), 4), b = random_state(rng, pareto, ctx.model(), 4);
        auto backlog = [](const Jobs& z) {
            double u = 0;
            for (const auto& j : z) u += j.remaining;
            return u;
        };
        if (backlog(a) > backlog(b)) std::swap(a, b);
        const double x = pareto.sample(rng);
        CHECK(admit_fifo(ctx, a, x) <= admit_fifo(ctx, b, x) + 1e-12);
    }
}

TEST_CASE("size-based disciplines without arrivals") {
    const ValueContext none(0.0, pareto, 1.0, HoldingCostModel::sojourn());
    CHECK(value_sptp(none, Jobs{}) == 0.0);
    CHECK(value_sptp(none, Jobs{{1, 1, 1}}) == doctest::Approx(1.0));
    CHECK(value_spt(none, Jobs{}) == 0.0);
    CHECK(value_spt(none, Jobs{{2, 2, 1}}) == doctest::Approx(2.0));
    CHECK(value_srpt(none, Jobs{}) == 0.0);
    CHECK(value_srpt(none, Jobs{{1, 1, 1}, {2, 2, 1}}) == doctest::Approx(4.0));

    // Without arrivals each value is the drain cost of its service order.
    Rng rng(43);
    for (int rep = 0; rep < 50; ++rep) {
        Jobs z = random_state(rng, pareto, HoldingCostModel::slowdown(), 4);
        std::vector<double> rem, hold;
        for (const auto& j : z) {
            rem.push_back(j.remaining);
            hold.push_back(j.holding);
        }
        std::vector<std::size_t> order(z.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto i, auto j) { return z[i].remaining < z[j].remaining; });
        Jobs sorted;
        for (auto i : order) sorted.push_back(z[i]);
        CHECK(value_srpt(none, sorted) == doctest::Approx(oracle::sequential_cost(rem, hold, order)));
    }
}

TEST_CASE("remaining sojourn") {
    const ValueContext ctx(0.5 / pareto.moment(1), pareto, 1.0, HoldingCostModel::slowdown());
    const Jobs sole{{0.2, 0.2, 5.0}};
    CHECK(remaining_sojourn(ctx, Discipline::sptp, sole, 0) == doctest::Approx(0.2).epsilon(1e-12));

    const ValueContext det(0.5, det1, 1.0, HoldingCostModel::sojourn());
    CHECK(remaining_sojourn(det, Discipline::lifo, Jobs{{1, 1, 1}}, 0) == doctest::Approx(2.0));

    const ValueContext none(0.0, pareto, 1.0, HoldingCostModel::sojourn());
    const Jobs z{{0.5, 1, 1}, {1.5, 2, 1}, {3, 3, 1}};
    CHECK(remaining_sojourn(none, Discipline::srpt, z, 2) == doctest::Approx(2.0 + 3.0));
    CHECK(remaining_sojourn(none, Discipline::srpt, z, 0) == doctest::Approx(0.5));
    CHECK_THROWS(remaining_sojourn(none, Discipline::srpt, z, 3));
}

TEST_CASE("SPTP admittance cost") {
    const ValueContext ctx(0.5 / pareto.moment(1), pareto, 1.0, HoldingCostModel::slowdown());
    for (double x : {0.5, 2.0, 40.0}) {
        const ValueJob j{x, x, ctx.holding(x)};
        CHECK(admit_sptp(ctx, Jobs{}, x) == doctest::Approx(value_sptp(ctx, Jobs{j})).epsilon(1e-12));
    }
    Rng rng(47);
    const ValueContext light(1e-9, pareto, 1.0, HoldingCostModel::slowdown());
    for (int rep = 0; rep < 100; ++rep) {
        Jobs z = random_value_state(Discipline::sptp, ctx, 4, rng);
        const double x = pareto.sample(rng);
        Jobs plus = with(z, {x, x, ctx.holding(x)});
        std::stable_sort(plus.begin(), plus.end(),
                         [](const ValueJob& a, const ValueJob& b) { return a.remaining * a.original < b.remaining * b.original; });
        CHECK(admit_sptp(ctx, z, x) == doctest::Approx(value_sptp(ctx, plus) - value_sptp(ctx, z)).epsilon(1e-9));
        CHECK(admit_sptp(light, z, x) >= light.holding(x) * x * (1 - 1e-12));
    }
}

TEST_CASE("unsorted states are rejected") {
    const ValueContext ctx(0.5 / pareto.moment(1), pareto, 1.0, HoldingCostModel::slowdown());
    const Jobs z{{2, 2, 0.5}, {1, 1, 1}};
    CHECK_THROWS(value_sptp(ctx, z));
    CHECK_THROWS(value_srpt(ctx, z));
    CHECK_THROWS(value_spt(ctx, Jobs{{1, 1, 1}, {3, 3, 1}, {2, 2, 1}}));
    CHECK_NOTHROW(value_spt(ctx, Jobs{{3, 3, 1}, {1, 1, 1}, {2, 2, 1}}));
    CHECK_THROWS(value_of(ctx, Discipline::ps, z));
}

TEST_CASE("slowdown model needs a finite mean holding rate") {
    CHECK_THROWS(ValueContext(0.5, JobSizeDistribution::exponential(1.0), 1.0, HoldingCostModel::slowdown()));
    CHECK_NOTHROW(ValueContext(0.5, JobSizeDistribution::exponential(1.0), 1.0, HoldingCostModel::sojourn()));
}

TEST_CASE("closed-form values match the paired simulation") {
    const double lambda = 0.5;
    const ValueContext slow(lambda, pareto, 1.0, HoldingCostModel::slowdown());
    const ValueContext soj(lambda, pareto, 1.0, HoldingCostModel::sojourn());
    check_against_oracle(Discipline::fifo, ValueContext(0.5, det1, 1.0, HoldingCostModel::sojourn()), Jobs{{1, 1, 1}}, 1);
    check_against_oracle(Discipline::sptp, slow, Jobs{{0.5, 1, 2}, {2, 2, 0.5}}, 2);
    check_against_oracle(Discipline::spt, soj, Jobs{{1.5, 2, 1}, {0.8, 0.8, 1}}, 3);
    check_against_oracle(Discipline::srpt, slow, Jobs{{0.4, 0.5, 2}, {1, 3, 1.0 / 3}, {2, 2, 0.5}}, 4);
    check_against_oracle(Discipline::lifo, slow, Jobs{{0.5, 1, 1}, {3, 3, 1.0 / 3}}, 5);
}

TEST_CASE("Gittins selection") {
    CHECK(gittins_select(std::vector<GittinsClass>{{4, 1, 0}, {2, 1, 0}}) == 1);
    CHECK(gittins_select(std::vector<GittinsClass>{{3, 1, 1}}) == 0);
    CHECK(gittins_select(std::vector<GittinsClass>{{2, 1, 0}, {2, 1, 0}}) == 0);

    // Slowdown weights: the index picks the least remaining * size.
    std::size_t checked = 0;
    std::vector<GittinsClass> cls;
    std::function<void(int)> rec = [&](int lo) {
        if (!cls.empty()) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < cls.size(); ++i)
                if ((cls[i].size - cls[i].attained) * cls[i].size < (cls[best].size - cls[best].attained) * cls[best].size)
                    best = i;
            const std::size_t g = gittins_select(cls);
            const double pg = (cls[g].size - cls[g].attained) * cls[g].size;
            const double pb = (cls[best].size - cls[best].attained) * cls[best].size;
            if (pg != pb) FAIL("Gittins index disagrees with the SPTP order");
            ++checked;
        }
        if (cls.size() == 3) return;
        for (int x = lo; x <= 4; ++x)
            for (int a = 0; a < 4 * x; ++a) {
                cls.push_back({double(x), 1.0 / x, 0.25 * a});
                rec(x);
                cls.pop_back();
            }
    };
    rec(1);
    CHECK(checked > 1000);
}
