#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "sizeaware/analytic.hpp"
#include "sizeaware/dispatch.hpp"

using namespace sizeaware;

namespace {

constexpr double bp_k = 0.33959, bp_p = 1000.0, bp_a = 1.5;
const JobSizeDistribution pareto = JobSizeDistribution::bounded_pareto(bp_k, bp_p, bp_a);

/// int_k^t x f(x) dx for the bounded Pareto law, by hand.
double bp_partial_mean(double t) {
    const double c = bp_a * std::pow(bp_k, bp_a) / (1.0 - std::pow(bp_k / bp_p, bp_a));
    t = std::clamp(t, bp_k, bp_p);
    return c * (std::pow(bp_k, 1.0 - bp_a) - std::pow(t, 1.0 - bp_a)) / (bp_a - 1.0);
}

SystemSpec system(std::vector<double> rates, Discipline d, double rho, const JobSizeDistribution& dist = pareto) {
    SystemSpec s{{}, 0.0, dist, HoldingCostModel::slowdown()};
    double total = 0;
    for (double r : rates) {
        s.servers.push_back({r, d});
        total += r;
    }
    s.lambda = rho * total / dist.moment(1);
    return s;
}

std::vector<QueueState> empty_queues(const SystemSpec& s) {
    std::vector<QueueState> q;
    for (const auto& srv : s.servers) q.emplace_back(srv.discipline, srv.rate);
    return q;
}

double objective(const std::vector<double>& p, const std::vector<double>& rates, double load) {
    return rnd_lifo_system_slowdown(p, rates, load, 1.0);
}

}  // namespace

TEST_CASE("optimal random split") {
    for (std::size_t m : {2u, 3u, 5u}) {
        const std::vector<double> rates(m, 1.3);
        for (double p : rnd_opt_probabilities(rates, 0.8 * m, 1.0)) CHECK(p == doctest::Approx(1.0 / m));
    }
    const std::vector<double> three{1.0, 0.5, 0.5};
    const auto p = rnd_opt_probabilities(three, 1.0, 1.0);
    CHECK(p[0] == doctest::Approx(0.58579).epsilon(1e-5));
    CHECK(p[1] == doctest::Approx(0.20711).epsilon(1e-5));
    CHECK(p[2] == doctest::Approx(0.20711).epsilon(1e-5));
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-14));

    const std::vector<double> skewed{1.0, 0.01};
    const auto excl = rnd_opt_probabilities(skewed, 0.5, 1.0);
    CHECK(excl[0] == 1.0);
    CHECK(excl[1] == 0.0);

    // At lambda E[Y] = 0.99 both shares stay positive; compare with a fine grid.
    const auto both = rnd_opt_probabilities(skewed, 0.99, 1.0);
    CHECK(both[1] > 0.0);
    double best = INFINITY;
    for (double q = 0.0; q <= 0.0099; q += 1e-6) best = std::min(best, objective({1.0 - q, q}, skewed, 0.99));
    CHECK(objective(both, skewed, 0.99) <= best + 1e-9);

    CHECK_THROWS_AS(rnd_opt_probabilities(three, 2.0, 1.0), InstabilityError);
}

TEST_CASE("optimal random split is stationary") {
    const std::vector<std::vector<double>> rate_sets{{1, 1}, {1, 0.5, 0.5}, {2, 1, 0.25}, {3, 2, 1, 0.5}};
    for (const auto& rates : rate_sets) {
        double total = 0;
        for (double r : rates) total += r;
        for (double rho : {0.2, 0.5, 0.9}) {
            const double load = rho * total;
            const auto p = rnd_opt_probabilities(rates, load, 1.0);
            const double f0 = objective(p, rates, load);
            for (std::size_t i = 0; i < rates.size(); ++i)
                for (std::size_t j = 0; j < rates.size(); ++j) {
                    if (i == j) continue;
                    auto q = p;
                    q[i] += 1e-4;
                    q[j] -= 1e-4;
                    if (q[j] < 0 || q[i] * load >= rates[i]) continue;
                    CHECK(objective(q, rates, load) >= f0 - 1e-8);
                }
        }
    }
}

TEST_CASE("SITA-E thresholds") {
    const auto u = JobSizeDistribution::uniform(0.5, 1.5);
    const auto two = sita_e_thresholds(u, std::vector<double>{1.0, 1.0});
    REQUIRE(two.size() == 3);
    CHECK(two[0] == 0.0);
    CHECK(two[1] == doctest::Approx(std::sqrt(1.25)).epsilon(1e-10));
    CHECK(std::isinf(two[2]));

    const auto one = sita_e_thresholds(u, std::vector<double>{1.0});
    REQUIRE(one.size() == 2);
    CHECK(one[0] == 0.0);
    CHECK(std::isinf(one[1]));

    const std::vector<double> rates{1.0, 0.5, 0.5};
    const auto xi = sita_e_thresholds(pareto, rates);
    REQUIRE(xi.size() == 4);
    std::vector<double> per_speed;
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(xi[i] < xi[i + 1]);
        per_speed.push_back((bp_partial_mean(xi[i + 1]) - bp_partial_mean(xi[i])) / rates[i]);
    }
    for (double v : per_speed) CHECK(v == doctest::Approx(per_speed[0]).epsilon(1e-9));
    CHECK(per_speed[0] * 2.0 == doctest::Approx(bp_partial_mean(bp_p)).epsilon(1e-9));

    CHECK_THROWS(sita_e_thresholds(JobSizeDistribution::deterministic(1.0), rates));
}

TEST_CASE("admittance displays match value functions with scaling") {
    Rng rng(53);
    for (Discipline d : {Discipline::fifo, Discipline::lifo}) {
        for (PolicyKind base : {PolicyKind::rnd_rho, PolicyKind::rnd_opt, PolicyKind::sita_e}) {
            const SystemSpec sys = system({1.0, 0.5, 0.5}, d, 0.7);
            const Dispatcher disp(sys, PolicySpec::fpi_on(base), 1);
            for (int rep = 0; rep < 30; ++rep) {
                for (std::size_t i = 0; i < 3; ++i) {
                    QueueState q(d, sys.servers[i].rate);
                    const int n = static_cast<int>(rng.uniform() * 4);
                    for (int k = 0; k < n; ++k) q.admit(pareto.sample(rng), 1.0);
                    q.advance(rng.uniform());
                    const double y = pareto.sample(rng);
                    const ValueContext& ctx = *disp.contexts()[i];
                    const auto z = value_jobs(q, sys.model);
                    const double nu = sys.servers[i].rate;
                    const double via_value = sys.total_rate() / nu * admit_of(ctx, d, z, y / nu);
                    CHECK(disp.admit_cost_scaled(i, q, y) == doctest::Approx(via_value).epsilon(1e-12));
                }
            }
        }
    }
    // Empty LIFO queue: sum(nu) / (nu_i - lambda_i E[Y_i]).
    CHECK(lifo_admit_display(2.0, 1.0, std::vector<double>{}, 3.0, 0.5, 1.0) == doctest::Approx(4.0));
    CHECK(fifo_admit_display(2.0, 1.0, 0.0, 1.0, 0.5, 1.0, 1.0) == doctest::Approx(2.0 * (1.0 + 0.25 * 1.0 / 0.5)));
}

TEST_CASE("identical servers see equal costs in equal states") {
    const SystemSpec sys = system({1.0, 1.0}, Discipline::fifo, 0.6);
    const Dispatcher disp(sys, PolicySpec::fpi_on(PolicyKind::rnd_u), 1);
    QueueState a(Discipline::fifo, 1.0), b(Discipline::fifo, 1.0);
    a.admit(2.0, 1.0);
    b.admit(2.0, 1.0);
    CHECK(disp.admit_cost_scaled(0, a, 1.0) == disp.admit_cost_scaled(1, b, 1.0));
}

TEST_CASE("decide examples") {
    {
        const SystemSpec sys = system({1.0, 1.0}, Discipline::fifo, 0.5);
        auto q = empty_queues(sys);
        q[0].admit(2.0, 1.0);
        q[1].admit(1.0, 1.0);
        Dispatcher lwl(sys, PolicySpec::simple(PolicyKind::lwl_minus), 1);
        CHECK(lwl.decide(q, 5.0) == 1);
        Dispatcher fpi(sys, PolicySpec::fpi_on(PolicyKind::rnd_u), 1);
        auto empty = empty_queues(sys);
        for (double y : {0.4, 1.0, 300.0}) CHECK(fpi.decide(empty, y) == 0);
    }
    {
        const SystemSpec sys = system({1.0, 0.5, 0.5}, Discipline::fifo, 0.5);
        auto q = empty_queues(sys);
        for (int i = 0; i < 3; ++i) q[0].admit(0.1, 1.0);
        q[1].admit(5.0, 1.0);
        q[2].admit(5.0, 1.0);
        Dispatcher jsq(sys, PolicySpec::simple(PolicyKind::jsq), 1);
        CHECK(jsq.decide(q, 1.0) == 1);
        // LWL+ with backlogs in time (0.3, 10, 10): the fast server wins.
        Dispatcher plus(sys, PolicySpec::simple(PolicyKind::lwl_plus), 1);
        CHECK(plus.decide(q, 1.0) == 0);
        // Ties go to the faster server.
        auto e = empty_queues(sys);
        Dispatcher lwl(sys, PolicySpec::simple(PolicyKind::lwl_minus), 1);
        CHECK(lwl.decide(e, 1.0) == 0);
        Dispatcher rr(sys, PolicySpec::simple(PolicyKind::round_robin), 1);
        CHECK(rr.decide(e, 1.0) == 0);
        CHECK(rr.decide(e, 1.0) == 1);
        CHECK(rr.decide(e, 1.0) == 2);
        CHECK(rr.decide(e, 1.0) == 0);
    }
    {
        // Myopic on FIFO: the marginal drain cost is the delay caused to the new job.
        const SystemSpec sys = system({1.0, 1.0}, Discipline::fifo, 0.5);
        auto q = empty_queues(sys);
        q[0].admit(3.0, 1.0);
        q[1].admit(1.0, 1.0);
        Dispatcher my(sys, PolicySpec::simple(PolicyKind::myopic), 1);
        CHECK(my.decide(q, 1.0) == 1);
    }
    CHECK_THROWS(Dispatcher(system({1.0}, Discipline::fifo, 0.5), PolicySpec::simple(PolicyKind::jsq), 1)
                     .decide(empty_queues(system({1.0}, Discipline::fifo, 0.5)), 0.0));
}

TEST_CASE("decisions are deterministic given the seed") {
    const SystemSpec sys = system({1.0, 0.5, 0.5}, Discipline::fifo, 0.7);
    const std::vector<PolicySpec> policies{
        PolicySpec::simple(PolicyKind::rnd_rho),  PolicySpec::simple(PolicyKind::rnd_u),
        PolicySpec::simple(PolicyKind::rnd_opt),  PolicySpec::simple(PolicyKind::sita_e),
        PolicySpec::simple(PolicyKind::sita_es),  PolicySpec::simple(PolicyKind::round_robin),
        PolicySpec::simple(PolicyKind::lwl_minus), PolicySpec::simple(PolicyKind::lwl_plus),
        PolicySpec::simple(PolicyKind::jsq),      PolicySpec::simple(PolicyKind::myopic),
        PolicySpec::fpi_on(PolicyKind::rnd_rho),  PolicySpec::fpi_on(PolicyKind::rnd_opt),
        PolicySpec::fpi_on(PolicyKind::sita_e),   PolicySpec{PolicyKind::rnd, {0.2, 0.3, 0.5}, PolicyKind::rnd_rho}};
    for (const auto& pol : policies) {
        Dispatcher a(sys, pol, 77), b(sys, pol, 77);
        auto qa = empty_queues(sys), qb = empty_queues(sys);
        Rng rng(3);
        for (int i = 0; i < 2000; ++i) {
            const double dt = rng.exponential(sys.lambda), y = pareto.sample(rng);
            for (auto& q : qa) q.advance(dt);
            for (auto& q : qb) q.advance(dt);
            const auto ia = a.decide(qa, y), ib = b.decide(qb, y);
            if (ia != ib) FAIL("policy " << pol.label() << " diverged");
            qa[ia].admit(y, 1.0);
            qb[ib].admit(y, 1.0);
            a.after_assignment(qa);
            b.after_assignment(qb);
        }
    }
}

TEST_CASE("SITA-Es keeps identical backlogs ascending") {
    const SystemSpec sys = system({1.0, 0.5, 0.5}, Discipline::fifo, 0.8);
    Dispatcher d(sys, PolicySpec::simple(PolicyKind::sita_es), 5);
    auto q = empty_queues(sys);
    Rng rng(8);
    for (int i = 0; i < 20000; ++i) {
        const double dt = rng.exponential(sys.lambda), y = pareto.sample(rng);
        for (auto& s : q) s.advance(dt);
        q[d.decide(q, y)].admit(y, 1.0);
        d.after_assignment(q);
        if (q[1].backlog() > q[2].backlog()) FAIL("identical servers out of order");
    }
}

TEST_CASE("switching the roles of identical servers") {
    {
        const SystemSpec sys = system({1.0, 1.0}, Discipline::lifo, 0.6);
        const Dispatcher disp(sys, PolicySpec::fpi_on(PolicyKind::rnd_rho), 1);
        auto q = empty_queues(sys);
        q[0].admit(5.0, 1.0);
        q[1].admit(1.0, 1.0);
        CHECK_FALSE(switch_roles(q, sys, disp.contexts()));
        CHECK(q[0].backlog() == 5.0);
    }
    {
        const SystemSpec sys = system({1.0}, Discipline::fifo, 0.6);
        const Dispatcher disp(sys, PolicySpec::fpi_on(PolicyKind::rnd_rho), 1);
        auto q = empty_queues(sys);
        q[0].admit(5.0, 1.0);
        CHECK_FALSE(switch_roles(q, sys, disp.contexts()));
        CHECK(identical_groups(sys).empty());
    }
    {
        const SystemSpec sys = system({1.0, 0.5, 0.5}, Discipline::fifo, 0.7);
        const Dispatcher disp(sys, PolicySpec::fpi_on(PolicyKind::sita_e), 1);
        const auto& ctx = disp.contexts();
        const std::size_t hi = ctx[1]->fifo_coefficient() > ctx[2]->fifo_coefficient() ? 1 : 2;
        const std::size_t lo = 3 - hi;
        CHECK(ctx[hi]->fifo_coefficient() != ctx[lo]->fifo_coefficient());
        auto q = empty_queues(sys);
        q[hi].admit(5.0 * 0.5, 1.0);
        q[lo].admit(1.0 * 0.5, 1.0);
        CHECK(switch_roles(q, sys, ctx));
        CHECK(q[hi].backlog_time() == doctest::Approx(1.0));
        CHECK(q[lo].backlog_time() == doctest::Approx(5.0));
        CHECK_FALSE(switch_roles(q, sys, ctx));
    }
}
