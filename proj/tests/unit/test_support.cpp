#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>

#include "mitmlab/parallel.hpp"
#include "mitmlab/random.hpp"
#include "mitmlab/stats.hpp"

using namespace mitmlab;

TEST_CASE("random streams") {
    SUBCASE("seek reproduces draws") {
        RandomStream a(5);
        for (int i = 0; i < 10; ++i) a.next_u64();
        const auto pos = a.position();
        const auto x = a.next_u64();
        a.seek(pos);
        CHECK(a.next_u64() == x);
    }
    SUBCASE("uniform stays inside (0, 1)") {
        RandomStream r(0);
        for (int i = 0; i < 10000; ++i) {
            const double u = r.uniform();
            CHECK(u > 0.0);
            CHECK(u < 1.0);
        }
    }
    SUBCASE("trial seeds separate cells and trials") {
        std::set<std::uint64_t> seen;
        for (const char* cell : {"a", "b", "L=10"}) {
            for (std::uint64_t t = 0; t < 100; ++t) seen.insert(derive_trial_seed(1, cell, t));
        }
        CHECK(seen.size() == 300);
        CHECK(derive_trial_seed(1, "a", 0) == derive_trial_seed(1, "a", 0));
        CHECK(derive_trial_seed(1, "a", 0) != derive_trial_seed(2, "a", 0));
    }
    SUBCASE("substreams differ") {
        auto s = TrialStreams::from_seed(derive_trial_seed(1, "cell", 0));
        CHECK(s.plant.key() != s.dither.key());
        CHECK(s.plant.key() != s.attacker.key());
        CHECK(s.dither.key() != s.attacker.key());
    }
}

TEST_CASE("wilson interval") {
    // Reference values from the closed form at z = 1.959963984540054.
    const Interval i = wilson_interval(50, 100);
    CHECK(i.lo == doctest::Approx(0.403831).epsilon(1e-5));
    CHECK(i.hi == doctest::Approx(0.596169).epsilon(1e-5));
    const Interval zero = wilson_interval(0, 1000);
    CHECK(zero.lo == doctest::Approx(0.0));
    CHECK(zero.hi == doctest::Approx(0.00382676).epsilon(1e-5));
    CHECK_THROWS_AS(wilson_interval(1, 0), std::invalid_argument);
    CHECK_THROWS_AS(wilson_interval(5, 4), std::invalid_argument);
}

TEST_CASE("accumulators") {
    MeanAccumulator a, b, all;
    for (int i = 0; i < 10; ++i) {
        (i < 4 ? a : b).add(i);
        all.add(i);
    }
    a.merge(b);
    CHECK(a.n == all.n);
    CHECK(a.mean() == doctest::Approx(4.5));
    CHECK(a.variance() == doctest::Approx(55.0 / 6.0));

    PathAccumulator p(3), q(3);
    p.add({1, 2, 3});
    q.add({3, 4, 5});
    PathAccumulator empty;
    empty.merge(p);
    empty.merge(q);
    CHECK(empty.n == 2);
    CHECK(empty.mean(2) == doctest::Approx(4.0));
    CHECK(empty.standard_error(0) == doctest::Approx(1.0));
}

TEST_CASE("quantile and pairwise sum") {
    CHECK(quantile({3, 1, 2, 4}, 0.5) == doctest::Approx(2.5));
    CHECK(quantile({5}, 0.9) == 5.0);
    CHECK(quantile({1, 2, 3, 4, 5}, 1.0) == 5.0);
    CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);
    std::vector<double> v(1000, 0.1);
    CHECK(pairwise_sum(v) == doctest::Approx(100.0));
}

TEST_CASE("blocked_reduce is independent of the worker count") {
    auto run = [](int workers) {
        return blocked_reduce<MeanAccumulator>(
            10000, workers, [] { return MeanAccumulator{}; },
            [](std::int64_t i, MeanAccumulator& acc) {
                RandomStream r(derive_trial_seed(3, "reduce", static_cast<std::uint64_t>(i)));
                acc.add(r.gaussian() * 1e3 + 1e-3);
            });
    };
    const auto one = run(1);
    for (int w : {2, 3, 8}) {
        const auto many = run(w);
        CHECK(many.n == one.n);
        CHECK(many.sum == one.sum);
        CHECK(many.sum_sq == one.sum_sq);
    }
}

TEST_CASE("parallel_for forwards the first exception") {
    CHECK_THROWS_AS(parallel_for(100, 4,
                                 [](std::int64_t i) {
                                     if (i == 37) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
    const auto squares = parallel_map(50, 3, [](std::int64_t i) { return i * i; });
    CHECK(squares[7] == 49);
    CHECK(squares.size() == 50);
}
