#include <doctest.h>

#include "mitmlab/harness.hpp"
#include "mitmlab/output.hpp"

using namespace mitmlab;

namespace {

ExperimentConfig small(const std::string& name, std::int64_t trials) {
    ExperimentConfig c = preset(name);
    c.trials = c.sprt_trials = c.curve_trials = trials;
    return c;
}

void check_cells(const ExperimentResult& r) {
    REQUIRE_FALSE(r.cells.empty());
    for (const auto& cell : r.cells) {
        CAPTURE(cell.cell);
        CHECK(cell.successes + cell.failures + cell.censored + cell.diverged == cell.trials);
        if (cell.rate) {
            CHECK(*cell.rate >= 0.0);
            CHECK(*cell.rate <= 1.0);
            CHECK(*cell.ci_lo <= *cell.rate);
            CHECK(*cell.rate <= *cell.ci_hi);
        }
    }
}

}  // namespace

TEST_CASE("trial seeding") {
    ExperimentConfig c = preset("scalar-fig2a");
    c.trials = 1;
    SUBCASE("one trial is reproducible") {
        const auto a = run_trials(c, "cell", 10, 9.0, 50);
        const auto b = run_trials(c, "cell", 10, 9.0, 50);
        REQUIRE(a.size() == 1);
        CHECK(a[0].X == b[0].X);
        CHECK(a[0].Y == b[0].Y);
        CHECK(a[0].U == b[0].U);
        CHECK(a[0].a_hat == b[0].a_hat);
    }
    SUBCASE("cells draw disjoint noise") {
        const auto a = run_trials(c, "cell-a", 10, 9.0, 101);
        const auto b = run_trials(c, "cell-b", 10, 9.0, 101);
        int same = 0;
        for (int k = 1; k <= 100; ++k) same += a[0].W[k](0) == b[0].W[k](0);
        CHECK(same == 0);
        CHECK(trial_seed(c, "cell-a", 0) != trial_seed(c, "cell-b", 0));
        CHECK(trial_seed(c, "cell-a", 0) != trial_seed(c, "cell-a", 1));
    }
}

TEST_CASE("aggregates do not depend on the worker count") {
    ExperimentConfig c = small("scalar-fig2a", 10000);
    c.L_grid = {20};
    c.dither_grid = {9.0};
    c.tau_grid = {60};
    c.workers = 1;
    const auto one = run_experiment(c);
    c.workers = 8;
    const auto eight = run_experiment(c);
    REQUIRE(one.cells.size() == eight.cells.size());
    for (std::size_t i = 0; i < one.cells.size(); ++i) {
        CHECK(one.cells[i].successes == eight.cells[i].successes);
        CHECK(*one.cells[i].rate == *eight.cells[i].rate);
    }

    ExperimentConfig curve_cfg = small("kl-identity", 10000);
    curve_cfg.workers = 1;
    const auto c1 = estimate_curve(curve_cfg, "curve", 20, 9.0, 40, 10000);
    curve_cfg.workers = 8;
    const auto c8 = estimate_curve(curve_cfg, "curve", 20, 9.0, 40, 10000);
    for (int n = 21; n <= 40; ++n) {
        CHECK(std::abs(c1.curve.c_at(n) - c8.curve.c_at(n)) <= 1e-12 * std::abs(c1.curve.c_at(n)));
        CHECK(c1.curve.c_at(n) == c8.curve.c_at(n));
    }
    CHECK(c1.kl.lhs == c8.kl.lhs);

    std::ostringstream a, b;
    write_result_json(one, a);
    write_result_json(eight, b);
    CHECK(a.str() == b.str());
}

TEST_CASE("experiments conserve trials and report valid rates") {
    SUBCASE("success vs L") {
        ExperimentConfig c = small("scalar-fig2a", 200);
        c.L_grid = {10, 40};
        c.tau_grid = {100};
        const auto r = run_experiment(c);
        check_cells(r);
        REQUIRE(r.find("L=10/dither=9/tau=100") != nullptr);
        CHECK(r.find("L=10/dither=9/tau=100")->kind == "attack_success");
        CHECK(r.find("nominal=1/dither=0/tau=100") != nullptr);
        CHECK(r.find("L=10/dither=9/tau=100")->trials == 200);
    }
    SUBCASE("success vs window") {
        ExperimentConfig c = small("vector-fig2b", 100);
        c.L_grid = {10};
        c.tau_grid = {50, 200};
        check_cells(run_experiment(c));
    }
    SUBCASE("bound suite") {
        ExperimentConfig c = small("scalar-bounds", 200);
        c.epsilon_grid = {0.1};
        c.horizon = 1000;
        const auto r = run_experiment(c);
        check_cells(r);
        CHECK(r.find("sprt_attack=1/epsilon=0.1") != nullptr);
    }
    SUBCASE("chebyshev, tail, kl") {
        ExperimentConfig c = small("chebyshev-fa", 200);
        check_cells(run_experiment(c));
        ExperimentConfig t = small("ls-tail", 200);
        check_cells(run_experiment(t));
        ExperimentConfig k = small("kl-identity", 100);
        k.L_grid = {20};
        check_cells(run_experiment(k));
    }
    SUBCASE("energy") {
        ExperimentConfig c = small("energy-tradeoff", 100);
        check_cells(run_experiment(c));
    }
}

TEST_CASE("a huge threshold lets every attack through") {
    ExperimentConfig c = small("vector-fig2b", 100);
    c.gamma = 1e3;
    c.L_grid = {10, 40};
    c.tau_grid = {200};
    const auto r = run_experiment(c);
    for (const auto& cell : r.cells) {
        if (cell.kind == "attack_success") CHECK(*cell.rate == doctest::Approx(1.0));
    }
}

TEST_CASE("long exploration approaches the no-false-alarm rate") {
    ExperimentConfig c = small("scalar-fig2a", 2000);
    c.L_grid = {2000};
    c.dither_grid = {9.0};
    const auto r = run_experiment(c);
    const auto* attack = r.find("L=2000/dither=9/tau=800");
    const auto* nominal = r.find("nominal=1/dither=9/tau=800");
    REQUIRE(attack != nullptr);
    REQUIRE(nominal != nullptr);
    const double target = 1.0 - *nominal->rate;
    const double hw = 0.5 * (*attack->ci_hi - *attack->ci_lo) + 0.5 * (*nominal->ci_hi - *nominal->ci_lo);
    CHECK(std::abs(*attack->rate - target) <= 1.5 * hw);
}

TEST_CASE("provenance and presets") {
    const auto names = preset_names();
    CHECK(names.size() == 8);
    for (const auto& n : names) {
        CHECK(preset(n).preset == n);
        CHECK(preset_version(n) == 1);
    }
    CHECK_THROWS_AS(preset("fig3"), std::invalid_argument);

    ExperimentConfig c = small("chebyshev-fa", 50);
    c.master_seed = 99;
    const auto r = run_experiment(c);
    CHECK(r.provenance.master_seed == 99);
    CHECK(r.provenance.config_hash.size() == 16);
    CHECK(r.provenance.config.at("master_seed") == 99);
    CHECK(r.provenance.version == std::string(kVersion));

    ExperimentConfig unknown = c;
    unknown.experiment = "fig3";
    CHECK_THROWS_AS(run_experiment(unknown), std::invalid_argument);
}
