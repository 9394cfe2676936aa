#include <doctest.h>

#include <cmath>
#include <complex>

#include "helpers.hpp"
#include "mitmlab/linalg.hpp"
#include "mitmlab/lti.hpp"
#include "mitmlab/random.hpp"

using namespace mitmlab;
using testing::mat;
using testing::scalar;
using testing::vec;

namespace {

// Largest singular value of a 2×2 matrix from the eigenvalues of MᵀM.
double singular_2x2(const Mat& m) {
    const double p = m(0, 0) * m(0, 0) + m(1, 0) * m(1, 0);
    const double q = m(0, 0) * m(0, 1) + m(1, 0) * m(1, 1);
    const double r = m(0, 1) * m(0, 1) + m(1, 1) * m(1, 1);
    const double half = 0.5 * (p - r);
    return std::sqrt(0.5 * (p + r) + std::sqrt(half * half + q * q));
}

// Largest |λ| of a 2×2 matrix from its characteristic polynomial.
double radius_2x2(const Mat& m) {
    const double tr = m(0, 0) + m(1, 1);
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4.0 * det));
    return std::max(std::abs(0.5 * (tr + disc)), std::abs(0.5 * (tr - disc)));
}

Mat random_matrix(RandomStream& rng, int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = rng.gaussian();
    }
    return m;
}

}  // namespace

TEST_CASE("step_plant evaluates A x + u + w") {
    const SystemModel scalar_model(scalar(1.1), 1.0);
    CHECK(step_plant(vec({1}), vec({0}), vec({0}), scalar_model)(0) == doctest::Approx(1.1));
    CHECK(step_plant(vec({1}), vec({-1.1}), vec({0.5}), scalar_model)(0) == doctest::Approx(0.5));

    const SystemModel vector_model(mat({{1, 2}, {3, 4}}), 1.0);
    const Vec x = step_plant(vec({1, 1}), vec({0, 0}), vec({0, 0}), vector_model);
    CHECK(x(0) == 3.0);
    CHECK(x(1) == 7.0);

    CHECK_THROWS_AS(step_plant(vec({1, 1}), vec({0}), vec({0}), scalar_model), std::invalid_argument);
}

TEST_CASE("SystemModel rejects bad inputs") {
    CHECK_THROWS_AS(SystemModel(mat({{1, 2}}), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(SystemModel(scalar(1.1), -1.0), std::invalid_argument);
    CHECK_THROWS_AS(SystemModel(scalar(NAN), 1.0), std::invalid_argument);
    CHECK_NOTHROW(SystemModel(scalar(1.1), 0.0));
}

TEST_CASE("draw_noise") {
    SUBCASE("zero variance gives zeros") {
        const SystemModel model(mat({{1, 0}, {0, 1}}), 0.0);
        RandomStream rng(7);
        for (int i = 0; i < 100; ++i) CHECK(draw_noise(rng, model).squaredNorm() == 0.0);
    }
    SUBCASE("unit variance moments") {
        const SystemModel model(scalar(1.1), 1.0);
        RandomStream rng(12345);
        const int n = 100000;
        double sum = 0.0, sum_sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double w = draw_noise(rng, model)(0);
            sum += w;
            sum_sq += w * w;
        }
        const double mean = sum / n;
        const double var = sum_sq / n - mean * mean;
        CHECK(std::abs(mean) < 4.0 / std::sqrt(double(n)));
        CHECK(std::abs(var - 1.0) < 0.05);
    }
    SUBCASE("same seed reproduces the stream") {
        const SystemModel model(mat({{1, 0}, {0, 1}}), 2.0);
        RandomStream a(99), b(99);
        for (int i = 0; i < 50; ++i) CHECK(draw_noise(a, model) == draw_noise(b, model));
    }
}

TEST_CASE("apply_policy") {
    RandomStream rng(1);
    CHECK(apply_policy(LinearGain{scalar(1.1)}, vec({2}), rng)(0) == doctest::Approx(-2.2));
    CHECK(apply_policy(CancelPlusDither{scalar(1.1), 0.0}, vec({3}), rng)(0) == doctest::Approx(-3.3));
    const Vec u = apply_policy(ScaledCancel{mat({{1, 2}, {3, 4}}), 0.9}, vec({1, 0}), rng);
    CHECK(u(0) == doctest::Approx(-0.9));
    CHECK(u(1) == doctest::Approx(-2.7));
    CHECK_THROWS_AS(apply_policy(LinearGain{scalar(1.1)}, vec({1, 2}), rng), std::invalid_argument);
    CHECK_THROWS_AS(validate_policy(CancelPlusDither{scalar(1.1), -1.0}, 1), std::invalid_argument);
}

TEST_CASE("simulate_nominal") {
    SUBCASE("perfect cancellation in one step") {
        const SystemModel model(mat({{1, 2}, {3, 4}}), 0.0);
        SimulationOptions opt;
        opt.x0 = vec({0.5, -2.0});
        const auto traj = simulate_nominal(model, LinearGain{model.a()}, 2, 3, opt);
        // U_0 = 0 by convention, so cancellation starts at k = 1.
        CHECK(traj.U[0].squaredNorm() == 0.0);
        CHECK(traj.X[2].norm() == doctest::Approx(0.0));
    }
    SUBCASE("residuals reconstruct the noise exactly") {
        const SystemModel model(scalar(1.1), 1.0);
        const auto traj = simulate_nominal(model, CancelPlusDither{model.a(), 0.0}, 800, 42);
        REQUIRE(traj.X.size() == 801);
        REQUIRE(traj.U.size() == 800);
        CHECK(traj.U[0](0) == 0.0);
        CHECK(traj.W[0](0) == 0.0);
        for (std::size_t k = 0; k < 800; ++k) {
            const double r = traj.X[k + 1](0) - (1.1 * traj.X[k](0) + traj.U[k](0));
            CHECK(std::abs(r - traj.W[k](0)) <= 1e-12 * (1.0 + std::abs(traj.X[k + 1](0))));
        }
    }
    SUBCASE("vector closed loop stays bounded") {
        const Mat a = mat({{1, 2}, {3, 4}});
        CHECK(spectral_radius(0.1 * a) == doctest::Approx(0.1 * radius_2x2(a)).epsilon(1e-12));
        CHECK(spectral_radius(0.1 * a) == doctest::Approx(0.537).epsilon(1e-3));
        const auto traj = simulate_nominal(SystemModel(a, 1.0), ScaledCancel{a, 0.9}, 200, 5);
        CHECK_FALSE(traj.diverged);
        CHECK(traj.X.size() == 201);
    }
    SUBCASE("overflow marks divergence and truncates") {
        const SystemModel model(scalar(3.0), 0.0);
        SimulationOptions opt;
        opt.overflow_guard = 100.0;
        const auto traj = simulate_nominal(model, LinearGain{scalar(0.0)}, 50, 1, opt);
        CHECK(traj.diverged);
        REQUIRE(traj.diverged_at.has_value());
        CHECK(*traj.diverged_at == 5);  // 3^5 = 243 > 100
        CHECK(traj.X.size() == 6);
    }
    SUBCASE("deterministic given the seed") {
        const SystemModel model(scalar(1.1), 1.0);
        const auto a = simulate_nominal(model, CancelPlusDither{model.a(), 9.0}, 300, 77);
        const auto b = simulate_nominal(model, CancelPlusDither{model.a(), 9.0}, 300, 77);
        const auto c = simulate_nominal(model, CancelPlusDither{model.a(), 9.0}, 300, 78);
        CHECK(a.X == b.X);
        CHECK(a.U == b.U);
        CHECK_FALSE(a.X == c.X);
    }
}

TEST_CASE("operator_norm") {
    CHECK(operator_norm(Mat::Identity(2, 2)) == doctest::Approx(1.0));
    CHECK(operator_norm(mat({{3, 0}, {0, 4}})) == doctest::Approx(4.0));
    const Mat a = mat({{1, 2}, {3, 4}});
    CHECK(std::abs(operator_norm(a) - singular_2x2(a)) <= 1e-9 * singular_2x2(a));
    CHECK_THROWS_AS(operator_norm(mat({{1, NAN}, {0, 1}})), std::invalid_argument);
    CHECK_THROWS_AS(operator_norm(mat({{1, 2}})), std::invalid_argument);

    RandomStream rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const Mat m = random_matrix(rng, 2);
        CHECK(std::abs(operator_norm(m) - singular_2x2(m)) <= 1e-9 * singular_2x2(m));
    }
}

TEST_CASE("operator_norm properties") {
    RandomStream rng(31337);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 6);
        const Mat m = random_matrix(rng, n);
        const double norm = operator_norm(m);
        CHECK(norm + 1e-9 >= spectral_radius(m));

        const Mat sym = m + m.transpose();
        CHECK(std::abs(operator_norm(sym) - spectral_radius(sym)) <= 1e-9 * (1.0 + spectral_radius(sym)));

        const double c = 3.0 * rng.gaussian();
        CHECK(std::abs(operator_norm(c * m) - std::abs(c) * norm) <= 1e-9 * std::abs(c) * norm);
    }
}

TEST_CASE("spectral_radius and marginal stability") {
    const Mat d = mat({{0.5, 0}, {0, -0.9}});
    CHECK(spectral_radius(d) == doctest::Approx(0.9));
    CHECK(is_marginally_stable(d));

    const Mat a = mat({{1, 2}, {3, 4}});
    CHECK(spectral_radius(a) == doctest::Approx((5.0 + std::sqrt(33.0)) / 2.0).epsilon(1e-12));
    CHECK_FALSE(is_marginally_stable(a));

    CHECK(spectral_radius(Mat::Identity(3, 3)) == doctest::Approx(1.0));
    CHECK(is_marginally_stable(Mat::Identity(3, 3)));

    const Mat rotation = mat({{0, -1}, {1, 0}});
    CHECK(spectral_radius(rotation) == doctest::Approx(1.0));
}
