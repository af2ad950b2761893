#include <doctest.h>

#include <cmath>
#include <vector>

#include "weldcrack/de.hpp"
#include "weldcrack/lbfgsb.hpp"
#include "weldcrack/types.hpp"

using namespace weldcrack;

namespace {

double sphere(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

double rosenbrock(const std::vector<double>& x) {
    double s = 0.0;
    for (size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = 1.0 - x[i];
        s += 100.0 * a * a + b * b;
    }
    return s;
}

}  // namespace

TEST_CASE("DE minimizes a 10-d sphere") {
    const std::vector<double> lo(10, -5.0), hi(10, 5.0);
    DeConfig cfg;
    cfg.seed = 1;
    const DeResult r = de_optimize(sphere, lo, hi, cfg);
    CHECK(r.best_value < 1e-3);
    for (double v : r.best) CHECK(std::abs(v) < 0.1);
}

TEST_CASE("DE finds the 1-d quadratic minimum") {
    auto f = [](const std::vector<double>& x) { return (x[0] - 2.0) * (x[0] - 2.0); };
    DeConfig cfg;
    cfg.seed = 3;
    const DeResult r = de_optimize(f, {-10.0}, {10.0}, cfg);
    CHECK(r.best[0] == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(r.best_value < 1e-8);
}

TEST_CASE("DE evaluation accounting") {
    DeConfig cfg;
    cfg.population = 20;
    cfg.iterations = 30;
    cfg.seed = 5;
    const DeResult r = de_optimize(sphere, std::vector<double>(3, -1.0),
                                   std::vector<double>(3, 1.0), cfg);
    CHECK(r.evaluations == 20 + 20 * 30);
}

TEST_CASE("DE handles a constant objective") {
    auto f = [](const std::vector<double>&) { return 4.25; };
    DeConfig cfg;
    cfg.iterations = 10;
    cfg.population = 8;
    cfg.seed = 9;
    const DeResult r = de_optimize(f, {0.0, 0.0}, {1.0, 1.0}, cfg);
    CHECK(r.best_value == 4.25);
    for (size_t i = 0; i < 2; ++i) {
        CHECK(r.best[i] >= 0.0);
        CHECK(r.best[i] <= 1.0);
    }
}

TEST_CASE("DE never evaluates outside the box") {
    const std::vector<double> lo = {-1.0, 2.0}, hi = {1.0, 3.0};
    bool violated = false;
    auto f = [&](const std::vector<double>& x) {
        for (size_t i = 0; i < x.size(); ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) violated = true;
        return sphere(x);
    };
    DeConfig cfg;
    cfg.seed = 11;
    de_optimize(f, lo, hi, cfg);
    CHECK(!violated);
}

TEST_CASE("DE respects collapsed bounds") {
    auto f = [](const std::vector<double>& x) { return x[0] * x[0] + x[1]; };
    DeConfig cfg;
    cfg.iterations = 5;
    cfg.population = 6;
    cfg.seed = 13;
    const DeResult r = de_optimize(f, {2.0, 0.0}, {2.0, 1.0}, cfg);
    CHECK(r.best[0] == 2.0);
}

TEST_CASE("DE is deterministic per seed") {
    const std::vector<double> lo(4, -3.0), hi(4, 3.0);
    DeConfig cfg;
    cfg.seed = 77;
    cfg.iterations = 40;
    const DeResult a = de_optimize(rosenbrock, lo, hi, cfg);
    const DeResult b = de_optimize(rosenbrock, lo, hi, cfg);
    CHECK(a.best == b.best);
    CHECK(a.best_value == b.best_value);
}

TEST_CASE("DE configuration validation") {
    const std::vector<double> lo = {0.0}, hi = {1.0};
    DeConfig cfg;
    cfg.population = 3;
    CHECK_THROWS_AS(de_optimize(sphere, lo, hi, cfg), UsageError);
    cfg = {};
    cfg.F = 0.0;
    CHECK_THROWS_AS(de_optimize(sphere, lo, hi, cfg), UsageError);
    cfg = {};
    cfg.CR = 1.5;
    CHECK_THROWS_AS(de_optimize(sphere, lo, hi, cfg), UsageError);
    cfg = {};
    CHECK_THROWS_AS(de_optimize(sphere, {1.0}, {0.0}, cfg), UsageError);
    CHECK_THROWS_AS(de_optimize(sphere, {0.0, 0.0}, {1.0}, cfg), UsageError);
}

TEST_CASE("finite-difference gradient fidelity") {
    const std::vector<double> lo(3, -10.0), hi(3, 10.0);

    SUBCASE("quadratic") {
        auto f = [](const std::vector<double>& x) {
            return x[0] * x[0] + 3.0 * x[1] * x[1] + 0.5 * x[2] * x[2] + x[0] * x[1];
        };
        const std::vector<double> x = {1.0, -2.0, 0.5};
        const auto g = fd_gradient(f, x, lo, hi, 1e-6);
        CHECK(g[0] == doctest::Approx(2.0 * x[0] + x[1]).epsilon(1e-5));
        CHECK(g[1] == doctest::Approx(6.0 * x[1] + x[0]).epsilon(1e-5));
        CHECK(g[2] == doctest::Approx(x[2]).epsilon(1e-5));
    }

    SUBCASE("rosenbrock") {
        const std::vector<double> x = {0.3, -0.7};
        const auto g = fd_gradient(rosenbrock, x, {-10.0, -10.0}, {10.0, 10.0}, 1e-6);
        const double gx = -400.0 * x[0] * (x[1] - x[0] * x[0]) - 2.0 * (1.0 - x[0]);
        const double gy = 200.0 * (x[1] - x[0] * x[0]);
        CHECK(g[0] == doctest::Approx(gx).epsilon(1e-5));
        CHECK(g[1] == doctest::Approx(gy).epsilon(1e-5));
    }

    SUBCASE("at a boundary the stencil stays inside the box") {
        bool outside = false;
        auto f = [&](const std::vector<double>& x) {
            if (x[0] < 0.0 || x[0] > 1.0) outside = true;
            return x[0] * x[0];
        };
        const auto g = fd_gradient(f, {0.0}, {0.0}, {1.0}, 1e-6);
        CHECK(!outside);
        CHECK(g[0] == doctest::Approx(0.0).epsilon(1e-4));
    }
}

TEST_CASE("quasi-Newton solves an unconstrained quadratic") {
    auto f = [](const std::vector<double>& x) {
        return (x[0] - 1.0) * (x[0] - 1.0) + 4.0 * (x[1] + 2.0) * (x[1] + 2.0);
    };
    const LbfgsbResult r = lbfgsb_minimize(f, {5.0, 5.0}, {-10.0, -10.0}, {10.0, 10.0});
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(r.converged);
}

TEST_CASE("quasi-Newton solves 2-d rosenbrock") {
    const LbfgsbResult r =
        lbfgsb_minimize(rosenbrock, {-1.2, 1.0}, {-5.0, -5.0}, {5.0, 5.0});
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.value < 1e-8);
}

TEST_CASE("quasi-Newton honors active bounds") {
    // Unconstrained minimum at (1, -2); the box keeps x1 at or above 0.
    auto f = [](const std::vector<double>& x) {
        return (x[0] - 1.0) * (x[0] - 1.0) + 4.0 * (x[1] + 2.0) * (x[1] + 2.0);
    };
    bool violated = false;
    auto guard = [&](const std::vector<double>& x) {
        if (x[0] < -1.0 || x[0] > 3.0 || x[1] < 0.0 || x[1] > 3.0) violated = true;
        return f(x);
    };
    const LbfgsbResult r = lbfgsb_minimize(guard, {2.0, 2.0}, {-1.0, 0.0}, {3.0, 3.0});
    CHECK(!violated);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(r.x[1] == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("quasi-Newton with collapsed bounds returns the fixed point") {
    auto f = [](const std::vector<double>& x) { return x[0] * x[0]; };
    const LbfgsbResult r = lbfgsb_minimize(f, {2.0}, {2.0}, {2.0});
    CHECK(r.x[0] == 2.0);
    CHECK(r.value == 4.0);
}

TEST_CASE("quasi-Newton starting at the optimum stops immediately") {
    auto f = [](const std::vector<double>& x) { return x[0] * x[0] + x[1] * x[1]; };
    const LbfgsbResult r = lbfgsb_minimize(f, {0.0, 0.0}, {-1.0, -1.0}, {1.0, 1.0});
    CHECK(r.converged);
    CHECK(r.value == 0.0);
}
