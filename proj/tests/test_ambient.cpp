#include <doctest.h>

#include <cmath>
#include <random>

#include "logsob/ambient.hpp"
#include "logsob/quadrature.hpp"
#include "test_util.hpp"

using namespace logsob;
using ambient::Model;
using ambient::Point;

TEST_CASE("euclidean distance and balls") {
    const auto m = Model::euclidean(2);
    CHECK(ambient::distance(m, {{0, 0}}, {{3, 4}}) == doctest::Approx(5.0));
    CHECK(ambient::ball_volume(m, 1.0) == doctest::Approx(kPi).epsilon(1e-14));
    CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
    CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(ambient::ball_volume(m, -1.0), std::domain_error);
    CHECK_THROWS_AS(Model::euclidean(0), std::domain_error);
}

TEST_CASE("paraboloid profile: closed form against quadrature, and inverse") {
    const double a = 1.0;
    // arc length of the meridian, integrated directly
    const double oracle = quad::integrate_value(
        [&](double t) { return std::sqrt(1.0 + a * a * t * t); }, 0.0, 1.0);
    const double A1 = ambient::paraboloid_profile(a, 1.0);
    CHECK(A1 == doctest::Approx(oracle).epsilon(1e-10));
    CHECK(A1 == doctest::Approx(0.5 * std::sqrt(2.0) + 0.5 * std::log(1.0 + std::sqrt(2.0)))
                    .epsilon(1e-12));
    CHECK(A1 == doctest::Approx(1.147793).epsilon(1e-6));

    const auto m = Model::paraboloid(a);
    CHECK(ambient::distance(m, {{1.0, 0.0}}, {{0.0, 0.0}}) == doctest::Approx(A1));
    CHECK_THROWS_AS(ambient::distance(m, {{1.0, 0.0}}, {{2.0, 1.0}}), unsupported_error);

    for (double u : {0.0, 0.3, 1.0, 7.5, 40.0}) {
        const double s = ambient::paraboloid_profile(a, u);
        CHECK(s >= u - 1e-13);
        CHECK(ambient::paraboloid_profile_inverse(a, s) == doctest::Approx(u).epsilon(1e-9));
    }
    // A(u)/u grows without bound
    CHECK(ambient::paraboloid_profile(a, 1000.0) / 1000.0 > 100.0);
}

TEST_CASE("cone distance against a metric-graph oracle") {
    // Two points at u = 1 on opposite meridians of the beta = 1/2 cone. The
    // unrolled gap is pi/2 both ways, so the geodesic is the unrolled chord
    // of length sqrt(2); the through-apex path (length 2) loses.
    const auto m = Model::cone(0.5);
    const double d = ambient::distance(m, {{1.0, 0.0}}, {{1.0, kPi}});
    CHECK(d == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    const double oracle = testutil::cone_distance_dijkstra(0.5, 1.0, 0.0, 1.0, kPi);
    CHECK(d == doctest::Approx(oracle).epsilon(0.02));

    // a pair where wrapping the short way is clearly optimal
    const double d2 = ambient::distance(m, {{1.0, 0.0}}, {{1.0, kPi / 2}});
    const double oracle2 = testutil::cone_distance_dijkstra(0.5, 1.0, 0.0, 1.0, kPi / 2);
    CHECK(d2 == doctest::Approx(oracle2).epsilon(0.02));

    // sharp cone: going around the tip is cheap
    const auto sharp = Model::cone(0.05);
    const double d3 = ambient::distance(sharp, {{1.0, 0.0}}, {{1.0, kPi}});
    CHECK(d3 == doctest::Approx(2.0 * std::sin(0.05 * kPi / 2.0)).epsilon(1e-12));
}

TEST_CASE("cone with beta = 1 is the plane") {
    const auto cone = Model::cone(1.0);
    const auto plane = Model::euclidean(2);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ur(0.0, 5.0), uv(0.0, 2.0 * kPi - 1e-9);
    for (int k = 0; k < 200; ++k) {
        const double u1 = ur(rng), v1 = uv(rng), u2 = ur(rng), v2 = uv(rng);
        const double dc = ambient::distance(cone, {{u1, v1}}, {{u2, v2}});
        const double de = ambient::distance(plane, {{u1 * std::cos(v1), u1 * std::sin(v1)}},
                                            {{u2 * std::cos(v2), u2 * std::sin(v2)}});
        CHECK(dc == doctest::Approx(de).epsilon(1e-9));
    }
}

TEST_CASE("triangle inequality on random triples") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ur(0.0, 4.0), uv(0.0, 2.0 * kPi - 1e-9),
        uh(-5.0, 5.0);
    auto check_triple = [&](const Model& m, const Point& p, const Point& q, const Point& w) {
        const double pq = ambient::distance(m, p, q);
        const double qw = ambient::distance(m, q, w);
        const double pw = ambient::distance(m, p, w);
        CHECK(pw <= pq + qw + 1e-9);
    };
    for (int k = 0; k < 200; ++k) {
        check_triple(Model::euclidean(3), {{uh(rng), uh(rng), uh(rng)}},
                     {{uh(rng), uh(rng), uh(rng)}}, {{uh(rng), uh(rng), uh(rng)}});
        check_triple(Model::cone(0.37), {{ur(rng), uv(rng)}}, {{ur(rng), uv(rng)}},
                     {{ur(rng), uv(rng)}});
        check_triple(Model::cylinder(1.3), {{uv(rng), uh(rng)}}, {{uv(rng), uh(rng)}},
                     {{uv(rng), uh(rng)}});
    }
}

TEST_CASE("cone ball volume against Monte Carlo") {
    const auto m = Model::cone(0.5);
    CHECK(ambient::ball_volume(m, 2.0) == doctest::Approx(2.0 * kPi).epsilon(1e-12));
    // MC oracle: sample (u, v) uniformly on [0, 2] x [0, 2pi), weight by the
    // volume element beta * u du dv.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uu(0.0, 2.0), uv(0.0, 2.0 * kPi);
    const int n = 400000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = uu(rng);
        uv(rng);
        acc += 0.5 * u;
    }
    const double mc = acc / n * (2.0 * 2.0 * kPi);
    CHECK(ambient::ball_volume(m, 2.0) == doctest::Approx(mc).epsilon(0.01));
}

TEST_CASE("paraboloid ball volume against quadrature") {
    const auto m = Model::paraboloid(1.0);
    const double s = ambient::paraboloid_profile(1.0, 1.0);
    const double oracle = 2.0 * kPi *
                          quad::integrate_value(
                              [](double u) { return u * std::sqrt(1.0 + u * u); }, 0.0, 1.0);
    CHECK(ambient::ball_volume(m, s) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(oracle == doctest::Approx(2.0 * kPi * (std::pow(2.0, 1.5) - 1.0) / 3.0).epsilon(1e-10));
    CHECK(oracle == doctest::Approx(3.8294).epsilon(1e-4));
}

TEST_CASE("cylinder ball volume: piecewise formula against direct quadrature") {
    const double R = 0.8;
    const auto m = Model::cylinder(R);
    for (double s : {0.5, kPi * R, 3.0, 12.0}) {
        const double clip = std::min(s, kPi * R);
        const double oracle = 2.0 * quad::integrate_value(
                                        [&](double x) { return std::sqrt(s * s - x * x); },
                                        -clip, clip);
        CHECK(ambient::ball_volume(m, s) == doctest::Approx(oracle).epsilon(1e-7));
    }
}

TEST_CASE("ball volumes grow, volume ratios shrink") {
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(0.25 * std::pow(10.0, 3.0 * i / 40.0));
    for (const Model& m : {Model::euclidean(2), Model::euclidean(3), Model::cone(0.6),
                           Model::cylinder(1.0), Model::paraboloid(0.7)}) {
        double prev_vol = 0.0;
        for (double s : grid) {
            const double v = ambient::ball_volume(m, s);
            CHECK(v >= prev_vol);
            prev_vol = v;
        }
        const auto avr = ambient::avr_estimate(m, grid);  // throws if ratios increase
        CHECK(avr.ratios.size() == grid.size());
    }
}

TEST_CASE("avr oracle values") {
    std::vector<double> grid;
    for (int i = 0; i <= 24; ++i) grid.push_back(std::pow(10.0, -1.0 + 4.0 * i / 24.0));
    CHECK(ambient::avr_estimate(Model::euclidean(2), grid).value == doctest::Approx(1.0).epsilon(1e-12));
    for (double ratio : ambient::avr_estimate(Model::euclidean(2), grid).ratios)
        CHECK(ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ambient::avr_estimate(Model::cone(0.5), grid).value == doctest::Approx(0.5).epsilon(1e-12));
    // cylinder: linear growth, ratio ~ 4R/(pi s) -> 0
    const double cyl = ambient::avr_estimate(Model::cylinder(1.0), grid).value;
    CHECK(cyl == doctest::Approx(4.0 / (kPi * grid.back())).epsilon(0.01));
    // paraboloid: area(B_s) ~ (2pi/3) (2s/a)^{3/2} a, ratio ~ s^{-1/2}
    const double par1 = ambient::avr_estimate(Model::paraboloid(1.0), grid).value;
    const double expected = 2.0 * std::sqrt(2.0) / 3.0 / std::sqrt(grid.back());
    CHECK(par1 == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("model parsing") {
    const auto m = ambient::parse_model_config("# model\nkind = cone\nbeta = 0.5\n");
    CHECK(m.kind == ambient::Kind::Cone);
    CHECK(m.beta == doctest::Approx(0.5));
    CHECK(ambient::parse_model_spec("euclidean:2").dim == 2);
    CHECK(ambient::parse_model_spec("paraboloid:a=1.5").a == doctest::Approx(1.5));
    CHECK(ambient::parse_model_spec("cylinder:radius=2").radius == doctest::Approx(2.0));
    CHECK_THROWS_AS(ambient::parse_model_spec("sphere:r=1"), std::invalid_argument);
    CHECK_THROWS_AS(ambient::parse_model_config("beta = 0.5"), std::invalid_argument);
    CHECK_THROWS_AS(Model::cone(1.5), std::domain_error);
    CHECK_THROWS_AS(ambient::make_point(Model::paraboloid(1.0), {-0.5, 0.0}), std::domain_error);
}
