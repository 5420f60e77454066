#include "doctest.h"

#include "otm/return_map.hpp"
#include "otm/statistics.hpp"

#include <cmath>

using namespace otm;

TEST_CASE("lattice step agrees with the exact map")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 300; ++i) {
        LatticePoint z = sample_lattice_point(rng);
        TorusPoint e = z.exact();
        int j = lattice_a_class(z);
        CHECK(j == label_index(classify(e, PartitionSide::A)));
        LatticePoint w = z;
        CHECK(lattice_step(w) == j);
        CHECK(w.exact() == apply_H(e));
        CHECK(lattice_inverse(z).exact() == apply_H_inv(e));
    }
}

TEST_CASE("walker sigma membership matches the return-map classifier")
{
    std::mt19937_64 rng(12);
    int inside = 0;
    for (int i = 0; i < 1000; ++i) {
        OrbitWalker w(sample_lattice_point(rng));
        for (int s = 0; s < 3; ++s) {
            int j = w.sigma();
            CHECK(j == sigma_index(w.point().exact()));
            inside += j != 0;
            w.step();
        }
    }
    CHECK(inside > 1500);
}

TEST_CASE("singular lattice points")
{
    LatticePoint z{5, 0};
    CHECK_THROWS_AS(lattice_a_class(z), SingularOrbit);
    CHECK_THROWS_AS(lattice_step(z), SingularOrbit);
}

TEST_CASE("line fit")
{
    LinearFit f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
    CHECK(f.slope == doctest::Approx(2));
    CHECK(f.intercept == doctest::Approx(1));
    CHECK(f.r2 == doctest::Approx(1));
    CHECK_THROWS_AS(fit_line({1}, {1}), std::invalid_argument);
}

TEST_CASE("observable means")
{
    ObservableSpec one;
    one.k = 0;
    CHECK(sigma_mean(one) == doctest::Approx(1).epsilon(1e-12));
    CHECK(torus_mean(ObservableSpec::cos_x()) == 0);
    CHECK(torus_mean(ObservableSpec::sigma_indicator()) == doctest::Approx(0.6));
    CHECK(torus_mean(ObservableSpec::sigma_indicator(2)) == doctest::Approx(0.05));
    CHECK(sigma_mean(ObservableSpec::sigma_indicator(1)) == doctest::Approx(0.25 / 0.6));

    // sigma mean of cos 2 pi x against the ensemble mean of cos(2 pi x) 1_sigma over the torus
    const std::size_t n = 400000;
    std::mt19937_64 rng(5);
    double s = 0, s2 = 0;
    for (std::size_t i = 0; i < n;) {
        try {
            OrbitWalker w(sample_lattice_point(rng));
            double v = w.sigma() ? ObservableSpec::cos_x().eval(w.point(), 1) : 0;
            s += v;
            s2 += v * v;
            ++i;
        } catch (const SingularOrbit&) {
        }
    }
    double m = s / n, se = std::sqrt((s2 / n - m * m) / n);
    CHECK(std::abs(m - 0.6 * sigma_mean(ObservableSpec::cos_x())) < 4 * se);

    for (int j = 0; j <= 4; ++j) {
        auto o = ObservableSpec::sigma_indicator(j);
        auto [mean, err] = sample_mean(o, 200000, 3);
        CHECK(std::abs(mean - torus_mean(o)) < 3 * err);
    }
}

TEST_CASE("Lyapunov exponents")
{
    CHECK(period_two_exponent() == doctest::Approx(1.4436).epsilon(1e-4));
    TorusPoint p(rat(1, 4), rat(1, 4));
    CHECK(apply_H_n(p, 2) == p);
    CHECK(std::abs(lyapunov_at(p, 1000) - period_two_exponent()) < 1e-3);
    CHECK(sigma_hit_frequency_at(p, 100) == 1.0);

    LyapunovEstimate e = lyapunov(48, 2000, 9);
    CHECK(e.exponents.size() == 48);
    CHECK(e.min > 0);
    CHECK(e.max_start_difference <= 10.0 / 2000);
    CHECK(e.below_block_bound == 0);
    CHECK(lyapunov(48, 2000, 9).to_json() == e.to_json());
}

TEST_CASE("sigma hit frequency")
{
    HitFrequency h = sigma_hit_frequency(400, 2000, 4);
    CHECK(h.monotone);
    CHECK(h.area == doctest::Approx(0.6));
    CHECK(std::abs(h.mean - 0.6) < 3 * h.stderr_);
}

TEST_CASE("correlations")
{
    auto c = correlations(MapKind::H, ObservableSpec::cos_x(), ObservableSpec::cos_x(), 12, 40000, 1, 2, 12);
    CHECK(c.c.size() == 13);
    CHECK(std::abs(c.c[0] - 0.5) < 3 * c.se[0]);
    auto big = correlations(MapKind::H, ObservableSpec::cos_x(), ObservableSpec::cos_x(), 2, 160000, 2, 1, 2);
    CHECK(c.se[0] / big.se[0] == doctest::Approx(2).epsilon(0.1));

    auto s = correlations(MapKind::HSigma, ObservableSpec::cos_x(), ObservableSpec::cos_x(), 6, 40000, 3, 1, 6);
    double var = sigma_mean(ObservableSpec{ObservableSpec::Kind::Trig, 2, 0, false, 0});
    double m = sigma_mean(ObservableSpec::cos_x());
    // E[(cos - m)^2] = (1 + E cos 4 pi x) / 2 - m^2
    CHECK(std::abs(s.c[0] - ((1 + var) / 2 - m * m)) < 3 * s.se[0]);
    CHECK(s.csv().rfind("n,C_n,stderr\n", 0) == 0);
}

TEST_CASE("results do not depend on the worker count")
{
    set_statistics_threads(1);
    auto a = correlations(MapKind::HSigma, ObservableSpec::cos_x(), ObservableSpec::cos_x(), 5, 50000, 8, 1, 5);
    auto la = lyapunov(40, 1000, 8);
    set_statistics_threads(3);
    auto b = correlations(MapKind::HSigma, ObservableSpec::cos_x(), ObservableSpec::cos_x(), 5, 50000, 8, 1, 5);
    auto lb = lyapunov(40, 1000, 8);
    set_statistics_threads(0);
    CHECK(a.to_json().dump() == b.to_json().dump());
    CHECK(la.to_json().dump() == lb.to_json().dump());
    CHECK(la.exponents == lb.exponents);
}

TEST_CASE("return-time tails")
{
    TailTable t = return_tail(24, 1000000, 10, 6, 8, 24);
    CHECK(t.rows[0].exact == rat(3, 5));
    auto cells = mcells(1);
    CHECK(t.rows[1].exact == rat(3, 5) - cells[0].area);
    for (unsigned n = 0; n <= 10; ++n) {
        INFO(n);
        CHECK(std::abs(t.rows[n].mc - to_double(t.rows[n].exact)) < 3 * t.rows[n].se);
    }
    for (unsigned n = 1; n <= 24; ++n) CHECK(t.rows[n].exact < t.rows[n - 1].exact);
    CHECK(t.rows[11].mc < 0);
    CHECK(t.exponent > 1.5);
    CHECK(t.exponent < 2.5);
    CHECK(t.csv().rfind("n,tail_exact_p,tail_exact_q,tail_mc,stderr\n", 0) == 0);
}
