#include "doctest.h"

#include "otm/cones.hpp"
#include "otm/torus_map.hpp"

#include <cmath>
#include <random>

using namespace otm;

namespace {

// Brute-force minimum of |Mv|_inf / |v|_inf over a fine rational grid of the cone.
Rat grid_min_sup(const IMat2& m, const Rat& u_lo, const Rat& u_hi, int steps)
{
    Rat best = -1;
    for (int i = 0; i <= steps; ++i) {
        Rat u = u_lo + (u_hi - u_lo) * rat(i, steps);
        Vec2 w = m * Vec2(u, 1);
        Rat n = std::max(abs(w.x), abs(w.y)) / std::max(abs(u), Rat(1));
        if (best < 0 || n < best) best = n;
    }
    return best;
}

}  // namespace

TEST_CASE("cone membership")
{
    CHECK(cones::C().contains(Vec2(13, 21)));
    CHECK_FALSE(cones::C().contains(Vec2(1, 1)));
    CHECK(cones::C_plus().contains(Vec2(3, 7)));
    CHECK(cones::C().contains(Vec2(-13, -21)));
    CHECK(cones::C().contains(Vec2(0, 1)));
    CHECK_FALSE(cones::C().contains(Vec2(1, 0)));
    CHECK_THROWS_AS(cones::C().contains(Vec2(0, 0)), ZeroVector);
    CHECK_THROWS_AS(ConeQ(Vec2(1, 1), Vec2(1, -1)), NotASector);
    CHECK(cones::C().contains(cones::C_plus()));
    CHECK(cones::C().contains(cones::C_minus()));
    CHECK_FALSE(cones::C_plus().contains(cones::C()));
    CHECK(cones::C_s_prime().contains(cones::C()));
    CHECK(cones::C_prime().contains(Vec2(21, 13)));
    CHECK(cones::stable(1).contains(Vec2(1, -1)));
    CHECK_FALSE(cones::stable(2).contains(Vec2(1, -1)));
}

TEST_CASE("cone images")
{
    CHECK(map_cone(IMat2::identity(), cones::C()).start == cones::C().start);
    CHECK(cones::C_plus().contains(map_cone(jacobian_block(1), cones::C())));
    CHECK(cones::C().contains(map_cone(jacobian_block(2) * jacobian_block(3), cones::C_s_prime())));
    CHECK_THROWS_AS(map_cone(IMat2(1, 1, 1, 1), cones::C()), NotASector);
    // pointwise agreement on random directions
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long> d(-40, 40);
    IMat2 m = jacobian_block(4) * jacobian_block(3).pow(2);
    ConeQ img = map_cone(m, cones::C());
    for (int i = 0; i < 400; ++i) {
        Vec2 v(d(rng), d(rng));
        if (v == Vec2(0, 0)) continue;
        if (cones::C().contains(v)) CHECK(img.contains(m * v));
    }
}

TEST_CASE("expansion factors")
{
    CHECK(min_expansion(jacobian_block(1), cones::C_plus(), Norm::Sup).value.lo == rat(17, 3));
    CHECK(min_expansion(jacobian_block(3) * jacobian_block(2), cones::C_plus(), Norm::Sup).value.lo ==
          rat(47, 3));
    CHECK_THROWS_AS(min_expansion(jacobian_block(1), cones::C_prime(), Norm::Sup), PreconditionViolated);
    auto e = min_expansion(jacobian_block(1) * jacobian_block(4), cones::unstable(1), Norm::Euclid);
    CHECK(e.value_sq.lo == rat(8669, 29));
    CHECK(e.exact);
    CHECK(e.direction == Vec2(rat(3, 7), 1));
    // sup-norm rule against brute force
    for (const auto& f : table2_families()) {
        IMat2 m = f.direct(2);
        Rat rule = min_expansion(m, cones::C_plus(), Norm::Sup).value.lo;
        Rat grid = grid_min_sup(m, rat(1, 3), rat(13, 21), 400);
        CHECK(rule <= grid);
        CHECK(grid - rule < rat(1, 10));
    }
    // Euclidean minimum at an interior eigendirection: M_1 over |m| <= 1 contains the contracting direction
    auto interior = min_expansion(jacobian_block(1), ConeQ::gradient(-1, 1), Norm::Euclid);
    CHECK_FALSE(interior.at_endpoint);
    // eigenvalues of M1^T M1 = [[5,12],[12,29]]: 17 -+ 12 sqrt 2
    CHECK(interior.value_sq.approx() == doctest::Approx(17 - 12 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(interior.value_sq.width() < rat(1, 1000000000));
}

TEST_CASE("table rows")
{
    const auto& f = family("M2M3^n");
    CHECK(f.direct(3) == f.closed_form(3));
    CHECK(f.printed_k_plus(1) == rat(169, 21));
    CHECK(family("M1M2^n").closed_form(1) == IMat2(-3, -4, -8, -11));
    CHECK_THROWS(family("M9"));
    Certificate t = table2_verify(60);
    CHECK(t.pass);
    Certificate c = verify_expanding_cone(60);
    CHECK(c.pass);
    CHECK(c.values["K_min"] == "79/21");
}

TEST_CASE("sigma transitions")
{
    Certificate c = verify_transition_table(60);
    INFO(c.failures.dump());
    CHECK(c.pass);
    CHECK(c.values["Lambda_sq"]["exact"] == "85/41");
    // the uniform expansion quoted for sigma_1: (1,3) on the boundary of C_1
    auto lo = min_expansion(jacobian_block(1), cones::unstable(1), Norm::Euclid);
    CHECK(lo.value_sq.lo == rat(338, 10));
    CHECK(lo.direction == Vec2(rat(1, 3), 1));
    auto hi = max_expansion(jacobian_block(1), cones::unstable(1), Norm::Euclid);
    // the endpoint (3,7) gives 1970/58; the maximum is interior at the eigenvalue 17 + 12 sqrt 2
    CHECK(norm2(jacobian_block(1) * Vec2(3, 7)) / norm2(Vec2(3, 7)) == rat(1970, 58));
    CHECK_FALSE(hi.at_endpoint);
    CHECK(hi.value_sq.approx() == doctest::Approx(17 + 12 * std::sqrt(2.0)));
    CHECK(hi.value_sq.lo > rat(1970, 58));
    CHECK(lo.value.within(rat(57, 10), rat(59, 10)));
    CHECK(hi.value.within(rat(57, 10), rat(59, 10)));
    CHECK(c.values["printed_M2M3k_minus1_3_matches"] == false);
}

TEST_CASE("gradient audit")
{
    std::vector<SingularityLine> lines = {
        {Vec2(0, 0), Vec2(1, 2), 0, "S0"},
        {Vec2(0, 0), Vec2(5, 8), 0, "S0"},
        {Vec2(0, 0), Vec2(0, 1), 0, "S0"},
        {Vec2(0, 0), Vec2(4, 3), 1, "S1"},
        {Vec2(0, 0), Vec2(14, -11), 2, "S1"},
    };
    CHECK(singularity_gradient_audit(lines).pass);
    lines.push_back({Vec2(0, 0), Vec2(1, 1), 0, "S0"});
    CHECK_FALSE(singularity_gradient_audit(lines).pass);
}
