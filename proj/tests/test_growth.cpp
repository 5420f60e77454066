#include "doctest.h"

#include "otm/growth.hpp"
#include "otm/return_map.hpp"

using namespace otm;

namespace {

void check_cert(const Certificate& c)
{
    INFO(c.to_json().dump());
    CHECK(c.pass);
}

}  // namespace

TEST_CASE("closed forms")
{
    CHECK(sigma1a_h(4) == rat(7, 1350));
    CHECK(sigma1a_h(4) == rat(191, 675) - rat(5, 18));
    CHECK(sigma1b_h(1) == rat(3, 50));
    CHECK(growth_beta() == rat(21, 79) + rat(21, 127));
    CHECK(growth_alpha() > rat(341, 1000));
    CHECK(growth_alpha() < rat(343, 1000));
    CHECK(growth_delta() > rat(806, 1000));
    CHECK(growth_delta() < rat(808, 1000));
    // |L_10|^2 from the endpoints
    Vec2 a(0, 0), b(0, 0);
    a = Vec2(rat(0), rat(11, 42));
    b = Vec2(rat(1, 38), rat(9, 38));
    CHECK(norm2(b - a) == rat(841, 4 * 399 * 399));
    CHECK(norm2(b - a) < rat(1, 100));
}

TEST_CASE("growth certificates")
{
    check_cert(check_sigma1a());
    check_cert(check_sigma1b());
    check_cert(check_sigma3b());
    check_cert(check_ks1());
    check_cert(check_simple_two_step());
}

TEST_CASE("one-step constants")
{
    OneStepConstants up = one_step_constants(Locus::Upper);
    CHECK(up.bound.within(rat(775, 1000), rat(787, 1000)));
    CHECK(up.s.approx() == doctest::Approx(0.450).epsilon(0.01));
    CHECK(up.t.approx() == doctest::Approx(0.639).epsilon(0.01));
    OneStepConstants lo = one_step_constants(Locus::Lower);
    CHECK(lo.bound.within(rat(516, 1000), rat(528, 1000)));
    CHECK(lo.s.approx() == doctest::Approx(0.186).epsilon(0.01));
    CHECK(lo.t.approx() == doctest::Approx(0.488).epsilon(0.01));
    check_cert(check_one_step(Locus::Upper));
    check_cert(check_one_step(Locus::Lower));
}

TEST_CASE("non-simple intersection")
{
    // oracle: repeated labels along the split segment
    RatSegment s(Vec2(rat(1, 100), rat(1, 3)), Vec2(rat(99, 100), rat(1, 3)));
    auto parts = split_on_singularities(s);
    std::array<int, 5> seen{};
    int last = 0;
    bool repeat = false;
    for (const auto& [seg, j] : parts) {
        if (j != last && seen[j]) repeat = true;
        seen[j] = 1;
        last = j;
    }
    CHECK(non_simple_intersection(s) == repeat);
    // a short segment inside one region is simple
    RatSegment t(Vec2(rat(1, 4), rat(1, 4)), Vec2(rat(1, 4) + rat(1, 1000), rat(1, 4) + rat(1, 500)));
    CHECK_FALSE(non_simple_intersection(t));
}

TEST_CASE("segment crossing A^3_{4,2} gives a non-simple intersection with A_2")
{
    EscapePartition p = escape_partition(2, 6);
    int tried = 0;
    for (const auto& c : p.cells) {
        if (c.k != 3 || c.j != 4) continue;
        Vec2 z = c.poly.interior_point();
        Vec2 d(rat(1, 2), rat(1));
        Vec2 a = z - rat(1) * d, b = z + rat(1) * d;
        auto r = clip_segment(a, b, c.poly);
        REQUIRE(r);
        Vec2 u = a + r->first * (b - a), v = a + r->second * (b - a);
        // the part of the cell inside sigma_1
        if (sigma_index(TorusPoint(rat(1, 2) * (u + v))) != 1) continue;
        auto img = iterate_chains({TorusChain{RatSegment(u, v)}}, 4);
        bool found = false;
        for (const auto& s : img) {
            int j = 0;
            if (non_simple_intersection(s, &j) && j == 2) found = true;
        }
        CHECK(found);
        ++tried;
    }
    CHECK(tried > 0);
}

TEST_CASE("segment dynamics")
{
    GrowthReport r = verify_growth_dynamics(200, 7, 64);
    CHECK(r.samples == 200);
    CHECK(r.c1 + r.c2 >= 200);
    CHECK(r.max_iterations <= 64);
    CHECK(r.min_factor > 1);
    GrowthReport again = verify_growth_dynamics(200, 7, 64);
    CHECK(again.to_json() == r.to_json());
    CHECK_THROWS_AS(verify_growth_dynamics(0, 7), std::invalid_argument);
    // with no iterations allowed, every sample exhausts the budget
    CHECK_THROWS_AS(verify_growth_dynamics(5, 7, 0), BudgetExhausted);
}
