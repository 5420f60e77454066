#include "doctest.h"

#include "otm/geometry.hpp"
#include "otm/torus_map.hpp"

#include <random>

using namespace otm;

namespace {

Rat random_rat(std::mt19937_64& rng, long den = 97)
{
    std::uniform_int_distribution<long> d(0, den - 1);
    return rat(d(rng), den);
}

PolygonQ random_convex(std::mt19937_64& rng)
{
    // triangle or quadrilateral from random points, retried until non-degenerate
    for (;;) {
        std::vector<Vec2> pts;
        for (int i = 0; i < 3; ++i) pts.emplace_back(random_rat(rng), random_rat(rng));
        if (signed_area(pts) != 0) return PolygonQ(pts);
    }
}

}  // namespace

TEST_CASE("rational helpers")
{
    CHECK(to_string(rat(6, 4)) == "3/2");
    CHECK(to_string(rat(3)) == "3/1");
    CHECK(rat("-10/4") == rat(-5, 2));
    CHECK(frac(rat(-1, 4)) == rat(3, 4));
    CHECK(frac(rat(7, 3)) == rat(1, 3));
    CHECK(floor_int(rat(-1, 2)) == -1);
    CHECK(ceil_int(rat(-1, 2)) == 0);
}

TEST_CASE("integer matrices")
{
    IMat2 m(1, 2, 2, 5);
    CHECK(m.det() == 1);
    CHECK(m * m.inverse() == IMat2::identity());
    CHECK(m.pow(3) == m * m * m);
    CHECK(IMat2(0, 1, 1, 0).inverse() == IMat2(0, 1, 1, 0));
    CHECK_THROWS_AS(IMat2(2, 0, 0, 1).inverse(), ExactError);
}

TEST_CASE("enclosures")
{
    Enclosure s = sqrt_enc(rat(2));
    CHECK(s.lo * s.lo <= 2);
    CHECK(s.hi * s.hi >= 2);
    CHECK(s.width() < rat(1, 1000000000));
    CHECK(sqrt_enc(rat(9, 4)).is_exact());
    CHECK(sqrt_enc(rat(9, 4)).lo == rat(3, 2));
    CHECK(sign_surd(rat(-3), rat(1), rat(10)) == 1);
    CHECK(sign_surd(rat(-3), rat(1), rat(8)) == -1);
    CHECK(sign_surd(rat(-3), rat(1), rat(9)) == 0);
    CHECK(sign_surd(rat(3), rat(-1), rat(10)) == -1);
}

TEST_CASE("shoelace area")
{
    CHECK(shoelace_area(PolygonQ::rect(0, 0, 1, 1)) == 1);
    CHECK(shoelace_area(PolygonQ({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)})) == rat(1, 2));
    // clockwise input is reoriented
    CHECK(PolygonQ({Vec2(0, 0), Vec2(0, 1), Vec2(1, 0)}).area() == rat(1, 2));
    CHECK_THROWS_AS(PolygonQ({Vec2(0, 0), Vec2(1, 1), Vec2(2, 2)}), DegeneratePolygon);
    CHECK_THROWS_AS(PolygonQ({Vec2(0, 0), Vec2(1, 1)}), DegeneratePolygon);
}

TEST_CASE("half-plane clipping")
{
    PolygonQ sq = PolygonQ::rect(0, 0, 1, 1);
    auto right = clip_halfplane(sq, LineQ::vertical(rat(1, 2)), Side::Ge);
    REQUIRE(right);
    CHECK(right->area() == rat(1, 2));
    CHECK_FALSE(clip_halfplane(sq, LineQ::vertical(rat(2)), Side::Ge));
    // touching along an edge only is empty
    CHECK_FALSE(clip_halfplane(sq, LineQ::vertical(rat(1)), Side::Ge));

    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        PolygonQ p = random_convex(rng);
        Vec2 a(random_rat(rng), random_rat(rng)), b(random_rat(rng), random_rat(rng));
        if (a == b) continue;
        LineQ l = LineQ::through(a, b);
        auto lo = clip_halfplane(p, l, Side::Le);
        auto hi = clip_halfplane(p, l, Side::Ge);
        Rat s = (lo ? lo->area() : Rat(0)) + (hi ? hi->area() : Rat(0));
        CHECK(s == p.area());
        if (lo) CHECK(lo->is_convex());
        if (hi) CHECK(hi->is_convex());
    }
}

TEST_CASE("line helpers")
{
    LineQ l = LineQ::point_slope(Vec2(rat(1, 4), rat(1, 2)), rat(2));
    CHECK(l.gradient() == 2);
    CHECK(l.y_at(rat(1, 2)) == 1);
    auto p = intersect(l, LineQ::horizontal(rat(0)));
    REQUIRE(p);
    CHECK(*p == Vec2(0, 0));
    CHECK_FALSE(intersect(l, LineQ::point_slope(Vec2(0, 1), 2)));
    CHECK(LineQ::through(Vec2(0, 0), Vec2(1, 2)) == LineQ(2, -1, 0));
}

TEST_CASE("torus pushforward")
{
    PolygonQ p({Vec2(rat(1, 10), rat(1, 10)), Vec2(rat(2, 5), rat(1, 10)), Vec2(rat(1, 5), rat(3, 10))});
    Region id = map_polygon(IMat2::identity(), Vec2(0, 0), p);
    REQUIRE(id.size() == 1);
    CHECK(sym_diff_area(id, {p}) == 0);

    for (const auto& piece : A_region(1)) {
        Region img = map_polygon(IMat2(1, 2, 2, 5), Vec2(0, 0), piece);
        CHECK(area(img) == piece.area());
        for (const auto& q : img) {
            CHECK(q.min_x() >= 0);
            CHECK(q.max_x() <= 1);
            CHECK(q.min_y() >= 0);
            CHECK(q.max_y() <= 1);
        }
    }

    // pushing by N then M agrees with pushing by MN
    std::mt19937_64 rng(5);
    const IMat2 M(1, -2, 2, -3), N(1, 2, 2, 5);
    for (int i = 0; i < 20; ++i) {
        PolygonQ q = random_convex(rng);
        Vec2 t(random_rat(rng), random_rat(rng));
        Region two = map_region(M, Vec2(0, 0), map_polygon(N, t, q));
        Region one = map_polygon(M * N, M * t, q);
        CHECK(sym_diff_area(one, two) == 0);
        CHECK(area(one) == q.area());
    }
}

TEST_CASE("partition refinement")
{
    PlanarPartition trivial;
    trivial.pieces.push_back({PolygonQ::rect(0, 0, 1, 1), "T"});
    PlanarPartition a = A_partition();
    PlanarPartition r = refine(a, trivial);
    CHECK(r.pieces.size() == a.pieces.size());
    CHECK(r.area() == 1);

    PlanarPartition as = refine(A_partition(), S_partition());
    CHECK(as.area() == 1);
    for (const auto& p : as.pieces) CHECK(p.poly.is_convex());

    // H^-1 of the A-partition, using H^-1 z = M_i^-1 z mod 1 on A'_i
    PlanarPartition pre;
    for (int j = 1; j <= 4; ++j)
        for (int i = 1; i <= 4; ++i) {
            Region piece = intersect(A_region(j), Aprime_region(i));
            for (const auto& q : map_region(jacobian_block(i).inverse(), Vec2(0, 0), piece))
                pre.pieces.push_back({q, "A" + std::to_string(j)});
        }
    CHECK(pre.area() == 1);
    PlanarPartition two = refine(A_partition(), pre);
    CHECK(two.area() == 1);
    // every refined piece has a constant two-step itinerary
    for (const auto& p : two.pieces) {
        TorusPoint z(p.poly.interior_point());
        auto it = itinerary(z, 2);
        CHECK(p.label == label_name(it[0]) + "|" + label_name(it[1]));
    }

    PlanarPartition half;
    half.pieces.push_back({PolygonQ::rect(0, 0, 1, rat(1, 2)), "H"});
    CHECK_THROWS_AS(refine(a, half), SupportMismatch);
}

TEST_CASE("segment clipping and json")
{
    PolygonQ sq = PolygonQ::rect(0, 0, 1, 1);
    auto r = clip_segment(Vec2(-1, rat(1, 2)), Vec2(3, rat(1, 2)), sq);
    REQUIRE(r);
    CHECK(r->first == rat(1, 4));
    CHECK(r->second == rat(1, 2));
    CHECK_FALSE(clip_segment(Vec2(2, 2), Vec2(3, 3), sq));

    PolygonQ p({Vec2(rat(1, 3), 0), Vec2(1, rat(2, 7)), Vec2(0, 1)});
    auto j = to_json(p);
    CHECK(j[0][0] == "1/3");
    CHECK(polygon_from_json(j).vertices() == p.vertices());
}
