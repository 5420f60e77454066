#include "doctest.h"

#include "otm/torus_map.hpp"

#include <random>

using namespace otm;

namespace {

TorusPoint P(long a, long b, long c, long d) { return TorusPoint(rat(a, b), rat(c, d)); }

// Independent evaluation of H straight from the tent formula with doubles-free arithmetic.
TorusPoint oracle_H(const TorusPoint& z)
{
    auto t = [](const Rat& s) { return s <= rat(1, 2) ? Rat(2 * s) : Rat(2 - 2 * s); };
    Rat x = frac(z.x + t(z.y));
    Rat y = frac(z.y + t(x));
    return {x, y};
}

TorusPoint random_point(std::mt19937_64& rng, long den)
{
    std::uniform_int_distribution<long> d(0, den - 1);
    return {rat(d(rng), den), rat(d(rng), den)};
}

}  // namespace

TEST_CASE("tent")
{
    CHECK(tent(0) == 0);
    CHECK(tent(rat(1, 2)) == 1);
    CHECK(tent(rat(3, 4)) == rat(1, 2));
    CHECK(tent(rat(1, 8)) == rat(1, 4));
}

TEST_CASE("quoted point images")
{
    CHECK(apply_H(P(1, 1, 3, 4)) == P(1, 2, 3, 4));
    CHECK(apply_H(P(1, 2, 1, 2)) == P(1, 2, 1, 2));
    CHECK(apply_H(P(1, 4, 1, 4)) == P(3, 4, 3, 4));
    CHECK(apply_H(P(3, 4, 3, 4)) == P(1, 4, 1, 4));
    for (auto z : {P(0, 1, 1, 2), P(1, 2, 0, 1), P(1, 2, 1, 2), P(1, 1, 1, 1)}) CHECK(apply_H(z) == z);
    CHECK(TorusPoint(rat(1), rat(1)) == P(0, 1, 0, 1));
}

TEST_CASE("classification")
{
    CHECK(classify(P(1, 4, 1, 4), PartitionSide::A) == Label::A2);
    CHECK(classify(P(3, 5, 3, 5), PartitionSide::A) == Label::A3);
    CHECK(classify(P(1, 2, 1, 4), PartitionSide::S) == Label::Boundary);
    CHECK(classify(P(1, 4, 1, 4), PartitionSide::S) == Label::S1);
    CHECK(classify(P(0, 1, 1, 2), PartitionSide::A) == Label::Boundary);
    // A' labels are the A labels of the preimage
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        TorusPoint z = random_point(rng, 1001);
        Label a = classify(apply_H_inv(z), PartitionSide::A);
        Label ap = classify(z, PartitionSide::Aprime);
        CHECK(label_index(a) == label_index(ap));
        // polygon membership agrees with the pointwise classification
        Label l = classify(z, PartitionSide::A);
        if (l != Label::Boundary) CHECK(region_contains(A_region(label_index(l)), z.vec()));
        if (ap != Label::Boundary) CHECK(region_contains(Aprime_region(label_index(ap)), z.vec()));
    }
}

TEST_CASE("jacobian and cocycle")
{
    CHECK(jacobian(P(1, 4, 1, 4)) == IMat2(1, 2, -2, -3));
    CHECK(jacobian(P(3, 4, 3, 4)) == IMat2(1, -2, 2, -3));
    CHECK_THROWS_AS(jacobian(P(0, 1, 1, 2)), SingularityError);
    CHECK(cocycle(P(1, 4, 1, 4), 2) == IMat2(5, 8, 8, 13));
    CHECK(cocycle(P(1, 3, 2, 7), 0) == IMat2::identity());
    CHECK(cocycle(P(3, 5, 3, 5), 1) == jacobian_block(3));
    for (int j = 1; j <= 4; ++j) CHECK(jacobian_block(j).det() == 1);
    IMat2 c = cocycle(P(1, 4, 1, 4), 2);
    // characteristic polynomial l^2 - 18 l + 1
    CHECK(c.trace() == 18);
    CHECK(c.det() == 1);
    try {
        cocycle(P(1, 4, 1, 2), 3);
        FAIL("expected singularity");
    } catch (const SingularityError& e) {
        CHECK(e.index() == 0);
    }
}

TEST_CASE("exactness and Jacobian consistency on random points")
{
    std::mt19937_64 rng(2024);
    const Rat eps = rat(1, 1000003);
    for (int i = 0; i < 2000; ++i) {
        TorusPoint z = random_point(rng, 999983);
        TorusPoint hz = apply_H(z);
        CHECK(apply_H_inv(hz) == z);
        CHECK(hz == oracle_H(z));
        Label l = classify(z, PartitionSide::A);
        if (l == Label::Boundary) continue;
        Vec2 w(rat(3, 7), rat(-2, 5));
        TorusPoint z2(z.vec() + eps * w);
        if (classify(z2, PartitionSide::A) != l) continue;
        Vec2 diff = apply_H(z2).vec() - hz.vec();
        Vec2 expect = eps * (jacobian_block(label_index(l)) * w);
        Vec2 delta = diff - expect;
        CHECK(frac(delta.x) == 0);
        CHECK(frac(delta.y) == 0);
    }
}

TEST_CASE("symmetries")
{
    std::mt19937_64 rng(8);
    CHECK(symmetry_T(symmetry_T(P(1, 3, 1, 7))) == P(1, 3, 1, 7));
    CHECK(symmetry_T(apply_H(P(1, 4, 1, 4))) == apply_H(symmetry_T(P(1, 4, 1, 4))));
    CHECK(symmetry_Tcal(apply_H_inv(P(1, 3, 2, 5))) == apply_H(symmetry_Tcal(P(1, 3, 2, 5))));
    for (int i = 0; i < 500; ++i) {
        TorusPoint z = random_point(rng, 12347);
        CHECK(symmetry_T(symmetry_T(z)) == z);
        CHECK(symmetry_Tcal(symmetry_Tcal(z)) == z);
        CHECK(symmetry_T(apply_H(z)) == apply_H(symmetry_T(z)));
        CHECK(symmetry_Tcal(apply_H_inv(z)) == apply_H(symmetry_Tcal(z)));
    }
}

TEST_CASE("partition polygons")
{
    Rat total = 0;
    for (int j = 1; j <= 4; ++j) {
        CHECK(area(A_region(j)) == rat(1, 4));
        CHECK(area(Aprime_region(j)) == rat(1, 4));
        total += area(A_region(j));
    }
    CHECK(total == 1);
    CHECK(A_partition().area() == 1);
    for (int j = 1; j <= 4; ++j) CHECK(Q_parallelogram(j).size() == 4);
    // H maps A_j onto A'_j
    for (int j = 1; j <= 4; ++j) {
        Region img = map_region(jacobian_block(j), Vec2(0, 0), A_region(j));
        CHECK(sym_diff_area(img, Aprime_region(j)) == 0);
    }
}

TEST_CASE("segment iteration")
{
    // horizontal segment inside one A_j maps to a single piece along M_j (1,0)
    RatSegment h(Vec2(rat(1, 10), rat(1, 8)), Vec2(rat(1, 5), rat(1, 8)));
    Label l = classify(TorusPoint(h.p), PartitionSide::A);
    auto split = split_on_singularities(h);
    REQUIRE(split.size() == 1);
    auto img = iterate_segment(h, 1);
    Vec2 dir = jacobian_block(label_index(l)) * Vec2(1, 0);
    Rat total_len2 = 0;
    for (const auto& s : img) {
        CHECK(cross(s.direction(), dir) == 0);
        total_len2 += s.length2();
    }
    CHECK_THROWS_AS(RatSegment(Vec2(0, 0), Vec2(0, 0)), DegenerateSegment);

    // height is additive across splits before mapping
    RatSegment v(Vec2(rat(1, 3), rat(1, 100)), Vec2(rat(2, 5), rat(97, 100)));
    Rat hsum = 0;
    for (auto& [piece, j] : split_on_singularities(v)) hsum += piece.height();
    CHECK(hsum == v.height());
    // heights multiply exactly by the pieces' blocks
    Rat img_h = total_height(iterate_segment(v, 1));
    Rat expect = 0;
    for (auto& [piece, j] : split_on_singularities(v)) expect += abs((jacobian_block(j) * piece.direction()).y);
    CHECK(img_h == expect);
}

TEST_CASE("segment features")
{
    auto f = detect_segment_features({RatSegment(Vec2(rat(1, 4), 0), Vec2(rat(1, 4), rat(1, 2)))});
    CHECK(f.v_segment);
    CHECK_FALSE(f.h_segment);
    f = detect_segment_features({RatSegment(Vec2(0, rat(1, 4)), Vec2(rat(1, 2), rat(1, 4)))});
    CHECK(f.h_segment);
    // Q_3 has sloping sides on x + 2y = 2 and x + 2y = 5/2 for 1/2 <= x <= 1
    RatSegment across(Vec2(rat(3, 4), rat(3, 5)), Vec2(rat(3, 4), rat(9, 10)));
    CHECK(detect_segment_features({across}).traverses_Q[2]);
    RatSegment partial(Vec2(rat(3, 4), rat(3, 5)), Vec2(rat(3, 4), rat(3, 4)));
    CHECK_FALSE(detect_segment_features({partial}).traverses_Q[2]);
    RatSegment flat(Vec2(rat(1, 2), rat(7, 10)), Vec2(1, rat(7, 10)));
    CHECK_FALSE(detect_segment_features({flat}).traverses_Q[2]);
    // the image of a segment traversing Q_3 contains a v-segment
    CHECK(detect_segment_features(iterate_segment(across, 1)).v_segment);
}
