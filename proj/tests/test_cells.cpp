#include "doctest.h"

#include "otm/cells.hpp"

#include <cmath>

using namespace otm;

TEST_CASE("printed corner examples")
{
    auto r = cell_corners(Locus::Upper, 3);
    CHECK(r[0] == Vec2(rat(2, 7), rat(4, 7)));
    CHECK(r[1] == Vec2(rat(1, 5), rat(1, 2)));
    CHECK(r[2] == Vec2(rat(3, 14), rat(1, 2)));
    CHECK(r[3] == Vec2(rat(5, 18), rat(5, 9)));
    auto rp = cell_image_corners(Locus::Upper, 3);
    CHECK(rp[0] == Vec2(rat(4, 7), rat(4, 7)));
    CHECK(rp[1] == Vec2(rat(3, 5), rat(1, 2)));
    CHECK(rp[2] == Vec2(rat(1, 2), rat(11, 14)));
    CHECK(rp[3] == Vec2(rat(1, 2), rat(7, 9)));
    auto rb = cell_corners(Locus::Lower, 5);
    CHECK(rb[0] == Vec2(0, rat(5, 18)));
    CHECK(rb[1] == Vec2(rat(1, 14), rat(3, 14)));
    CHECK_THROWS_AS(cell_corners(Locus::Lower, 4), OutOfFamilyRange);
    CHECK_THROWS_AS(cell_image_corners(Locus::Upper, 2), OutOfFamilyRange);

    CHECK(cell_intersection_point(Locus::Upper, 1, 1) == Vec2(rat(7, 13), rat(9, 13)));
    CHECK(script_line_on_A4_boundary(1) == Vec2(rat(17, 33), rat(50, 66)));
    CHECK(crossing_line_on_A4_boundary(1) == Vec2(1, 1));
    CHECK(transition_range(10, Locus::Upper) == std::pair<long, long>(2, 80));
    CHECK(transition_range(11, Locus::Lower) == std::pair<long, long>(1, 79));
    CHECK(transition_range(1, Locus::Lower).first == -1);
}

TEST_CASE("image corners by matrix action")
{
    for (Locus lc : {Locus::Upper, Locus::Lower})
        for (unsigned k = locus_k_min(lc) | 1; k <= 41; k += 2) {
            auto r = cell_corners(lc, k);
            auto rp = cell_image_corners(lc, k);
            IMat2 M = locus_matrix(lc, k);
            CHECK(M.det() == 1);
            for (int j = 0; j < 4; ++j) CHECK(TorusPoint(M * r[j]) == TorusPoint(rp[j]));
        }
}

TEST_CASE("closed forms against clipped polygons")
{
    for (Locus lc : {Locus::Upper, Locus::Lower}) {
        Certificate c = verify_cell_corners(lc, 12);
        INFO(c.to_json().dump());
        CHECK(c.pass);
    }
}

TEST_CASE("occupied transition ranges")
{
    for (Locus lc : {Locus::Upper, Locus::Lower}) {
        Certificate c = verify_transition_ranges(lc, 12);
        INFO(c.to_json().dump());
        CHECK(c.pass);
    }
    auto rows = occupied_ranges(Locus::Upper, 8);
    CHECK(rows.back().k == 8);
    CHECK(rows.back().l_min >= 1);
    CHECK(rows.back().l_max <= 66);
}

TEST_CASE("conditional measure rows")
{
    ConditionalRow row = conditional_measure_row(40);
    CHECK(row.slope == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(to_double(row.row_sum) > 0.8);
    CHECK(row.row_sum <= 1);
    // support reaches k = 7m
    bool edge = false;
    for (const auto& [k, r] : row.ratios)
        if (k == 7 * 40 && r > 0) edge = true;
    CHECK(edge);
    // exact ratios decay between neighbouring interior cells
    for (std::size_t i = 1; i < row.ratios.size(); ++i) {
        long k = row.ratios[i].first;
        if (k > row.fit_lo && k <= row.fit_hi) CHECK(row.ratios[i].second < row.ratios[i - 1].second);
    }
}

TEST_CASE("cell area scaling")
{
    double a = to_double(cell_area_closed_form(Locus::Upper, 100)) * 1e6;
    double b = to_double(cell_area_closed_form(Locus::Upper, 400)) * 64e6;
    CHECK(std::fabs(a - b) / b < 0.05);
}
