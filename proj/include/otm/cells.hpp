#pragma once

#include "otm/certificate.hpp"
#include "otm/return_map.hpp"

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace otm {

class OutOfFamilyRange : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Upper: cells A^k_{4,3} at (1/4,1/2), images at (1/2,3/4), crossing cells A^l_{1,3}.
// Lower: cells A^k_{4,2} at (0,1/4), images at (3/4,1/2), crossing cells A^l_{1,2}.
enum class Locus { Upper, Lower };

std::string locus_name(Locus l);
// Smallest k for which the printed corner formulas describe the cell.
unsigned locus_k_min(Locus l);

// Exit region j and escape region i of the cell family.
std::pair<int, int> locus_cell_ji(Locus l);
// The accumulation point of the cells and of their images. For odd k the cell maps to the
// image point; for even k a second piece of A^k_{j,i} does.
Vec2 locus_point(Locus l);
Vec2 locus_image_point(Locus l);

// H_sigma on the cell family: M_4 M_3^k (upper) or M_4 M_2^k (lower).
IMat2 locus_matrix(Locus l, unsigned k);

// r_1..r_4 (resp. r-bar) as printed.
std::array<Vec2, 4> cell_corners(Locus l, unsigned k);
// r'_1..r'_4 (resp. r-bar'), corners of image(k).
std::array<Vec2, 4> cell_image_corners(Locus l, unsigned k);

// Boundary line of the image cells through r'_4 r'_1 (script L_k), and of the crossing cells (L_l).
LineQ image_cell_line(Locus l, long k);
LineQ crossing_cell_line(Locus l, long m);
// p_{k,l} in closed form, and by intersecting the two lines.
Vec2 cell_intersection_point(Locus lc, long k, long l);
// p_{k,l}, p_{k-1,l}, p_{k-1,l-1}, p_{k,l-1}
std::array<Vec2, 4> cell_intersection_corners(long k, long l, Locus lc);
// (x_k, y_k) where script L_k meets y = 1/2 + x/2, and (X_l, Y_l) where L_l meets it.
Vec2 script_line_on_A4_boundary(long k);
Vec2 crossing_line_on_A4_boundary(long l);

// Printed bounds (l_0 lower bound, l_1 upper bound) on the occupied l-range.
std::pair<long, long> transition_range(unsigned k, Locus l);

// Exact pieces of the clipped-polygon construction.
struct CellFamilyGeometry {
    Locus locus;
    unsigned depth = 0;
    EscapePartition partition;  // sigma escape partition of A_i
    // cell piece at the accumulation point, and the piece whose image lands at the image point
    Region cell(unsigned k) const;
    Region image_source(unsigned k) const;
    Region image(unsigned k) const;  // H_sigma(image_source(k))
    Region crossing(unsigned l) const;  // A^l_{1,i} cells near the image point
};
CellFamilyGeometry cell_family_geometry(Locus l, unsigned depth);

// Closed forms against clipped polygons: r, r', (k,l) cells, stitching, line identities.
Certificate verify_cell_corners(Locus l, unsigned k_max);
// Exact occupied l-ranges of the image cells inside [l_0, l_1].
struct OccupiedRange {
    unsigned k = 0;
    long l_min = 0, l_max = 0;
    long bound_lo = 0, bound_hi = 0;
    bool inside = false;
    // (k,l) intersections whose area differs from the cut by the lines L_{l-1}, L_l,
    // and their total relative measure
    unsigned irregular = 0;
    Rat irregular_measure = 0;
};
std::vector<OccupiedRange> occupied_ranges(Locus l, unsigned k_max);
Certificate verify_transition_ranges(Locus l, unsigned k_max);

// Conditional measure mu(H_sigma(cell m) n crossing cell k) / mu(H_sigma(cell m)).
struct ConditionalRow {
    unsigned m = 0;
    std::vector<std::pair<long, Rat>> ratios;  // (k, exact ratio)
    Rat row_sum;
    double slope = 0;      // least-squares exponent of k over the fit window
    double intercept = 0;  // so ratio ~ exp(intercept) k^slope
    long fit_lo = 0, fit_hi = 0;
};
ConditionalRow conditional_measure_row(unsigned m, Locus l = Locus::Upper);
std::vector<ConditionalRow> conditional_measure_table(const std::vector<unsigned>& ms, Locus l = Locus::Upper);

// Area of the printed quadrilateral r_1..r_4, and k^3 times it.
Rat cell_area_closed_form(Locus l, unsigned k);

}  // namespace otm
