#include "otm/cells.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace otm {

namespace {

Rat Q(long p, long q = 1) { return rat(p, q); }

Int floor_div(long a, long b) { return floor_int(rat(a, b)); }

double torus_dist(const Vec2& a, const Vec2& b)
{
    auto d = [](const Rat& u, const Rat& v) {
        double x = std::fabs(to_double(u - v));
        return std::min(x, 1 - x);
    };
    return std::max(d(a.x, b.x), d(a.y, b.y));
}

// Nearest accumulation point of P_1 u P_2 (index into the concatenated list).
Vec2 nearest_accumulation_point(const Vec2& c)
{
    Vec2 best;
    double bd = std::numeric_limits<double>::infinity();
    for (const auto* set : {&accumulation_points_P1(), &accumulation_points_P2()})
        for (const auto& p : *set) {
            double d = torus_dist(c, p);
            if (d < bd) {
                bd = d;
                best = p;
            }
        }
    return best;
}

bool same_torus_point(const Vec2& a, const Vec2& b) { return frac(a.x - b.x) == 0 && frac(a.y - b.y) == 0; }

PolygonQ quad(const std::array<Vec2, 4>& c) { return PolygonQ({c[0], c[1], c[2], c[3]}); }

Region image_pieces(const EscapeCell& c)
{
    const IMat2& M4 = jacobian_block(c.j);
    Region out;
    for (auto& sp : reduce_mod1(transform(c.poly, M4 * c.N, M4 * c.t))) out.push_back(std::move(sp.poly));
    return out;
}

// Near-side region of the crossing cells, between L_{l-1} and L_l.
std::optional<PolygonQ> crossing_wedge(Locus lc, long l)
{
    std::optional<PolygonQ> w;
    Rat xp;
    if (lc == Locus::Upper) {
        w = clip_halfplane(PolygonQ::rect(Q(1, 2), Q(1, 2), 1, 1), LineQ::point_slope(Vec2(0, Q(1, 2)), Q(1, 2)),
                           Side::Ge);  // x - 2y + 1 >= 0
        xp = Q(3, 4);
    } else {
        w = PolygonQ::rect(Q(5, 8), 0, 1, Q(1, 2));
        xp = Q(7, 8);
    }
    LineQ lo = crossing_cell_line(lc, l - 1), hi = crossing_cell_line(lc, l);
    Vec2 probe(xp, (lo.y_at(xp) + hi.y_at(xp)) / 2);
    for (const LineQ* line : {&lo, &hi})
        if (w) w = clip_halfplane(*w, *line, line->eval(probe) < 0 ? Side::Le : Side::Ge);
    return w;
}

}  // namespace

std::string locus_name(Locus l) { return l == Locus::Upper ? "upper" : "lower"; }

unsigned locus_k_min(Locus l) { return l == Locus::Upper ? 3 : 5; }

std::pair<int, int> locus_cell_ji(Locus l) { return l == Locus::Upper ? std::pair{4, 3} : std::pair{4, 2}; }

Vec2 locus_point(Locus l) { return l == Locus::Upper ? Vec2(Q(1, 4), Q(1, 2)) : Vec2(0, Q(1, 4)); }

Vec2 locus_image_point(Locus l) { return l == Locus::Upper ? Vec2(Q(1, 2), Q(3, 4)) : Vec2(Q(3, 4), Q(1, 2)); }

IMat2 locus_matrix(Locus l, unsigned k)
{
    return jacobian_block(4) * jacobian_block(l == Locus::Upper ? 3 : 2).pow(k);
}

std::array<Vec2, 4> cell_corners(Locus l, unsigned k)
{
    if (k < locus_k_min(l)) throw OutOfFamilyRange("cell corner formulas need k >= " + std::to_string(locus_k_min(l)));
    const long K = k;
    if (l == Locus::Upper)
        return {Vec2(Q(K + 1, 4 * K + 2), Q(K + 1, 2 * K + 1)), Vec2(Q(K - 1, 4 * K - 2), Q(1, 2)),
                Vec2(Q(K, 4 * K + 2), Q(1, 2)), Vec2(Q(K + 2, 4 * K + 6), Q(K + 2, 2 * K + 3))};
    return {Vec2(0, Q(K, 4 * K - 2)), Vec2(Q(1, 4 * K - 6), Q(K - 2, 4 * K - 6)),
            Vec2(Q(1, 4 * K - 2), Q(K - 1, 4 * K - 2)), Vec2(0, Q(K + 1, 4 * K + 2))};
}

std::array<Vec2, 4> cell_image_corners(Locus l, unsigned k)
{
    if (k < locus_k_min(l)) throw OutOfFamilyRange("cell corner formulas need k >= " + std::to_string(locus_k_min(l)));
    const long K = k;
    const Rat h = Q(1, 2), tq = Q(3, 4);
    if (l == Locus::Upper)
        return {Vec2(h + Q(1, 4 * K + 2), tq - Q(5, 8 * K + 4)), Vec2(h + Q(1, 4 * K - 2), tq - Q(5, 8 * K - 4)),
                Vec2(h, tq + Q(1, 8 * K + 4)), Vec2(h, tq + Q(1, 8 * K + 12))};
    // printed y of the first corner has denominator 4k-1; 4k-2 is the value on the cell's boundary line
    return {Vec2(Q(3 * K + 1, 4 * K - 2), Q(2 * K - 7, 4 * K - 2)), Vec2(Q(3 * K - 2, 4 * K - 6), Q(2 * K - 9, 4 * K - 6)),
            Vec2(Q(3 * K - 2, 4 * K - 2), Q(K, 2 * K - 1)), Vec2(Q(3 * K + 1, 4 * K + 2), Q(K + 1, 2 * K + 1))};
}

LineQ image_cell_line(Locus l, long k)
{
    if (l == Locus::Upper)
        return LineQ::point_slope(Vec2(Q(1, 2), Q(3, 4) + Q(1, 8 * k + 12)), Q(-(6 * k + 8), 2 * k + 3));
    return LineQ::point_slope(Vec2(Q(3 * k + 1, 4 * k + 2), Q(k + 1, 2 * k + 1)), Q(-(14 * k + 5), 6 * k + 2));
}

LineQ crossing_cell_line(Locus l, long m)
{
    if (l == Locus::Upper) return LineQ::point_slope(Vec2(Q(1, 4), Q(1, 2)), Q(2 * m, 2 * m + 1));
    return LineQ::point_slope(Vec2(1, Q(1, 4)), Q(-(2 * m + 1), 2 * m + 2));
}

Vec2 cell_intersection_point(Locus lc, long k, long l)
{
    if (lc == Locus::Upper)
        return Vec2(Q(16 * k * l + 7 * k + 23 * l + 10, 32 * k * l + 12 * k + 44 * l + 16),
                    Q(12 * k * l + 3 * k + 17 * l + 4, 16 * k * l + 6 * k + 22 * l + 8));
    const long d = 8 * k * l + 11 * k + 3 * l + 4;
    return Vec2(Q((3 * k + 1) * (2 * l + 3), d), Q(16 * k * l + 15 * k + 7 * l + 6, 4 * d));
}

std::array<Vec2, 4> cell_intersection_corners(long k, long l, Locus lc)
{
    return {cell_intersection_point(lc, k, l), cell_intersection_point(lc, k - 1, l),
            cell_intersection_point(lc, k - 1, l - 1), cell_intersection_point(lc, k, l - 1)};
}

Vec2 script_line_on_A4_boundary(long k) { return Vec2(Q(7 * k + 10, 14 * k + 19), Q(21 * k + 29, 28 * k + 38)); }

Vec2 crossing_line_on_A4_boundary(long l) { return Vec2(Q(l, 2 * l - 1), Q(1 - 3 * l, 2 - 4 * l)); }

std::pair<long, long> transition_range(unsigned k, Locus l)
{
    const long K = k;
    if (l == Locus::Upper) return {floor_div(K + 4, 7).get_si(), 7 * K + 10};
    return {floor_div(K - 4, 7).get_si(), 7 * K + 2};
}

Region CellFamilyGeometry::cell(unsigned k) const
{
    auto [j, i] = locus_cell_ji(locus);
    Region out;
    for (const auto& c : partition.cells)
        if (c.j == j && c.k == k && same_torus_point(nearest_accumulation_point(c.poly.interior_point()), locus_point(locus)))
            out.push_back(c.poly);
    return out;
}

Region CellFamilyGeometry::image_source(unsigned k) const
{
    auto [j, i] = locus_cell_ji(locus);
    Region out;
    for (const auto& c : partition.cells) {
        if (c.j != j || c.k != k) continue;
        for (const auto& q : image_pieces(c))
            if (same_torus_point(nearest_accumulation_point(q.interior_point()), locus_image_point(locus))) {
                out.push_back(c.poly);
                break;
            }
    }
    return out;
}

Region CellFamilyGeometry::image(unsigned k) const
{
    auto [j, i] = locus_cell_ji(locus);
    Region out;
    for (const auto& c : partition.cells) {
        if (c.j != j || c.k != k) continue;
        for (const auto& q : image_pieces(c))
            if (same_torus_point(nearest_accumulation_point(q.interior_point()), locus_image_point(locus)))
                out.push_back(q);
    }
    return out;
}

Region CellFamilyGeometry::crossing(unsigned l) const
{
    Region out;
    for (const auto& c : partition.cells)
        if (c.j == 1 && c.k == l) out.push_back(c.poly);
    return out;
}

CellFamilyGeometry cell_family_geometry(Locus l, unsigned depth)
{
    return {l, depth, sigma_escape_partition(locus_cell_ji(l).second, depth)};
}

Rat cell_area_closed_form(Locus l, unsigned k) { return quad(cell_corners(l, k)).area(); }

Certificate verify_cell_corners(Locus lc, unsigned k_max)
{
    Certificate cert("cell-corners-" + locus_name(lc), "Closed-form corners of the " + locus_name(lc) +
                                                           " two-step cells against clipped polygons");
    const unsigned depth = std::max<unsigned>(k_max + 2, 14);
    CellFamilyGeometry g = cell_family_geometry(lc, depth);
    const unsigned k0 = locus_k_min(lc);
    std::size_t regular = 0, cells = 0;
    nlohmann::json outside = nlohmann::json::array();
    for (unsigned k = k0; k <= k_max; ++k) {
        nlohmann::json wk = {{"k", k}};
        auto r = cell_corners(lc, k);
        Region cell = g.cell(k);
        cert.expect(cell.size() == 1 && sym_diff_area(cell, {quad(r)}) == 0, "cell equals the quadrilateral r", wk);
        if (cell.size() == 1) {
            std::set<Vec2> got(cell[0].vertices().begin(), cell[0].vertices().end());
            cert.expect(got == std::set<Vec2>(r.begin(), r.end()), "cell vertices equal the corners r", wk);
        }
        auto rp = cell_image_corners(lc, k);
        // odd k: the cell itself maps onto r'; even k: its second piece does
        if (k % 2 == 1) {
            IMat2 M = locus_matrix(lc, k);
            for (int q = 0; q < 4; ++q)
                cert.expect(same_torus_point(M * r[q], rp[q]), "M r_j mod 1 equals r'_j", {{"k", k}, {"j", q + 1}});
        }
        cert.expect(sym_diff_area(g.image(k), {quad(rp)}) == 0, "image cell equals the quadrilateral r'", wk);
        LineQ a = image_cell_line(lc, k), b = image_cell_line(lc, long(k) - 1);
        cert.expect(a.contains(rp[0]) && a.contains(rp[3]) && b.contains(rp[1]) && b.contains(rp[2]),
                    "image corners on the boundary lines k and k-1", wk);
        for (long l = 1; l <= static_cast<long>(k_max); ++l) {
            Region tr = intersect(g.image(k), g.crossing(l));
            if (area(tr) == 0) continue;
            ++cells;
            PolygonQ cq = quad(cell_intersection_corners(k, l, lc));
            Rat inside = intersection_area(tr, {cq});
            if (inside != area(tr)) outside.push_back({k, l});
            // low l cells meet the cut lines only approximately
            if (l >= 4) cert.expect(inside == area(tr), "(k,l) cell inside the quadrilateral p", {{"k", k}, {"l", l}});
            if (inside == cq.area()) ++regular;
        }
    }
    cert.set("cells_compared", nlohmann::json(cells));
    cert.set("regular_cells", nlohmann::json(regular));
    cert.set("cells_outside_quadrilateral", std::move(outside));

    // identities between the closed forms over a longer range
    for (long k = k0; k <= 400; ++k) {
        if (lc == Locus::Upper) {
            auto now = cell_image_corners(lc, k), next = cell_image_corners(lc, k + 1);
            cert.expect(next[1] == now[0] && next[2] == now[3], "r'_2(k+1) = r'_1(k) and r'_3(k+1) = r'_4(k)", {{"k", k}});
            Vec2 xy = script_line_on_A4_boundary(k);
            cert.expect(image_cell_line(lc, k).contains(xy) && xy.y == Q(1, 2) + xy.x / 2, "(x_k, y_k) on both lines",
                        {{"k", k}});
            Vec2 XY = crossing_line_on_A4_boundary(k);
            cert.expect(crossing_cell_line(lc, k).contains(XY) && XY.y == Q(1, 2) + XY.x / 2, "(X_l, Y_l) on both lines",
                        {{"l", k}});
        }
        for (long l = 1; l <= 40; l += 13) {
            auto p = intersect(image_cell_line(lc, k), crossing_cell_line(lc, l));
            cert.expect(p && *p == cell_intersection_point(lc, k, l), "p_{k,l} closed form is the line intersection",
                        {{"k", k}, {"l", l}});
        }
    }
    return cert;
}

std::vector<OccupiedRange> occupied_ranges(Locus lc, unsigned k_max)
{
    std::vector<OccupiedRange> out;
    const unsigned depth = 7 * k_max + 14;
    CellFamilyGeometry g = cell_family_geometry(lc, depth);
    std::map<unsigned, Region> crossing;
    for (const auto& c : g.partition.cells)
        if (c.j == 1) crossing[c.k].push_back(c.poly);
    for (unsigned k = locus_k_min(lc); k <= k_max; ++k) {
        Region im = g.image(k);
        OccupiedRange r;
        r.k = k;
        r.l_min = std::numeric_limits<long>::max();
        r.l_max = -1;
        for (auto& [l, reg] : crossing) {
            Rat a = intersection_area(im, reg);
            auto w = crossing_wedge(lc, l);
            Rat d = abs(a - (w ? intersection_area(im, {*w}) : Rat(0)));
            if (d != 0) {
                ++r.irregular;
                r.irregular_measure += d / area(im);
            }
            if (a == 0) continue;
            r.l_min = std::min<long>(r.l_min, l);
            r.l_max = std::max<long>(r.l_max, l);
        }
        auto [lo, hi] = transition_range(k, lc);
        r.bound_lo = lo;
        r.bound_hi = hi;
        // a non-empty image part in the trapped set would hide deeper l
        bool complete = intersection_area(im, g.partition.trapped) == 0;
        r.inside = complete && r.l_max >= 0 && r.l_min >= lo && r.l_max <= hi;
        out.push_back(r);
    }
    return out;
}

Certificate verify_transition_ranges(Locus lc, unsigned k_max)
{
    Certificate cert("transition-range-" + locus_name(lc), lc == Locus::Upper
                                                               ? "Occupied l-range inside [floor((k+4)/7), 7k+10]"
                                                               : "Occupied l-range inside [floor((k-4)/7), 7k+2]");
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : occupied_ranges(lc, k_max)) {
        rows.push_back({{"k", r.k}, {"l_min", r.l_min}, {"l_max", r.l_max}, {"bound_lo", r.bound_lo},
                        {"bound_hi", r.bound_hi}});
        cert.expect(r.inside, "occupied l-range within the bounds", rows.back());
        rows.back()["irregular"] = r.irregular;
        rows.back()["irregular_measure"] = to_string(r.irregular_measure);
        // a bounded number of irregular cells, of total relative measure O(1/k)
        cert.expect(r.irregular <= 3 && r.irregular_measure * r.k <= 2, "irregular (k,l) intersections of measure O(1/k)",
                    rows.back());
    }
    cert.set("ranges", std::move(rows));
    // beta = 7: l_0 ~ k/7 and l_1 ~ 7k
    for (unsigned k = 1; k <= 10000; ++k) {
        auto [lo, hi] = transition_range(k, lc);
        cert.expect(7 * lo <= long(k) + 4 && hi <= 7 * long(k) + 10, "beta = 7 bounds", {{"k", k}});
    }
    return cert;
}

ConditionalRow conditional_measure_row(unsigned m, Locus lc)
{
    ConditionalRow row;
    row.m = m;
    PolygonQ img = quad(cell_image_corners(lc, m));
    const Rat total = img.area();
    auto [lo, hi] = transition_range(m, lc);
    row.row_sum = 0;
    std::vector<double> xs, ys;
    for (long k = std::max<long>(1, lo - 2); k <= hi + 2; ++k) {
        auto w = crossing_wedge(lc, k);
        if (!w) continue;
        auto part = intersect(img, *w);
        if (!part) continue;
        Rat ratio = part->area() / total;
        row.ratios.emplace_back(k, ratio);
        row.row_sum += ratio;
    }
    // fit on cells strictly inside both image boundary lines
    long first = row.ratios.empty() ? 0 : row.ratios.front().first;
    long last = row.ratios.empty() ? 0 : row.ratios.back().first;
    row.fit_lo = 2 * first + 2;
    row.fit_hi = last / 2;
    for (const auto& [k, r] : row.ratios)
        if (k >= row.fit_lo && k <= row.fit_hi) {
            xs.push_back(std::log(double(k)));
            ys.push_back(std::log(to_double(r)));
        }
    const double n = xs.size();
    if (n >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        row.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        row.intercept = (sy - row.slope * sx) / n;
    }
    return row;
}

std::vector<ConditionalRow> conditional_measure_table(const std::vector<unsigned>& ms, Locus l)
{
    std::vector<ConditionalRow> out;
    for (unsigned m : ms) out.push_back(conditional_measure_row(m, l));
    return out;
}

}  // namespace otm
