#include "otm/return_map.hpp"

#include "otm/cones.hpp"

#include <algorithm>
#include <mutex>

namespace otm {

namespace {

Rat R_(long p, long q = 1) { return rat(p, q); }

PolygonQ poly10(std::initializer_list<std::pair<Rat, Rat>> pts)
{
    std::vector<Vec2> v;
    for (const auto& [x, y] : pts) v.emplace_back(x / 10, y / 10);
    return PolygonQ(std::move(v));
}

Region unite(std::initializer_list<const Region*> parts)
{
    Region out;
    for (const Region* p : parts) out.insert(out.end(), p->begin(), p->end());
    return out;
}

bool same_region(const Region& a, const Region& b) { return sym_diff_area(a, b) == 0; }

}  // namespace

Region image_region(const Region& r)
{
    Region out;
    for (int j = 1; j <= 4; ++j) {
        Region part = map_region(jacobian_block(j), Vec2(0, 0), intersect(r, A_region(j)));
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

Region preimage_region(const Region& r)
{
    Region out;
    for (int j = 1; j <= 4; ++j) {
        Region part = map_region(jacobian_block(j).inverse(), Vec2(0, 0), intersect(r, Aprime_region(j)));
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

Region reflect_T(const Region& r) { return map_region(IMat2(-1, 0, 0, 1), Vec2(1, R_(1, 2)), r); }

Region reflect_Tcal(const Region& r) { return map_region(IMat2(0, -1, -1, 0), Vec2(1, 1), r); }

Region SigmaGeometry::all() const { return unite({&sigma[0], &sigma[1], &sigma[2], &sigma[3]}); }

Region SigmaGeometry::all_prime() const
{
    return unite({&sigma_prime[0], &sigma_prime[1], &sigma_prime[2], &sigma_prime[3]});
}

SigmaGeometry build_sigma()
{
    SigmaGeometry g;
    const Region& A2 = A_region(2);
    const Region& A3 = A_region(3);
    g.sigma[0] = image_region(A_region(1));
    g.sigma[3] = image_region(A_region(4));
    g.sigma[1] = image_region(intersect(A2, Aprime_region(3)));
    g.sigma[2] = image_region(intersect(A3, Aprime_region(2)));
    g.sigma_prime[0] = A_region(1);
    g.sigma_prime[3] = A_region(4);
    g.sigma_prime[1] = intersect(A2, preimage_region(A3));
    g.sigma_prime[2] = intersect(A3, preimage_region(A2));
    g.varsigma3 = intersect(A2, g.sigma[2]);
    g.varsigma2 = intersect(A3, g.sigma[1]);
    g.R = intersect(g.sigma[2], g.sigma_prime[1]);
    g.R_prime = intersect(g.sigma[1], g.sigma_prime[2]);

    for (int j = 0; j < 4; ++j)
        for (int l = j + 1; l < 4; ++l)
            if (intersection_area(g.sigma[j], g.sigma[l]) != 0)
                throw ConstructionError("sigma pieces overlap");
    if (area(g.sigma[0]) != R_(1, 4) || area(g.sigma[3]) != R_(1, 4))
        throw ConstructionError("sigma_1 or sigma_4 has wrong area");
    if (area(g.sigma[1]) != area(g.sigma[2])) throw ConstructionError("sigma_2 and sigma_3 differ in area");
    return g;
}

const SigmaGeometry& sigma_geometry()
{
    static const SigmaGeometry g = build_sigma();
    return g;
}

Region figure_sigma_complement()
{
    return {
        poly10({{0, 8}, {R_(10, 8), 10}, {R_(5, 2), 10}, {0, 5}}),
        poly10({{0, 9}, {0, 10}, {R_(10, 16), 10}}),
        poly10({{0, 0}, {5, 10}, {5, 7}, {R_(10, 16), 0}}),
        poly10({{R_(10, 8), 0}, {R_(5, 2), 0}, {5, 5}, {5, 6}}),
        poly10({{5, 2}, {R_(50, 8), 0}, {R_(15, 2), 0}, {5, 5}}),
        poly10({{5, 1}, {5, 0}, {R_(90, 16), 0}}),
        poly10({{5, 10}, {10, 0}, {10, 3}, {R_(90, 16), 10}}),
        poly10({{R_(50, 8), 10}, {R_(15, 2), 10}, {10, 5}, {10, 4}}),
    };
}

Region figure_sigma_prime_complement()
{
    return {
        poly10({{0, R_(150, 16)}, {0, 10}, {1, 10}}),
        poly10({{0, R_(70, 8)}, {2, 10}, {5, 10}, {0, R_(15, 2)}}),
        poly10({{0, 5}, {10, 10}, {10, R_(150, 16)}, {3, 5}}),
        poly10({{10, R_(70, 8)}, {10, R_(15, 2)}, {5, 5}, {4, 5}}),
        poly10({{10, R_(150, 16) - 5}, {10, 5}, {9, 5}}),
        poly10({{10, R_(70, 8) - 5}, {8, 5}, {5, 5}, {10, R_(5, 2)}}),
        poly10({{10, 0}, {0, 5}, {0, R_(150, 16) - 5}, {7, 0}}),
        poly10({{0, R_(70, 8) - 5}, {0, R_(5, 2)}, {5, 0}, {6, 0}}),
    };
}

namespace {

// sym_diff(A, square minus S) for S a union of disjoint polygons in the square.
Rat sym_diff_with_complement(const Region& a, const Region& s)
{
    return 1 - area(s) - area(a) + 2 * intersection_area(a, s);
}

Region sigma_by_itinerary()
{
    // z in sigma_2 iff H^-1 z in A_2 and H^-2 z in A_3, i.e. sigma_2 = A'_2 n H(A'_3)
    Region s2 = intersect(Aprime_region(2), image_region(Aprime_region(3)));
    Region s3 = intersect(Aprime_region(3), image_region(Aprime_region(2)));
    return unite({&Aprime_region(1), &Aprime_region(4), &s2, &s3});
}

}  // namespace

Certificate verify_sigma(const SigmaGeometry& g)
{
    Certificate cert("sigma-geometry", "Recurrence to sigma: sigma_j, sigma'_j, varsigma, R, R'");
    const Region s = g.all(), sp = g.all_prime();
    cert.set("area_sigma", g.area());
    cert.set("area_sigma_prime", area(sp));
    for (int j = 0; j < 4; ++j) {
        cert.set("area_sigma_" + std::to_string(j + 1), area(g.sigma[j]));
        cert.expect(area(g.sigma[j]) == area(g.sigma_prime[j]), "area sigma_j = area sigma'_j", {{"j", j + 1}});
    }
    cert.expect(area(g.sigma[0]) == R_(1, 4) && area(g.sigma[3]) == R_(1, 4), "area sigma_1 = area sigma_4 = 1/4");

    // second route: the figure's shaded complements
    Rat d1 = sym_diff_with_complement(s, figure_sigma_complement());
    Rat d2 = sym_diff_with_complement(sp, figure_sigma_prime_complement());
    cert.set("symdiff_sigma_vs_figure", d1);
    cert.set("symdiff_sigma_prime_vs_figure", d2);
    cert.expect(d1 == 0, "sigma equals the figure's white region");
    cert.expect(d2 == 0, "sigma' equals the figure's white region");
    // third route: backward itineraries
    Rat d3 = sym_diff_area(s, sigma_by_itinerary());
    cert.set("symdiff_sigma_vs_itinerary", d3);
    cert.expect(d3 == 0, "sigma equals the itinerary description");
    for (int j = 0; j < 4; ++j)
        cert.expect(intersection_area(g.sigma[j], Aprime_region(j + 1)) == area(g.sigma[j]), "sigma_j inside A'_j",
                    {{"j", j + 1}});

    // varsigma: H^-1(sigma_2) n sigma = A_2 n sigma_3 and H^-1(sigma_3) n sigma = A_3 n sigma_2
    Rat v3 = sym_diff_area(intersect(preimage_region(g.sigma[1]), s), g.varsigma3);
    Rat v2 = sym_diff_area(intersect(preimage_region(g.sigma[2]), s), g.varsigma2);
    cert.expect(v3 == 0, "H^-1(sigma_2) n sigma = varsigma_3");
    cert.expect(v2 == 0, "H^-1(sigma_3) n sigma = varsigma_2");
    cert.set("area_varsigma2", area(g.varsigma2));
    cert.set("area_varsigma3", area(g.varsigma3));
    cert.expect(area(g.varsigma2) == area(g.varsigma3), "area varsigma_2 = area varsigma_3");

    // conjugacies between sigma' and sigma
    cert.expect(same_region(image_region(g.sigma_prime[0]), g.sigma[0]), "sigma_1 = H(sigma'_1)");
    cert.expect(same_region(image_region(g.sigma_prime[3]), g.sigma[3]), "sigma_4 = H(sigma'_4)");
    Region h2_2 = image_region(image_region(g.sigma_prime[1]));
    Region h2_3 = image_region(image_region(g.sigma_prime[2]));
    bool same_index = same_region(h2_2, g.sigma[1]) && same_region(h2_3, g.sigma[2]);
    bool swapped = same_region(h2_2, g.sigma[2]) && same_region(h2_3, g.sigma[1]);
    cert.set("H2_sigma_prime_2_equals", same_index ? "sigma_2" : (swapped ? "sigma_3" : "neither"));
    cert.expect(swapped, "sigma_3 = H^2(sigma'_2) and sigma_2 = H^2(sigma'_3)");

    // symmetries
    Region s13 = unite({&g.sigma[0], &g.sigma[2]});
    Region s24 = unite({&g.sigma[1], &g.sigma[3]});
    cert.expect(same_region(reflect_T(s24), s13), "T(sigma_2 u sigma_4) = sigma_1 u sigma_3");
    cert.expect(same_region(reflect_Tcal(sp), s), "Tcal(sigma') = sigma");

    // R and R' are quadrilaterals around the period-2 orbit
    cert.expect(region_contains(g.R, Vec2(R_(1, 4), R_(1, 4)), true), "(1/4,1/4) interior to R");
    cert.expect(region_contains(g.R_prime, Vec2(R_(3, 4), R_(3, 4)), true), "(3/4,3/4) interior to R'");
    cert.expect(same_region(reflect_T(g.R), g.R_prime) || same_region(reflect_Tcal(g.R), g.R_prime),
                "R' is a symmetric copy of R");
    cert.set("area_R", area(g.R));
    return cert;
}

const std::vector<Vec2>& accumulation_points_P1()
{
    static const std::vector<Vec2> p = {Vec2(0, R_(1, 4)), Vec2(R_(1, 2), R_(1, 4)), Vec2(R_(1, 2), R_(3, 4)),
                                        Vec2(1, R_(3, 4))};
    return p;
}

const std::vector<Vec2>& accumulation_points_P2()
{
    static const std::vector<Vec2> p = {Vec2(R_(1, 4), R_(1, 2)), Vec2(R_(1, 4), 1), Vec2(R_(3, 4), 0),
                                        Vec2(R_(3, 4), R_(1, 2))};
    return p;
}

const std::vector<Vec2>& fixed_points()
{
    static const std::vector<Vec2> p = {Vec2(0, R_(1, 2)), Vec2(R_(1, 2), 0), Vec2(R_(1, 2), R_(1, 2)), Vec2(1, 1)};
    return p;
}

FeatureRegions feature_regions()
{
    const SigmaGeometry& g = sigma_geometry();
    return {g.R, g.R_prime, intersect(g.sigma[1], S_region(4))};
}

int sigma_index(const TorusPoint& z)
{
    int a = label_index(classify(z, PartitionSide::Aprime));
    if (a == 0) throw BoundaryHit("point on the singularity set: " + z.str());
    if (a == 1 || a == 4) return a;
    TorusPoint w = apply_H_inv(z);
    int b = label_index(classify(w, PartitionSide::Aprime));
    if (b == 0) throw BoundaryHit("point on the singularity set: " + z.str());
    // a is the A class of H^-1 z, b the A class of H^-2 z
    if (a == 2 && b == 3) return 2;
    if (a == 3 && b == 2) return 3;
    return 0;
}

bool in_sigma(const TorusPoint& z) { return sigma_index(z) != 0; }

ReturnResult return_map(const TorusPoint& z, unsigned cap)
{
    if (!in_sigma(z)) throw std::invalid_argument("return_map needs a point of sigma: " + z.str());
    ReturnResult r;
    r.z = z;
    for (unsigned n = 1; n <= cap; ++n) {
        int j = label_index(classify(r.z, PartitionSide::A));
        if (j == 0) throw BoundaryHit("orbit meets the singularity set at " + r.z.str());
        r.jacobian = jacobian_block(j) * r.jacobian;
        r.z = apply_H(r.z);
        if (in_sigma(r.z)) {
            r.R = n;
            return r;
        }
    }
    throw NoReturnWithinCap("no return to sigma within " + std::to_string(cap) + " steps from " + z.str());
}

Region EscapePartition::cells_region(int j, unsigned k) const
{
    Region out;
    for (const auto& c : cells)
        if (c.j == j && c.k == k) out.push_back(c.poly);
    return out;
}

Region EscapePartition::cells_region(unsigned k) const
{
    Region out;
    for (const auto& c : cells)
        if (c.k == k) out.push_back(c.poly);
    return out;
}

Rat EscapePartition::area(unsigned k) const
{
    Rat s = 0;
    for (const auto& c : cells)
        if (c.k == k) s += c.poly.area();
    return s;
}

Rat EscapePartition::total_area() const
{
    Rat s = otm::area(trapped);
    for (const auto& c : cells) s += c.poly.area();
    return s;
}

EscapePartition escape_partition(int i, unsigned k_max, const Region& start)
{
    if (i != 2 && i != 3) throw std::invalid_argument("escape partitions exist for A_2 and A_3");
    struct Alive {
        PolygonQ poly, image;
        IMat2 N;
        Vec2 t;
    };
    EscapePartition out;
    out.i = i;
    out.k_max = k_max;
    std::vector<Alive> alive;
    for (const auto& p : intersect(start, A_region(i))) alive.push_back({p, p, IMat2(), Vec2(0, 0)});
    const IMat2& M = jacobian_block(i);
    for (unsigned k = 1; k <= k_max && !alive.empty(); ++k) {
        std::vector<Alive> next;
        for (const auto& a : alive) {
            IMat2 N = M * a.N;
            IMat2 Ninv = N.inverse();
            for (auto& sp : reduce_mod1(transform(a.image, M))) {
                Vec2 t = M * a.t + sp.shift;
                for (int j = 1; j <= 4; ++j) {
                    for (const auto& ap : A_region(j)) {
                        auto img = intersect(sp.poly, ap);
                        if (!img) continue;
                        PolygonQ pre = transform(*img, Ninv, Vec2(0, 0) - Ninv * t);
                        if (j == i)
                            next.push_back({pre, *img, N, t});
                        else
                            out.cells.push_back({i, j, k, pre, N, t, *img});
                    }
                }
            }
        }
        alive = std::move(next);
    }
    for (const auto& a : alive) out.trapped.push_back(a.poly);
    return out;
}

EscapePartition escape_partition(int i, unsigned k_max) { return escape_partition(i, k_max, A_region(i)); }

EscapePartition sigma_escape_partition(int i, unsigned k_max)
{
    const SigmaGeometry& g = sigma_geometry();
    Region start = subtract(intersect(g.all(), A_region(i)), i == 3 ? g.varsigma2 : g.varsigma3);
    return escape_partition(i, k_max, start);
}

Region MCell::region() const
{
    Region r;
    for (const auto& p : pieces) r.push_back(p.poly);
    return r;
}

namespace {

int sigma_of_region(const PolygonQ& p)
{
    const SigmaGeometry& g = sigma_geometry();
    Vec2 c = p.interior_point();
    for (int j = 0; j < 4; ++j)
        if (region_contains(g.sigma[j], c)) return j + 1;
    return 0;
}

void add_return_pieces(MCell& cell, const Region& dom, int block, const std::string& name)
{
    const IMat2& M = jacobian_block(block);
    for (const auto& p : dom) {
        for (auto& sp : reduce_mod1(transform(p, M))) {
            IMat2 Minv = M.inverse();
            PolygonQ pre = transform(sp.poly, Minv, Vec2(0, 0) - Minv * sp.shift);
            ReturnPiece rp{pre, 1, M, sp.shift, sigma_of_region(pre), sigma_of_region(sp.poly), name};
            cell.area += pre.area();
            cell.pieces.push_back(std::move(rp));
        }
    }
}

}  // namespace

ReturnPartition return_partition(unsigned m_max)
{
    const SigmaGeometry& g = sigma_geometry();
    const Region s = g.all();
    ReturnPartition rp;
    rp.cells.resize(m_max + 1);
    for (unsigned m = 0; m <= m_max; ++m) rp.cells[m].m = m;
    MCell& m0 = rp.cells[0];
    m0.area = 0;
    add_return_pieces(m0, intersect(s, A_region(1)), 1, "A1");
    add_return_pieces(m0, intersect(s, A_region(4)), 4, "A4");
    add_return_pieces(m0, g.varsigma2, 3, "vs2");
    add_return_pieces(m0, g.varsigma3, 2, "vs3");
    for (unsigned m = 1; m <= m_max; ++m) rp.cells[m].area = 0;
    for (int i : {2, 3}) {
        EscapePartition ep = sigma_escape_partition(i, m_max);
        for (const auto& c : ep.cells) {
            // one more step from A_j lands in sigma
            const IMat2& Mj = jacobian_block(c.j);
            for (auto& sp : reduce_mod1(transform(c.image, Mj))) {
                IMat2 J = Mj * c.N;
                Vec2 t = Mj * c.t + sp.shift;
                IMat2 Jinv = J.inverse();
                PolygonQ pre = transform(sp.poly, Jinv, Vec2(0, 0) - Jinv * t);
                std::string name = "A^" + std::to_string(c.k) + "_{" + std::to_string(c.j) + "," +
                                   std::to_string(c.i) + "}";
                MCell& cell = rp.cells[c.k];
                cell.area += pre.area();
                cell.pieces.push_back({pre, c.k + 1, J, t, sigma_of_region(pre), sigma_of_region(sp.poly), name});
            }
        }
        rp.unresolved.insert(rp.unresolved.end(), ep.trapped.begin(), ep.trapped.end());
    }
    return rp;
}

std::vector<MCell> mcells(unsigned m_max) { return return_partition(m_max).cells; }

MCell mcell(unsigned m) { return return_partition(m).cells[m]; }

std::vector<SingularityLine> singularity_inventory(const ReturnPartition& rp, std::size_t* skipped)
{
    std::vector<const ReturnPiece*> pieces;
    for (const auto& c : rp.cells)
        for (const auto& p : c.pieces) pieces.push_back(&p);
    auto find = [&](const Vec2& p) -> const ReturnPiece* {
        for (const auto* q : pieces)
            if (q->poly.contains(p, true)) return q;
        return nullptr;
    };
    const Rat delta = rat(1, 1000000000);
    std::vector<SingularityLine> out;
    std::size_t skip = 0;
    for (const auto* q : pieces) {
        const auto& v = q->poly.vertices();
        for (std::size_t i = 0; i < v.size(); ++i) {
            Vec2 a = v[i], b = v[(i + 1) % v.size()];
            Vec2 d = b - a;
            Rat s = std::max(abs(d.x), abs(d.y));
            Vec2 n(-d.y / s * delta, d.x / s * delta);
            Vec2 mid = rat(1, 2) * (a + b);
            Vec2 outside = q->poly.contains(mid + n, true) ? mid - n : mid + n;
            outside = Vec2(frac(outside.x), frac(outside.y));
            if (sigma_index(TorusPoint(outside)) != q->source) {
                out.push_back({a, b, q->source, "S0"});
                continue;
            }
            const ReturnPiece* o = find(outside);
            if (!o) {
                ++skip;
                continue;
            }
            bool same = o->R == q->R && o->jacobian == q->jacobian && frac(o->t.x) == frac(q->t.x) &&
                        frac(o->t.y) == frac(q->t.y);
            if (!same) out.push_back({a, b, q->source, "S1"});
        }
    }
    if (skipped) *skipped = skip;
    return out;
}

Certificate verify_return_partition(const ReturnPartition& rp, unsigned m_check)
{
    Certificate cert("return-partition", "Return-time cells M_m and allowed sigma transitions");
    const SigmaGeometry& g = sigma_geometry();
    const Region s = g.all();
    Rat total = area(rp.unresolved);
    for (const auto& c : rp.cells) total += c.area;
    cert.set("area_sigma", area(s));
    cert.set("area_unresolved", area(rp.unresolved));
    cert.expect(total == area(s), "cells and remainder tile sigma", {{"total", to_string(total)}});

    // allowed blocks per (source, target), n in 0..2 or any n
    auto allowed = [](int from, int to, const IMat2& J) {
        auto fam = [&](int base, int gen, int lo, int hi) {
            IMat2 P;
            for (int n = 0; n <= hi; ++n) {
                if (n >= lo && jacobian_block(base) * P == J) return true;
                if (gen == 0) break;
                P = P * jacobian_block(gen);
            }
            return false;
        };
        const int big = 400;
        switch (from * 10 + to) {
        case 11: return fam(1, 0, 0, 0);
        case 13: return fam(3, 2, 1, big);
        case 14: return fam(4, 0, 0, 0) || fam(4, 2, 1, big) || fam(4, 3, 1, big);
        case 23: return fam(3, 2, 0, 2);
        case 24: return fam(4, 2, 0, 2);
        case 31: return fam(1, 3, 0, 2);
        case 32: return fam(2, 3, 0, 2);
        case 41: return fam(1, 0, 0, 0) || fam(1, 2, 1, big) || fam(1, 3, 1, big);
        case 42: return fam(2, 3, 1, big);
        case 44: return fam(4, 0, 0, 0);
        default: return false;
        }
    };
    std::size_t checked_pieces = 0;
    for (const auto& c : rp.cells) {
        if (c.m > m_check) break;
        Region img;
        for (const auto& p : c.pieces) {
            ++checked_pieces;
            img.push_back(transform(p.poly, p.jacobian, p.t));
            nlohmann::json wit = {{"m", c.m}, {"cell", p.cell}, {"source", p.source}, {"target", p.target},
                                  {"jacobian", p.jacobian.str()}};
            cert.expect(p.source != 0 && p.target != 0, "piece and image inside sigma", wit);
            cert.expect(allowed(p.source, p.target, p.jacobian), "Jacobian listed in the transition table", wit);
            // spot-check the return time on the piece's interior point
            TorusPoint z(p.poly.interior_point());
            try {
                ReturnResult r = return_map(z, c.m + 2);
                cert.expect(r.R == c.m + 1 && r.jacobian == p.jacobian, "pointwise return agrees", wit);
            } catch (const std::exception&) {
                cert.expect(false, "pointwise return agrees", wit);
            }
        }
        Region img_red;
        for (const auto& q : img)
            for (auto& sp : reduce_mod1(q)) img_red.push_back(sp.poly);
        cert.expect(area(img_red) == c.area, "H_sigma preserves area of M_m", {{"m", c.m}});
        cert.expect(intersection_area(img_red, s) == c.area, "H_sigma(M_m) inside sigma", {{"m", c.m}});
    }
    cert.set("pieces_checked", nlohmann::json(checked_pieces));
    nlohmann::json areas = nlohmann::json::array();
    for (const auto& c : rp.cells) areas.push_back(to_string(c.area));
    cert.set("mcell_areas", std::move(areas));
    return cert;
}

nlohmann::json escape_partition_json(const EscapePartition& p)
{
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : p.cells)
        cells.push_back({{"i", c.i}, {"j", c.j}, {"k", c.k}, {"polygon", to_json(c.poly)},
                         {"area", to_string(c.poly.area())}});
    return {{"i", p.i}, {"k_max", p.k_max}, {"cells", cells}, {"trapped", to_json(p.trapped)},
            {"trapped_area", to_string(area(p.trapped))}};
}

}  // namespace otm
