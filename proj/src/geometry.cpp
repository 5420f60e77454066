#include "otm/geometry.hpp"

#include <algorithm>
#include <functional>

namespace otm {

LineQ::LineQ(Rat a_, Rat b_, Rat c_) : a(std::move(a_)), b(std::move(b_)), c(std::move(c_))
{
    if (a == 0 && b == 0) throw ExactError("degenerate line");
    Rat s = a != 0 ? a : b;
    a /= s;
    b /= s;
    c /= s;
}

LineQ LineQ::through(const Vec2& p, const Vec2& q)
{
    if (p == q) throw ExactError("line through coincident points");
    Rat a = q.y - p.y, b = p.x - q.x;
    return LineQ(a, b, a * p.x + b * p.y);
}

LineQ LineQ::point_slope(const Vec2& p, const Rat& m) { return LineQ(-m, 1, p.y - m * p.x); }

Rat LineQ::gradient() const
{
    if (is_vertical()) throw ExactError("gradient of vertical line");
    return -a / b;
}

Rat LineQ::y_at(const Rat& x) const
{
    if (is_vertical()) throw ExactError("y_at on vertical line");
    return (c - a * x) / b;
}

bool operator==(const LineQ& l, const LineQ& m) { return l.a == m.a && l.b == m.b && l.c == m.c; }

std::optional<Vec2> intersect(const LineQ& l, const LineQ& m)
{
    Rat det = l.a * m.b - l.b * m.a;
    if (det == 0) return std::nullopt;
    return Vec2((l.c * m.b - l.b * m.c) / det, (l.a * m.c - l.c * m.a) / det);
}

Rat signed_area(const std::vector<Vec2>& pts)
{
    Rat s = 0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) s += cross(pts[i], pts[(i + 1) % n]);
    return s / 2;
}

namespace {

std::vector<Vec2> clean(std::vector<Vec2> v)
{
    bool changed = true;
    while (changed && v.size() >= 2) {
        changed = false;
        std::vector<Vec2> out;
        out.reserve(v.size());
        const std::size_t n = v.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& prev = v[(i + n - 1) % n];
            const Vec2& cur = v[i];
            const Vec2& next = v[(i + 1) % n];
            if (cur == next) {
                changed = true;
                continue;
            }
            if (cross(cur - prev, next - cur) == 0) {
                changed = true;
                continue;
            }
            out.push_back(cur);
        }
        v.swap(out);
    }
    return v;
}

std::optional<PolygonQ> try_make(std::vector<Vec2> v)
{
    v = clean(std::move(v));
    if (v.size() < 3) return std::nullopt;
    if (signed_area(v) == 0) return std::nullopt;
    return PolygonQ(std::move(v));
}

// Keeps the part where f >= 0; f must be affine.
std::optional<PolygonQ> clip_by(const PolygonQ& p, const std::function<Rat(const Vec2&)>& f)
{
    const auto& v = p.vertices();
    const std::size_t n = v.size();
    std::vector<Rat> val(n);
    bool all_in = true, all_out = true;
    for (std::size_t i = 0; i < n; ++i) {
        val[i] = f(v[i]);
        if (val[i] < 0) all_in = false;
        if (val[i] > 0) all_out = false;
    }
    if (all_in) return p;
    if (all_out) return std::nullopt;
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = (i + 1) % n;
        if (val[i] >= 0) out.push_back(v[i]);
        if ((val[i] > 0 && val[j] < 0) || (val[i] < 0 && val[j] > 0)) {
            Rat t = val[i] / (val[i] - val[j]);
            out.push_back(v[i] + t * (v[j] - v[i]));
        }
    }
    return try_make(std::move(out));
}

}  // namespace

PolygonQ::PolygonQ(std::vector<Vec2> vertices)
{
    v_ = clean(std::move(vertices));
    if (v_.size() < 3) throw DegeneratePolygon("polygon has fewer than 3 distinct vertices");
    Rat s = signed_area(v_);
    if (s == 0) throw DegeneratePolygon("polygon has zero area");
    if (s < 0) std::reverse(v_.begin(), v_.end());
}

PolygonQ PolygonQ::rect(const Rat& x0, const Rat& y0, const Rat& x1, const Rat& y1)
{
    return PolygonQ({Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)});
}

Rat PolygonQ::area() const { return signed_area(v_); }

Vec2 PolygonQ::interior_point() const
{
    Vec2 s(0, 0);
    for (const auto& p : v_) s = s + p;
    return Rat(1, v_.size()) * s;
}

bool PolygonQ::is_convex() const
{
    const std::size_t n = v_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = v_[i];
        const Vec2& b = v_[(i + 1) % n];
        const Vec2& c = v_[(i + 2) % n];
        if (cross(b - a, c - b) < 0) return false;
    }
    return signed_area(v_) > 0;
}

bool PolygonQ::contains(const Vec2& p, bool strict) const
{
    const std::size_t n = v_.size();
    for (std::size_t i = 0; i < n; ++i) {
        Rat c = cross(v_[(i + 1) % n] - v_[i], p - v_[i]);
        if (strict ? c <= 0 : c < 0) return false;
    }
    return true;
}

Rat PolygonQ::min_x() const
{
    return std::min_element(v_.begin(), v_.end(), [](auto& a, auto& b) { return a.x < b.x; })->x;
}
Rat PolygonQ::max_x() const
{
    return std::max_element(v_.begin(), v_.end(), [](auto& a, auto& b) { return a.x < b.x; })->x;
}
Rat PolygonQ::min_y() const
{
    return std::min_element(v_.begin(), v_.end(), [](auto& a, auto& b) { return a.y < b.y; })->y;
}
Rat PolygonQ::max_y() const
{
    return std::max_element(v_.begin(), v_.end(), [](auto& a, auto& b) { return a.y < b.y; })->y;
}

Rat shoelace_area(const PolygonQ& p)
{
    if (p.size() < 3) throw DegeneratePolygon("shoelace on fewer than 3 vertices");
    Rat a = signed_area(p.vertices());
    if (a <= 0) throw DegeneratePolygon("shoelace area not positive");
    return a;
}

Rat area(const Region& r)
{
    Rat s = 0;
    for (const auto& p : r) s += p.area();
    return s;
}

std::optional<PolygonQ> clip_halfplane(const PolygonQ& p, const LineQ& l, Side side)
{
    if (side == Side::Le) return clip_by(p, [&](const Vec2& v) { return Rat(-l.eval(v)); });
    return clip_by(p, [&](const Vec2& v) { return l.eval(v); });
}

std::optional<PolygonQ> intersect(const PolygonQ& p, const PolygonQ& q)
{
    if (p.max_x() <= q.min_x() || q.max_x() <= p.min_x() || p.max_y() <= q.min_y() || q.max_y() <= p.min_y())
        return std::nullopt;
    std::optional<PolygonQ> cur = p;
    const auto& w = q.vertices();
    const std::size_t n = w.size();
    for (std::size_t i = 0; i < n && cur; ++i) {
        const Vec2 a = w[i], e = w[(i + 1) % n] - w[i];
        cur = clip_by(*cur, [&](const Vec2& v) { return cross(e, v - a); });
    }
    return cur;
}

Region intersect(const Region& a, const PolygonQ& q)
{
    Region out;
    for (const auto& p : a)
        if (auto r = intersect(p, q)) out.push_back(std::move(*r));
    return out;
}

Region intersect(const Region& a, const Region& b)
{
    Region out;
    for (const auto& p : a)
        for (const auto& q : b)
            if (auto r = intersect(p, q)) out.push_back(std::move(*r));
    return out;
}

Region subtract(const PolygonQ& p, const PolygonQ& q)
{
    if (!intersect(p, q)) return {p};
    Region out;
    std::optional<PolygonQ> cur = p;
    const auto& w = q.vertices();
    const std::size_t n = w.size();
    for (std::size_t i = 0; i < n && cur; ++i) {
        const Vec2 a = w[i], e = w[(i + 1) % n] - w[i];
        if (auto outside = clip_by(*cur, [&](const Vec2& v) { return Rat(-cross(e, v - a)); }))
            out.push_back(std::move(*outside));
        cur = clip_by(*cur, [&](const Vec2& v) { return cross(e, v - a); });
    }
    return out;
}

Region subtract(const Region& a, const Region& b)
{
    Region cur = a;
    for (const auto& q : b) {
        Region next;
        for (const auto& p : cur) {
            Region d = subtract(p, q);
            next.insert(next.end(), d.begin(), d.end());
        }
        cur = std::move(next);
    }
    return cur;
}

Rat intersection_area(const Region& a, const Region& b) { return area(intersect(a, b)); }

Rat sym_diff_area(const Region& a, const Region& b)
{
    return area(a) + area(b) - 2 * intersection_area(a, b);
}

bool region_contains(const Region& r, const Vec2& p, bool strict)
{
    return std::any_of(r.begin(), r.end(), [&](const PolygonQ& q) { return q.contains(p, strict); });
}

PolygonQ transform(const PolygonQ& p, const IMat2& m, const Vec2& t)
{
    std::vector<Vec2> v;
    v.reserve(p.size());
    for (const auto& q : p.vertices()) v.push_back(m * q + t);
    return PolygonQ(std::move(v));
}

PolygonQ translate(const PolygonQ& p, const Vec2& t)
{
    std::vector<Vec2> v;
    v.reserve(p.size());
    for (const auto& q : p.vertices()) v.push_back(q + t);
    return PolygonQ(std::move(v));
}

std::vector<SeamPiece> reduce_mod1(const PolygonQ& p)
{
    std::vector<SeamPiece> out;
    Int i0 = floor_int(p.min_x()), i1 = ceil_int(p.max_x());
    Int j0 = floor_int(p.min_y()), j1 = ceil_int(p.max_y());
    for (Int i = i0; i < i1; ++i) {
        auto col = clip_halfplane(p, LineQ::vertical(Rat(i)), Side::Ge);
        if (col) col = clip_halfplane(*col, LineQ::vertical(Rat(i + 1)), Side::Le);
        if (!col) continue;
        for (Int j = j0; j < j1; ++j) {
            auto cell = clip_halfplane(*col, LineQ::horizontal(Rat(j)), Side::Ge);
            if (cell) cell = clip_halfplane(*cell, LineQ::horizontal(Rat(j + 1)), Side::Le);
            if (!cell) continue;
            Vec2 shift{Rat(-i), Rat(-j)};
            out.push_back({translate(*cell, shift), shift});
        }
    }
    return out;
}

Region map_polygon(const IMat2& m, const Vec2& t, const PolygonQ& p)
{
    if (m.det() == 0) throw ExactError("map_polygon with singular matrix");
    Region out;
    for (auto& s : reduce_mod1(transform(p, m, t))) out.push_back(std::move(s.poly));
    return out;
}

Region map_region(const IMat2& m, const Vec2& t, const Region& r)
{
    Region out;
    for (const auto& p : r) {
        Region q = map_polygon(m, t, p);
        out.insert(out.end(), q.begin(), q.end());
    }
    return out;
}

Rat PlanarPartition::area() const
{
    Rat s = 0;
    for (const auto& p : pieces) s += p.poly.area();
    return s;
}

Region PlanarPartition::region() const
{
    Region r;
    for (const auto& p : pieces) r.push_back(p.poly);
    return r;
}

Region PlanarPartition::region(const std::string& label) const
{
    Region r;
    for (const auto& p : pieces)
        if (p.label == label) r.push_back(p.poly);
    return r;
}

PlanarPartition refine(const PlanarPartition& a, const PlanarPartition& b)
{
    Rat aa = a.area(), ab = b.area();
    if (aa != ab) throw SupportMismatch("partitions cover different areas: " + to_string(aa) + " vs " + to_string(ab));
    PlanarPartition out;
    for (const auto& p : a.pieces)
        for (const auto& q : b.pieces)
            if (auto r = intersect(p.poly, q.poly)) out.pieces.push_back({std::move(*r), p.label + "|" + q.label});
    if (out.area() != aa) throw SupportMismatch("partitions have different supports");
    return out;
}

std::optional<std::pair<Rat, Rat>> clip_segment(const Vec2& p, const Vec2& q, const PolygonQ& poly)
{
    Rat t0 = 0, t1 = 1;
    const Vec2 d = q - p;
    const auto& w = poly.vertices();
    const std::size_t n = w.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e = w[(i + 1) % n] - w[i];
        // inside iff g0 + t*g1 >= 0
        Rat g0 = cross(e, p - w[i]);
        Rat g1 = cross(e, d);
        if (g1 == 0) {
            if (g0 < 0) return std::nullopt;
            continue;
        }
        Rat t = -g0 / g1;
        if (g1 > 0) {
            if (t > t0) t0 = t;
        } else {
            if (t < t1) t1 = t;
        }
        if (t0 >= t1) return std::nullopt;
    }
    return std::make_pair(t0, t1);
}

nlohmann::json to_json(const Vec2& v) { return nlohmann::json::array({to_string(v.x), to_string(v.y)}); }

nlohmann::json to_json(const PolygonQ& p)
{
    nlohmann::json j = nlohmann::json::array();
    for (const auto& v : p.vertices()) j.push_back(to_json(v));
    return j;
}

nlohmann::json to_json(const Region& r)
{
    nlohmann::json j = nlohmann::json::array();
    for (const auto& p : r) j.push_back(to_json(p));
    return j;
}

PolygonQ polygon_from_json(const nlohmann::json& j)
{
    std::vector<Vec2> v;
    for (const auto& pt : j) v.emplace_back(rat(pt.at(0).get<std::string>()), rat(pt.at(1).get<std::string>()));
    return PolygonQ(std::move(v));
}

}  // namespace otm
