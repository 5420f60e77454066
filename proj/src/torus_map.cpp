#include "otm/torus_map.hpp"

#include <algorithm>
#include <mutex>

namespace otm {

namespace {

const Rat kHalf(1, 2);

int s_class(const Rat& x, const Rat& y)
{
    // S1=[0,1/2)^2, S2=[1/2,1)x[0,1/2), S3=[0,1/2)x[1/2,1), S4=[1/2,1)^2
    int col = x < kHalf ? 0 : 1;
    int row = y < kHalf ? 0 : 1;
    return 1 + col + 2 * row;
}

bool on_s_boundary(const Rat& x, const Rat& y)
{
    return x == 0 || x == kHalf || y == 0 || y == kHalf;
}

}  // namespace

bool operator==(const TorusPoint& a, const TorusPoint& b) { return a.x == b.x && a.y == b.y; }
bool operator!=(const TorusPoint& a, const TorusPoint& b) { return !(a == b); }

std::string label_name(Label l)
{
    static const char* names[] = {"A1", "A2", "A3", "A4", "A1'", "A2'", "A3'", "A4'",
                                  "S1", "S2", "S3", "S4", "BOUNDARY"};
    return names[static_cast<int>(l)];
}

int label_index(Label l)
{
    if (l == Label::Boundary) return 0;
    return static_cast<int>(l) % 4 + 1;
}

Rat tent(const Rat& t)
{
    Rat u = frac(t);
    if (u <= kHalf) return 2 * u;
    return 2 * (1 - u);
}

TorusPoint apply_F(const TorusPoint& z) { return {z.x + tent(z.y), z.y}; }
TorusPoint apply_G(const TorusPoint& z) { return {z.x, z.y + tent(z.x)}; }
TorusPoint apply_F_inv(const TorusPoint& z) { return {z.x - tent(z.y), z.y}; }
TorusPoint apply_G_inv(const TorusPoint& z) { return {z.x, z.y - tent(z.x)}; }
TorusPoint apply_H(const TorusPoint& z) { return apply_G(apply_F(z)); }
TorusPoint apply_H_inv(const TorusPoint& z) { return apply_F_inv(apply_G_inv(z)); }

TorusPoint apply_H_n(TorusPoint z, long n)
{
    for (; n > 0; --n) z = apply_H(z);
    for (; n < 0; ++n) z = apply_H_inv(z);
    return z;
}

Label classify(const TorusPoint& z, PartitionSide side)
{
    Rat x = z.x, y = z.y;
    int base = 0;
    if (side == PartitionSide::A) {
        x = apply_F(z).x;
    } else if (side == PartitionSide::Aprime) {
        y = apply_G_inv(z).y;
        base = 4;
    } else {
        base = 8;
    }
    if (on_s_boundary(x, y)) return Label::Boundary;
    return static_cast<Label>(base + s_class(x, y) - 1);
}

const IMat2& jacobian_block(int j)
{
    static const IMat2 M[4] = {IMat2(1, 2, 2, 5), IMat2(1, 2, -2, -3), IMat2(1, -2, 2, -3),
                               IMat2(1, -2, -2, 5)};
    if (j < 1 || j > 4) throw std::out_of_range("jacobian block index");
    return M[j - 1];
}

IMat2 jacobian(const TorusPoint& z)
{
    Label l = classify(z, PartitionSide::A);
    if (l == Label::Boundary) throw SingularityError("Jacobian undefined on singularity set at " + z.str());
    return jacobian_block(label_index(l));
}

IMat2 cocycle(const TorusPoint& z, std::size_t n)
{
    IMat2 m;
    TorusPoint w = z;
    for (std::size_t i = 0; i < n; ++i) {
        Label l = classify(w, PartitionSide::A);
        if (l == Label::Boundary)
            throw SingularityError("orbit meets singularity set at step " + std::to_string(i), i);
        m = jacobian_block(label_index(l)) * m;
        w = apply_H(w);
    }
    return m;
}

std::vector<Label> itinerary(const TorusPoint& z, std::size_t n)
{
    std::vector<Label> out;
    TorusPoint w = z;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(classify(w, PartitionSide::A));
        w = apply_H(w);
    }
    return out;
}

TorusPoint symmetry_T(const TorusPoint& z) { return {1 - z.x, z.y + kHalf}; }
TorusPoint symmetry_Tcal(const TorusPoint& z) { return {1 - z.y, 1 - z.x}; }

namespace {

struct Partitions {
    std::array<Region, 4> S, A, Ap;
    std::array<PolygonQ, 4> Q;
    PolygonQ Qp2;
};

PolygonQ single(const Region& r)
{
    if (r.size() != 1) throw ExactError("expected a single convex piece");
    return r.front();
}

const Partitions& partitions()
{
    static const Partitions P = [] {
        Partitions p;
        const Rat h = kHalf;
        p.S[0] = {PolygonQ::rect(0, 0, h, h)};
        p.S[1] = {PolygonQ::rect(h, 0, 1, h)};
        p.S[2] = {PolygonQ::rect(0, h, h, 1)};
        p.S[3] = {PolygonQ::rect(h, h, 1, 1)};
        // F^-1 is (x - 2y, y) on y < 1/2 and (x + 2y, y) mod 1 on y > 1/2.
        const IMat2 finv_low(1, -2, 0, 1), finv_high(1, 2, 0, 1);
        // G is (x, y + 2x) on x < 1/2 and (x, y - 2x) mod 1 on x > 1/2.
        const IMat2 g_left(1, 0, 2, 1), g_right(1, 0, -2, 1);
        for (int j = 0; j < 4; ++j) {
            const PolygonQ& s = p.S[j].front();
            p.A[j] = map_polygon(j < 2 ? finv_low : finv_high, Vec2(0, 0), s);
            p.Ap[j] = map_polygon(j % 2 == 0 ? g_left : g_right, Vec2(0, 0), s);
        }
        p.Q[0] = single(intersect(p.A[0], p.S[1]));
        p.Q[1] = single(intersect(p.A[1], p.S[0]));
        p.Q[2] = single(intersect(p.A[2], p.S[3]));
        p.Q[3] = single(intersect(p.A[3], p.S[2]));
        p.Qp2 = single(intersect(p.Ap[1], p.S[3]));
        return p;
    }();
    return P;
}

PlanarPartition labelled(const std::array<Region, 4>& r, const std::string& prefix)
{
    PlanarPartition out;
    for (int j = 0; j < 4; ++j)
        for (const auto& p : r[j]) out.pieces.push_back({p, prefix + std::to_string(j + 1)});
    return out;
}

}  // namespace

const Region& S_region(int j) { return partitions().S.at(j - 1); }
const Region& A_region(int j) { return partitions().A.at(j - 1); }
const Region& Aprime_region(int j) { return partitions().Ap.at(j - 1); }
PlanarPartition S_partition() { return labelled(partitions().S, "S"); }
PlanarPartition A_partition() { return labelled(partitions().A, "A"); }
PlanarPartition Aprime_partition() { return labelled(partitions().Ap, "A'"); }
const PolygonQ& Q_parallelogram(int j) { return partitions().Q.at(j - 1); }
const PolygonQ& Qprime2_parallelogram() { return partitions().Qp2; }

RatSegment::RatSegment(Vec2 p_, Vec2 q_) : p(std::move(p_)), q(std::move(q_))
{
    if (p == q) throw DegenerateSegment("segment endpoints coincide");
}

std::vector<std::pair<RatSegment, int>> split_on_singularities(const RatSegment& s)
{
    std::vector<std::tuple<Rat, Rat, int>> parts;
    for (int j = 1; j <= 4; ++j)
        for (const auto& poly : A_region(j))
            if (auto r = clip_segment(s.p, s.q, poly)) parts.emplace_back(r->first, r->second, j);
    std::sort(parts.begin(), parts.end(),
              [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });
    std::vector<std::pair<RatSegment, int>> out;
    const Vec2 d = s.q - s.p;
    for (auto& [t0, t1, j] : parts) out.emplace_back(RatSegment(s.p + t0 * d, s.p + t1 * d), j);
    return out;
}

std::vector<RatSegment> push_segment(const IMat2& m, const RatSegment& s)
{
    const Vec2 a = m * s.p, b = m * s.q, d = b - a;
    std::vector<Rat> cuts = {Rat(0), Rat(1)};
    auto add_crossings = [&](const Rat& u0, const Rat& du) {
        if (du == 0) return;
        Rat u1 = u0 + du;
        Rat lo = u0 < u1 ? u0 : u1, hi = u0 < u1 ? u1 : u0;
        for (Int k = ceil_int(lo); Rat(k) <= hi; ++k) {
            Rat t = (Rat(k) - u0) / du;
            if (t > 0 && t < 1) cuts.push_back(t);
        }
    };
    add_crossings(a.x, d.x);
    add_crossings(a.y, d.y);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<RatSegment> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Vec2 p = a + cuts[i] * d, q = a + cuts[i + 1] * d;
        Vec2 mid = kHalf * (p + q);
        Vec2 shift(Rat(-floor_int(mid.x)), Rat(-floor_int(mid.y)));
        out.emplace_back(p + shift, q + shift);
    }
    return out;
}

std::vector<RatSegment> iterate_segments(const std::vector<RatSegment>& segs, std::size_t n)
{
    std::vector<RatSegment> cur = segs;
    for (std::size_t step = 0; step < n; ++step) {
        std::vector<RatSegment> next;
        for (const auto& s : cur)
            for (const auto& [piece, j] : split_on_singularities(s)) {
                auto img = push_segment(jacobian_block(j), piece);
                next.insert(next.end(), img.begin(), img.end());
            }
        cur.swap(next);
    }
    return cur;
}

std::vector<RatSegment> iterate_segment(const RatSegment& seg, std::size_t n)
{
    return iterate_segments({seg}, n);
}

Rat total_height(const std::vector<RatSegment>& segs)
{
    Rat h = 0;
    for (const auto& s : segs) h += s.height();
    return h;
}

namespace {

bool on_edge(const Vec2& p, const Vec2& a, const Vec2& b)
{
    if (cross(b - a, p - a) != 0) return false;
    return dot(p - a, b - a) >= 0 && dot(p - b, a - b) >= 0;
}

std::optional<RatSegment> clipped(const RatSegment& s, const PolygonQ& poly)
{
    auto r = clip_segment(s.p, s.q, poly);
    if (!r) return std::nullopt;
    const Vec2 d = s.q - s.p;
    return RatSegment(s.p + r->first * d, s.p + r->second * d);
}

}  // namespace

bool traverses_sloping(const RatSegment& s, const PolygonQ& poly)
{
    auto c = clipped(s, poly);
    if (!c) return false;
    const auto& v = poly.vertices();
    std::vector<std::pair<Vec2, Vec2>> sloping;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % v.size()];
        if (a.x != b.x && a.y != b.y) sloping.emplace_back(a, b);
    }
    if (sloping.size() != 2) return false;
    auto [a0, b0] = sloping[0];
    auto [a1, b1] = sloping[1];
    return (on_edge(c->p, a0, b0) && on_edge(c->q, a1, b1)) ||
           (on_edge(c->p, a1, b1) && on_edge(c->q, a0, b0));
}

bool spans_vertically(const RatSegment& s, const PolygonQ& poly)
{
    auto c = clipped(s, poly);
    if (!c) return false;
    Rat lo = std::min(c->p.y, c->q.y), hi = std::max(c->p.y, c->q.y);
    return lo == poly.min_y() && hi == poly.max_y();
}

bool spans_horizontally(const RatSegment& s, const PolygonQ& poly)
{
    auto c = clipped(s, poly);
    if (!c) return false;
    Rat lo = std::min(c->p.x, c->q.x), hi = std::max(c->p.x, c->q.x);
    return lo == poly.min_x() && hi == poly.max_x();
}

nlohmann::json SegmentFeatures::to_json() const
{
    nlohmann::json j;
    j["v_segment"] = v_segment;
    j["h_segment"] = h_segment;
    j["traverses_Q"] = {traverses_Q[0], traverses_Q[1], traverses_Q[2], traverses_Q[3]};
    j["traverses_Qprime2"] = traverses_Qprime2;
    j["frak_h"] = frak_h;
    j["frak_h_prime"] = frak_h_prime;
    j["v_prime"] = v_prime;
    return j;
}

SegmentFeatures detect_segment_features(const std::vector<RatSegment>& segs, const FeatureRegions* regions)
{
    SegmentFeatures f;
    const PolygonQ& s1 = S_region(1).front();
    for (const auto& s : segs) {
        f.v_segment = f.v_segment || spans_vertically(s, s1);
        f.h_segment = f.h_segment || spans_horizontally(s, s1);
        for (int j = 0; j < 4; ++j) f.traverses_Q[j] = f.traverses_Q[j] || traverses_sloping(s, Q_parallelogram(j + 1));
        f.traverses_Qprime2 = f.traverses_Qprime2 || traverses_sloping(s, Qprime2_parallelogram());
        if (regions) {
            for (const auto& p : regions->R) f.frak_h = f.frak_h || traverses_sloping(s, p);
            for (const auto& p : regions->Rprime) f.frak_h_prime = f.frak_h_prime || traverses_sloping(s, p);
            for (const auto& p : regions->sigma2_S4) f.v_prime = f.v_prime || spans_vertically(s, p);
        }
    }
    return f;
}

}  // namespace otm
