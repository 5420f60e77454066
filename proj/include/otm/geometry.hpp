#pragma once

#include "otm/exact.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace otm {

class DegeneratePolygon : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SupportMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// a*x + b*y = c, scaled so the first nonzero of (a,b) is 1.
struct LineQ {
    Rat a, b, c;

    LineQ(Rat a_, Rat b_, Rat c_);
    static LineQ through(const Vec2& p, const Vec2& q);
    // y = y0 + m (x - x0)
    static LineQ point_slope(const Vec2& p, const Rat& m);
    static LineQ vertical(const Rat& x0) { return LineQ(1, 0, x0); }
    static LineQ horizontal(const Rat& y0) { return LineQ(0, 1, y0); }

    Rat eval(const Vec2& p) const { return a * p.x + b * p.y - c; }
    bool contains(const Vec2& p) const { return eval(p) == 0; }
    bool is_vertical() const { return b == 0; }
    // dy/dx; only for non-vertical lines.
    Rat gradient() const;
    // y on the line at abscissa x; only for non-vertical lines.
    Rat y_at(const Rat& x) const;
};

bool operator==(const LineQ& l, const LineQ& m);
std::optional<Vec2> intersect(const LineQ& l, const LineQ& m);

enum class Side { Le, Ge };

// Convex polygon with counter-clockwise vertices and positive area.
class PolygonQ {
public:
    PolygonQ() = default;
    // Cleans duplicate and collinear vertices and orients counter-clockwise.
    // Throws DegeneratePolygon when fewer than 3 vertices remain.
    explicit PolygonQ(std::vector<Vec2> vertices);

    static PolygonQ rect(const Rat& x0, const Rat& y0, const Rat& x1, const Rat& y1);

    const std::vector<Vec2>& vertices() const { return v_; }
    std::size_t size() const { return v_.size(); }
    const Vec2& operator[](std::size_t i) const { return v_[i]; }

    Rat area() const;
    // Vertex average; an interior point for convex polygons.
    Vec2 interior_point() const;
    bool is_convex() const;
    bool contains(const Vec2& p, bool strict = false) const;
    Rat min_x() const;
    Rat max_x() const;
    Rat min_y() const;
    Rat max_y() const;

private:
    std::vector<Vec2> v_;
};

using Region = std::vector<PolygonQ>;

Rat signed_area(const std::vector<Vec2>& pts);
Rat shoelace_area(const PolygonQ& p);
Rat area(const Region& r);

// Polygon part on the given side of L, empty if that part has no area.
std::optional<PolygonQ> clip_halfplane(const PolygonQ& p, const LineQ& l, Side side);
std::optional<PolygonQ> intersect(const PolygonQ& p, const PolygonQ& q);
Region intersect(const Region& a, const Region& b);
Region intersect(const Region& a, const PolygonQ& q);
// Convex pieces of P minus Q (and region versions); pieces of b must be disjoint.
Region subtract(const PolygonQ& p, const PolygonQ& q);
Region subtract(const Region& a, const Region& b);
Rat intersection_area(const Region& a, const Region& b);
// area(A) + area(B) - 2 area(A n B); pieces of each region must be disjoint.
Rat sym_diff_area(const Region& a, const Region& b);
bool region_contains(const Region& r, const Vec2& p, bool strict = false);

// Affine image v -> M v + t without torus reduction.
PolygonQ transform(const PolygonQ& p, const IMat2& m, const Vec2& t = Vec2(0, 0));
PolygonQ translate(const PolygonQ& p, const Vec2& t);

struct SeamPiece {
    PolygonQ poly;   // reduced into the unit square
    Vec2 shift;      // integer translation applied during reduction
};

// Split a polygon in the plane along integer grid lines and reduce into [0,1]^2.
std::vector<SeamPiece> reduce_mod1(const PolygonQ& p);
// Torus pushforward v -> M v + t mod 1, split along seams.
Region map_polygon(const IMat2& m, const Vec2& t, const PolygonQ& p);
Region map_region(const IMat2& m, const Vec2& t, const Region& r);

struct Piece {
    PolygonQ poly;
    std::string label;
};

struct PlanarPartition {
    std::vector<Piece> pieces;

    Rat area() const;
    Region region() const;
    Region region(const std::string& label) const;
};

PlanarPartition refine(const PlanarPartition& a, const PlanarPartition& b);

// Parameter range [t0,t1] of the segment p + t (q - p), t in [0,1], inside P.
std::optional<std::pair<Rat, Rat>> clip_segment(const Vec2& p, const Vec2& q, const PolygonQ& poly);

nlohmann::json to_json(const Vec2& v);
nlohmann::json to_json(const PolygonQ& p);
nlohmann::json to_json(const Region& r);
PolygonQ polygon_from_json(const nlohmann::json& j);

}  // namespace otm
