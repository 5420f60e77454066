#pragma once

#include "otm/geometry.hpp"

#include <array>
#include <string>
#include <vector>

namespace otm {

// Point of the torus R^2/Z^2, coordinates reduced into [0,1).
struct TorusPoint {
    Rat x, y;

    TorusPoint() : x(0), y(0) {}
    TorusPoint(const Rat& x_, const Rat& y_) : x(frac(x_)), y(frac(y_)) {}
    explicit TorusPoint(const Vec2& v) : TorusPoint(v.x, v.y) {}
    Vec2 vec() const { return {x, y}; }
    std::string str() const { return "(" + to_string(x) + ", " + to_string(y) + ")"; }
};

bool operator==(const TorusPoint& a, const TorusPoint& b);
bool operator!=(const TorusPoint& a, const TorusPoint& b);

enum class Label { A1, A2, A3, A4, A1p, A2p, A3p, A4p, S1, S2, S3, S4, Boundary };
enum class PartitionSide { A, Aprime, S };

std::string label_name(Label l);
// 1..4 for region labels, 0 for Boundary.
int label_index(Label l);

class SingularityError : public std::runtime_error {
public:
    SingularityError(const std::string& what, std::size_t index = 0)
        : std::runtime_error(what), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

class DegenerateSegment : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Rat tent(const Rat& t);

TorusPoint apply_F(const TorusPoint& z);
TorusPoint apply_G(const TorusPoint& z);
TorusPoint apply_F_inv(const TorusPoint& z);
TorusPoint apply_G_inv(const TorusPoint& z);
TorusPoint apply_H(const TorusPoint& z);
TorusPoint apply_H_inv(const TorusPoint& z);
TorusPoint apply_H_n(TorusPoint z, long n);

Label classify(const TorusPoint& z, PartitionSide side);

// M_1..M_4 of the Jacobian DH on A_1..A_4.
const IMat2& jacobian_block(int j);
IMat2 jacobian(const TorusPoint& z);
// DH^n_z = M_{j_n} ... M_{j_1}
IMat2 cocycle(const TorusPoint& z, std::size_t n);
std::vector<Label> itinerary(const TorusPoint& z, std::size_t n);

TorusPoint symmetry_T(const TorusPoint& z);
TorusPoint symmetry_Tcal(const TorusPoint& z);

// Exact polygon pieces of the partitions S_j, A_j = F^-1(S_j), A'_j = G(S_j).
const Region& S_region(int j);
const Region& A_region(int j);
const Region& Aprime_region(int j);
PlanarPartition S_partition();
PlanarPartition A_partition();
PlanarPartition Aprime_partition();

// Q_1 = A_1 n S_2, Q_2 = A_2 n S_1, Q_3 = A_3 n S_4, Q_4 = A_4 n S_3.
const PolygonQ& Q_parallelogram(int j);
// Q'_2 = A'_2 n S_4
const PolygonQ& Qprime2_parallelogram();

// Straight segment inside the closed unit square (never crossing a seam).
struct RatSegment {
    Vec2 p, q;

    RatSegment(Vec2 p_, Vec2 q_);
    Rat height() const { return abs(q.y - p.y); }
    Rat width() const { return abs(q.x - p.x); }
    Rat length2() const { return norm2(q - p); }
    Vec2 direction() const { return q - p; }
};

// Splits a segment along the singularity set D and assigns each piece its block index.
std::vector<std::pair<RatSegment, int>> split_on_singularities(const RatSegment& s);
// Image of a straight segment under a lifted linear map, split at seams and reduced.
std::vector<RatSegment> push_segment(const IMat2& m, const RatSegment& s);
std::vector<RatSegment> iterate_segment(const RatSegment& seg, std::size_t n);
std::vector<RatSegment> iterate_segments(const std::vector<RatSegment>& segs, std::size_t n);
Rat total_height(const std::vector<RatSegment>& segs);

// Does the segment cross the convex polygon, joining its two non-axis-parallel sides?
bool traverses_sloping(const RatSegment& s, const PolygonQ& poly);
// Does the segment restricted to the polygon join the bottom and top (vertical span)?
bool spans_vertically(const RatSegment& s, const PolygonQ& poly);
bool spans_horizontally(const RatSegment& s, const PolygonQ& poly);

struct SegmentFeatures {
    bool v_segment = false;
    bool h_segment = false;
    std::array<bool, 4> traverses_Q{};
    bool traverses_Qprime2 = false;
    bool frak_h = false;        // spans R = sigma_3 n sigma'_2
    bool frak_h_prime = false;  // spans R' = sigma_2 n sigma'_3
    bool v_prime = false;       // vertically spans sigma_2 n S_4

    nlohmann::json to_json() const;
};

struct FeatureRegions {
    Region R, Rprime, sigma2_S4;
};

SegmentFeatures detect_segment_features(const std::vector<RatSegment>& segs,
                                        const FeatureRegions* regions = nullptr);

}  // namespace otm
