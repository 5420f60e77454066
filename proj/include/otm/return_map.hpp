#pragma once

#include "otm/certificate.hpp"
#include "otm/cones.hpp"
#include "otm/torus_map.hpp"

#include <array>
#include <map>
#include <vector>

namespace otm {

class ConstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoReturnWithinCap : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BoundaryHit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// H(r) and H^-1(r) for regions, cut along the partition A (resp. A').
Region image_region(const Region& r);
Region preimage_region(const Region& r);
// T(x,y) = (1-x, y+1/2) and the reflection (x,y) -> (1-y, 1-x), applied to regions mod 1.
Region reflect_T(const Region& r);
Region reflect_Tcal(const Region& r);

struct SigmaGeometry {
    std::array<Region, 4> sigma;        // sigma_1..sigma_4
    std::array<Region, 4> sigma_prime;  // sigma'_1..sigma'_4 (sigma'_j inside A_j)
    Region varsigma2, varsigma3;        // A_3 n sigma_2, A_2 n sigma_3
    Region R, R_prime;                  // sigma_3 n sigma'_2, sigma_2 n sigma'_3

    Region all() const;
    Region all_prime() const;
    Rat area() const { return otm::area(all()); }
};

// Forward-image construction; throws ConstructionError if an identity fails.
SigmaGeometry build_sigma();
const SigmaGeometry& sigma_geometry();
// Shaded (excluded) polygons of the figure of sigma and sigma', read off its vertex data.
Region figure_sigma_complement();
Region figure_sigma_prime_complement();
// Every region identity, each by two independent routes.
Certificate verify_sigma(const SigmaGeometry& g);

const std::vector<Vec2>& accumulation_points_P1();
const std::vector<Vec2>& accumulation_points_P2();
const std::vector<Vec2>& fixed_points();

FeatureRegions feature_regions();

// Index 1..4 of the sigma_j containing z, 0 when z is not in sigma.
// Decided from the backward itinerary; throws BoundaryHit on the singularity set.
int sigma_index(const TorusPoint& z);
bool in_sigma(const TorusPoint& z);

struct ReturnResult {
    TorusPoint z;
    unsigned R = 0;
    IMat2 jacobian;
};

// First return to sigma. Throws NoReturnWithinCap or BoundaryHit.
ReturnResult return_map(const TorusPoint& z, unsigned cap);

// Cell A^k_{j,i}: points of A_i with H^s in A_i for s < k and H^k in A_j.
struct EscapeCell {
    int i = 0, j = 0;
    unsigned k = 0;
    PolygonQ poly;  // the cell piece
    IMat2 N;        // H^k(z) = N z + t on the piece (lifted)
    Vec2 t;
    PolygonQ image;  // H^k(piece), inside A_j
};

struct EscapePartition {
    int i = 0;
    unsigned k_max = 0;
    std::vector<EscapeCell> cells;
    Region trapped;  // still inside A_i after k_max steps

    Region cells_region(int j, unsigned k) const;
    Region cells_region(unsigned k) const;
    Rat area(unsigned k) const;
    Rat total_area() const;  // cells plus trapped
};

EscapePartition escape_partition(int i, unsigned k_max, const Region& start);
// Partition of all of A_i.
EscapePartition escape_partition(int i, unsigned k_max);
// Partition of the part of sigma whose return is governed by escape from A_i: sigma n A_i minus varsigma_i.
EscapePartition sigma_escape_partition(int i, unsigned k_max);

// Piece of sigma with constant return time and return Jacobian.
struct ReturnPiece {
    PolygonQ poly;
    unsigned R = 0;
    IMat2 jacobian;
    Vec2 t;  // H_sigma(z) = jacobian z + t (lifted)
    int source = 0, target = 0;  // sigma indices
    std::string cell;            // "A1", "A4", "vs2", "vs3", or "A^k_{j,i}"
};

struct MCell {
    unsigned m = 0;
    std::vector<ReturnPiece> pieces;
    Rat area;
    Region region() const;
};

// M_0..M_{m_max} from exact partitions with escape depth m_max.
std::vector<MCell> mcells(unsigned m_max);
MCell mcell(unsigned m);
// Return-map pieces of sigma grouped by return time, plus the unresolved remainder.
struct ReturnPartition {
    std::vector<MCell> cells;
    Region unresolved;
};
ReturnPartition return_partition(unsigned m_max);

// Edges of the return pieces where H_sigma is discontinuous. Edges on the boundary of some sigma_j
// are S0, cuts inside one sigma_j between pieces with different maps mod 1 are S1. Edges next to
// the unresolved remainder are skipped and counted in *skipped.
std::vector<SingularityLine> singularity_inventory(const ReturnPartition& rp, std::size_t* skipped = nullptr);

// Checks measure preservation, Jacobians against the transition table, and disjointness.
Certificate verify_return_partition(const ReturnPartition& rp, unsigned m_check);

nlohmann::json escape_partition_json(const EscapePartition& p);

}  // namespace otm
