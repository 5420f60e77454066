#pragma once

#include "otm/certificate.hpp"
#include "otm/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace otm {

class ZeroVector : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NotASector : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PreconditionViolated : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Closed sector of tangent directions, symmetric under v -> -v. Stored as the arc of
// directions swept counter-clockwise from `start` to `end` (span below pi).
struct ConeQ {
    Vec2 start, end;
    std::string name;

    ConeQ(Vec2 s, Vec2 e, std::string n = "");
    // Directions (u, 1) with u_lo <= u <= u_hi, u = v1/v2 (inverse gradient).
    static ConeQ inverse_gradient(const Rat& u_lo, const Rat& u_hi, std::string n = "");
    // Directions (1, m) with m_lo <= m <= m_hi, m = v2/v1 (gradient).
    static ConeQ gradient(const Rat& m_lo, const Rat& m_hi, std::string n = "");

    bool contains(const Vec2& v) const;
    bool contains(const ConeQ& c) const;
    nlohmann::json to_json() const;
};

bool cone_contains(const ConeQ& c, const Vec2& v);
ConeQ map_cone(const IMat2& m, const ConeQ& c);

namespace cones {
extern const Rat phi;  // 21/13
// |v2| >= phi |v1|
const ConeQ& C();
// 3|v1| >= |v2| >= phi |v1| with v1 v2 > 0 (plus) or < 0 (minus)
const ConeQ& C_plus();
const ConeQ& C_minus();
// |v1| >= phi |v2|, the image of C under the reflection (v1, v2) -> (-v2, -v1)
const ConeQ& C_prime();
// |v2| >= |v1|; also the sector where the sup-norm rule applies
const ConeQ& C_s_prime();
// unstable cones C_1..C_4 and stable cones C^s_1..C^s_4 over sigma_1..sigma_4
const ConeQ& unstable(int j);
const ConeQ& stable(int j);
}  // namespace cones

enum class Norm { Sup, Euclid };

struct ExpansionResult {
    Norm norm = Norm::Sup;
    Enclosure value;     // the expansion factor
    Enclosure value_sq;  // its square
    bool exact = false;  // value_sq is an exact rational
    bool at_endpoint = true;
    Vec2 direction;      // attaining direction when at an endpoint
    nlohmann::json to_json() const;
};

// Sup norm follows the monotone rule ||Mv|| = |c v1 + d| on (v1, 1) and requires C and MC
// inside |v2| >= |v1|. Euclidean uses endpoints and eigendirections of M^T M.
ExpansionResult min_expansion(const IMat2& m, const ConeQ& c, Norm norm);
ExpansionResult max_expansion(const IMat2& m, const ConeQ& c, Norm norm);

// One row of the family table: base * gen^n with closed-form entries and K_+-.
struct MatFamily {
    std::string name;
    int base = 1;
    int gen = 0;  // 0 for the single matrices M_1, M_4
    // entries = (-1)^n (p + q n), row-major
    std::array<std::pair<long, long>, 4> entries{};
    std::pair<Rat, Rat> k_plus, k_minus;  // p + q n

    IMat2 direct(unsigned n) const;
    IMat2 closed_form(unsigned n) const;
    Rat printed_k_plus(unsigned n) const { return k_plus.first + k_plus.second * n; }
    Rat printed_k_minus(unsigned n) const { return k_minus.first + k_minus.second * n; }
};

const std::vector<MatFamily>& table2_families();
const MatFamily& family(const std::string& name);
// Parabolic eigendirection of M_2 or M_3.
Vec2 parabolic_direction(int gen);

Certificate table2_verify(unsigned n_max);
Certificate verify_expanding_cone(unsigned n_max);
Certificate verify_transition_table(unsigned n_max = 200);

struct SingularityLine {
    Vec2 p, q;
    int sigma = 0;      // index of the sigma_j containing it, 0 for boundary lines
    std::string kind;   // "S0" for boundaries of the sigma_j, "S1" for interior cuts
};

Certificate singularity_gradient_audit(const std::vector<SingularityLine>& inventory);

}  // namespace otm
