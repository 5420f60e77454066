#pragma once

#include "otm/cells.hpp"
#include "otm/certificate.hpp"
#include "otm/torus_map.hpp"

#include <cstdint>
#include <map>

namespace otm {

// Closed forms of the sigma_1a family: cells A^k_{4,2} bounded by L_k: y = (k+1-4kx)/(4k+2).
LineQ sigma1a_line(long k);
Rat sigma1a_h(long k);  // 21 / (2 (2k+1)(68k-47))
// Height bound L_k = k / ((2k-1)(2k+1)): L_{k-1} is y_{k-2} minus the height where L_k meets y = 1/4 - x/2.
Rat sigma1a_L(long k);
// Lines of the sigma_1b family: y = ((4k+2)x + k+2)/(4k+4), meeting y = 2x at (x_k, y_k).
LineQ sigma1b_line(long k);
Vec2 sigma1b_point(long k);
Rat sigma1b_h(long k);  // 3 / (16k^2 + 28k + 6)
// Height bound y_k - 1/2 = 1/(2(2k+3)) for k >= 1; the induction step k uses L_{k-1}.
// L_0 = 9/38 comes from the preimage line y = 7/12 + 5x/12 instead.
Rat sigma1b_L(long k);

Rat growth_alpha();  // 3/17 + sum_{k=1,2} 3/(40k+7) + 3/(56k+13)
Rat growth_beta();   // 21/79 + 21/127
Rat growth_delta();  // reciprocal expansion sum over sigma_3b

Certificate check_sigma1a();
Certificate check_sigma1b();
Certificate check_sigma3b();
Certificate check_ks1();
Certificate check_simple_two_step();

struct OneStepConstants {
    Locus locus = Locus::Upper;
    // exact squares of the constants as printed
    Rat c_star_sq, c_diamond_sq, c_sq, gamma_sq;
    Rat h;
    Rat a_sq, a_star_sq, b_sq, b_star_sq, b_diamond_sq;
    Enclosure lambda_plus, lambda_minus;  // max and min Euclidean expansion of M_1 on C_1
    Enclosure s, t, bound;
};

OneStepConstants one_step_constants(Locus l);
Certificate check_one_step(Locus l);

class BudgetExhausted : public std::runtime_error {
public:
    BudgetExhausted(const std::string& what, RatSegment witness)
        : std::runtime_error(what), witness_(std::move(witness)) {}
    const RatSegment& witness() const { return witness_; }

private:
    RatSegment witness_;
};

// Outcome of iterating one segment until non-simple intersection (C1) or height growth (C2).
struct GrowthOutcome {
    bool c1 = false, c2 = false;
    unsigned iterations = 0;
    Rat factor = 0;  // height ratio of the best (C2) segment at that iterate
};

// A straight segment on the torus, as consecutive pieces of the unit square.
using TorusChain = std::vector<RatSegment>;

// Does the segment meet some A_j in two or more components? Sets *region to that j.
bool non_simple_intersection(const TorusChain& c, int* region = nullptr);
bool non_simple_intersection(const RatSegment& s, int* region = nullptr);
// Image under H: one chain for each maximal run of the chain inside a single A_j.
std::vector<TorusChain> iterate_chains(const std::vector<TorusChain>& chains, std::size_t n = 1);
GrowthOutcome grow_segment(const RatSegment& gamma, unsigned budget);

struct GrowthReport {
    std::size_t samples = 0;
    std::size_t c1 = 0, c2 = 0;  // segments with (C1), with (C2) at the stopping iterate; both may hold
    unsigned max_iterations = 0;
    Rat min_factor = 0;  // smallest (C2) factor, 0 if none
    std::map<unsigned, std::size_t> iteration_histogram;
    nlohmann::json to_json() const;
};

// Random segments in sigma_1 u sigma_3 aligned with C_+, or in sigma_2 u sigma_4 aligned with C_-,
// each with simple intersection with every A_j. Throws BudgetExhausted.
GrowthReport verify_growth_dynamics(std::size_t samples, std::uint64_t seed, unsigned budget = 64);

}  // namespace otm
