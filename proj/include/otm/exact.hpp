#pragma once

#include <gmpxx.h>

#include <array>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace otm {

using Int = mpz_class;
using Rat = mpq_class;

Rat rat(long p, long q = 1);
Rat rat(const std::string& s);

// Always "p/q", including integers ("3/1") so the format is uniform.
std::string to_string(const Rat& r);
double to_double(const Rat& r);

Int floor_int(const Rat& r);
Int ceil_int(const Rat& r);
// Representative of r mod 1 in [0,1).
Rat frac(const Rat& r);
Rat abs(const Rat& r);
int sign(const Rat& r);

struct Vec2 {
    Rat x, y;
    Vec2() = default;
    Vec2(Rat x_, Rat y_) : x(std::move(x_)), y(std::move(y_)) {}
    Vec2(long x_, long y_) : x(x_), y(y_) {}
};

bool operator==(const Vec2& a, const Vec2& b);
bool operator!=(const Vec2& a, const Vec2& b);
bool operator<(const Vec2& a, const Vec2& b);
Vec2 operator+(const Vec2& a, const Vec2& b);
Vec2 operator-(const Vec2& a, const Vec2& b);
Vec2 operator*(const Rat& s, const Vec2& a);
Rat cross(const Vec2& a, const Vec2& b);
Rat dot(const Vec2& a, const Vec2& b);
Rat norm2(const Vec2& a);

class IMat2 {
public:
    Int a, b, c, d;

    IMat2() : a(1), b(0), c(0), d(1) {}
    IMat2(Int a_, Int b_, Int c_, Int d_)
        : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {}
    IMat2(long a_, long b_, long c_, long d_) : a(a_), b(b_), c(c_), d(d_) {}

    static IMat2 identity() { return IMat2(); }

    Int det() const { return a * d - b * c; }
    Int trace() const { return a + d; }
    // Requires det = +-1.
    IMat2 inverse() const;
    IMat2 pow(unsigned n) const;
    IMat2 transpose() const { return IMat2(a, c, b, d); }
    IMat2 operator-() const { return IMat2(-a, -b, -c, -d); }

    Vec2 apply(const Vec2& v) const;
    std::string str() const;
};

IMat2 operator*(const IMat2& m, const IMat2& n);
Vec2 operator*(const IMat2& m, const Vec2& v);
bool operator==(const IMat2& m, const IMat2& n);
bool operator!=(const IMat2& m, const IMat2& n);

// Rigorous enclosure [lo, hi] of a real number with rational bounds.
struct Enclosure {
    Rat lo, hi;

    Enclosure() = default;
    Enclosure(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {}
    static Enclosure exact(const Rat& r) { return {r, r}; }

    Rat width() const { return hi - lo; }
    Rat mid() const { return (lo + hi) / 2; }
    double approx() const;
    bool contains(const Rat& r) const { return lo <= r && r <= hi; }
    bool is_exact() const { return lo == hi; }
    // Strict comparisons that are certain given the bounds.
    bool certainly_lt(const Rat& r) const { return hi < r; }
    bool certainly_gt(const Rat& r) const { return lo > r; }
    bool within(const Rat& a, const Rat& b) const { return a < lo && hi < b; }
};

Enclosure operator+(const Enclosure& x, const Enclosure& y);
Enclosure operator-(const Enclosure& x, const Enclosure& y);
Enclosure operator*(const Enclosure& x, const Enclosure& y);
// Requires y strictly positive or strictly negative.
Enclosure operator/(const Enclosure& x, const Enclosure& y);
Enclosure operator+(const Enclosure& x, const Rat& r);
Enclosure operator*(const Rat& r, const Enclosure& x);

// sqrt of a non-negative rational, width below 10^-digits.
Enclosure sqrt_enc(const Rat& r, unsigned digits = 30);
Enclosure sqrt_enc(const Enclosure& x, unsigned digits = 30);

// Exact sign of p + q*sqrt(D) for D >= 0.
int sign_surd(const Rat& p, const Rat& q, const Rat& D);

class ExactError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace otm
