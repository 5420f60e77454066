#include "otm/exact.hpp"

#include <algorithm>

namespace otm {

Rat rat(long p, long q)
{
    if (q == 0) throw ExactError("zero denominator");
    Rat r(p, q);
    r.canonicalize();
    return r;
}

Rat rat(const std::string& s)
{
    Rat r;
    if (r.set_str(s, 10) != 0) throw ExactError("bad rational: " + s);
    if (r.get_den() == 0) throw ExactError("zero denominator: " + s);
    r.canonicalize();
    return r;
}

std::string to_string(const Rat& r)
{
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

double to_double(const Rat& r) { return r.get_d(); }

Int floor_int(const Rat& r)
{
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

Int ceil_int(const Rat& r)
{
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

Rat frac(const Rat& r)
{
    Rat f = r - Rat(floor_int(r));
    return f;
}

Rat abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

int sign(const Rat& r) { return sgn(r); }

bool operator==(const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }
bool operator!=(const Vec2& a, const Vec2& b) { return !(a == b); }
bool operator<(const Vec2& a, const Vec2& b)
{
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
}
Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
Vec2 operator*(const Rat& s, const Vec2& a) { return {s * a.x, s * a.y}; }
Rat cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
Rat dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
Rat norm2(const Vec2& a) { return dot(a, a); }

IMat2 IMat2::inverse() const
{
    Int D = det();
    if (D == 1) return IMat2(d, -b, -c, a);
    if (D == -1) return IMat2(-d, b, c, -a);
    throw ExactError("matrix not unimodular: " + str());
}

IMat2 IMat2::pow(unsigned n) const
{
    IMat2 r, base = *this;
    while (n) {
        if (n & 1u) r = r * base;
        base = base * base;
        n >>= 1;
    }
    return r;
}

Vec2 IMat2::apply(const Vec2& v) const
{
    return {Rat(a) * v.x + Rat(b) * v.y, Rat(c) * v.x + Rat(d) * v.y};
}

std::string IMat2::str() const
{
    return "[[" + a.get_str() + "," + b.get_str() + "],[" + c.get_str() + "," + d.get_str() + "]]";
}

IMat2 operator*(const IMat2& m, const IMat2& n)
{
    return IMat2(m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
                 m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d);
}

Vec2 operator*(const IMat2& m, const Vec2& v) { return m.apply(v); }

bool operator==(const IMat2& m, const IMat2& n)
{
    return m.a == n.a && m.b == n.b && m.c == n.c && m.d == n.d;
}
bool operator!=(const IMat2& m, const IMat2& n) { return !(m == n); }

double Enclosure::approx() const { return mid().get_d(); }

Enclosure operator+(const Enclosure& x, const Enclosure& y) { return {x.lo + y.lo, x.hi + y.hi}; }
Enclosure operator-(const Enclosure& x, const Enclosure& y) { return {x.lo - y.hi, x.hi - y.lo}; }

Enclosure operator*(const Enclosure& x, const Enclosure& y)
{
    std::array<Rat, 4> p = {x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi};
    auto [mn, mx] = std::minmax_element(p.begin(), p.end());
    return {*mn, *mx};
}

Enclosure operator/(const Enclosure& x, const Enclosure& y)
{
    if (y.lo <= 0 && y.hi >= 0) throw ExactError("division by enclosure containing 0");
    return x * Enclosure(1 / y.hi, 1 / y.lo);
}

Enclosure operator+(const Enclosure& x, const Rat& r) { return {x.lo + r, x.hi + r}; }

Enclosure operator*(const Rat& r, const Enclosure& x)
{
    if (r >= 0) return {r * x.lo, r * x.hi};
    return {r * x.hi, r * x.lo};
}

Enclosure sqrt_enc(const Rat& r, unsigned digits)
{
    if (r < 0) throw ExactError("sqrt of negative rational");
    // sqrt(p/q) = sqrt(p*q)/q; scale by 10^digits and take integer roots.
    Int scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
    Int n = r.get_num() * r.get_den() * scale * scale;
    Int root;
    mpz_sqrt(root.get_mpz_t(), n.get_mpz_t());
    Int den = r.get_den() * scale;
    Rat lo(root, den);
    lo.canonicalize();
    if (root * root == n) return Enclosure::exact(lo);
    Rat hi(root + 1, den);
    hi.canonicalize();
    return {lo, hi};
}

Enclosure sqrt_enc(const Enclosure& x, unsigned digits)
{
    Rat lo = x.lo < 0 ? Rat(0) : x.lo;
    return {sqrt_enc(lo, digits).lo, sqrt_enc(x.hi, digits).hi};
}

int sign_surd(const Rat& p, const Rat& q, const Rat& D)
{
    if (D < 0) throw ExactError("negative radicand");
    int sp = sgn(p), sq = sgn(q);
    if (D == 0 || sq == 0) return sp;
    if (sp == 0) return sq;
    if (sp == sq) return sp;
    // opposite signs: compare p^2 with q^2 D
    Rat lhs = p * p, rhs = q * q * D;
    if (lhs == rhs) return 0;
    return lhs > rhs ? sp : sq;
}

}  // namespace otm
