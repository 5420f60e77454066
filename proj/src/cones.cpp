#include "otm/cones.hpp"

#include "otm/torus_map.hpp"

#include <algorithm>

namespace otm {

ConeQ::ConeQ(Vec2 s, Vec2 e, std::string n) : start(std::move(s)), end(std::move(e)), name(std::move(n))
{
    if ((start.x == 0 && start.y == 0) || (end.x == 0 && end.y == 0)) throw ZeroVector("cone boundary is zero");
    if (cross(start, end) < 0) throw NotASector("cone boundary rays out of order");
}

ConeQ ConeQ::inverse_gradient(const Rat& u_lo, const Rat& u_hi, std::string n)
{
    return ConeQ(Vec2(u_hi, 1), Vec2(u_lo, 1), std::move(n));
}

ConeQ ConeQ::gradient(const Rat& m_lo, const Rat& m_hi, std::string n)
{
    return ConeQ(Vec2(1, m_lo), Vec2(1, m_hi), std::move(n));
}

namespace {

bool in_arc(const ConeQ& c, const Vec2& w) { return cross(c.start, w) >= 0 && cross(w, c.end) >= 0; }

// Representative of +-v lying in the arc, if any.
std::optional<Vec2> arc_rep(const ConeQ& c, const Vec2& v)
{
    if (in_arc(c, v)) return v;
    Vec2 w(-v.x, -v.y);
    if (in_arc(c, w)) return w;
    return std::nullopt;
}

}  // namespace

bool ConeQ::contains(const Vec2& v) const
{
    if (v.x == 0 && v.y == 0) throw ZeroVector("cone membership of the zero vector");
    return arc_rep(*this, v).has_value();
}

bool ConeQ::contains(const ConeQ& c) const
{
    auto s = arc_rep(*this, c.start);
    auto e = arc_rep(*this, c.end);
    if (!s || !e) return false;
    return cross(*s, *e) >= 0;
}

nlohmann::json ConeQ::to_json() const
{
    return {{"name", name}, {"start", otm::to_json(start)}, {"end", otm::to_json(end)}};
}

bool cone_contains(const ConeQ& c, const Vec2& v) { return c.contains(v); }

ConeQ map_cone(const IMat2& m, const ConeQ& c)
{
    Int d = m.det();
    if (d == 0) throw NotASector("singular matrix collapses the cone");
    if (d > 0) return ConeQ(m * c.start, m * c.end);
    return ConeQ(m * c.end, m * c.start);
}

namespace cones {

const Rat phi(21, 13);

const ConeQ& C()
{
    static const ConeQ c = ConeQ::inverse_gradient(-1 / phi, 1 / phi, "C");
    return c;
}
const ConeQ& C_plus()
{
    static const ConeQ c = ConeQ::inverse_gradient(rat(1, 3), 1 / phi, "C+");
    return c;
}
const ConeQ& C_minus()
{
    static const ConeQ c = ConeQ::inverse_gradient(-1 / phi, rat(-1, 3), "C-");
    return c;
}
const ConeQ& C_prime()
{
    static const ConeQ c = ConeQ::gradient(-1 / phi, 1 / phi, "C'");
    return c;
}
const ConeQ& C_s_prime()
{
    static const ConeQ c = ConeQ::inverse_gradient(-1, 1, "C's");
    return c;
}

const ConeQ& unstable(int j)
{
    static const std::array<ConeQ, 4> c = {
        ConeQ::inverse_gradient(rat(1, 3), rat(3, 7), "C1"),
        ConeQ::inverse_gradient(-1 / phi, rat(-3, 5), "C2"),
        ConeQ::inverse_gradient(rat(3, 5), 1 / phi, "C3"),
        ConeQ::inverse_gradient(rat(-3, 7), rat(-1, 3), "C4"),
    };
    return c.at(j - 1);
}

const ConeQ& stable(int j)
{
    static const std::array<ConeQ, 4> c = {
        ConeQ::gradient(-1, 1, "Cs1"),
        ConeQ::gradient(rat(-8, 10), rat(9, 10), "Cs2"),
        ConeQ::gradient(rat(-9, 10), rat(8, 10), "Cs3"),
        ConeQ::gradient(-1, 1, "Cs4"),
    };
    return c.at(j - 1);
}

}  // namespace cones

nlohmann::json ExpansionResult::to_json() const
{
    nlohmann::json j = {{"norm", norm == Norm::Sup ? "sup" : "euclid"},
                        {"value", enclosure_json(value)},
                        {"value_sq", enclosure_json(value_sq)},
                        {"at_endpoint", at_endpoint}};
    if (at_endpoint) j["direction"] = otm::to_json(direction);
    return j;
}

namespace {

ExpansionResult sup_expansion(const IMat2& m, const ConeQ& c, bool want_min)
{
    const ConeQ& v = cones::C_s_prime();
    if (!v.contains(c) || !v.contains(map_cone(m, c)))
        throw PreconditionViolated("sup-norm rule needs the cone and its image inside |v2| >= |v1|");
    ExpansionResult best;
    bool first = true;
    for (const Vec2& w : {c.start, c.end}) {
        Rat u = w.x / w.y;
        Rat val = abs(Rat(m.c) * u + Rat(m.d));
        if (first || (want_min ? val < best.value.lo : val > best.value.lo)) {
            best.value = Enclosure::exact(val);
            best.direction = Vec2(u, 1);
            first = false;
        }
    }
    best.norm = Norm::Sup;
    best.value_sq = best.value * best.value;
    best.exact = true;
    best.at_endpoint = true;
    return best;
}

ExpansionResult euclid_expansion(const IMat2& m, const ConeQ& c, bool want_min)
{
    ExpansionResult best;
    best.norm = Norm::Euclid;
    bool first = true;
    for (const Vec2& w : {c.start, c.end}) {
        Rat val = norm2(m * w) / norm2(w);
        if (first || (want_min ? val < best.value_sq.lo : val > best.value_sq.lo)) {
            best.value_sq = Enclosure::exact(val);
            best.direction = w;
            first = false;
        }
    }
    best.exact = true;
    best.at_endpoint = true;

    // extremal directions of |Mw|^2/|w|^2 are the eigendirections of S = M^T M
    const Rat p(m.a * m.a + m.c * m.c), r(m.a * m.b + m.c * m.d), s(m.b * m.b + m.d * m.d);
    const Rat T = p + s;
    const Rat D = T * T - 4 * Rat(m.det() * m.det());
    const int pm = want_min ? -1 : 1;
    bool inside = false;
    if (r == 0) {
        Rat lam = want_min ? std::min(p, s) : std::max(p, s);
        Vec2 w = (lam == p) ? Vec2(1, 0) : Vec2(0, 1);
        inside = arc_rep(c, w).has_value();
    } else if (D > 0) {
        // w = (r, (s - p)/2 + pm sqrt(D)/2)
        const Rat h = (s - p) / 2, half = Rat(pm, 2);
        for (int sg : {1, -1}) {
            // cross(start, sg*w) and cross(sg*w, end)
            int c1 = sign_surd(sg * (c.start.x * h - c.start.y * r), sg * c.start.x * half, D);
            int c2 = sign_surd(sg * (r * c.end.y - c.end.x * h), -sg * c.end.x * half, D);
            if (c1 >= 0 && c2 >= 0) inside = true;
        }
    }
    if (inside) {
        Enclosure root = sqrt_enc(D, 40);
        Enclosure lam = Rat(1, 2) * (Enclosure::exact(T) + Rat(pm) * root);
        bool better = want_min ? lam.lo < best.value_sq.lo : lam.hi > best.value_sq.lo;
        if (better) {
            best.value_sq = lam;
            best.exact = lam.is_exact();
            best.at_endpoint = false;
        }
    }
    best.value = sqrt_enc(best.value_sq, 30);
    return best;
}

}  // namespace

ExpansionResult min_expansion(const IMat2& m, const ConeQ& c, Norm norm)
{
    return norm == Norm::Sup ? sup_expansion(m, c, true) : euclid_expansion(m, c, true);
}

ExpansionResult max_expansion(const IMat2& m, const ConeQ& c, Norm norm)
{
    return norm == Norm::Sup ? sup_expansion(m, c, false) : euclid_expansion(m, c, false);
}

IMat2 MatFamily::direct(unsigned n) const
{
    if (gen == 0) return jacobian_block(base);
    return jacobian_block(base) * jacobian_block(gen).pow(n);
}

IMat2 MatFamily::closed_form(unsigned n) const
{
    long sg = (gen != 0 && n % 2 == 1) ? -1 : 1;
    std::array<Int, 4> e;
    for (int i = 0; i < 4; ++i) e[i] = Int(sg) * (Int(entries[i].first) + Int(entries[i].second) * Int(n));
    return IMat2(e[0], e[1], e[2], e[3]);
}

const std::vector<MatFamily>& table2_families()
{
    auto R = [](long p, long q) { return rat(p, q); };
    static const std::vector<MatFamily> rows = {
        {"M1", 1, 0, {{{1, 0}, {2, 0}, {2, 0}, {5, 0}}}, {R(17, 3), 0}, {R(79, 21), 0}},
        {"M4", 4, 0, {{{1, 0}, {-2, 0}, {-2, 0}, {5, 0}}}, {R(79, 21), 0}, {R(17, 3), 0}},
        {"M1M2^n", 1, 2, {{{1, 2}, {2, 2}, {2, 6}, {5, 6}}}, {R(17, 3), 8}, {R(79, 21), R(16, 7)}},
        {"M1M3^n", 1, 3, {{{1, -6}, {2, 6}, {2, -14}, {5, 14}}}, {R(131, 21), R(16, 3)}, {R(13, 3), R(56, 3)}},
        {"M2M3^n", 2, 3, {{{1, -6}, {2, 6}, {-2, 10}, {-3, -10}}}, {R(89, 21), R(80, 21)}, {R(7, 3), R(40, 3)}},
        {"M3M2^n", 3, 2, {{{1, -6}, {-2, -6}, {2, -10}, {-3, -10}}}, {R(7, 3), R(40, 3)}, {R(89, 21), R(80, 21)}},
        {"M4M2^n", 4, 2, {{{1, -6}, {-2, -6}, {-2, 14}, {5, 14}}}, {R(13, 3), R(56, 3)}, {R(131, 21), R(16, 3)}},
        {"M4M3^n", 4, 3, {{{1, 2}, {-2, -2}, {-2, -6}, {5, 6}}}, {R(79, 21), R(16, 7)}, {R(17, 3), 8}},
    };
    return rows;
}

const MatFamily& family(const std::string& name)
{
    for (const auto& f : table2_families())
        if (f.name == name) return f;
    throw std::out_of_range("unknown family " + name);
}

Vec2 parabolic_direction(int gen)
{
    if (gen == 2) return Vec2(1, -1);
    if (gen == 3) return Vec2(1, 1);
    throw std::out_of_range("parabolic generator must be 2 or 3");
}

Certificate table2_verify(unsigned n_max)
{
    Certificate cert("family-expansion", "Minimum expansion factors K_+- of the matrix families");
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& f : table2_families()) {
        nlohmann::json row = {{"family", f.name}, {"entries", nlohmann::json::array()}};
        // single matrices repeat so that every row has n_max entries
        for (unsigned n = 1; n <= n_max; ++n) {
            IMat2 direct = f.direct(n), closed = f.closed_form(n);
            cert.expect(direct == closed, "components " + f.name,
                        {{"n", n}, {"direct", direct.str()}, {"closed", closed.str()}});
            Rat kp = min_expansion(direct, cones::C_plus(), Norm::Sup).value.lo;
            Rat km = min_expansion(direct, cones::C_minus(), Norm::Sup).value.lo;
            cert.expect(kp == f.printed_k_plus(n), "K+ " + f.name,
                        {{"n", n}, {"computed", to_string(kp)}, {"printed", to_string(f.printed_k_plus(n))}});
            cert.expect(km == f.printed_k_minus(n), "K- " + f.name,
                        {{"n", n}, {"computed", to_string(km)}, {"printed", to_string(f.printed_k_minus(n))}});
            row["entries"].push_back({{"n", n}, {"matrix", direct.str()}, {"K_plus", to_string(kp)},
                                      {"K_minus", to_string(km)}});
        }
        rows.push_back(std::move(row));
    }
    cert.set("rows", std::move(rows));
    cert.set("n_max", nlohmann::json(n_max));
    return cert;
}

Certificate verify_expanding_cone(unsigned n_max)
{
    Certificate cert("expanding-cone", "Invariant expanding cone C, phi = 21/13");
    Rat overall_min = -1;
    for (const auto& f : table2_families()) {
        const unsigned top = f.gen == 0 ? 1 : n_max;
        Rat prev = -1;
        for (unsigned n = 1; n <= top; ++n) {
            IMat2 m = f.direct(n);
            bool inv = cones::C().contains(map_cone(m, cones::C()));
            cert.expect(inv, "M C inside C", {{"family", f.name}, {"n", n}});
            Rat k = min_expansion(m, cones::C(), Norm::Sup).value.lo;
            Rat kmin = std::min(f.printed_k_plus(n), f.printed_k_minus(n));
            cert.expect(k == kmin, "min over C equals min K+-", {{"family", f.name}, {"n", n}});
            cert.expect(k > 1, "expansion above 1", {{"family", f.name}, {"n", n}});
            cert.expect(k >= prev, "nondecreasing in n", {{"family", f.name}, {"n", n}});
            prev = k;
            if (overall_min < 0 || k < overall_min) overall_min = k;
        }
    }
    cert.set("K_min", overall_min);
    // families collapse onto M_base applied to the parabolic direction
    for (const auto& f : table2_families()) {
        if (f.gen == 0) continue;
        Vec2 lim = jacobian_block(f.base) * parabolic_direction(f.gen);
        cert.expect(cones::C().contains(lim), "limit direction in C", {{"family", f.name}});
    }
    return cert;
}

namespace {

struct Transition {
    int from, to;
    int base, gen;
    std::vector<unsigned> ns;  // empty = all n >= 1
};

const std::vector<Transition>& transitions()
{
    static const std::vector<Transition> t = {
        {1, 1, 1, 0, {0}},      {1, 3, 3, 2, {}},       {1, 4, 4, 0, {0}},      {1, 4, 4, 2, {}},
        {1, 4, 4, 3, {}},       {2, 3, 3, 0, {0}},      {2, 3, 3, 2, {1, 2}},   {2, 4, 4, 0, {0}},
        {2, 4, 4, 2, {1, 2}},   {3, 1, 1, 0, {0}},      {3, 1, 1, 3, {1, 2}},   {3, 2, 2, 0, {0}},
        {3, 2, 2, 3, {1, 2}},   {4, 1, 1, 0, {0}},      {4, 1, 1, 2, {}},       {4, 1, 1, 3, {}},
        {4, 2, 2, 3, {}},       {4, 4, 4, 0, {0}},
    };
    return t;
}

std::string block_name(int base, int gen, unsigned n)
{
    std::string s = "M" + std::to_string(base);
    if (gen != 0 && n > 0) s += "M" + std::to_string(gen) + "^" + std::to_string(n);
    return s;
}

}  // namespace

Certificate verify_transition_table(unsigned n_max)
{
    Certificate cert("sigma-transitions", "Cone transitions between sigma_i and sigma_j");
    nlohmann::json table = nlohmann::json::array();
    for (const auto& t : transitions()) {
        std::vector<unsigned> ns = t.ns;
        if (ns.empty())
            for (unsigned n = 1; n <= n_max; ++n) ns.push_back(n);
        const ConeQ& cu_i = cones::unstable(t.from);
        const ConeQ& cu_j = cones::unstable(t.to);
        const ConeQ& cs_i = cones::stable(t.from);
        const ConeQ& cs_j = cones::stable(t.to);
        for (unsigned n : ns) {
            IMat2 m = jacobian_block(t.base) * (t.gen ? jacobian_block(t.gen).pow(n) : IMat2());
            std::string nm = block_name(t.base, t.gen, n);
            ConeQ img = map_cone(m, cu_i);
            cert.expect(cu_j.contains(img), "unstable containment",
                        {{"from", t.from}, {"to", t.to}, {"matrix", nm}, {"image", img.to_json()}});
            ConeQ pre = map_cone(m.inverse(), cs_j);
            cert.expect(cs_i.contains(pre), "stable containment",
                        {{"from", t.from}, {"to", t.to}, {"matrix", nm}, {"preimage", pre.to_json()}});
        }
        nlohmann::json entry = {{"from", t.from}, {"to", t.to}, {"block", block_name(t.base, t.gen, t.ns.empty() ? 1 : 0)}};
        if (t.gen != 0 && t.ns.empty()) {
            entry["block"] = "M" + std::to_string(t.base) + "M" + std::to_string(t.gen) + "^k";
            // n -> infinity: images collapse onto M_base applied to the parabolic direction
            Vec2 lim = jacobian_block(t.base) * parabolic_direction(t.gen);
            cert.expect(cu_j.contains(lim), "limit direction in target cone",
                        {{"from", t.from}, {"to", t.to}, {"direction", otm::to_json(lim)}});
            cert.expect(cs_i.contains(parabolic_direction(t.gen)), "limit stable direction in source cone",
                        {{"from", t.from}, {"to", t.to}});
        }
        table.push_back(entry);
    }
    cert.set("transitions", std::move(table));

    // spot checks quoted in the proof
    const IMat2 M2 = jacobian_block(2), M3 = jacobian_block(3);
    bool printed_ok = false;
    for (unsigned k = 1; k <= n_max; ++k) {
        IMat2 m = M2 * M3.pow(k);
        long sg = k % 2 ? -1 : 1;
        long kk = static_cast<long>(k);
        Vec2 a = m * Vec2(-1, 3), b = m * Vec2(-3, 7);
        // printed as (-24k+5, -40k-7); the first component's sign is a misprint
        cert.expect(a == Vec2(sg * (24 * kk + 5), sg * (-40 * kk - 7)), "M2M3^k(-1,3) closed form", {{"k", k}});
        if (a == Vec2(sg * (-24 * kk + 5), sg * (-40 * kk - 7))) printed_ok = true;
        cert.expect(b == Vec2(sg * (60 * kk + 11), sg * (-100 * kk - 15)), "M2M3^k(-3,7) closed form", {{"k", k}});
        cert.expect(cones::unstable(2).contains(a) && cones::unstable(2).contains(b), "spot vectors in C2", {{"k", k}});
    }
    cert.set("printed_M2M3k_minus1_3_matches", nlohmann::json(printed_ok));
    cert.expect(M2 * Vec2(3, 5) == Vec2(13, -21) && cones::unstable(2).contains(Vec2(13, -21)), "M2(3,5) in C2");
    cert.expect(M2 * Vec2(13, 21) == Vec2(55, -89) && cones::unstable(2).contains(Vec2(55, -89)), "M2(13,21) in C2");

    // uniform stable expansion: M_2^-1 on the -8/10 boundary of C^s_2
    ExpansionResult lam = min_expansion(M2.inverse(), cones::stable(2), Norm::Euclid);
    cert.set("Lambda_sq", lam.value_sq);
    cert.expect(lam.exact && lam.value_sq.lo == rat(85, 41) && lam.direction == Vec2(1, rat(-8, 10)),
                "Lambda^2 = 85/41 on gradient -8/10", lam.to_json());
    // C^s_1 and C are disjoint, giving the angle between stable and unstable fields
    cert.expect(!cones::C().contains(cones::stable(1).start) && !cones::C().contains(cones::stable(1).end) &&
                    !cones::stable(1).contains(cones::C().start) && !cones::stable(1).contains(cones::C().end),
                "C^s_1 and C disjoint");
    for (int j = 1; j <= 4; ++j) {
        cert.expect(cones::C().contains(cones::unstable(j)), "C_j inside C", {{"j", j}});
        cert.expect(cones::stable(1).contains(cones::stable(j)), "C^s_j inside C^s_1", {{"j", j}});
    }
    return cert;
}

Certificate singularity_gradient_audit(const std::vector<SingularityLine>& inventory)
{
    Certificate cert("singularity-gradients", "Gradients of the singularity curves S_0 and S_1");
    const std::vector<Rat> allowed = {rat(8, 5), rat(-8, 5), rat(2), rat(-2)};
    Rat max_14 = 0, max_23 = 0;
    std::size_t n0 = 0, n1 = 0;
    for (const auto& l : inventory) {
        Vec2 d = l.q - l.p;
        bool vertical = d.x == 0;
        nlohmann::json wit = {{"p", otm::to_json(l.p)}, {"q", otm::to_json(l.q)}, {"sigma", l.sigma}};
        if (l.kind == "S0") {
            ++n0;
            bool ok = vertical || std::find(allowed.begin(), allowed.end(), d.y / d.x) != allowed.end();
            cert.expect(ok, "S_0 gradient in {+-8/5, +-2, inf}", wit);
            for (int j = 1; j <= 4; ++j) {
                cert.expect(!cones::unstable(j).contains(d), "S_0 direction outside unstable cones", wit);
                cert.expect(!cones::stable(j).contains(d), "S_0 direction outside stable cones", wit);
            }
        } else {
            ++n1;
            cert.expect(!vertical, "S_1 line not vertical", wit);
            if (vertical) continue;
            Rat g = abs(d.y / d.x);
            if (l.sigma == 1 || l.sigma == 4) {
                max_14 = std::max(max_14, g);
                cert.expect(g <= 1, "|gradient| <= 1 in sigma_1, sigma_4", wit);
            } else {
                max_23 = std::max(max_23, g);
                cert.expect(g <= rat(11, 14), "|gradient| <= 11/14 in sigma_2, sigma_3", wit);
            }
        }
    }
    cert.set("S0_lines", nlohmann::json(n0));
    cert.set("S1_lines", nlohmann::json(n1));
    cert.set("max_gradient_sigma14", max_14);
    cert.set("max_gradient_sigma23", max_23);
    return cert;
}

}  // namespace otm
