#include "otm/certificate.hpp"

namespace otm {

namespace {
constexpr std::size_t kMaxWitnesses = 8;
}

bool Certificate::expect(bool ok, const std::string& what, nlohmann::json witness)
{
    ++checked;
    if (ok) return true;
    pass = false;
    if (failures.size() < kMaxWitnesses) {
        nlohmann::json f = {{"check", what}};
        if (!witness.is_null()) f["witness"] = std::move(witness);
        failures.push_back(std::move(f));
    }
    return false;
}

void Certificate::set(const std::string& key, const Enclosure& e) { values[key] = enclosure_json(e); }

void Certificate::absorb(const Certificate& sub)
{
    checked += sub.checked;
    if (!sub.pass) {
        pass = false;
        for (const auto& f : sub.failures)
            if (failures.size() < kMaxWitnesses) failures.push_back({{"from", sub.id}, {"failure", f}});
    }
}

nlohmann::json Certificate::to_json() const
{
    return {{"check_id", id}, {"claim", label}, {"status", pass ? "PASS" : "FAIL"},
            {"checked", checked}, {"values", values}, {"failures", failures}};
}

CertificateFailure::CertificateFailure(const Certificate& c)
    : std::runtime_error("certificate " + c.id + " failed: " + c.failures.dump()), cert_(c)
{
}

const Certificate& require(const Certificate& c)
{
    if (!c.pass) throw CertificateFailure(c);
    return c;
}

nlohmann::json enclosure_json(const Enclosure& e)
{
    if (e.is_exact()) return {{"exact", to_string(e.lo)}, {"approx", e.approx()}};
    return {{"lo", to_string(e.lo)}, {"hi", to_string(e.hi)}, {"approx", e.approx()}};
}

}  // namespace otm
