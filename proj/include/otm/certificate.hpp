#pragma once

#include "otm/exact.hpp"

#include "json.hpp"

#include <string>

namespace otm {

// Result of one machine check. Values are exact "p/q" strings or [lo, hi] enclosures.
struct Certificate {
    std::string id;
    std::string label;
    bool pass = true;
    nlohmann::json values = nlohmann::json::object();
    nlohmann::json failures = nlohmann::json::array();
    std::size_t checked = 0;

    Certificate(std::string id_, std::string label_) : id(std::move(id_)), label(std::move(label_)) {}

    // Records one comparison; keeps at most a few failure witnesses.
    bool expect(bool ok, const std::string& what, nlohmann::json witness = nullptr);
    void set(const std::string& key, const Rat& r) { values[key] = to_string(r); }
    void set(const std::string& key, const Enclosure& e);
    void set(const std::string& key, nlohmann::json j) { values[key] = std::move(j); }
    void absorb(const Certificate& sub);

    nlohmann::json to_json() const;
};

class CertificateFailure : public std::runtime_error {
public:
    explicit CertificateFailure(const Certificate& c);
    const Certificate& certificate() const { return cert_; }

private:
    Certificate cert_;
};

// Throws CertificateFailure when the certificate did not pass.
const Certificate& require(const Certificate& c);

nlohmann::json enclosure_json(const Enclosure& e);

}  // namespace otm
