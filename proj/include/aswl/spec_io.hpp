#pragma once

// Tower spec JSON ingestion and canonical serialization, plus the file hash
// embedded in every report.

#include <fstream>
#include <sstream>
#include <string>

#include <openssl/evp.h>

#include <json.hpp>

#include "aswl/tower.hpp"

namespace aswl {

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw InternalError("sha256_hex: digest failure");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

inline TowerSpec parse_spec_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("spec: top level must be an object");
    for (const char* key : {"p", "a", "field_modulus", "coeffs"})
        if (!j.contains(key)) throw ParseError(std::string("spec: missing required field \"") + key + "\"");
    if (!j["p"].is_number_integer() || !j["a"].is_number_integer())
        throw ParseError("spec: p and a must be integers");
    std::int64_t p = j["p"].get<std::int64_t>();
    long a = j["a"].get<long>();
    if (!j["field_modulus"].is_array()) throw ParseError("spec: field_modulus must be an array");
    std::vector<std::int64_t> mod = j["field_modulus"].get<std::vector<std::int64_t>>();

    TowerSpec spec;
    try {
        spec.field = make_field(p, a, mod);
    } catch (const InputError&) {
        throw;
    }

    if (j.contains("extension_moduli")) {
        if (!j["extension_moduli"].is_object()) throw ParseError("spec: extension_moduli must be an object");
        for (auto it = j["extension_moduli"].begin(); it != j["extension_moduli"].end(); ++it) {
            long k = 0;
            try {
                k = std::stol(it.key());
            } catch (...) {
                throw ParseError("spec: extension_moduli key is not an integer: " + it.key());
            }
            if (k < 2) throw ParseError("spec: extension_moduli keys must be >= 2");
            auto arr = it.value().get<std::vector<std::int64_t>>();
            if (static_cast<long>(arr.size()) != a * k + 1)
                throw ParseError("spec: extension modulus for k=" + it.key() + " must have degree a*k");
            std::vector<std::uint8_t> red(arr.size());
            for (std::size_t i = 0; i < arr.size(); ++i)
                red[i] = static_cast<std::uint8_t>(((arr[i] % p) + p) % p);
            if (red.back() != 1) throw ParseError("spec: extension modulus for k=" + it.key() + " must be monic");
            spec.field.ext_overrides[k] = std::move(red);
        }
    }

    if (!j["coeffs"].is_array()) throw ParseError("spec: coeffs must be an array");
    for (const auto& entry : j["coeffs"]) {
        if (!entry.is_object() || !entry.contains("i") || !entry.contains("j") || !entry.contains("a_ij"))
            throw ParseError("spec: each coeff needs fields i, j, a_ij");
        long i = entry["i"].get<long>();
        long jj = entry["j"].get<long>();
        auto arr = entry["a_ij"].get<std::vector<std::int64_t>>();
        if (static_cast<long>(arr.size()) != a)
            throw ParseError("spec: a_ij at (" + std::to_string(i) + "," + std::to_string(jj) +
                             ") must have length a");
        std::vector<std::uint8_t> red(arr.size());
        bool nonzero = false;
        for (std::size_t t = 0; t < arr.size(); ++t) {
            red[t] = static_cast<std::uint8_t>(((arr[t] % p) + p) % p);
            nonzero = nonzero || red[t] != 0;
        }
        if (!nonzero)
            throw ParseError("spec: a_ij at (" + std::to_string(i) + "," + std::to_string(jj) + ") is zero");
        if (spec.coeffs.count({i, jj}))
            throw ParseError("spec: duplicate coefficient at (" + std::to_string(i) + "," + std::to_string(jj) + ")");
        spec.coeffs[{i, jj}] = std::move(red);
    }
    validate(spec);
    return spec;
}

inline TowerSpec parse_spec_file(const std::string& path, std::string* sha_out = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("spec: cannot open file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string bytes = buf.str();
    if (sha_out) *sha_out = sha256_hex(bytes);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("spec: invalid JSON: ") + e.what());
    }
    return parse_spec_json(j);
}

inline nlohmann::json serialize_spec(const TowerSpec& spec) {
    nlohmann::json j;
    j["p"] = spec.field.p;
    j["a"] = spec.field.a;
    j["field_modulus"] = std::vector<std::int64_t>(spec.field.modulus.begin(), spec.field.modulus.end());
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& [ij, val] : spec.coeffs) {
        nlohmann::json e;
        e["i"] = ij.first;
        e["j"] = ij.second;
        e["a_ij"] = std::vector<std::int64_t>(val.begin(), val.end());
        coeffs.push_back(e);
    }
    j["coeffs"] = coeffs;
    if (!spec.field.ext_overrides.empty()) {
        nlohmann::json em;
        for (const auto& [k, arr] : spec.field.ext_overrides)
            em[std::to_string(k)] = std::vector<std::int64_t>(arr.begin(), arr.end());
        j["extension_moduli"] = em;
    }
    return j;
}

inline bool specs_equal(const TowerSpec& x, const TowerSpec& y) {
    return x.field.p == y.field.p && x.field.a == y.field.a && x.field.modulus == y.field.modulus &&
           x.field.ext_overrides == y.field.ext_overrides && x.coeffs == y.coeffs;
}

}  // namespace aswl
