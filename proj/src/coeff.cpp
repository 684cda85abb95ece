#include "bmg/coeff.hpp"

namespace bmg {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

} // namespace

// Deterministic Miller-Rabin; this witness set is exact for all 64-bit inputs.
bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % q == 0) return n == q;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

CoeffSpec CoeffSpec::prime_field(std::uint64_t p) {
    if (!is_prime_u64(p)) throw refusal_error("coefficient ring: " + std::to_string(p) + " is not prime");
    return {CoeffKind::PrimeField, p};
}

CoeffSpec CoeffSpec::p_local(std::uint64_t p) {
    if (!is_prime_u64(p)) throw refusal_error("coefficient ring: " + std::to_string(p) + " is not prime");
    return {CoeffKind::PLocalIntegers, p};
}

CoeffSpec CoeffSpec::parse(const std::string& text) {
    if (text == "Q") return rationals();
    auto tail = [&](const std::string& prefix) -> std::uint64_t {
        std::string s = text.substr(prefix.size());
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
            throw refusal_error("coefficient ring: cannot parse '" + text + "'");
        return std::stoull(s);
    };
    if (text.rfind("Fp:", 0) == 0) return prime_field(tail("Fp:"));
    if (text.rfind("Zp:", 0) == 0) return p_local(tail("Zp:"));
    throw refusal_error("coefficient ring: cannot parse '" + text + "' (expected Q, Fp:<p>, Zp:<p>)");
}

std::string CoeffSpec::str() const {
    switch (kind) {
        case CoeffKind::Rationals: return "Q";
        case CoeffKind::PrimeField: return "Fp:" + std::to_string(p);
        case CoeffKind::PLocalIntegers: return "Zp:" + std::to_string(p);
    }
    return "?";
}

} // namespace bmg
