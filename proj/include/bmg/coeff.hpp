#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bmg {

// Raised when an input is rejected by a documented precondition (as opposed to
// an internal bug). The CLI maps these to exit code 1 with a JSON reason.
class refusal_error : public std::runtime_error {
public:
    explicit refusal_error(const std::string& what) : std::runtime_error(what) {}
};

bool is_prime_u64(std::uint64_t n);

enum class CoeffKind { Rationals, PrimeField, PLocalIntegers };

// A coefficient ring: Q, F_p, or Z_(p) (rationals with denominator coprime to
// p). All three are local, and the residue field of Z_(p) is F_p, so graded
// ranks computed over Z_(p) depend only on the residue characteristic.
struct CoeffSpec {
    CoeffKind kind = CoeffKind::Rationals;
    std::uint64_t p = 0; // 0 for Rationals

    static CoeffSpec rationals() { return {CoeffKind::Rationals, 0}; }
    static CoeffSpec prime_field(std::uint64_t p);
    static CoeffSpec p_local(std::uint64_t p);

    // Grammar: "Q" | "Fp:<prime>" | "Zp:<prime>".
    static CoeffSpec parse(const std::string& text);
    std::string str() const;

    bool is_field() const { return kind != CoeffKind::PLocalIntegers; }
    // Characteristic of the residue field k/m (0 for Q).
    std::uint64_t residue_characteristic() const {
        return kind == CoeffKind::Rationals ? 0 : p;
    }

    bool operator==(const CoeffSpec& o) const { return kind == o.kind && p == o.p; }
    bool operator!=(const CoeffSpec& o) const { return !(*this == o); }
};

} // namespace bmg
