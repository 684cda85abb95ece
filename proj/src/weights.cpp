#include "bmg/weights.hpp"

#include <numeric>
#include <sstream>

namespace bmg {

bool weight_is_zero(const Weight& w) {
    for (long c : w)
        if (c) return false;
    return true;
}

Weight weight_neg(const Weight& w) {
    Weight o(w.size());
    for (size_t i = 0; i < w.size(); ++i) o[i] = -w[i];
    return o;
}

Weight weight_add(const Weight& a, const Weight& b) {
    Weight o(a.size());
    for (size_t i = 0; i < a.size(); ++i) o[i] = a[i] + b[i];
    return o;
}

Weight weight_sub(const Weight& a, const Weight& b) {
    Weight o(a.size());
    for (size_t i = 0; i < a.size(); ++i) o[i] = a[i] - b[i];
    return o;
}

Weight weight_scale(long c, const Weight& w) {
    Weight o(w.size());
    for (size_t i = 0; i < w.size(); ++i) o[i] = c * w[i];
    return o;
}

bool weight_eq(const Weight& a, const Weight& b) { return a == b; }

std::string weight_str(const Weight& w) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) os << ",";
        os << w[i];
    }
    os << "]";
    return os.str();
}

std::vector<Scalar> weight_scalars(const CoeffSpec& spec, const Weight& w) {
    std::vector<Scalar> out;
    out.reserve(w.size());
    for (long c : w) out.push_back(Scalar::from_int(spec, c));
    return out;
}

bool weight_zero_in_k(const CoeffSpec& spec, const Weight& w) {
    if (spec.kind == CoeffKind::PrimeField) {
        for (long c : w)
            if (c % static_cast<long>(spec.p) != 0) return false;
        return true;
    }
    return weight_is_zero(w);
}

bool weights_dependent_in_k(const CoeffSpec& spec, const Weight& a, const Weight& b) {
    // Dependence over the fraction field: all 2x2 minors vanish. Over F_p the
    // minors are read mod p; Z_(p) has fraction field Q, so integer minors.
    const size_t n = a.size();
    const bool mod_p = spec.kind == CoeffKind::PrimeField;
    const long p = mod_p ? static_cast<long>(spec.p) : 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            long m = a[i] * b[j] - a[j] * b[i];
            if (mod_p ? (m % p != 0) : (m != 0)) return false;
        }
    return true;
}

bool weight_primitive_mod_p(uint64_t p, const Weight& w) {
    for (long c : w)
        if (c % static_cast<long>(p) != 0) return true;
    return false;
}

int weight_unit_coordinate(const CoeffSpec& spec, const Weight& w) {
    for (size_t i = 0; i < w.size(); ++i) {
        long c = w[i];
        if (c == 0) continue;
        if (spec.kind == CoeffKind::Rationals) return static_cast<int>(i);
        if (c % static_cast<long>(spec.p) != 0) return static_cast<int>(i);
    }
    return -1;
}

bool weight_is_sign_normalized(const Weight& w) {
    for (long c : w) {
        if (c > 0) return true;
        if (c < 0) return false;
    }
    return true; // zero vector; callers reject those separately
}

Weight weight_sign_normalized(const Weight& w) {
    return weight_is_sign_normalized(w) ? w : weight_neg(w);
}

} // namespace bmg
