#include "bmg/scalar.hpp"

namespace bmg {

namespace {

std::uint64_t mod_of_mpz(const mpz_class& z, std::uint64_t p) {
    mpz_class r = z % static_cast<unsigned long>(p);
    if (r < 0) r += static_cast<unsigned long>(p);
    return r.get_ui();
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) {
    // Extended Euclid on int128 to be safe for large p.
    __int128 t = 0, newt = 1, r = p, newr = a % p;
    while (newr != 0) {
        __int128 q = r / newr;
        __int128 tmp = t - q * newt; t = newt; newt = tmp;
        tmp = r - q * newr; r = newr; newr = tmp;
    }
    if (r != 1) throw refusal_error("scalar: not invertible mod p");
    if (t < 0) t += p;
    return static_cast<std::uint64_t>(t);
}

long mpz_p_valuation(const mpz_class& z, std::uint64_t p) {
    mpz_class n = z;
    long v = 0;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
        mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
        ++v;
    }
    return v;
}

} // namespace

Scalar Scalar::from_int(CoeffSpec spec, long v) {
    Scalar s(spec);
    if (spec.kind == CoeffKind::PrimeField) {
        long m = static_cast<long>(v % static_cast<long>(spec.p));
        if (m < 0) m += static_cast<long>(spec.p);
        s.r_ = static_cast<std::uint64_t>(m);
    } else {
        s.q_ = v;
    }
    return s;
}

Scalar Scalar::from_mpq(CoeffSpec spec, const mpq_class& v) {
    Scalar s(spec);
    mpq_class c = v;
    c.canonicalize();
    switch (spec.kind) {
        case CoeffKind::Rationals:
            s.q_ = c;
            break;
        case CoeffKind::PLocalIntegers:
            if (mpz_divisible_ui_p(c.get_den().get_mpz_t(), spec.p))
                throw refusal_error("scalar: denominator divisible by p, not in Z_(" + std::to_string(spec.p) + ")");
            s.q_ = c;
            break;
        case CoeffKind::PrimeField: {
            std::uint64_t den = mod_of_mpz(c.get_den(), spec.p);
            if (den == 0) throw refusal_error("scalar: denominator divisible by p in F_" + std::to_string(spec.p));
            std::uint64_t num = mod_of_mpz(c.get_num(), spec.p);
            s.r_ = static_cast<std::uint64_t>((static_cast<unsigned __int128>(num) * inv_mod(den, spec.p)) % spec.p);
            break;
        }
    }
    return s;
}

Scalar Scalar::parse(CoeffSpec spec, const std::string& text) {
    std::string body = text;
    auto mod_pos = body.find(" mod ");
    if (mod_pos != std::string::npos) body = body.substr(0, mod_pos);
    mpq_class v;
    if (v.set_str(body, 10) != 0) throw refusal_error("scalar: cannot parse '" + text + "'");
    return from_mpq(spec, v);
}

bool Scalar::is_zero() const {
    return spec_.kind == CoeffKind::PrimeField ? r_ == 0 : q_ == 0;
}

bool Scalar::is_one() const {
    return spec_.kind == CoeffKind::PrimeField ? r_ == 1 % spec_.p : q_ == 1;
}

bool Scalar::is_unit() const {
    if (is_zero()) return false;
    if (spec_.kind != CoeffKind::PLocalIntegers) return true;
    return !mpz_divisible_ui_p(q_.get_num().get_mpz_t(), spec_.p);
}

long Scalar::p_valuation() const {
    if (is_zero()) throw refusal_error("scalar: valuation of zero");
    if (spec_.kind != CoeffKind::PLocalIntegers) return 0;
    // Denominator is coprime to p by the class invariant.
    return mpz_p_valuation(q_.get_num(), spec_.p);
}

Scalar Scalar::operator-() const {
    Scalar s(spec_);
    if (spec_.kind == CoeffKind::PrimeField) s.r_ = r_ == 0 ? 0 : spec_.p - r_;
    else s.q_ = -q_;
    return s;
}

Scalar& Scalar::operator+=(const Scalar& o) {
    if (spec_.kind == CoeffKind::PrimeField) {
        r_ += o.r_;
        if (r_ >= spec_.p) r_ -= spec_.p;
    } else {
        q_ += o.q_;
    }
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
    if (spec_.kind == CoeffKind::PrimeField) {
        r_ = r_ >= o.r_ ? r_ - o.r_ : r_ + spec_.p - o.r_;
    } else {
        q_ -= o.q_;
    }
    return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
    if (spec_.kind == CoeffKind::PrimeField) {
        r_ = static_cast<std::uint64_t>((static_cast<unsigned __int128>(r_) * o.r_) % spec_.p);
    } else {
        q_ *= o.q_;
    }
    return *this;
}

Scalar Scalar::operator/(const Scalar& o) const {
    if (o.is_zero()) throw refusal_error("scalar: division by zero");
    Scalar s(spec_);
    if (spec_.kind == CoeffKind::PrimeField) {
        s.r_ = static_cast<std::uint64_t>((static_cast<unsigned __int128>(r_) * inv_mod(o.r_, spec_.p)) % spec_.p);
        return s;
    }
    mpq_class q = q_ / o.q_;
    q.canonicalize();
    if (spec_.kind == CoeffKind::PLocalIntegers && mpz_divisible_ui_p(q.get_den().get_mpz_t(), spec_.p))
        throw refusal_error("scalar: quotient not in Z_(" + std::to_string(spec_.p) + ")");
    s.q_ = q;
    return s;
}

Scalar Scalar::inverse() const {
    if (!is_unit()) throw refusal_error("scalar: not a unit");
    return one(spec_) / *this;
}

bool Scalar::operator==(const Scalar& o) const {
    return spec_.kind == CoeffKind::PrimeField ? r_ == o.r_ : q_ == o.q_;
}

std::string Scalar::str() const {
    if (spec_.kind == CoeffKind::PrimeField)
        return std::to_string(r_) + " mod " + std::to_string(spec_.p);
    if (q_.get_den() == 1) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

Scalar reduce_mod_p(const Scalar& s) {
    if (s.spec_.kind != CoeffKind::PLocalIntegers)
        throw refusal_error("reduce_mod_p: input must live over Z_(p)");
    CoeffSpec fp = CoeffSpec::prime_field(s.spec_.p);
    std::uint64_t num = mod_of_mpz(s.q_.get_num(), fp.p);
    std::uint64_t den = mod_of_mpz(s.q_.get_den(), fp.p);
    Scalar out(fp);
    out.r_ = static_cast<std::uint64_t>((static_cast<unsigned __int128>(num) * inv_mod(den, fp.p)) % fp.p);
    return out;
}

} // namespace bmg
