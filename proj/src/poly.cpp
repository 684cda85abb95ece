#include "bmg/poly.hpp"

#include <sstream>
#include <stdexcept>

namespace bmg {

// ----------------------------------------------------------------- QPolynomial

QPolynomial QPolynomial::q_power(int j, long long c) {
    QPolynomial p;
    if (c) p.c_[j] = c;
    return p;
}

long long QPolynomial::coeff(int j) const {
    auto it = c_.find(j);
    return it == c_.end() ? 0 : it->second;
}

void QPolynomial::set_coeff(int j, long long c) {
    if (c) c_[j] = c;
    else c_.erase(j);
}

int QPolynomial::min_exp() const {
    if (c_.empty()) throw std::logic_error("min_exp of zero polynomial");
    return c_.begin()->first;
}

int QPolynomial::max_exp() const {
    if (c_.empty()) throw std::logic_error("max_exp of zero polynomial");
    return c_.rbegin()->first;
}

long long QPolynomial::eval_at_one() const {
    long long s = 0;
    for (const auto& [j, c] : c_) s += c;
    return s;
}

QPolynomial QPolynomial::operator+(const QPolynomial& o) const {
    QPolynomial r = *this;
    r += o;
    return r;
}

QPolynomial QPolynomial::operator-(const QPolynomial& o) const {
    QPolynomial r = *this;
    r -= o;
    return r;
}

QPolynomial& QPolynomial::operator+=(const QPolynomial& o) {
    for (const auto& [j, c] : o.c_) set_coeff(j, coeff(j) + c);
    return *this;
}

QPolynomial& QPolynomial::operator-=(const QPolynomial& o) {
    for (const auto& [j, c] : o.c_) set_coeff(j, coeff(j) - c);
    return *this;
}

QPolynomial QPolynomial::operator*(const QPolynomial& o) const {
    QPolynomial r;
    for (const auto& [j, c] : c_)
        for (const auto& [k, d] : o.c_) r.set_coeff(j + k, r.coeff(j + k) + c * d);
    return r;
}

QPolynomial QPolynomial::shifted(int j) const {
    QPolynomial r;
    for (const auto& [k, c] : c_) r.c_[k + j] = c;
    return r;
}

bool QPolynomial::palindromic_with_sum(int s) const {
    for (const auto& [j, c] : c_)
        if (coeff(s - j) != c) return false;
    return true;
}

std::string QPolynomial::str() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [j, c] : c_) {
        long long a = c;
        if (first) {
            if (a < 0) { os << "-"; a = -a; }
        } else {
            os << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        if (j == 0) {
            os << a;
        } else {
            if (a != 1) os << a << "*";
            os << "q";
            if (j != 1) os << "^" << j;
        }
    }
    return os.str();
}

// ------------------------------------------------------------------- monomials

int exponents_total(const Exponents& e) {
    int s = 0;
    for (int x : e) s += x;
    return s;
}

bool monomial_less(const Exponents& a, const Exponents& b) {
    int da = exponents_total(a), db = exponents_total(b);
    if (da != db) return da < db;
    return a > b; // lexicographically descending within a degree
}

namespace {

void enumerate(int rank, int pos, int remaining, Exponents& cur, std::vector<Exponents>& out) {
    if (pos == rank - 1) {
        cur[pos] = remaining;
        out.push_back(cur);
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        cur[pos] = e;
        enumerate(rank, pos + 1, remaining - e, cur, out);
    }
}

} // namespace

std::vector<Exponents> monomial_basis(int rank, int internal_degree) {
    std::vector<Exponents> out;
    if (internal_degree < 0 || internal_degree % 2 != 0) return out;
    int n = internal_degree / 2;
    if (rank == 0) {
        if (n == 0) out.push_back({});
        return out;
    }
    Exponents cur(rank, 0);
    enumerate(rank, 0, n, cur, out);
    return out;
}

// ------------------------------------------------------------ GradedPolynomial

GradedPolynomial GradedPolynomial::constant(CoeffSpec spec, int rank, const Scalar& c) {
    GradedPolynomial p(spec, rank);
    p.add_term(Exponents(rank, 0), c);
    return p;
}

GradedPolynomial GradedPolynomial::variable(CoeffSpec spec, int rank, int i) {
    GradedPolynomial p(spec, rank);
    Exponents e(rank, 0);
    e[i] = 1;
    p.add_term(e, Scalar::one(spec));
    return p;
}

GradedPolynomial GradedPolynomial::linear(CoeffSpec spec, const std::vector<Scalar>& coords) {
    GradedPolynomial p(spec, static_cast<int>(coords.size()));
    for (size_t i = 0; i < coords.size(); ++i) {
        Exponents e(coords.size(), 0);
        e[i] = 1;
        p.add_term(e, coords[i]);
    }
    return p;
}

Scalar GradedPolynomial::coeff(const Exponents& e) const {
    auto it = t_.find(e);
    return it == t_.end() ? Scalar::zero(spec_) : it->second;
}

void GradedPolynomial::add_term(const Exponents& e, const Scalar& c) {
    if (c.is_zero()) return;
    auto it = t_.find(e);
    if (it == t_.end()) {
        t_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) t_.erase(it);
    }
}

GradedPolynomial GradedPolynomial::operator+(const GradedPolynomial& o) const {
    GradedPolynomial r = *this;
    r += o;
    return r;
}

GradedPolynomial& GradedPolynomial::operator+=(const GradedPolynomial& o) {
    for (const auto& [e, c] : o.t_) add_term(e, c);
    return *this;
}

GradedPolynomial GradedPolynomial::operator-(const GradedPolynomial& o) const {
    GradedPolynomial r = *this;
    for (const auto& [e, c] : o.t_) r.add_term(e, -c);
    return r;
}

GradedPolynomial GradedPolynomial::operator*(const GradedPolynomial& o) const {
    GradedPolynomial r(spec_, rank_);
    for (const auto& [e, c] : t_)
        for (const auto& [f, d] : o.t_) {
            Exponents g(rank_);
            for (int i = 0; i < rank_; ++i) g[i] = e[i] + f[i];
            r.add_term(g, c * d);
        }
    return r;
}

GradedPolynomial GradedPolynomial::scaled(const Scalar& c) const {
    GradedPolynomial r(spec_, rank_);
    for (const auto& [e, v] : t_) r.add_term(e, v * c);
    return r;
}

bool GradedPolynomial::operator==(const GradedPolynomial& o) const {
    if (t_.size() != o.t_.size()) return false;
    auto it = t_.begin(), jt = o.t_.begin();
    for (; it != t_.end(); ++it, ++jt)
        if (it->first != jt->first || it->second != jt->second) return false;
    return true;
}

int GradedPolynomial::homogeneous_degree() const {
    if (t_.empty()) return 0;
    int d = 2 * exponents_total(t_.begin()->first);
    for (const auto& [e, c] : t_)
        if (2 * exponents_total(e) != d) return -1;
    return d;
}

std::string GradedPolynomial::str() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : t_) {
        std::string cs = c.str();
        bool neg = !cs.empty() && cs[0] == '-';
        if (first) {
            if (neg) { os << "-"; cs = cs.substr(1); }
        } else {
            os << (neg ? " - " : " + ");
            if (neg) cs = cs.substr(1);
        }
        first = false;
        bool isconst = exponents_total(e) == 0;
        bool unit_coeff = cs == "1";
        if (isconst || !unit_coeff) os << cs;
        bool need_star = !isconst && !unit_coeff;
        for (int i = 0; i < rank_; ++i) {
            if (!e[i]) continue;
            if (need_star) os << "*";
            os << "t" << i;
            if (e[i] > 1) os << "^" << e[i];
            need_star = true;
        }
    }
    return os.str();
}

bool divisible_by_linear(const GradedPolynomial& f, const std::vector<Scalar>& alpha, int unit_idx) {
    const CoeffSpec spec = f.spec();
    const int rank = f.rank();
    GradedPolynomial a = GradedPolynomial::linear(spec, alpha);
    const Scalar ci = alpha[unit_idx];
    GradedPolynomial r = f;
    // Eliminate the chosen variable; the leading coefficient is a unit, so
    // each step is an exact division and the loop strictly lowers the top
    // exponent of that variable.
    for (;;) {
        const Exponents* top = nullptr;
        for (const auto& [e, c] : r.terms())
            if (e[unit_idx] > 0 && (!top || e[unit_idx] > (*top)[unit_idx] ||
                                    (e[unit_idx] == (*top)[unit_idx] && monomial_less(*top, e))))
                top = &e;
        if (!top) break;
        Exponents g = *top;
        g[unit_idx] -= 1;
        Scalar factor = r.coeff(*top) / ci;
        GradedPolynomial m(spec, rank);
        m.add_term(g, factor);
        r = r - m * a;
    }
    return r.is_zero();
}

} // namespace bmg
