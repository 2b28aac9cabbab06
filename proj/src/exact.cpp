#include "echelon/exact.hpp"

#include <cctype>
#include <cmath>

#include "echelon/errors.hpp"

namespace echelon {

namespace {

bool is_perfect_square(long d) {
    if (d < 0) return false;
    mpz_class z(d);
    return mpz_perfect_square_p(z.get_mpz_t()) != 0;
}

// Decimal or p/q literal to an exact rational.
mpq_class parse_rational(std::string_view s) {
    if (s.empty()) throw ParseError("empty rational literal");
    std::string t(s);
    auto slash = t.find('/');
    if (slash != std::string::npos) {
        mpz_class p, q;
        if (p.set_str(t.substr(0, slash), 10) != 0 || q.set_str(t.substr(slash + 1), 10) != 0)
            throw ParseError("bad rational literal '" + t + "'");
        if (q == 0) throw ParseError("zero denominator in '" + t + "'");
        mpq_class r(p, q);
        r.canonicalize();
        return r;
    }
    auto e = t.find_first_of("eE");
    long exp10 = 0;
    if (e != std::string::npos) {
        try {
            exp10 = std::stol(t.substr(e + 1));
        } catch (...) {
            throw ParseError("bad exponent in '" + t + "'");
        }
        t = t.substr(0, e);
    }
    auto dot = t.find('.');
    std::string digits = t;
    if (dot != std::string::npos) {
        digits = t.substr(0, dot) + t.substr(dot + 1);
        exp10 -= static_cast<long>(t.size() - dot - 1);
    }
    if (digits.empty() || digits == "-" || digits == "+") throw ParseError("bad number '" + std::string(s) + "'");
    if (digits[0] == '+') digits = digits.substr(1);
    mpz_class m;
    if (m.set_str(digits, 10) != 0) throw ParseError("bad number '" + std::string(s) + "'");
    mpz_class ten(10), pw;
    mpz_pow_ui(pw.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(std::labs(exp10)));
    mpq_class r = exp10 >= 0 ? mpq_class(m * pw) : mpq_class(m, pw);
    r.canonicalize();
    return r;
}

// One summand: [rational][*]sqrt(d) or rational.
Surd parse_term(std::string_view term) {
    if (!term.empty() && term.front() == '+') term.remove_prefix(1);
    auto pos = term.find("sqrt(");
    if (pos == std::string_view::npos) return Surd(parse_rational(term));
    auto close = term.find(')', pos);
    if (close == std::string_view::npos || close + 1 != term.size())
        throw ParseError("bad sqrt term '" + std::string(term) + "'");
    long d = 0;
    try {
        d = std::stol(std::string(term.substr(pos + 5, close - pos - 5)));
    } catch (...) {
        throw ParseError("bad radicand in '" + std::string(term) + "'");
    }
    std::string_view coef = term.substr(0, pos);
    if (!coef.empty() && coef.back() == '*') coef.remove_suffix(1);
    mpq_class c(1);
    if (coef == "-") c = -1;
    else if (!coef.empty() && coef != "+") c = parse_rational(coef);
    return Surd(0, c, d);
}

}  // namespace

Surd::Surd(mpq_class a, mpq_class b, long d) : a_(std::move(a)), b_(std::move(b)), d_(d) {
    if (d_ != 0 && (d_ < 2 || is_perfect_square(d_)))
        throw PreconditionError("radicand must be a positive non-square, got " + std::to_string(d_));
    if (d_ == 0 && sgn(b_) != 0) throw PreconditionError("surd part without radicand");
}

Surd Surd::sqrt_of(long d) { return Surd(0, 1, d); }

Surd Surd::ratio(long p, long q) {
    if (q == 0) throw PreconditionError("zero denominator");
    mpq_class r(p, q);
    r.canonicalize();
    return Surd(r);
}

long Surd::merge(long d1, long d2) {
    if (d1 == 0) return d2;
    if (d2 == 0 || d1 == d2) return d1;
    throw PreconditionError("cannot mix sqrt(" + std::to_string(d1) + ") and sqrt(" + std::to_string(d2) + ")");
}

int Surd::sign() const {
    int sa = sgn(a_), sb = sgn(b_);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // Opposite signs: compare a^2 with d b^2.
    mpq_class lhs = a_ * a_, rhs = b_ * b_ * d_;
    int c = cmp(lhs, rhs);
    return c > 0 ? sa : (c < 0 ? sb : 0);
}

double Surd::to_double() const {
    if (sgn(b_) == 0) return a_.get_d();
    double r = std::sqrt(static_cast<double>(d_));
    if (sgn(a_) * sgn(b_) >= 0) return a_.get_d() + b_.get_d() * r;
    // Cancellation: use (a^2 - d b^2) / (a - b sqrt d).
    mpq_class num = a_ * a_ - b_ * b_ * d_;
    return num.get_d() / (a_.get_d() - b_.get_d() * r);
}

std::string Surd::str() const {
    if (sgn(b_) == 0) return a_.get_str();
    std::string s;
    if (sgn(a_) != 0) s = a_.get_str();
    mpq_class b = b_;
    if (sgn(b) < 0) {
        s += "-";
        b = -b;
    } else if (!s.empty()) {
        s += "+";
    }
    if (b != 1) s += b.get_str() + "*";
    s += "sqrt(" + std::to_string(d_) + ")";
    return s;
}

Surd Surd::parse(std::string_view text) {
    std::string t;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw ParseError("empty number literal");
    Surd acc;
    std::size_t start = 0;
    for (std::size_t i = 1; i <= t.size(); ++i) {
        bool split = i == t.size();
        if (!split && (t[i] == '+' || t[i] == '-')) {
            char prev = t[i - 1];
            split = prev != 'e' && prev != 'E' && prev != '(' && prev != '*' && prev != '/';
        }
        if (split) {
            acc += parse_term(std::string_view(t).substr(start, i - start));
            start = i;
        }
    }
    return acc;
}

Surd Surd::operator-() const {
    Surd r = *this;
    r.a_ = -r.a_;
    r.b_ = -r.b_;
    return r;
}

Surd& Surd::operator+=(const Surd& o) {
    a_ += o.a_;
    if (sgn(o.b_) != 0) {
        d_ = merge(d_, o.d_);
        b_ += o.b_;
    }
    return *this;
}

Surd& Surd::operator-=(const Surd& o) {
    a_ -= o.a_;
    if (sgn(o.b_) != 0) {
        d_ = merge(d_, o.d_);
        b_ -= o.b_;
    }
    return *this;
}

Surd& Surd::operator*=(const Surd& o) {
    bool lb = sgn(b_) != 0, rb = sgn(o.b_) != 0;
    if (!lb && !rb) {
        a_ *= o.a_;
        return *this;
    }
    if (!rb) {
        a_ *= o.a_;
        b_ *= o.a_;
        return *this;
    }
    d_ = merge(d_, o.d_);
    if (!lb) {
        b_ = a_ * o.b_;
        a_ *= o.a_;
        return *this;
    }
    mpq_class a = a_ * o.a_ + b_ * o.b_ * d_;
    mpq_class b = a_ * o.b_ + b_ * o.a_;
    a_ = std::move(a);
    b_ = std::move(b);
    return *this;
}

Surd Surd::inverse() const {
    if (is_zero()) throw PreconditionError("division by exact zero");
    if (sgn(b_) == 0) return Surd(1 / a_);
    mpq_class n = a_ * a_ - b_ * b_ * d_;
    return Surd(a_ / n, -b_ / n, d_);
}

Surd& Surd::operator/=(const Surd& o) { return *this *= o.inverse(); }

bool operator==(const Surd& x, const Surd& y) {
    if (x.a_ != y.a_ || x.b_ != y.b_) return false;
    return sgn(x.b_) == 0 || x.d_ == y.d_;
}

Exact Exact::from_complex(std::complex<double> z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw PreconditionError("non-finite value");
    return Exact(Surd(mpq_class(z.real())), Surd(mpq_class(z.imag())));
}

double Exact::abs() const {
    if (im_.is_zero()) return std::fabs(re_.to_double());
    return std::hypot(re_.to_double(), im_.to_double());
}

Exact Exact::inverse() const {
    if (im_.is_zero()) return Exact(re_.inverse());
    Surd n = re_ * re_ + im_ * im_;
    Surd ni = n.inverse();
    return Exact(re_ * ni, -im_ * ni);
}

Exact& Exact::operator+=(const Exact& o) {
    re_ += o.re_;
    if (!o.im_.is_zero()) im_ += o.im_;
    return *this;
}

Exact& Exact::operator-=(const Exact& o) {
    re_ -= o.re_;
    if (!o.im_.is_zero()) im_ -= o.im_;
    return *this;
}

Exact& Exact::operator*=(const Exact& o) {
    bool li = !im_.is_zero(), ri = !o.im_.is_zero();
    if (!li && !ri) {
        re_ *= o.re_;
        return *this;
    }
    if (!ri) {
        re_ *= o.re_;
        im_ *= o.re_;
        return *this;
    }
    if (!li) {
        im_ = re_ * o.im_;
        re_ *= o.re_;
        return *this;
    }
    Surd re = re_ * o.re_ - im_ * o.im_;
    Surd im = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
}

}  // namespace echelon
