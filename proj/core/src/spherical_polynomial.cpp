#include "yamabe/spherical_polynomial.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "yamabe/errors.hpp"
#include "yamabe/sphere_moments.hpp"

namespace yamabe {

SphericalPolynomial::SphericalPolynomial(int n, int degree) : n_(n), degree_(degree) {
    if (n < 1) throw PreconditionError("SphericalPolynomial: n >= 1 required");
    if (degree < 0) throw PreconditionError("SphericalPolynomial: degree >= 0 required");
}

void SphericalPolynomial::add_term(const MultiIndex& alpha, const Rational& c) {
    if (int(alpha.size()) != n_)
        throw PreconditionError("SphericalPolynomial::add_term: alpha has wrong length");
    if (yamabe::degree(alpha) != degree_)
        throw PreconditionError("SphericalPolynomial::add_term: |alpha| != degree, alpha=" +
                                yamabe::to_string(alpha));
    if (c == 0) return;
    auto it = terms_.find(alpha);
    if (it == terms_.end()) {
        terms_.emplace(alpha, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Rational SphericalPolynomial::coefficient(const MultiIndex& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? Rational(0) : it->second;
}

SphericalPolynomial& SphericalPolynomial::operator+=(const SphericalPolynomial& other) {
    if (other.n_ != n_ || other.degree_ != degree_)
        throw PreconditionError("SphericalPolynomial: mismatched n or degree in +=");
    for (const auto& [a, c] : other.terms_) add_term(a, c);
    return *this;
}

SphericalPolynomial& SphericalPolynomial::operator-=(const SphericalPolynomial& other) {
    if (other.n_ != n_ || other.degree_ != degree_)
        throw PreconditionError("SphericalPolynomial: mismatched n or degree in -=");
    for (const auto& [a, c] : other.terms_) add_term(a, -c);
    return *this;
}

SphericalPolynomial& SphericalPolynomial::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [a, v] : terms_) v *= c;
    return *this;
}

SphericalPolynomial SphericalPolynomial::multiply(const SphericalPolynomial& other) const {
    if (other.n_ != n_)
        throw PreconditionError("SphericalPolynomial::multiply: mismatched n");
    SphericalPolynomial out(n_, degree_ + other.degree_);
    for (const auto& [a, ca] : terms_) {
        for (const auto& [b, cb] : other.terms_) {
            MultiIndex s(a);
            for (int i = 0; i < n_; ++i) s[i] = std::uint8_t(s[i] + b[i]);
            out.add_term(s, ca * cb);
        }
    }
    return out;
}

SphericalPolynomial SphericalPolynomial::partial(int i) const {
    if (i < 0 || i >= n_) throw PreconditionError("SphericalPolynomial::partial: bad index");
    if (degree_ == 0) return SphericalPolynomial(n_, 0);
    SphericalPolynomial out(n_, degree_ - 1);
    for (const auto& [a, c] : terms_) {
        if (a[i] == 0) continue;
        MultiIndex b(a);
        b[i] -= 1;
        out.add_term(b, c * int(a[i]));
    }
    return out;
}

SphericalPolynomial SphericalPolynomial::laplacian() const {
    SphericalPolynomial out(n_, degree_ >= 2 ? degree_ - 2 : 0);
    if (degree_ < 2) return out;
    for (const auto& [a, c] : terms_) {
        for (int i = 0; i < n_; ++i) {
            if (a[i] < 2) continue;
            MultiIndex b(a);
            b[i] -= 2;
            out.add_term(b, c * int(a[i]) * int(a[i] - 1));
        }
    }
    return out;
}

SphericalPolynomial SphericalPolynomial::times_r2() const {
    SphericalPolynomial out(n_, degree_ + 2);
    for (const auto& [a, c] : terms_) {
        for (int i = 0; i < n_; ++i) {
            MultiIndex b(a);
            b[i] += 2;
            out.add_term(b, c);
        }
    }
    return out;
}

double SphericalPolynomial::eval(std::span<const double> x) const {
    if (int(x.size()) != n_) throw PreconditionError("SphericalPolynomial::eval: bad point size");
    double sum = 0.0;
    for (const auto& [a, c] : terms_) {
        double m = to_double(c);
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < a[i]; ++k) m *= x[i];
        sum += m;
    }
    return sum;
}

Rational SphericalPolynomial::eval_rational(const std::vector<Rational>& x) const {
    if (int(x.size()) != n_) throw PreconditionError("SphericalPolynomial::eval_rational: bad point size");
    Rational sum = 0;
    for (const auto& [a, c] : terms_) {
        Rational m = c;
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < a[i]; ++k) m *= x[i];
        sum += m;
    }
    return sum;
}

Rational SphericalPolynomial::sphere_average() const {
    Rational sum = 0;
    for (const auto& [a, c] : terms_) sum += c * sphere_monomial_average(n_, a);
    return sum;
}

Rational SphericalPolynomial::sphere_inner_average(const SphericalPolynomial& other) const {
    return multiply(other).sphere_average();
}

std::string SphericalPolynomial::to_json() const {
    nlohmann::json j;
    j["n"] = n_;
    j["degree"] = degree_;
    auto terms = nlohmann::json::array();
    for (const auto& [a, c] : terms_) {
        nlohmann::json t;
        t["alpha"] = std::vector<int>(a.begin(), a.end());
        t["num"] = num_i64(c);
        t["den"] = den_i64(c);
        terms.push_back(t);
    }
    j["terms"] = terms;
    return j.dump();
}

SphericalPolynomial SphericalPolynomial::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    SphericalPolynomial p(j.at("n").get<int>(), j.at("degree").get<int>());
    for (const auto& t : j.at("terms")) {
        auto av = t.at("alpha").get<std::vector<int>>();
        MultiIndex a(av.begin(), av.end());
        Rational c(mpz_class(std::to_string(t.at("num").get<std::int64_t>())),
                   mpz_class(std::to_string(t.at("den").get<std::int64_t>())));
        c.canonicalize();
        p.add_term(a, c);
    }
    return p;
}

} // namespace yamabe
