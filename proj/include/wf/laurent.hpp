#pragma once

#include "wf/rational.hpp"

#include "json.hpp"

#include <array>
#include <complex>
#include <functional>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace wf {

constexpr int kMaxVars = 16;
inline const std::string kESymbol = "_E";

class AlgebraError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Variable list of a Laurent ring. The symbol "_E" (if present) is the
// exponential e^{elog}; differentiating by elog also acts on E.
struct Ring {
    std::vector<std::string> names;
    int e_index = -1;
    int elog_index = -1;

    int index_of(const std::string& name) const;
    bool operator==(const Ring& o) const {
        return names == o.names && elog_index == o.elog_index;
    }
};

using RingPtr = std::shared_ptr<const Ring>;

// names may contain "_E"; elog is the name of the variable with dE/d(elog) = E
// (empty for none).
RingPtr make_ring(const std::vector<std::string>& names, const std::string& elog = "");
RingPtr merge_rings(const RingPtr& a, const RingPtr& b);

struct Mono {
    std::array<int16_t, kMaxVars> e{};

    int total(int n) const {
        int s = 0;
        for (int i = 0; i < n; ++i) s += e[i];
        return s;
    }
    bool operator==(const Mono& o) const { return e == o.e; }
};

struct Term {
    Mono m;
    Rational c;
};

class LaurentPoly {
public:
    LaurentPoly() = default;
    explicit LaurentPoly(RingPtr ring) : ring_(std::move(ring)) {}

    static LaurentPoly constant(const RingPtr& ring, const Rational& c);
    static LaurentPoly var(const RingPtr& ring, const std::string& name, int power = 1);
    static LaurentPoly monomial(const RingPtr& ring, const Mono& m, const Rational& c);

    const RingPtr& ring() const { return ring_; }
    int nvars() const { return ring_ ? static_cast<int>(ring_->names.size()) : 0; }
    const std::vector<Term>& terms() const { return terms_; }
    size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    bool is_monomial() const { return terms_.size() == 1; }
    Rational constant_term() const;
    Rational coeff(const Mono& m) const;

    LaurentPoly operator-() const;
    LaurentPoly& operator+=(const LaurentPoly& o);
    LaurentPoly& operator-=(const LaurentPoly& o);
    LaurentPoly& operator*=(const LaurentPoly& o);
    LaurentPoly& operator*=(const Rational& c);

    friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
    friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }
    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
    friend LaurentPoly operator*(LaurentPoly a, const Rational& c) { return a *= c; }
    friend LaurentPoly operator*(const Rational& c, LaurentPoly a) { return a *= c; }
    friend bool operator==(const LaurentPoly& a, const LaurentPoly& b);
    friend bool operator!=(const LaurentPoly& a, const LaurentPoly& b) { return !(a == b); }

    LaurentPoly pow(int n) const;
    LaurentPoly diff(const std::string& v) const;
    LaurentPoly diff(int var_index) const;
    LaurentPoly substitute(const std::map<std::string, LaurentPoly>& bindings) const;
    LaurentPoly in_ring(const RingPtr& target) const;

    // coefficient polynomials of each power of variable v
    std::map<int, LaurentPoly> collect(const std::string& v) const;
    int max_degree(int var_index) const;
    int min_degree(int var_index) const;
    bool involves(int var_index) const;

    // weighted degree of each term; weights indexed by ring variable
    std::vector<Rational> term_weights(const std::vector<Rational>& w) const;

    std::complex<double> eval(const std::vector<std::complex<double>>& values) const;
    Rational eval_exact(const std::vector<Rational>& values) const;

    LaurentPoly map_coeffs(const std::function<Rational(const Mono&, const Rational&)>& f) const;
    LaurentPoly filter(const std::function<bool(const Mono&)>& keep) const;

    std::string to_string() const;
    nlohmann::json to_json() const;
    static LaurentPoly from_json(const nlohmann::json& j, const std::string& elog = "");

    // exact division by a single-term polynomial
    LaurentPoly div_monomial(const LaurentPoly& m) const;

private:
    friend class TermBuilder;
    void canonicalize(std::vector<Term>&& raw);
    void align(LaurentPoly& o);

    RingPtr ring_;
    std::vector<Term> terms_;
};

// graded lexicographic order on exponent vectors
bool grlex_less(const Mono& a, const Mono& b, int n);

Rational rational_pow(const Rational& r, int n);

} // namespace wf
