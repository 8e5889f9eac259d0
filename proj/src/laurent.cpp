#include "wf/laurent.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace wf {

namespace {

struct MonoHash {
    size_t operator()(const Mono& m) const {
        uint64_t h = 1469598103934665603ull;
        for (int16_t x : m.e) {
            h ^= static_cast<uint16_t>(x);
            h *= 1099511628211ull;
        }
        return static_cast<size_t>(h);
    }
};

Mono add_mono(const Mono& a, const Mono& b, int n) {
    Mono r;
    for (int i = 0; i < n; ++i) {
        int s = a.e[i] + b.e[i];
        if (s > 32767 || s < -32768) throw AlgebraError("exponent overflow");
        r.e[i] = static_cast<int16_t>(s);
    }
    return r;
}

} // namespace

int Ring::index_of(const std::string& name) const {
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

RingPtr make_ring(const std::vector<std::string>& names, const std::string& elog) {
    if (names.size() > static_cast<size_t>(kMaxVars)) throw AlgebraError("too many variables");
    auto r = std::make_shared<Ring>();
    r->names = names;
    r->e_index = r->index_of(kESymbol);
    if (!elog.empty()) {
        r->elog_index = r->index_of(elog);
        if (r->elog_index < 0) throw AlgebraError("elog symbol not in ring: " + elog);
    }
    for (size_t i = 0; i < names.size(); ++i)
        for (size_t j = i + 1; j < names.size(); ++j)
            if (names[i] == names[j]) throw AlgebraError("duplicate symbol " + names[i]);
    return r;
}

RingPtr merge_rings(const RingPtr& a, const RingPtr& b) {
    if (!a) return b;
    if (!b || a == b || *a == *b) return a;
    std::vector<std::string> names = a->names;
    for (const auto& n : b->names)
        if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    std::string elog;
    if (a->elog_index >= 0) elog = a->names[a->elog_index];
    if (b->elog_index >= 0) {
        const std::string& eb = b->names[b->elog_index];
        if (!elog.empty() && elog != eb) throw AlgebraError("incompatible exponential symbols");
        elog = eb;
    }
    return make_ring(names, elog);
}

bool grlex_less(const Mono& a, const Mono& b, int n) {
    int ta = a.total(n), tb = b.total(n);
    if (ta != tb) return ta < tb;
    for (int i = 0; i < n; ++i)
        if (a.e[i] != b.e[i]) return a.e[i] < b.e[i];
    return false;
}

Rational rational_pow(const Rational& r, int n) {
    if (n < 0) {
        if (r == 0) throw AlgebraError("division by zero");
        Rational inv = 1 / r;
        return rational_pow(inv, -n);
    }
    Rational out = 1, b = r;
    while (n) {
        if (n & 1) out *= b;
        b *= b;
        n >>= 1;
    }
    return out;
}

LaurentPoly LaurentPoly::constant(const RingPtr& ring, const Rational& c) {
    LaurentPoly p(ring);
    if (c != 0) p.terms_.push_back({Mono{}, c});
    return p;
}

LaurentPoly LaurentPoly::var(const RingPtr& ring, const std::string& name, int power) {
    int i = ring->index_of(name);
    if (i < 0) throw AlgebraError("unknown symbol " + name);
    Mono m;
    m.e[i] = static_cast<int16_t>(power);
    return monomial(ring, m, 1);
}

LaurentPoly LaurentPoly::monomial(const RingPtr& ring, const Mono& m, const Rational& c) {
    LaurentPoly p(ring);
    if (c != 0) p.terms_.push_back({m, c});
    return p;
}

bool LaurentPoly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].m == Mono{});
}

Rational LaurentPoly::constant_term() const { return coeff(Mono{}); }

Rational LaurentPoly::coeff(const Mono& m) const {
    int n = nvars();
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [n](const Term& t, const Mono& x) { return grlex_less(t.m, x, n); });
    if (it != terms_.end() && it->m == m) return it->c;
    return 0;
}

void LaurentPoly::canonicalize(std::vector<Term>&& raw) {
    int n = nvars();
    std::sort(raw.begin(), raw.end(),
              [n](const Term& a, const Term& b) { return grlex_less(a.m, b.m, n); });
    terms_.clear();
    terms_.reserve(raw.size());
    for (auto& t : raw) {
        if (!terms_.empty() && terms_.back().m == t.m) {
            terms_.back().c += t.c;
        } else {
            if (!terms_.empty() && terms_.back().c == 0) terms_.pop_back();
            terms_.push_back(std::move(t));
        }
    }
    if (!terms_.empty() && terms_.back().c == 0) terms_.pop_back();
}

LaurentPoly LaurentPoly::in_ring(const RingPtr& target) const {
    if (ring_ == target || (ring_ && target && *ring_ == *target)) {
        LaurentPoly p = *this;
        p.ring_ = target;
        return p;
    }
    LaurentPoly p(target);
    if (!ring_) return p;
    std::vector<int> map(ring_->names.size());
    for (size_t i = 0; i < ring_->names.size(); ++i) {
        map[i] = target->index_of(ring_->names[i]);
        if (map[i] < 0) {
            bool used = false;
            for (const auto& t : terms_) used = used || t.m.e[i] != 0;
            if (used) throw AlgebraError("symbol " + ring_->names[i] + " missing in target ring");
        }
    }
    std::vector<Term> raw;
    raw.reserve(terms_.size());
    for (const auto& t : terms_) {
        Mono m;
        for (size_t i = 0; i < map.size(); ++i)
            if (map[i] >= 0) m.e[map[i]] = t.m.e[i];
        raw.push_back({m, t.c});
    }
    p.canonicalize(std::move(raw));
    return p;
}

void LaurentPoly::align(LaurentPoly& o) {
    if (ring_ == o.ring_) return;
    if (!ring_) {
        ring_ = o.ring_;
        return;
    }
    if (!o.ring_) {
        o.ring_ = ring_;
        return;
    }
    if (*ring_ == *o.ring_) {
        o.ring_ = ring_;
        return;
    }
    RingPtr r = merge_rings(ring_, o.ring_);
    *this = in_ring(r);
    o = o.in_ring(r);
}

LaurentPoly LaurentPoly::operator-() const {
    LaurentPoly p = *this;
    for (auto& t : p.terms_) t.c = -t.c;
    return p;
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& o_in) {
    if (o_in.terms_.empty()) {
        if (!ring_) ring_ = o_in.ring_;
        return *this;
    }
    LaurentPoly o = o_in;
    align(o);
    int n = nvars();
    std::vector<Term> out;
    out.reserve(terms_.size() + o.terms_.size());
    size_t i = 0, j = 0;
    while (i < terms_.size() || j < o.terms_.size()) {
        if (j == o.terms_.size() || (i < terms_.size() && grlex_less(terms_[i].m, o.terms_[j].m, n))) {
            out.push_back(std::move(terms_[i++]));
        } else if (i == terms_.size() || grlex_less(o.terms_[j].m, terms_[i].m, n)) {
            out.push_back(std::move(o.terms_[j++]));
        } else {
            Rational c = terms_[i].c + o.terms_[j].c;
            if (c != 0) out.push_back({terms_[i].m, c});
            ++i;
            ++j;
        }
    }
    terms_ = std::move(out);
    return *this;
}

LaurentPoly& LaurentPoly::operator-=(const LaurentPoly& o) { return *this += -o; }

LaurentPoly& LaurentPoly::operator*=(const LaurentPoly& o) {
    *this = *this * o;
    return *this;
}

LaurentPoly& LaurentPoly::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& t : terms_) t.c *= c;
    return *this;
}

LaurentPoly operator*(const LaurentPoly& a_in, const LaurentPoly& b_in) {
    if (a_in.terms_.empty() || b_in.terms_.empty()) {
        LaurentPoly z(a_in.ring_ ? a_in.ring_ : b_in.ring_);
        if (a_in.ring_ && b_in.ring_) z.ring_ = merge_rings(a_in.ring_, b_in.ring_);
        return z;
    }
    const LaurentPoly* pa = &a_in;
    const LaurentPoly* pb = &b_in;
    LaurentPoly ca, cb;
    if (a_in.ring_ != b_in.ring_ && !(*a_in.ring_ == *b_in.ring_)) {
        ca = a_in;
        cb = b_in;
        ca.align(cb);
        pa = &ca;
        pb = &cb;
    }
    int n = pa->nvars();
    LaurentPoly out(pa->ring_);
    if (pa->terms_.size() == 1 || pb->terms_.size() == 1) {
        const LaurentPoly& single = pa->terms_.size() == 1 ? *pa : *pb;
        const LaurentPoly& other = pa->terms_.size() == 1 ? *pb : *pa;
        const Term& s = single.terms_[0];
        // shifting by a fixed monomial preserves grlex order
        out.terms_.reserve(other.terms_.size());
        for (const auto& t : other.terms_) out.terms_.push_back({add_mono(t.m, s.m, n), t.c * s.c});
        return out;
    }
    std::unordered_map<Mono, Rational, MonoHash> acc;
    acc.reserve(pa->terms_.size() * pb->terms_.size());
    Rational tmp;
    for (const auto& x : pa->terms_)
        for (const auto& y : pb->terms_) {
            tmp = x.c * y.c;
            auto [it, inserted] = acc.try_emplace(add_mono(x.m, y.m, n), tmp);
            if (!inserted) it->second += tmp;
        }
    std::vector<Term> raw;
    raw.reserve(acc.size());
    for (auto& [m, c] : acc)
        if (c != 0) raw.push_back({m, std::move(c)});
    out.canonicalize(std::move(raw));
    return out;
}

bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
    if (a.terms_.empty() || b.terms_.empty()) return a.terms_.empty() && b.terms_.empty();
    if (a.ring_ == b.ring_ || *a.ring_ == *b.ring_) {
        if (a.terms_.size() != b.terms_.size()) return false;
        for (size_t i = 0; i < a.terms_.size(); ++i)
            if (!(a.terms_[i].m == b.terms_[i].m) || a.terms_[i].c != b.terms_[i].c) return false;
        return true;
    }
    return (a - b).is_zero();
}

LaurentPoly LaurentPoly::pow(int n) const {
    if (n < 0) {
        if (terms_.size() != 1) throw AlgebraError("non-unit inversion");
        Mono m;
        for (int i = 0; i < nvars(); ++i) m.e[i] = static_cast<int16_t>(-terms_[0].m.e[i]);
        return monomial(ring_, m, 1 / terms_[0].c).pow(-n);
    }
    LaurentPoly result = constant(ring_, 1);
    LaurentPoly base = *this;
    while (n) {
        if (n & 1) result = result * base;
        n >>= 1;
        if (n) base = base * base;
    }
    return result;
}

LaurentPoly LaurentPoly::diff(const std::string& v) const {
    if (!ring_) return *this;
    int i = ring_->index_of(v);
    if (i < 0) throw AlgebraError("unknown symbol " + v);
    return diff(i);
}

LaurentPoly LaurentPoly::diff(int i) const {
    LaurentPoly out(ring_);
    if (!ring_) return out;
    bool elog = (i == ring_->elog_index) && ring_->e_index >= 0;
    int ei = ring_->e_index;
    std::vector<Term> raw;
    raw.reserve(terms_.size() * (elog ? 2 : 1));
    for (const auto& t : terms_) {
        if (t.m.e[i] != 0) {
            Term d{t.m, t.c * t.m.e[i]};
            d.m.e[i] = static_cast<int16_t>(d.m.e[i] - 1);
            raw.push_back(std::move(d));
        }
        if (elog && t.m.e[ei] != 0) raw.push_back({t.m, t.c * t.m.e[ei]});
    }
    out.canonicalize(std::move(raw));
    return out;
}

LaurentPoly LaurentPoly::substitute(const std::map<std::string, LaurentPoly>& bindings) const {
    if (!ring_) return *this;
    std::vector<std::string> keep;
    for (const auto& n : ring_->names)
        if (!bindings.count(n)) keep.push_back(n);
    std::string elog;
    if (ring_->elog_index >= 0 && !bindings.count(ring_->names[ring_->elog_index]))
        elog = ring_->names[ring_->elog_index];
    RingPtr target = make_ring(keep, elog.empty() ? "" : elog);
    if (keep.empty() && elog.empty()) target = nullptr;
    for (const auto& [name, img] : bindings) {
        if (ring_->index_of(name) < 0) continue;
        target = merge_rings(target, img.ring());
    }
    if (!target) target = make_ring({});
    int n = nvars();
    std::vector<LaurentPoly> images(n);
    for (int i = 0; i < n; ++i) {
        auto it = bindings.find(ring_->names[i]);
        if (it != bindings.end())
            images[i] = it->second.in_ring(target);
        else
            images[i] = var(target, ring_->names[i]);
    }
    std::vector<std::map<int, LaurentPoly>> cache(n);
    auto power = [&](int i, int e) -> const LaurentPoly& {
        auto it = cache[i].find(e);
        if (it != cache[i].end()) return it->second;
        LaurentPoly p;
        if (e < 0) {
            if (images[i].size() != 1) throw AlgebraError("Laurent substitution into non-unit");
            p = images[i].pow(e);
        } else if (e == 0) {
            p = constant(target, 1);
        } else if (e == 1) {
            p = images[i];
        } else {
            auto prev = cache[i].find(e - 1);
            p = prev != cache[i].end() ? prev->second * images[i] : images[i].pow(e);
        }
        return cache[i].emplace(e, std::move(p)).first->second;
    };
    // group terms by the substituted part to share products
    LaurentPoly acc(target);
    std::vector<Term> buffer;
    for (const auto& t : terms_) {
        LaurentPoly prod = constant(target, t.c);
        for (int i = 0; i < n; ++i)
            if (t.m.e[i] != 0) prod = prod * power(i, t.m.e[i]);
        acc += prod;
    }
    return acc;
}

std::map<int, LaurentPoly> LaurentPoly::collect(const std::string& v) const {
    std::map<int, LaurentPoly> out;
    int i = ring_ ? ring_->index_of(v) : -1;
    if (i < 0) {
        if (!is_zero()) out[0] = *this;
        return out;
    }
    std::map<int, std::vector<Term>> raw;
    for (const auto& t : terms_) {
        Term c = t;
        int e = c.m.e[i];
        c.m.e[i] = 0;
        raw[e].push_back(std::move(c));
    }
    for (auto& [e, ts] : raw) {
        LaurentPoly p(ring_);
        p.canonicalize(std::move(ts));
        out.emplace(e, std::move(p));
    }
    return out;
}

int LaurentPoly::max_degree(int i) const {
    int m = 0;
    bool first = true;
    for (const auto& t : terms_) {
        if (first || t.m.e[i] > m) m = t.m.e[i];
        first = false;
    }
    return m;
}

int LaurentPoly::min_degree(int i) const {
    int m = 0;
    bool first = true;
    for (const auto& t : terms_) {
        if (first || t.m.e[i] < m) m = t.m.e[i];
        first = false;
    }
    return m;
}

bool LaurentPoly::involves(int i) const {
    for (const auto& t : terms_)
        if (t.m.e[i] != 0) return true;
    return false;
}

std::vector<Rational> LaurentPoly::term_weights(const std::vector<Rational>& w) const {
    std::vector<Rational> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) {
        Rational s = 0;
        for (int i = 0; i < nvars(); ++i)
            if (t.m.e[i]) s += w[i] * t.m.e[i];
        out.push_back(s);
    }
    return out;
}

std::complex<double> LaurentPoly::eval(const std::vector<std::complex<double>>& values) const {
    std::complex<double> s = 0;
    int n = nvars();
    for (const auto& t : terms_) {
        std::complex<double> v = t.c.get_d();
        for (int i = 0; i < n; ++i)
            if (t.m.e[i]) v *= std::pow(values[i], static_cast<int>(t.m.e[i]));
        s += v;
    }
    return s;
}

Rational LaurentPoly::eval_exact(const std::vector<Rational>& values) const {
    Rational s = 0;
    int n = nvars();
    for (const auto& t : terms_) {
        Rational v = t.c;
        for (int i = 0; i < n; ++i)
            if (t.m.e[i]) v *= rational_pow(values[i], t.m.e[i]);
        s += v;
    }
    return s;
}

LaurentPoly LaurentPoly::map_coeffs(
    const std::function<Rational(const Mono&, const Rational&)>& f) const {
    LaurentPoly out(ring_);
    for (const auto& t : terms_) {
        Rational c = f(t.m, t.c);
        if (c != 0) out.terms_.push_back({t.m, c});
    }
    return out;
}

LaurentPoly LaurentPoly::filter(const std::function<bool(const Mono&)>& keep) const {
    LaurentPoly out(ring_);
    for (const auto& t : terms_)
        if (keep(t.m)) out.terms_.push_back(t);
    return out;
}

LaurentPoly LaurentPoly::div_monomial(const LaurentPoly& m) const {
    if (m.size() != 1) throw AlgebraError("non-unit inversion");
    return *this * m.pow(-1);
}

std::string LaurentPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    int n = nvars();
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        Rational c = it->c;
        bool neg = c < 0;
        if (neg) c = -c;
        if (first)
            os << (neg ? "-" : "");
        else
            os << (neg ? " - " : " + ");
        first = false;
        bool unit = (c == 1);
        bool any = false;
        if (!unit) {
            os << c.get_str();
        }
        for (int i = 0; i < n; ++i) {
            int e = it->m.e[i];
            if (!e) continue;
            if (!unit || any) os << "*";
            any = true;
            const std::string& name = ring_->names[i];
            if (name == kESymbol) {
                os << "e^(" << (e == 1 ? "" : std::to_string(e) + "*")
                   << (ring_->elog_index >= 0 ? ring_->names[ring_->elog_index] : std::string("x"))
                   << ")";
            } else {
                os << name;
                if (e != 1) os << "^" << (e < 0 ? "(" + std::to_string(e) + ")" : std::to_string(e));
            }
        }
        if (unit && !any) os << "1";
    }
    return os.str();
}

nlohmann::json LaurentPoly::to_json() const {
    nlohmann::json j;
    j["vars"] = ring_ ? ring_->names : std::vector<std::string>{};
    nlohmann::json ts = nlohmann::json::array();
    int n = nvars();
    for (const auto& t : terms_) {
        std::vector<int> e(t.m.e.begin(), t.m.e.begin() + n);
        ts.push_back({{"coeff", t.c.get_str()}, {"exps", e}});
    }
    j["terms"] = ts;
    return j;
}

LaurentPoly LaurentPoly::from_json(const nlohmann::json& j, const std::string& elog) {
    std::vector<std::string> names = j.at("vars").get<std::vector<std::string>>();
    RingPtr r = make_ring(names, elog);
    LaurentPoly p(r);
    std::vector<Term> raw;
    for (const auto& t : j.at("terms")) {
        auto e = t.at("exps").get<std::vector<int>>();
        if (e.size() != names.size()) throw AlgebraError("exponent arity mismatch");
        Mono m;
        for (size_t i = 0; i < e.size(); ++i) m.e[i] = static_cast<int16_t>(e[i]);
        raw.push_back({m, parse_rational(t.at("coeff").get<std::string>())});
    }
    p.canonicalize(std::move(raw));
    return p;
}

} // namespace wf
