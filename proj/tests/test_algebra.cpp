#include "doctest.h"

#include "wf/laurent.hpp"
#include "wf/linalg.hpp"
#include "wf/series.hpp"

#include <random>

using namespace wf;

namespace {

RingPtr tring() { return make_ring({"t1", "t2", "t3", "t4", "_E"}, "t4"); }

LaurentPoly random_poly(const RingPtr& r, std::mt19937& g, int nterms) {
    std::uniform_int_distribution<int> ex(-2, 3), co(-5, 5), de(1, 4);
    LaurentPoly p(r);
    for (int i = 0; i < nterms; ++i) {
        Mono m;
        for (int v = 0; v < static_cast<int>(r->names.size()); ++v) m.e[v] = static_cast<int16_t>(ex(g));
        p += LaurentPoly::monomial(r, m, rat(co(g), de(g)));
    }
    return p;
}

// exact series of cosh(sqrt t/2) * (2 sinh(sqrt t/2)/sqrt t)^{2i-1}
PolySeries cosh_sinh_oracle(int i, int order) {
    PolySeries ch, sh;
    ch.order = sh.order = order;
    Rational fact = 1;
    for (int n = 0; n <= order; ++n) {
        if (n > 0) fact *= (2 * n - 1) * (2 * n);
        ch.c.push_back(1 / (rational_pow(4, n) * fact));
        sh.c.push_back(1 / (rational_pow(4, n) * fact * (2 * n + 1)));
    }
    PolySeries r = ch;
    for (int k = 0; k < 2 * i - 1; ++k) r = r * sh;
    return r;
}

} // namespace

TEST_CASE("arith examples") {
    auto r = tring();
    auto t1 = LaurentPoly::var(r, "t1");
    auto E = LaurentPoly::var(r, "_E");
    CHECK((t1 + E) * (t1 - E) == t1 * t1 - E * E);
    CHECK(E.pow(-1) * E == LaurentPoly::constant(r, 1));
    auto ur = make_ring({"u"});
    auto u = LaurentPoly::var(ur, "u");
    auto two = LaurentPoly::constant(ur, 2);
    CHECK((u - two).pow(2) == u * u - Rational(4) * u + LaurentPoly::constant(ur, 4));
    CHECK_THROWS_WITH_AS((t1 + E).pow(-1), "non-unit inversion", AlgebraError);
}

TEST_CASE("differentiate examples") {
    auto r = tring();
    auto t2 = LaurentPoly::var(r, "t2"), t3 = LaurentPoly::var(r, "t3");
    auto E = LaurentPoly::var(r, "_E");
    auto p = t2 * t3 + rat(1, 6) * t3.pow(4);
    CHECK(p.diff("t3") == t2 + rat(2, 3) * t3.pow(3));
    CHECK(E.pow(2).diff("t4") == Rational(2) * E.pow(2));
    CHECK((t3 * t2.pow(-1)).diff("t2") == -(t3 * t2.pow(-2)));
    CHECK_THROWS_AS(p.diff("zz"), AlgebraError);
}

TEST_CASE("substitute examples") {
    auto yr = make_ring({"y1", "y2", "y3", "y4", "_E"}, "y4");
    auto r = tring();
    auto y1 = LaurentPoly::var(yr, "y1");
    auto Ey = LaurentPoly::var(yr, "_E");
    auto t1 = LaurentPoly::var(r, "t1"), E = LaurentPoly::var(r, "_E");
    auto p = y1 + Rational(6) * Ey;
    auto s = p.substitute({{"y1", t1 - Rational(4) * E}, {"y4", LaurentPoly::var(r, "t4")}});
    CHECK(s == t1 + Rational(2) * E);
    CHECK(p.substitute({}) == p);
    auto zr = make_ring({"z3"});
    auto z3 = LaurentPoly::var(zr, "z3");
    auto t3 = LaurentPoly::var(r, "t3");
    CHECK(z3.pow(-1).substitute({{"z3", t3.pow(4)}}) == t3.pow(-4));
    CHECK_THROWS_WITH_AS(z3.pow(-1).substitute({{"z3", t3 + t1}}), "Laurent substitution into non-unit",
                         AlgebraError);
}

TEST_CASE("ring laws and Leibniz rule on random inputs") {
    std::mt19937 g(11);
    auto r = tring();
    for (int trial = 0; trial < 20; ++trial) {
        auto a = random_poly(r, g, 6), b = random_poly(r, g, 5), c = random_poly(r, g, 4);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a + b == b + a);
        CHECK((a - a).is_zero());
        for (const char* v : {"t1", "t3", "t4"})
            CHECK((a * b).diff(v) == a.diff(v) * b + a * b.diff(v));
        auto img = random_poly(r, g, 3);
        std::map<std::string, LaurentPoly> bind{{"t2", img}, {"t1", LaurentPoly::var(r, "t3") * Rational(2)}};
        auto ap = a.filter([](const Mono& m) { return m.e[0] >= 0 && m.e[1] >= 0; });
        auto bp = b.filter([](const Mono& m) { return m.e[0] >= 0 && m.e[1] >= 0; });
        CHECK((ap * bp).substitute(bind) == ap.substitute(bind) * bp.substitute(bind));
    }
}

TEST_CASE("json round trip is exact") {
    std::mt19937 g(3);
    auto r = tring();
    auto a = random_poly(r, g, 12);
    auto j = a.to_json();
    auto b = LaurentPoly::from_json(j, "t4");
    CHECK(a == b);
    CHECK(b.to_json().dump() == j.dump());
}

TEST_CASE("solve_linear") {
    auto s = solve_linear({{2, 0}, {0, 4}}, {1, 1});
    CHECK(s.x[0] == rat(1, 2));
    CHECK(s.x[1] == rat(1, 4));
    CHECK(s.kernel.empty());
    auto s2 = solve_linear({{1, 1, 0}, {2, 2, 0}}, {3, 6});
    CHECK(s2.kernel.size() == 2);
    CHECK(s2.x[0] + s2.x[1] == 3);
    for (const auto& k : s2.kernel) CHECK(k[0] + k[1] == 0);
    CHECK_THROWS_AS(solve_linear({{1, 1}, {2, 2}}, {1, 3}), InconsistentSystem);
    // the n=2 instance of the block recursion with kappa = i+j:
    // 4 B^1_2 + 2 B^2_2 = 4*2*(B^1_1 B^1_2 + B^1_2 B^1_1), B^2_2 = 1
    auto s3 = solve_linear({{Rational(4) - 16}}, {Rational(-2)});
    CHECK(s3.x[0] == rat(1, 6));
}

TEST_CASE("invert_unit_jacobian") {
    auto r = tring();
    auto I = PolyMatrix::identity(3, r);
    CHECK(invert_unit_jacobian(I) == I);
    auto t3 = LaurentPoly::var(r, "t3"), E = LaurentPoly::var(r, "_E");
    auto t1 = LaurentPoly::var(r, "t1"), t2 = LaurentPoly::var(r, "t2");
    PolyMatrix J(2, 2, r);
    J(0, 0) = LaurentPoly::constant(r, 1);
    J(0, 1) = Rational(2) * E;
    J(1, 1) = Rational(4) * t3.pow(3);
    auto inv = invert_unit_jacobian(J);
    CHECK(inv(0, 0) == LaurentPoly::constant(r, 1));
    CHECK(inv(0, 1) == -(rat(1, 2) * E * t3.pow(-3)));
    CHECK(inv(1, 1) == rat(1, 4) * t3.pow(-3));
    CHECK((inv * J) == PolyMatrix::identity(2, r));
    PolyMatrix K(2, 2, r);
    K(0, 0) = t1;
    K(0, 1) = LaurentPoly::constant(r, -1);
    K(1, 0) = t2;
    K(1, 1) = LaurentPoly::constant(r, 1);
    CHECK_THROWS_WITH_AS(invert_unit_jacobian(K), "non-unit Jacobian", AlgebraError);
    // a unit determinant with no monomial pivot available
    PolyMatrix M(2, 2, r);
    M(0, 0) = t1 + LaurentPoly::constant(r, 1);
    M(0, 1) = t1;
    M(1, 0) = t1;
    M(1, 1) = t1 - LaurentPoly::constant(r, 1);
    auto Mi = invert_unit_jacobian(M);
    CHECK(Mi * M == PolyMatrix::identity(2, r));
}

TEST_CASE("series_coeffs examples") {
    auto a = series_coeffs(SeriesKind::CoshSinh, 1, 2);
    CHECK(a.c == std::vector<Rational>{1, rat(1, 6), rat(1, 120)});
    auto b = series_coeffs(SeriesKind::Tanh, 1, 2);
    CHECK(b.c == std::vector<Rational>{1, rat(-1, 3), rat(2, 15)});
    CHECK(series_coeffs(SeriesKind::Tanh, 3, 0).c == std::vector<Rational>{1});
    CHECK(series_coeffs(SeriesKind::CoshSinh, 2, 0).c == std::vector<Rational>{1});
}

TEST_CASE("series agree with the closed-form cosh/sinh product") {
    for (int i = 1; i <= 4; ++i) CHECK(series_coeffs(SeriesKind::CoshSinh, i, 6).c == cosh_sinh_oracle(i, 6).c);
}

TEST_CASE("recursion holds for both kappa variants") {
    for (auto kind : {SeriesKind::CoshSinh, SeriesKind::Tanh})
        for (int i = 1; i <= 5; ++i)
            for (int j = 1; i + j <= 6; ++j) CHECK(series_recursion_holds(kind, i, j, 6));
}
