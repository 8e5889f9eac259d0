#include "doctest.h"

#include "wf/flat.hpp"

using namespace wf;

namespace {

struct TExpr {
    RingPtr r;
    LaurentPoly t(int j) const { return LaurentPoly::var(r, "t" + std::to_string(j)); }
    LaurentPoly E(int n = 1) const { return LaurentPoly::var(r, kESymbol, n); }
    LaurentPoly c(const Rational& q) const { return LaurentPoly::constant(r, q); }
};

// y^j -> y^j(t)
LaurentPoly in_t(const FlatChart& F, const std::map<int, Rational>& ycoef, const LaurentPoly& extra) {
    LaurentPoly s = extra;
    for (const auto& [j, c] : ycoef) s += c * F.y_of_t[j - 1];
    return s;
}

} // namespace

TEST_CASE("block recursion constants") {
    auto Z = build_z_chart(4, 1, 0);
    CHECK(Z.B2[1][2] == rat(1, 6));
    auto Z2 = build_z_chart(4, 1, 2);
    CHECK(Z2.B3[1][2] == rat(-1, 3));
    CHECK(Z.B2 == block_recursion_table(SeriesKind::CoshSinh, 3));
}

TEST_CASE("z chart reaches the reduced block form") {
    for (int l = 1; l <= 5; ++l)
        for (int k = 1; k <= l; ++k)
            for (int m = 0; m <= l - k; ++m) {
                INFO("l=" << l << " k=" << k << " m=" << m);
                ZChart Z;
                REQUIRE_NOTHROW(Z = build_z_chart(l, k, m));
                CHECK(Z.reduced_form_ok);
                CHECK(Z.eta == reduced_eta_form(l, k, m));
                // p_j weighted homogeneous of degree j/k
                std::vector<Rational> w(l + 2, 0);
                for (int i = 1; i <= l; ++i) w[i - 1] = rat(std::min(i, k), k);
                w[l + 1] = rat(1, k);
                for (int j = 1; j <= k; ++j)
                    for (const auto& x : Z.p[j - 1].term_weights(w)) CHECK(x == rat(j, k));
            }
}

TEST_CASE("Hankel blocks: triangular flat coordinates") {
    for (int n = 1; n <= 6; ++n) {
        const HankelFlat& H = hankel_flat(n);
        INFO("n=" << n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Rational want = 0;
                if (i + j == n - 1) want = (n == 1) ? 1 : ((i == 0 || i == n - 1) ? 2 : 4 * n);
                CHECK(H.eta[i][j] == want);
            }
        if (n >= 3) {
            // h_i depends on w_{i+1}..w_{n-1} only, h_{n-1} = 0
            CHECK(H.h[n - 2].is_zero());
            for (int i = 1; i < n; ++i)
                for (int j = 1; j <= i; ++j) CHECK_FALSE(H.h[i - 1].involves(H.wring->index_of("w" + std::to_string(j))));
        }
    }
    // C4, k = 1: t2 = w2 - 1/12 w3^2 w4, t3 = w3 w4 in the chart of the unshifted z
    const HankelFlat& H = hankel_flat(3);
    auto w = [&](const std::string& s) { return LaurentPoly::var(H.wring, s); };
    CHECK(H.b_of_w[1] == w("w2") * w("om"));
    CHECK(H.b_of_w[2] == w("om"));
    CHECK(H.b_of_w[0] == w("w1") - rat(1, 12) * w("w2").pow(2) * w("om"));
}

TEST_CASE("flat degrees and duality") {
    CHECK(flat_degrees(4, 1, 0) == std::vector<Rational>{1, rat(5, 6), rat(1, 2), rat(1, 6), 0});
    CHECK(flat_degrees(3, 2, 1) == std::vector<Rational>{rat(1, 2), 1, rat(1, 2), 0});
    CHECK(flat_degrees(5, 1, 2) ==
          std::vector<Rational>{1, rat(3, 4), rat(1, 4), rat(3, 4), rat(1, 4), 0});
    for (int l = 1; l <= 7; ++l)
        for (int k = 1; k <= l; ++k)
            for (int m = 0; m <= l - k; ++m) {
                auto d = flat_degrees(l, k, m);
                auto e = eta_closed_form(l, k, m);
                for (int i = 1; i <= l + 1; ++i) {
                    int s = dual_index(l, k, m, i);
                    CHECK(dual_index(l, k, m, s) == i);
                    CHECK(d[i - 1] + d[s - 1] == 1);
                    for (int j = 1; j <= l + 1; ++j) CHECK((e[i - 1][j - 1] != 0) == (j == s));
                }
            }
}

TEST_CASE("C3, k=1, m=0: stated flat coordinates and intersection form") {
    auto F = build_flat_chart(3, 1, 0);
    TExpr x{F.ring};
    // z^1 = y^1 + 6E, t1 = z^1 - 2E
    CHECK(in_t(F, {{1, 1}}, x.E() * Rational(4)) == x.t(1));
    // z^3 = t3^4
    CHECK(in_t(F, {{3, 1}, {2, 2}, {1, 4}}, Rational(8) * x.E()) == x.t(3).pow(4));
    // z^2 - z^3/6 = t2 t3
    CHECK(in_t(F, {{2, 1}, {1, 4}}, Rational(12) * x.E()) - rat(1, 6) * x.t(3).pow(4) == x.t(2) * x.t(3));
    auto M = flat_metrics(F);
    const auto& g = M.g.g;
    auto t = [&](int j) { return x.t(j); };
    CHECK(g(0, 0) == Rational(2) * t(2) * t(3) * x.E() + rat(1, 3) * t(3).pow(4) * x.E() + Rational(4) * x.E(2));
    CHECK(g(0, 1) == rat(7, 3) * t(3).pow(3) * x.E() + rat(7, 2) * t(2) * x.E());
    CHECK(g(0, 2) == rat(5, 2) * t(3) * x.E());
    CHECK(g(0, 3) == t(1));
    CHECK(g(1, 1) == Rational(12) * t(3).pow(2) * x.E() - rat(1, 4) * t(2).pow(2) +
                         rat(1, 12) * t(3).pow(3) * t(2) - rat(1, 108) * t(3).pow(6) +
                         rat(1, 4) * t(2).pow(3) * t(3).pow(-3));
    CHECK(g(1, 2) == Rational(2) * t(1) + Rational(4) * x.E() - rat(1, 3) * t(2) * t(3) +
                         rat(1, 72) * t(3).pow(4) - rat(1, 4) * t(2).pow(2) * t(3).pow(-2));
    CHECK(g(1, 3) == rat(3, 4) * t(2));
    CHECK(g(2, 2) == rat(1, 4) * t(2) * t(3).pow(-1) - rat(1, 12) * t(3).pow(2));
    CHECK(g(2, 3) == rat(1, 4) * t(3));
    CHECK(g(3, 3) == x.c(1));
    CHECK(M.eta[0][3] == 1);
    CHECK(M.eta[1][2] == 2);
}

TEST_CASE("C3, k=1, m=1: stated intersection form") {
    auto F = build_flat_chart(3, 1, 1);
    TExpr x{F.ring};
    auto t = [&](int j) { return x.t(j); };
    auto M = flat_metrics(F);
    const auto& g = M.g.g;
    CHECK(g(0, 0) == Rational(2) * t(2).pow(2) * x.E() - Rational(2) * t(3).pow(2) * x.E() + Rational(4) * x.E(2));
    CHECK(g(0, 1) == Rational(3) * t(2) * x.E());
    CHECK(g(0, 2) == Rational(-3) * t(3) * x.E());
    CHECK(g(1, 1) == Rational(2) * x.E() + t(1) - rat(1, 4) * t(3).pow(2) - rat(1, 4) * t(2).pow(2));
    CHECK(g(1, 2) == rat(-1, 2) * t(2) * t(3));
    CHECK(g(2, 2) == Rational(-2) * x.E() + t(1) - rat(1, 4) * t(2).pow(2) - rat(1, 4) * t(3).pow(2));
    CHECK(g(1, 3) == rat(1, 2) * t(2));
    CHECK(g(2, 3) == rat(1, 2) * t(3));
    CHECK(M.eta[1][1] == 1);
    CHECK(M.eta[2][2] == 1);
    CHECK(M.eta[0][3] == 1);
}

TEST_CASE("stated flat coordinates: C3 k=2 m=1, C4 k=1 m=0, C4 k=2 m=0") {
    {
        auto F = build_flat_chart(3, 2, 1);
        TExpr x{F.ring};
        // t1 = y1 - 2E, t2 = y2 - 2 y1 E + 6 E^2, t3^2 = 2y2 - 4y1E - y3 + 8E^2
        CHECK(in_t(F, {{1, 1}}, Rational(-2) * x.E()) == x.t(1));
        CHECK(F.y_of_t[1] - Rational(2) * F.y_of_t[0] * x.E() + Rational(6) * x.E(2) == x.t(2));
        CHECK(Rational(2) * F.y_of_t[1] - Rational(4) * F.y_of_t[0] * x.E() - F.y_of_t[2] + Rational(8) * x.E(2) ==
              x.t(3).pow(2));
    }
    {
        auto F = build_flat_chart(4, 1, 0);
        TExpr x{F.ring};
        auto z1 = in_t(F, {{1, 1}}, Rational(8) * x.E());
        auto z2 = in_t(F, {{2, 1}, {1, 6}}, Rational(24) * x.E());
        auto z3 = in_t(F, {{3, 1}, {2, 4}, {1, 12}}, Rational(32) * x.E());
        auto z4 = in_t(F, {{4, 1}, {3, 2}, {2, 4}, {1, 8}}, Rational(16) * x.E());
        CHECK(z1 - Rational(2) * x.E() == x.t(1));
        CHECK(z4 == x.t(4).pow(6));
        // w3 = (z3 - z4/4) t4^{-4}, t3 = w3 t4
        auto w3 = (z3 - rat(1, 4) * z4) * x.t(4).pow(-4);
        CHECK(w3 * x.t(4) == x.t(3));
        auto w2 = (z2 - rat(1, 6) * z3 + rat(1, 30) * z4) * x.t(4).pow(-1);
        CHECK(w2 - rat(1, 12) * w3.pow(2) * x.t(4) == x.t(2));
    }
    {
        auto F = build_flat_chart(4, 2, 0);
        TExpr x{F.ring};
        auto z1 = in_t(F, {{1, 1}}, Rational(8) * x.E());
        auto z2 = F.y_of_t[1] + Rational(6) * F.y_of_t[0] * x.E() + Rational(24) * x.E(2);
        auto z3 = F.y_of_t[2] + Rational(4) * F.y_of_t[1] + Rational(12) * F.y_of_t[0] * x.E() + Rational(32) * x.E(2);
        auto z4 = F.y_of_t[3] + Rational(2) * F.y_of_t[2] + Rational(4) * F.y_of_t[1] + Rational(8) * F.y_of_t[0] * x.E() +
                  Rational(16) * x.E(2);
        CHECK(z1 - Rational(4) * x.E() == x.t(1));
        CHECK(z2 - Rational(2) * z1 * x.E() + Rational(6) * x.E(2) == x.t(2));
        CHECK(z4 == x.t(4).pow(4));
        CHECK(z3 - rat(1, 6) * z4 == x.t(3) * x.t(4));
    }
}

TEST_CASE("flat metrics for all l <= 5") {
    for (int l = 1; l <= 5; ++l)
        for (int k = 1; k <= l; ++k)
            for (int m = 0; m <= l - k; ++m) {
                INFO("l=" << l << " k=" << k << " m=" << m);
                FlatChart F;
                REQUIRE_NOTHROW(F = build_flat_chart(l, k, m));
                FlatMetrics M;
                REQUIRE_NOTHROW(M = flat_metrics(F));
                CHECK(M.eta == eta_closed_form(l, k, m));
                int N = l - k - m;
                CHECK((M.eta == eta_closed_form(l, k, m, true)) == (N != 1 && m != 1));
                const auto& g = M.g.g;
                const auto& d = F.degrees;
                TExpr x{F.ring};
                for (int s = 1; s <= l; ++s) CHECK(g(s - 1, l) == d[s - 1] * x.t(s));
                CHECK(g(l, l) == x.c(rat(1, k)));
                // weighted homogeneity, deg E = 1/k
                std::vector<Rational> w(d.begin(), d.end() - 1);
                w.push_back(0);
                w.push_back(rat(1, k));
                for (int i = 0; i <= l; ++i)
                    for (int j = 0; j <= l; ++j)
                        for (const auto& q : g(i, j).term_weights(w)) CHECK(q == d[i] + d[j]);
                for (int j = 1; j <= l; ++j)
                    for (const auto& q : F.y_of_t[j - 1].term_weights(w)) CHECK(q == rat(std::min(j, k), k));
                // second path
                CHECK(flat_metric_stepwise(F) == g);
                // unity field is d/dt^k in both charts
                for (int j = 1; j <= l; ++j) {
                    auto dth = F.theta_of_t[j - 1].diff("t" + std::to_string(k));
                    CHECK(dth == x.c(unity_coeffs(l, k, m).c[j]));
                }
            }
}
