#include "doctest.h"

#include "wf/frobenius.hpp"

#include <fstream>
#include <json.hpp>

using namespace wf;

namespace {

nlohmann::json golden(const std::string& id) {
    std::ifstream in(std::string(WF_DATA_DIR) + "/golden/" + id + ".json");
    REQUIRE(in.good());
    return nlohmann::json::parse(in);
}

} // namespace

TEST_CASE("potentials match the worked examples") {
    for (std::string id : {"C3-k1-m0", "C3-k1-m1", "C3-k2-m1", "C4-k1-m0", "C4-k2-m0", "C5-k1-m2", "C6-k1-m2"}) {
        INFO(id);
        auto j = golden(id);
        auto d = solve_potential(j["l"], j["k"], j["m"]);
        auto G = LaurentPoly::from_json(j["potential"], "Y");
        CHECK(potentials_agree(d.F, G));
        for (size_t a = 0; a < d.chart.degrees.size(); ++a)
            CHECK(d.chart.degrees[a] == Rational(j["euler_degrees"][a].get<std::string>()));
        CHECK(d.euler.back() == Rational(j["euler_constant"].get<std::string>()));
        // canary: a perturbed potential must be rejected
        LaurentPoly bump = LaurentPoly::var(G.ring(), "t1", 3);
        CHECK_FALSE(potentials_agree(d.F, G + bump));
    }
}

TEST_CASE("Euler defect of the C3 k=1 m=0 potential") {
    auto d = solve_potential(3, 1, 0);
    const RingPtr& r = d.F.ring();
    LaurentPoly t1 = LaurentPoly::var(r, "t1");
    LaurentPoly defect = euler_apply(d, d.F) - Rational(2) * d.F;
    CHECK(is_quadratic(defect));
    CHECK(is_quadratic(defect - Rational(1, 2) * t1 * t1));
}

TEST_CASE("WDVV and axioms for l <= 5") {
    for (int l = 1; l <= 5; ++l)
        for (int k = 1; k <= l; ++k)
            for (int m = 0; m <= l - k; ++m) {
                INFO("l=" << l << " k=" << k << " m=" << m);
                FrobeniusData d;
                REQUIRE_NOTHROW(d = solve_potential(l, k, m));
                auto w = wdvv_check(d.F, d.metrics.eta, d.chart.coords);
                CHECK(w.ok);
                auto ax = axioms_check(d);
                for (const auto& f : ax.failures) INFO(f);
                CHECK(ax.ok);
                CHECK(ax.passed.size() == 7);
            }
}

TEST_CASE("WDVV sampled for l = 6") {
    for (int k = 1; k <= 6; ++k)
        for (int m = 0; m <= 6 - k; ++m) {
            INFO("k=" << k << " m=" << m);
            auto d = solve_potential(6, k, m, false);
            auto w = wdvv_check(d.F, d.metrics.eta, d.chart.coords, 200, 7 + k * 10 + m);
            CHECK(w.ok);
            CHECK(w.checked == 200);
        }
}

TEST_CASE("WDVV detects a perturbation") {
    auto d = solve_potential(4, 1, 0, false);
    const RingPtr& r = d.F.ring();
    LaurentPoly bad = d.F + LaurentPoly::var(r, "t2", 2) * LaurentPoly::var(r, kESymbol);
    CHECK_FALSE(wdvv_check(bad, d.metrics.eta, d.chart.coords).ok);
}

TEST_CASE("drop_affine and is_quadratic") {
    RingPtr r = make_ring({"t1", "t2", "Y", "_E"}, "Y");
    auto t1 = LaurentPoly::var(r, "t1"), t2 = LaurentPoly::var(r, "t2"), Y = LaurentPoly::var(r, "Y");
    auto E = LaurentPoly::var(r, kESymbol);
    CHECK(drop_affine(t1 + Y + LaurentPoly::constant(r, 3) + t1 * t2) == t1 * t2);
    CHECK(drop_affine(E) == E);
    CHECK(is_quadratic(t1 * t2 + Y * Y + t1));
    CHECK_FALSE(is_quadratic(t1 * t2 * Y));
    CHECK_FALSE(is_quadratic(E));
}

TEST_CASE("inverse of the constant metric") {
    auto e = eta_closed_form(4, 2, 1);
    auto inv = invert_rational(e);
    int n = static_cast<int>(e.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Rational s = 0;
            for (int a = 0; a < n; ++a) s += e[i][a] * inv[a][j];
            CHECK(s == (i == j ? 1 : 0));
        }
}

TEST_CASE("m and l-k-m give equivalent invariants") {
    auto a = equivalence_report(3, 1, 0);
    CHECK(a.degrees_equal);
    auto b = equivalence_report(4, 1, 1);
    CHECK(b.signature_equal);
    CHECK(b.degrees_equal);
}

TEST_CASE("Euler field and Christoffel row of the t^{l+1} direction") {
    auto d = solve_potential(3, 2, 1);
    CHECK(d.euler == std::vector<Rational>{rat(1, 2), Rational(1), rat(1, 2), rat(1, 2)});
    for (int l = 2; l <= 4; ++l)
        for (int k = 1; k <= l; ++k)
            for (int m = 0; m <= l - k; ++m) {
                auto e = solve_potential(l, k, m);
                const RingPtr& r = e.chart.ring;
                for (int j = 0; j < l; ++j)
                    for (int i = 0; i <= l; ++i) {
                        auto want = LaurentPoly::constant(r, i == j ? e.chart.degrees[j] : Rational(0));
                        CHECK(e.metrics.g.gamma[j](l, i).in_ring(r) == want);
                    }
            }
}

TEST_CASE("stated potential of C3 k=1 m=1") {
    auto d = solve_potential(3, 1, 1, false);
    const RingPtr& r = d.F.ring();
    auto t = [&](int i) { return LaurentPoly::var(r, i == 4 ? std::string("Y") : "t" + std::to_string(i)); };
    auto E = [&](int n) { return LaurentPoly::var(r, kESymbol, n); };
    auto h = Rational(1, 2);
    LaurentPoly want = h * t(1) * t(2) * t(2) + h * t(1) * t(3) * t(3) + h * t(1) * t(1) * t(4) -
                       rat(1, 48) * t(2) * t(2) * t(2) * t(2) - rat(1, 48) * t(3) * t(3) * t(3) * t(3) -
                       rat(1, 8) * t(2) * t(2) * t(3) * t(3) + t(2) * t(2) * E(1) - t(3) * t(3) * E(1) + h * E(2);
    CHECK(d.F == want);
}

TEST_CASE("solving is deterministic") {
    auto a = solve_potential(4, 2, 1, false), b = solve_potential(4, 2, 1, false);
    CHECK(a.F == b.F);
    CHECK(a.F.to_json().dump() == b.F.to_json().dump());
}

TEST_CASE("self-dual and rank-two cases") {
    auto s = equivalence_report(3, 1, 1);
    CHECK(s.degrees_equal);
    CHECK(s.signature_equal);
    CHECK(s.coefficient_degrees_equal);
    auto d = solve_potential(1, 1, 0, false);
    auto w = wdvv_check(d.F, d.metrics.eta, d.chart.coords);
    CHECK(w.ok);
}
