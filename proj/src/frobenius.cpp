#include "wf/frobenius.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <random>
#include <sstream>

namespace wf {

namespace {

// antiderivative of a single term in variable v
void integrate_term(const RingPtr& r, int v, Mono m, Rational c, std::vector<Term>& out) {
    bool ylike = v == r->elog_index && r->e_index >= 0;
    int n = ylike ? m.e[r->e_index] : 0;
    if (!ylike || n == 0) {
        int e = m.e[v];
        if (e == -1) throw AlgebraError("logarithmic antiderivative");
        m.e[v] = static_cast<int16_t>(e + 1);
        out.push_back({m, c / (e + 1)});
        return;
    }
    // int Y^p E^n = Y^p E^n / n - p/n int Y^{p-1} E^n
    int p = m.e[v];
    if (p < 0) throw AlgebraError("negative power of the exponential variable");
    Rational cn = c / n;
    out.push_back({m, cn});
    if (p > 0) {
        m.e[v] = static_cast<int16_t>(p - 1);
        integrate_term(r, v, m, -cn * p, out);
    }
}

LaurentPoly integrate(const LaurentPoly& f, const std::string& var) {
    const RingPtr& r = f.ring();
    int v = r->index_of(var);
    std::vector<Term> raw;
    for (const auto& t : f.terms()) integrate_term(r, v, t.m, t.c, raw);
    LaurentPoly s(r);
    for (const auto& t : raw) s += LaurentPoly::monomial(r, t.m, t.c);
    return s;
}

bool depends_on(const LaurentPoly& p, const std::string& var) {
    const RingPtr& r = p.ring();
    int v = r->index_of(var);
    if (p.involves(v)) return true;
    return v == r->elog_index && r->e_index >= 0 && p.involves(r->e_index);
}

// f with df = w over the listed coordinates
LaurentPoly integrate_closed(const std::vector<LaurentPoly>& w, const std::vector<std::string>& coords,
                             const RingPtr& r) {
    LaurentPoly f(r);
    for (size_t a = 0; a < coords.size(); ++a) {
        LaurentPoly rest = w[a].in_ring(r) - f.diff(coords[a]);
        for (size_t b = 0; b < a; ++b)
            if (depends_on(rest, coords[b])) throw AlgebraError("Hessian is not closed");
        f += integrate(rest, coords[a]);
    }
    for (size_t a = 0; a < coords.size(); ++a)
        if (f.diff(coords[a]) != w[a].in_ring(r)) throw AlgebraError("Hessian is not closed");
    return f;
}

Rational mono_weight(const FrobeniusData& d, const RingPtr& r, const Mono& m, bool& bare_y) {
    int l = d.chart.l;
    Rational s = 0;
    for (int a = 0; a < l; ++a) s += d.chart.degrees[a] * m.e[a];
    bare_y = m.e[r->index_of("Y")] != 0;
    if (r->e_index >= 0) s += rat(m.e[r->e_index], d.chart.k);
    return s;
}

} // namespace

QMatrix invert_rational(const QMatrix& A) {
    int n = static_cast<int>(A.size());
    QMatrix B(n, std::vector<Rational>(n, 0));
    for (int c = 0; c < n; ++c) {
        std::vector<Rational> e(n, 0);
        e[c] = 1;
        auto s = solve_linear(A, e);
        if (!s.kernel.empty()) throw AlgebraError("singular constant metric");
        for (int i = 0; i < n; ++i) B[i][c] = s.x[i];
    }
    return B;
}

LaurentPoly drop_affine(const LaurentPoly& p) {
    const RingPtr& r = p.ring();
    int n = p.nvars();
    return p.filter([&](const Mono& m) {
        if (r->e_index >= 0 && m.e[r->e_index] != 0) return true;
        int tot = 0;
        for (int i = 0; i < n; ++i) {
            if (m.e[i] < 0) return true;
            tot += m.e[i];
        }
        return tot > 1;
    });
}

bool is_quadratic(const LaurentPoly& p) {
    const RingPtr& r = p.ring();
    int n = p.nvars();
    for (const auto& t : p.terms()) {
        if (r->e_index >= 0 && t.m.e[r->e_index] != 0) return false;
        int tot = 0;
        for (int i = 0; i < n; ++i) {
            if (t.m.e[i] < 0) return false;
            tot += t.m.e[i];
        }
        if (tot > 2) return false;
    }
    return true;
}

bool potentials_agree(const LaurentPoly& F, const LaurentPoly& G) {
    RingPtr r = merge_rings(F.ring(), G.ring());
    return is_quadratic(F.in_ring(r) - G.in_ring(r));
}

FrobeniusData solve_potential(int l, int k, int m, bool christoffel) {
    FlatChart c = build_flat_chart(l, k, m);
    FlatMetrics fm = flat_metrics(c, christoffel);
    return solve_potential(std::move(c), std::move(fm));
}

FrobeniusData solve_potential(FlatChart chart, FlatMetrics metrics) {
    FrobeniusData d;
    d.chart = std::move(chart);
    d.metrics = std::move(metrics);
    int l = d.chart.l, k = d.chart.k, n = l + 1;
    const RingPtr& r = d.chart.ring;
    d.euler = d.chart.degrees;
    d.euler.back() = rat(1, k);
    d.eta_low = invert_rational(d.metrics.eta);
    const PolyMatrix& g = d.metrics.g.g;
    d.Fup.assign(n, std::vector<LaurentPoly>(n, LaurentPoly(r)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == l && j == l) {
                d.Fup[i][j] = LaurentPoly::var(r, "Y");
                continue;
            }
            Rational lam = d.chart.degrees[i] + d.chart.degrees[j];
            LaurentPoly gij = g(i, j).in_ring(r);
            for (const auto& t : gij.terms()) {
                bool bare = false;
                Rational w = mono_weight(d, r, t.m, bare);
                if (bare || w != lam)
                    throw AlgebraError("g^{" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                       "} is not an eigenvector of the Euler field");
            }
            d.Fup[i][j] = gij * (1 / lam);
        }
    // H_{ab} = eta_{ai} eta_{bj} F^{ij}
    std::vector<std::vector<LaurentPoly>> H(n, std::vector<LaurentPoly>(n, LaurentPoly(r)));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int i = 0; i < n; ++i) {
                if (d.eta_low[a][i] == 0) continue;
                for (int j = 0; j < n; ++j)
                    if (d.eta_low[b][j] != 0) H[a][b] += d.eta_low[a][i] * d.eta_low[b][j] * d.Fup[i][j];
            }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < a; ++b)
            if (H[a][b] != H[b][a]) throw AlgebraError("Hessian is not symmetric");
    const auto& coords = d.chart.coords;
    std::vector<LaurentPoly> grad;
    for (int a = 0; a < n; ++a) grad.push_back(integrate_closed(H[a], coords, r));
    d.F = drop_affine(integrate_closed(grad, coords, r));
    return d;
}

LaurentPoly euler_apply(const FrobeniusData& d, const LaurentPoly& p) {
    const RingPtr& r = p.ring();
    LaurentPoly s(r);
    int l = d.chart.l;
    for (int a = 0; a < l; ++a) {
        auto v = "t" + std::to_string(a + 1);
        if (d.euler[a] != 0) s += d.euler[a] * (LaurentPoly::var(r, v) * p.diff(v));
    }
    s += d.euler[l] * p.diff("Y");
    return s;
}

WdvvReport wdvv_check(const LaurentPoly& F, const QMatrix& eta, const std::vector<std::string>& coords, int samples,
                      uint64_t seed) {
    int n = static_cast<int>(coords.size());
    const RingPtr& r = F.ring();
    // c3[a][b][c] = F_abc
    std::vector<std::vector<LaurentPoly>> F2(n, std::vector<LaurentPoly>(n, LaurentPoly(r)));
    for (int a = 0; a < n; ++a) {
        auto Fa = F.diff(coords[a]);
        for (int b = a; b < n; ++b) F2[a][b] = F2[b][a] = Fa.diff(coords[b]);
    }
    std::vector<std::vector<std::vector<LaurentPoly>>> c3(
        n, std::vector<std::vector<LaurentPoly>>(n, std::vector<LaurentPoly>(n, LaurentPoly(r))));
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
            for (int c = b; c < n; ++c) {
                auto v = F2[a][b].diff(coords[c]);
                c3[a][b][c] = c3[a][c][b] = c3[b][a][c] = c3[b][c][a] = c3[c][a][b] = c3[c][b][a] = v;
            }
    // c_{ab}^e = F_{abf} eta^{fe}
    std::vector<std::vector<std::vector<LaurentPoly>>> up(
        n, std::vector<std::vector<LaurentPoly>>(n, std::vector<LaurentPoly>(n, LaurentPoly(r))));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int e = 0; e < n; ++e)
                for (int f = 0; f < n; ++f)
                    if (eta[f][e] != 0 && !c3[a][b][f].is_zero()) up[a][b][e] += eta[f][e] * c3[a][b][f];
    WdvvReport rep;
    auto check = [&](int i, int j, int p, int q) {
        LaurentPoly s(r);
        for (int e = 0; e < n; ++e) {
            if (!up[i][j][e].is_zero() && !c3[e][p][q].is_zero()) s += up[i][j][e] * c3[e][p][q];
            if (!up[p][j][e].is_zero() && !c3[e][i][q].is_zero()) s -= up[p][j][e] * c3[e][i][q];
        }
        rep.max_terms = std::max(rep.max_terms, s.size());
        ++rep.checked;
        if (!s.is_zero()) {
            rep.ok = false;
            rep.failures.push_back({i + 1, j + 1, p + 1, q + 1});
        }
    };
    if (samples <= 0) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int p = i + 1; p < n; ++p)
                    for (int q = 0; q < n; ++q) check(i, j, p, q);
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> u(0, n - 1);
        for (int s = 0; s < samples; ++s) {
            int i = u(rng), j = u(rng), p = u(rng), q = u(rng);
            check(i, j, p, q);
        }
    }
    return rep;
}

AxiomReport axioms_check(const FrobeniusData& d) {
    AxiomReport rep;
    auto rec = [&](bool ok, const std::string& what) {
        if (ok)
            rep.passed.push_back(what);
        else {
            rep.ok = false;
            rep.failures.push_back(what);
        }
    };
    int l = d.chart.l, k = d.chart.k, n = l + 1;
    const auto& coords = d.chart.coords;
    const RingPtr& r = d.chart.ring;
    LaurentPoly F = d.F.in_ring(r);
    std::vector<std::vector<LaurentPoly>> F2(n, std::vector<LaurentPoly>(n, LaurentPoly(r)));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) F2[a][b] = F.diff(coords[a]).diff(coords[b]);
    // unity
    bool unity = true;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (F2[i][j].diff(coords[k - 1]) != LaurentPoly::constant(r, d.eta_low[i][j])) unity = false;
    rec(unity, "unity: d^3F/dt^k dt^i dt^j = eta_ij");
    // quasi-homogeneity
    rec(is_quadratic(euler_apply(d, F) - Rational(2) * F), "L_E F - 2F is quadratic");
    // intersection form
    const QMatrix& eta = d.metrics.eta;
    std::vector<std::vector<LaurentPoly>> Fup(n, std::vector<LaurentPoly>(n, LaurentPoly(r)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < n; ++a) {
                if (eta[i][a] == 0) continue;
                for (int b = 0; b < n; ++b)
                    if (eta[j][b] != 0) Fup[i][j] += eta[i][a] * eta[j][b] * F2[a][b];
            }
    bool gok = true;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (euler_apply(d, Fup[i][j]) != d.metrics.g.g(i, j).in_ring(r)) gok = false;
    rec(gok, "g^ij = L_E F^ij");
    if (!d.metrics.g.gamma.empty()) {
        bool cok = true;
        for (int rr = 0; rr < n; ++rr)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    LaurentPoly c = Fup[i][j].diff(coords[rr]);
                    if (d.metrics.g.gamma[rr](i, j).in_ring(r) != d.chart.degrees[j] * c) cok = false;
                }
        rec(cok, "Gamma^ij_r = d_j c^ij_r");
    }
    bool dual = true;
    for (int i = 1; i <= n; ++i) {
        int s = dual_index(l, k, d.chart.m, i);
        if (d.chart.degrees[i - 1] + d.chart.degrees[s - 1] != 1) dual = false;
        for (int j = 1; j <= n; ++j)
            if ((eta[i - 1][j - 1] != 0) != (j == s)) dual = false;
    }
    rec(dual, "duality d_i + d_i* = 1");
    // [E, e] = -e, E^a = d_a t^a
    bool lie = true;
    for (int a = 0; a < l; ++a) {
        LaurentPoly Ea = d.euler[a] * LaurentPoly::var(r, coords[a]);
        LaurentPoly comp = -Ea.diff(coords[k - 1]);
        LaurentPoly want = a == k - 1 ? LaurentPoly::constant(r, -1) : LaurentPoly(r);
        if (comp != want) lie = false;
    }
    rec(lie, "L_E e = -e");
    // normal form of F
    LaurentPoly tk = LaurentPoly::var(r, coords[k - 1]);
    LaurentPoly Y = LaurentPoly::var(r, "Y");
    LaurentPoly norm = Rational(1, 2) * tk * tk * Y;
    for (int i = 0; i < n - 1; ++i)
        for (int j = 0; j < n - 1; ++j)
            if (i != k - 1 && j != k - 1 && d.eta_low[i][j] != 0)
                norm += Rational(1, 2) * d.eta_low[i][j] * tk * LaurentPoly::var(r, coords[i]) * LaurentPoly::var(r, coords[j]);
    LaurentPoly G = F - norm;
    int yi = r->index_of("Y"), ki = r->index_of(coords[k - 1]);
    rec(!G.involves(yi) && !G.involves(ki), "F = (t^k)^2 t^{l+1}/2 + t^k eta t t/2 + G");
    return rep;
}

EquivalenceReport equivalence_report(int l, int k, int m) {
    EquivalenceReport rep;
    int m2 = l - k - m;
    auto d1 = flat_degrees(l, k, m), d2 = flat_degrees(l, k, m2);
    std::sort(d1.begin(), d1.end());
    std::sort(d2.begin(), d2.end());
    rep.degrees_equal = d1 == d2;
    auto signature = [](const QMatrix& e) {
        int n = static_cast<int>(e.size());
        Eigen::MatrixXd A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = e[i][j].get_d();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
        int pos = 0, neg = 0;
        for (int i = 0; i < n; ++i) (es.eigenvalues()(i) > 0 ? pos : neg)++;
        return std::make_pair(pos, neg);
    };
    auto s1 = signature(eta_closed_form(l, k, m)), s2 = signature(eta_closed_form(l, k, m2));
    rep.signature_equal = s1 == s2;
    auto shapes = [&](int mm) {
        auto d = solve_potential(l, k, mm, false);
        auto deg = flat_degrees(l, k, mm);
        std::vector<std::vector<Rational>> out;
        const RingPtr& r = d.F.ring();
        for (const auto& t : d.F.terms()) {
            std::vector<Rational> s;
            for (int a = 0; a < l; ++a)
                for (int e = 0; e < std::abs(int(t.m.e[a])); ++e) s.push_back(t.m.e[a] > 0 ? deg[a] : -deg[a]);
            s.push_back(rat(r->e_index >= 0 ? t.m.e[r->e_index] : 0, 1) + 1000);
            std::sort(s.begin(), s.end());
            out.push_back(s);
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    rep.coefficient_degrees_equal = shapes(m) == shapes(m2);
    std::ostringstream msg;
    msg << "signature (" << s1.first << "," << s1.second << ") vs (" << s2.first << "," << s2.second << ")";
    rep.detail = msg.str();
    return rep;
}

} // namespace wf
