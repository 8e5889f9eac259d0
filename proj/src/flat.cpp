#include "wf/flat.hpp"

#include <functional>
#include <mutex>
#include <sstream>

namespace wf {

namespace {

std::vector<std::string> numbered(const std::string& p, int from, int to) {
    std::vector<std::string> v;
    for (int j = from; j <= to; ++j) v.push_back(p + std::to_string(j));
    return v;
}

std::string nm(const std::string& p, int j) { return p + std::to_string(j); }

RingPtr t_ring(int l) {
    auto n = numbered("t", 1, l);
    n.push_back("Y");
    n.push_back(kESymbol);
    return make_ring(n, "Y");
}

QMatrix invert_unitriangular(const QMatrix& B) {
    int n = static_cast<int>(B.size());
    QMatrix C(n, std::vector<Rational>(n, 0));
    for (int c = 0; c < n; ++c) {
        std::vector<Rational> e(n, 0);
        e[c] = 1;
        auto s = solve_linear(B, e);
        for (int i = 0; i < n; ++i) C[i][c] = s.x[i];
    }
    return C;
}

PolyMatrix jacobian(const std::vector<LaurentPoly>& F, const std::vector<std::string>& vars, const RingPtr& r) {
    PolyMatrix J(static_cast<int>(F.size()), static_cast<int>(vars.size()), r);
    for (size_t i = 0; i < F.size(); ++i)
        for (size_t j = 0; j < vars.size(); ++j)
            J(static_cast<int>(i), static_cast<int>(j)) = F[i].diff(vars[j]).in_ring(r);
    return J;
}

} // namespace

RingPtr z_ring(int l) {
    auto n = numbered("z", 1, l);
    n.push_back("Y");
    n.push_back(kESymbol);
    return make_ring(n, "Y");
}

std::vector<LaurentPoly> weighted_monomials(const RingPtr& r, const std::vector<std::string>& vars,
                                            const std::vector<Rational>& weights, const Rational& degree) {
    std::vector<LaurentPoly> out;
    std::vector<int> e(vars.size(), 0);
    std::function<void(size_t, Rational)> rec = [&](size_t i, Rational left) {
        if (i == vars.size()) {
            if (left == 0) {
                LaurentPoly p = LaurentPoly::constant(r, 1);
                for (size_t j = 0; j < vars.size(); ++j)
                    if (e[j]) p = p * LaurentPoly::var(r, vars[j], e[j]);
                out.push_back(p);
            }
            return;
        }
        for (e[i] = 0; Rational(e[i]) * weights[i] <= left; ++e[i]) rec(i + 1, left - Rational(e[i]) * weights[i]);
        e[i] = 0;
    };
    rec(0, degree);
    return out;
}

std::vector<std::vector<std::vector<LaurentPoly>>> lower_christoffel(const PolyMatrix& eta,
                                                                     const std::vector<std::string>& vars) {
    int n = static_cast<int>(vars.size());
    PolyMatrix low = invert_unit_jacobian(eta);
    RingPtr r = low(0, 0).ring();
    std::vector<PolyMatrix> d;
    for (const auto& v : vars) d.push_back(low.diff(v));
    std::vector<std::vector<std::vector<LaurentPoly>>> gam(
        n, std::vector<std::vector<LaurentPoly>>(n, std::vector<LaurentPoly>(n, LaurentPoly(r))));
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            std::vector<LaurentPoly> first(n, LaurentPoly(r));
            for (int dd = 0; dd < n; ++dd) first[dd] = d[a](dd, b) + d[b](dd, a) - d[dd](a, b);
            for (int c = 0; c < n; ++c) {
                LaurentPoly s(r);
                for (int dd = 0; dd < n; ++dd)
                    if (!eta(c, dd).is_zero() && !first[dd].is_zero()) s += eta(c, dd).in_ring(r) * first[dd];
                s *= rat(1, 2);
                gam[c][a][b] = s;
                gam[c][b][a] = s;
            }
        }
    return gam;
}

LaurentPoly solve_flat_function(const std::vector<std::vector<std::vector<LaurentPoly>>>& gam,
                                const std::vector<std::string>& vars, const LaurentPoly& lead,
                                const std::vector<LaurentPoly>& basis) {
    int n = static_cast<int>(vars.size());
    RingPtr r = gam[0][0][0].ring();
    auto residual = [&](const LaurentPoly& f0) {
        LaurentPoly f = f0.in_ring(r);
        std::vector<LaurentPoly> df;
        for (const auto& v : vars) df.push_back(f.diff(v));
        std::vector<LaurentPoly> res;
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) {
                LaurentPoly s = df[a].diff(vars[b]);
                for (int c = 0; c < n; ++c)
                    if (!gam[c][a][b].is_zero() && !df[c].is_zero()) s -= gam[c][a][b] * df[c];
                res.push_back(s);
            }
        return res;
    };
    using Key = std::pair<size_t, std::array<int16_t, kMaxVars>>;
    std::map<Key, std::map<int, Rational>> rows;
    std::map<Key, Rational> rhs;
    auto r0 = residual(lead);
    for (size_t q = 0; q < r0.size(); ++q)
        for (const auto& t : r0[q].terms()) rhs[{q, t.m.e}] -= t.c;
    for (size_t u = 0; u < basis.size(); ++u) {
        auto ru = residual(basis[u]);
        for (size_t q = 0; q < ru.size(); ++q)
            for (const auto& t : ru[q].terms()) rows[{q, t.m.e}][static_cast<int>(u)] += t.c;
    }
    for (const auto& [key, c] : rhs)
        if (!rows.count(key)) rows[key];
    SparseSystem sys(static_cast<int>(basis.size()));
    for (auto& [key, row] : rows) {
        auto it = rhs.find(key);
        sys.add(row, it == rhs.end() ? Rational(0) : it->second);
    }
    SolveResult s = sys.solve();
    if (!s.kernel.empty()) throw AlgebraError("flat coordinate ansatz is not unique");
    LaurentPoly f = lead.in_ring(r);
    for (size_t u = 0; u < basis.size(); ++u)
        if (s.x[u] != 0) f += s.x[u] * basis[u].in_ring(r);
    return f;
}

PolyMatrix reduced_eta_form(int l, int k, int m) {
    auto r = z_ring(l);
    int N = l - k - m;
    PolyMatrix M(l + 1, l + 1, r);
    auto z = [&](int j) { return LaurentPoly::var(r, nm("z", j)); };
    for (int i = 1; i < k; ++i) M(i - 1, k - i - 1) = LaurentPoly::constant(r, k);
    M(k - 1, l) = M(l, k - 1) = LaurentPoly::constant(r, 1);
    for (int i = 1; i <= N; ++i)
        for (int j = 1; i + j - 1 <= N; ++j) M(k + i - 1, k + j - 1) = Rational(4 * (i + j - 1)) * z(k + i + j - 1);
    for (int i = 1; i <= m; ++i)
        for (int j = 1; i + j - 1 <= m; ++j)
            M(l - m + i - 1, l - m + j - 1) = Rational(4 * (i + j - 1)) * z(l - m + i + j - 1);
    return M;
}

ZChart build_z_chart(int l, int k, int m) {
    ZChart Z;
    Z.l = l;
    Z.k = k;
    Z.m = m;
    Z.ring = z_ring(l);
    int N = l - k - m;
    EtaData ed = eta_tau(l, k, m);
    auto tr = tau_ring(l);
    // first block: flat coordinates of the C_k part, in the tau chart
    std::vector<std::string> v1 = numbered("tau", 1, k);
    v1.push_back("Y");
    PolyMatrix e1(k + 1, k + 1, tr);
    auto idx1 = [&](int a) { return a < k ? a : l; };
    for (int a = 0; a <= k; ++a)
        for (int b = 0; b <= k; ++b) e1(a, b) = ed.eta(idx1(a), idx1(b));
    auto gam = lower_christoffel(e1, v1);
    for (int j = 1; j <= k; ++j) {
        std::vector<std::string> vars = numbered("tau", 1, j - 1);
        std::vector<Rational> w;
        for (int i = 1; i < j; ++i) w.push_back(rat(i, k));
        vars.push_back(kESymbol);
        w.push_back(rat(1, k));
        auto basis = weighted_monomials(tr, vars, w, rat(j, k));
        auto f = solve_flat_function(gam, v1, LaurentPoly::var(tr, nm("tau", j)), basis).in_ring(tr);
        Z.p.push_back(f - LaurentPoly::var(tr, nm("tau", j)));
        Z.z_of_tau.push_back(f);
    }
    Z.B2 = block_recursion_table(SeriesKind::CoshSinh, N);
    Z.B3 = block_recursion_table(SeriesKind::Tanh, m);
    auto add_block = [&](const QMatrix& B, int off, int n) {
        // B is indexed 1..n; z = B^{-1} tau
        QMatrix Bs(n, std::vector<Rational>(n, 0));
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < n; ++a) Bs[i][a] = B[i + 1][a + 1];
        QMatrix C = invert_unitriangular(Bs);
        for (int i = 0; i < n; ++i) {
            LaurentPoly s(tr);
            for (int a = 0; a < n; ++a)
                if (C[i][a] != 0) s += C[i][a] * LaurentPoly::var(tr, nm("tau", off + a + 1));
            Z.z_of_tau.push_back(s);
        }
    };
    add_block(Z.B2, k, N);
    add_block(Z.B3, l - m, m);
    std::vector<std::string> tv = numbered("tau", 1, l);
    tv.push_back("Y");
    auto zt = Z.z_of_tau;
    zt.push_back(LaurentPoly::var(tr, "Y"));
    Z.dz_dtau = jacobian(zt, tv, tr);
    // inverse map
    const auto& zr = Z.ring;
    std::map<std::string, LaurentPoly> bind;
    for (int j = 1; j <= k; ++j) {
        auto t = LaurentPoly::var(zr, nm("z", j)) - Z.p[j - 1].substitute(bind).in_ring(zr);
        Z.tau_of_z.push_back(t);
        bind.emplace(nm("tau", j), t);
    }
    auto inv_block = [&](const QMatrix& B, int off, int n) {
        for (int i = 1; i <= n; ++i) {
            LaurentPoly s(zr);
            for (int a = 1; a <= n; ++a)
                if (B[i][a] != 0) s += B[i][a] * LaurentPoly::var(zr, nm("z", off + a));
            Z.tau_of_z.push_back(s);
            bind.emplace(nm("tau", off + i), s);
        }
    };
    inv_block(Z.B2, k, N);
    inv_block(Z.B3, l - m, m);
    Z.eta = congruence(Z.dz_dtau, ed.eta).substitute(bind).in_ring(zr);
    PolyMatrix want = reduced_eta_form(l, k, m);
    std::ostringstream msg;
    Z.reduced_form_ok = true;
    for (int i = 0; i <= l; ++i)
        for (int j = 0; j <= l; ++j)
            if (Z.eta(i, j) != want(i, j)) {
                Z.reduced_form_ok = false;
                msg << "(" << i + 1 << "," << j + 1 << "): " << Z.eta(i, j).to_string() << "; ";
            }
    Z.detail = msg.str();
    if (!Z.reduced_form_ok) throw AlgebraError("z chart does not reach the reduced block form: " + Z.detail);
    return Z;
}

namespace {

HankelFlat make_hankel_flat(int n) {
    HankelFlat H;
    H.n = n;
    H.bring = make_ring(numbered("b", 1, n));
    auto ar = make_ring(numbered("a", 1, n));
    if (n == 1) {
        H.wring = make_ring({"om"});
        auto om = LaurentPoly::var(H.wring, "om");
        H.a_of_w = {om * om};
        H.b_of_w = {om};
        auto b = LaurentPoly::var(H.bring, "b1");
        H.a_of_b = {b * b};
        H.eta = {{Rational(1)}};
        return H;
    }
    auto wn = numbered("w", 1, n - 1);
    wn.push_back("om");
    H.wring = make_ring(wn);
    const auto& wr = H.wring;
    auto om = LaurentPoly::var(wr, "om");
    auto w = [&](int i) { return LaurentPoly::var(wr, nm("w", i)); };
    H.a_of_w.push_back(w(1) * om);
    for (int i = 2; i < n; ++i) H.a_of_w.push_back(w(i) * om.pow(2 * i));
    H.a_of_w.push_back(om.pow(2 * n));
    PolyMatrix ea(n, n, ar);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; i + j - 1 <= n; ++j)
            ea(i - 1, j - 1) = Rational(4 * (i + j - 1)) * LaurentPoly::var(ar, nm("a", i + j - 1));
    std::map<std::string, LaurentPoly> aw;
    for (int i = 1; i <= n; ++i) aw.emplace(nm("a", i), H.a_of_w[i - 1]);
    PolyMatrix K = jacobian(H.a_of_w, wn, wr);
    PolyMatrix Ki = invert_unit_jacobian(K);
    PolyMatrix ew = congruence(Ki, ea.substitute(aw).in_ring(wr)).in_ring(wr);
    auto gam = lower_christoffel(ew, wn);
    std::vector<Rational> wt;
    wt.push_back(rat(2 * n - 1, 2 * n));
    for (int i = 2; i < n; ++i) wt.push_back(rat(n - i, n));
    wt.push_back(rat(1, 2 * n));
    for (int i = 1; i <= n; ++i) {
        LaurentPoly lead = i == 1 ? w(1) : (i == n ? om : om * w(i));
        Rational deg(2 * n - 2 * i + 1, 2 * n);
        std::vector<LaurentPoly> basis;
        for (auto& b : weighted_monomials(wr, wn, wt, deg))
            if (b != lead) basis.push_back(b);
        H.b_of_w.push_back(solve_flat_function(gam, wn, lead, basis).in_ring(wr));
    }
    PolyMatrix Kb = jacobian(H.b_of_w, wn, wr);
    PolyMatrix eb = congruence(Kb, ew);
    H.eta.assign(n, std::vector<Rational>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (!eb(i, j).is_constant()) throw AlgebraError("Hankel block metric is not constant in b");
            H.eta[i][j] = eb(i, j).constant_term();
        }
    H.h.push_back((H.b_of_w[0] - w(1)) * om.pow(-1));
    for (int i = 2; i < n; ++i) H.h.push_back(H.b_of_w[i - 1] * om.pow(-1) - w(i));
    // invert: om = b_n, w_i from b_i top down
    const auto& br = H.bring;
    auto bv = [&](int i) { return LaurentPoly::var(br, nm("b", i)); };
    std::map<std::string, LaurentPoly> wb{{"om", bv(n)}};
    auto omb = bv(n);
    for (int i = n - 1; i >= 1; --i) {
        LaurentPoly lead = i == 1 ? w(1) : om * w(i);
        LaurentPoly rest = (H.b_of_w[i - 1] - lead).substitute(wb).in_ring(br);
        LaurentPoly wi = i == 1 ? bv(1) - rest : (bv(i) - rest) * omb.pow(-1);
        wb.emplace(nm("w", i), wi);
    }
    for (int i = 0; i < n; ++i) H.a_of_b.push_back(H.a_of_w[i].substitute(wb).in_ring(br));
    return H;
}

} // namespace

const HankelFlat& hankel_flat(int n) {
    static std::mutex mu;
    static std::map<int, HankelFlat> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_hankel_flat(n)).first;
    return it->second;
}

std::vector<Rational> flat_degrees(int l, int k, int m) {
    int N = l - k - m;
    std::vector<Rational> d;
    for (int j = 1; j <= l; ++j) {
        if (j <= k)
            d.push_back(rat(j, k));
        else if (j <= l - m)
            d.push_back(rat(2 * l - 2 * m - 2 * j + 1, 2 * N));
        else
            d.push_back(rat(2 * l - 2 * j + 1, 2 * m));
    }
    d.push_back(0);
    return d;
}

int dual_index(int l, int k, int m, int i) {
    if (i == k) return l + 1;
    if (i == l + 1) return k;
    if (i < k) return k - i;
    if (i <= l - m) return l - m + k + 1 - i;
    return 2 * l - m + 1 - i;
}

QMatrix eta_closed_form(int l, int k, int m, bool literal) {
    QMatrix e(l + 1, std::vector<Rational>(l + 1, 0));
    int N = l - k - m;
    auto set = [&](int i, int j, const Rational& v) { e[i - 1][j - 1] = v; };
    for (int i = 1; i < k; ++i) set(i, k - i, k);
    set(l + 1, k, 1);
    set(k, l + 1, 1);
    for (int i = k + 2; i <= l - m - 1; ++i) set(i, l - m + k - i + 1, 4 * N);
    if (N >= 1) {
        Rational c = (N == 1 && !literal) ? Rational(1) : Rational(2);
        set(l - m, k + 1, c);
        set(k + 1, l - m, c);
    }
    for (int i = l - m + 2; i <= l - 1; ++i) set(i, 2 * l - m - i + 1, 4 * m);
    if (m >= 1) {
        Rational c = (m == 1 && !literal) ? Rational(1) : Rational(2);
        set(l, l - m + 1, c);
        set(l - m + 1, l, c);
    }
    return e;
}

FlatChart build_flat_chart(int l, int k, int m) {
    FlatChart F;
    F.l = l;
    F.k = k;
    F.m = m;
    F.degrees = flat_degrees(l, k, m);
    F.ring = t_ring(l);
    F.coords = numbered("t", 1, l);
    F.coords.push_back("Y");
    F.z = build_z_chart(l, k, m);
    int N = l - k - m;
    const auto& tr = F.ring;
    for (int j = 1; j <= k; ++j) F.z_of_t.push_back(LaurentPoly::var(tr, nm("t", j)));
    auto block = [&](int off, int n) {
        if (n == 0) return;
        const HankelFlat& H = hankel_flat(n);
        std::map<std::string, LaurentPoly> bt;
        for (int i = 1; i <= n; ++i) bt.emplace(nm("b", i), LaurentPoly::var(tr, nm("t", off + i)));
        for (int i = 0; i < n; ++i) F.z_of_t.push_back(H.a_of_b[i].substitute(bt).in_ring(tr));
    };
    block(k, N);
    block(l - m, m);
    std::map<std::string, LaurentPoly> zt;
    for (int j = 1; j <= l; ++j) zt.emplace(nm("z", j), F.z_of_t[j - 1]);
    for (const auto& p : F.z.tau_of_z) F.tau_of_t.push_back(p.substitute(zt).in_ring(tr));
    TauChart T = tau_chart(l, k, m);
    std::map<std::string, LaurentPoly> tt;
    for (int j = 1; j <= l; ++j) tt.emplace(nm("tau", j), F.tau_of_t[j - 1]);
    for (const auto& p : T.theta_of_tau) F.theta_of_t.push_back(p.substitute(tt).in_ring(tr));
    for (int j = 1; j <= l; ++j) {
        const auto& th = F.theta_of_t[j - 1];
        F.y_of_t.push_back(j < k ? th * LaurentPoly::var(tr, kESymbol, j - k) : th);
    }
    auto th = F.theta_of_t;
    th.push_back(LaurentPoly::var(tr, "Y"));
    F.dtheta_dt = jacobian(th, F.coords, tr);
    F.dt_dtheta = invert_unit_jacobian(F.dtheta_dt).in_ring(tr);
    return F;
}

FlatMetrics flat_metrics(const FlatChart& F, bool christoffel) {
    FlatMetrics out;
    int l = F.l;
    MetricData th = metric_theta(l, F.k, christoffel);
    std::map<std::string, LaurentPoly> bind;
    for (int j = 1; j <= l; ++j) bind.emplace(nm("th", j), F.theta_of_t[j - 1]);
    PolyMatrix g = th.g.substitute(bind).in_ring(F.ring);
    std::vector<PolyMatrix> gam;
    for (const auto& G : th.gamma) gam.push_back(G.substitute(bind).in_ring(F.ring));
    out.g.ring = F.ring;
    out.g.coords = F.coords;
    transform_tensors(g, gam, F.dtheta_dt, F.dt_dtheta, F.coords, out.g.g, out.g.gamma);
    out.g.g = out.g.g.in_ring(F.ring);
    for (auto& G : out.g.gamma) G = G.in_ring(F.ring);
    PolyMatrix eta = out.g.g.diff(nm("t", F.k));
    out.eta.assign(l + 1, std::vector<Rational>(l + 1, 0));
    for (int i = 0; i <= l; ++i)
        for (int j = 0; j <= l; ++j) {
            if (!eta(i, j).is_constant())
                throw AlgebraError("eta(t) is not constant at (" + std::to_string(i + 1) + "," +
                                   std::to_string(j + 1) + "): " + eta(i, j).to_string());
            out.eta[i][j] = eta(i, j).constant_term();
        }
    return out;
}

PolyMatrix flat_metric_stepwise(const FlatChart& F) {
    int l = F.l;
    EtaData ed = eta_tau(l, F.k, F.m);
    PolyMatrix gz = congruence(F.z.dz_dtau, ed.g_tau.g);
    std::map<std::string, LaurentPoly> bind;
    for (int j = 1; j <= l; ++j) bind.emplace(nm("tau", j), F.tau_of_t[j - 1]);
    gz = gz.substitute(bind).in_ring(F.ring);
    auto zt = F.z_of_t;
    zt.push_back(LaurentPoly::var(F.ring, "Y"));
    PolyMatrix dzdt = jacobian(zt, F.coords, F.ring);
    return congruence(invert_unit_jacobian(dzdt).in_ring(F.ring), gz).in_ring(F.ring);
}

} // namespace wf
