#include "wf/pencil.hpp"

#include <sstream>

namespace wf {

namespace {

std::vector<std::string> numbered(const std::string& p, int from, int to) {
    std::vector<std::string> v;
    for (int j = from; j <= to; ++j) v.push_back(p + std::to_string(j));
    return v;
}

RingPtr chart_ring(const std::string& prefix, int l) {
    auto n = numbered(prefix, 1, l);
    n.push_back("Y");
    n.push_back(kESymbol);
    return make_ring(n, "Y");
}

RingPtr uv_ring(int l) {
    std::vector<std::string> n{"u", "v"};
    for (const auto& s : numbered("th", 0, l)) n.push_back(s);
    return make_ring(n);
}

// P(w) = sum_j th_j w^{l-j}
LaurentPoly P_of(const RingPtr& r, int l, const std::string& w) {
    LaurentPoly p(r);
    auto x = LaurentPoly::var(r, w);
    for (int j = 0; j <= l; ++j) p += LaurentPoly::var(r, "th" + std::to_string(j)) * x.pow(l - j);
    return p;
}

// coefficient table [u^{l-i} v^{l-j}] over the target ring
PolyMatrix extract(const LaurentPoly& G, int l, const RingPtr& target) {
    PolyMatrix M(l + 1, l + 1, target);
    for (auto& [eu, cu] : G.collect("u")) {
        if (eu < 0 || eu > l) throw AlgebraError("generating function has unexpected u-degree");
        for (auto& [ev, cv] : cu.collect("v")) {
            if (ev < 0 || ev > l) throw AlgebraError("generating function has unexpected v-degree");
            M(l - eu, l - ev) = cv.in_ring(target);
        }
    }
    return M;
}

} // namespace

RingPtr theta_sym_ring(int l) { return make_ring(numbered("th", 0, l)); }
RingPtr theta_ring(int l) { return chart_ring("th", l); }
RingPtr y_ring(int l) { return chart_ring("y", l); }
RingPtr tau_ring(int l) { return chart_ring("tau", l); }

LaurentPoly divide_u_minus_v(const LaurentPoly& N, const std::string& u, const std::string& v) {
    if (N.is_zero()) return N;
    auto cs = N.collect(u);
    int d = cs.rbegin()->first;
    if (cs.begin()->first < 0) throw AlgebraError("negative power in division by (u - v)");
    const RingPtr& r = N.ring();
    auto V = LaurentPoly::var(r, v), U = LaurentPoly::var(r, u);
    auto coef = [&](int i) { return cs.count(i) ? cs[i] : LaurentPoly(r); };
    LaurentPoly Q(r);
    LaurentPoly q = coef(d);  // q_{d-1}
    for (int i = d - 1; i >= 0; --i) {
        Q += q * U.pow(i);
        q = coef(i) + V * q;
    }
    if (!q.is_zero()) throw AlgebraError("division by (u - v) is not exact");
    return Q;
}

PolyMatrix metric_theta_sym(int l, int k) {
    auto r = uv_ring(l);
    auto Pu = P_of(r, l, "u"), Pv = P_of(r, l, "v");
    auto u = LaurentPoly::var(r, "u"), v = LaurentPoly::var(r, "v");
    auto four = LaurentPoly::constant(r, 4);
    LaurentPoly num = (u * u - four) * Pu.diff("u") * Pv - (v * v - four) * Pu * Pv.diff("v");
    LaurentPoly G = Rational(k - l) * Pu * Pv + divide_u_minus_v(num, "u", "v");
    auto tr = theta_sym_ring(l);
    PolyMatrix core = extract(G, l, tr);
    PolyMatrix M(l + 2, l + 2, tr);
    for (int i = 0; i <= l; ++i)
        for (int j = 0; j <= l; ++j) M(i, j) = core(i, j);
    for (int i = 0; i <= l; ++i) {
        M(i, l + 1) = LaurentPoly::var(tr, "th" + std::to_string(i));
        M(l + 1, i) = M(i, l + 1);
    }
    M(l + 1, l + 1) = LaurentPoly::constant(tr, rat(1, k));
    return M;
}

std::vector<PolyMatrix> christoffel_theta_sym(int l, int k) {
    auto r = uv_ring(l);
    auto Pu = P_of(r, l, "u"), Pv = P_of(r, l, "v");
    auto dPu = Pu.diff("u");
    auto u = LaurentPoly::var(r, "u"), v = LaurentPoly::var(r, "v");
    auto four = LaurentPoly::constant(r, 4);
    auto tr = theta_sym_ring(l);
    std::vector<PolyMatrix> out;
    for (int s = 0; s <= l; ++s) {
        // dP(w) -> w^{l-s}, dP'(v) -> (l-s) v^{l-s-1}
        LaurentPoly us = u.pow(l - s), vs = v.pow(l - s);
        LaurentPoly dvs = s < l ? Rational(l - s) * v.pow(l - s - 1) : LaurentPoly(r);
        LaurentPoly uv = u - v;
        LaurentPoly num = Rational(k - l) * Pu * vs * uv * uv +
                          uv * ((u * u - four) * dPu * vs - (v * v - four) * Pu * dvs) +
                          (u * v - four) * (Pv * us - Pu * vs);
        LaurentPoly G = divide_u_minus_v(divide_u_minus_v(num, "u", "v"), "u", "v");
        out.push_back(extract(G, l, tr));
    }
    return out;
}

MetricData metric_theta(int l, int k, bool christoffel) {
    MetricData md;
    md.ring = theta_ring(l);
    md.coords = numbered("th", 1, l);
    md.coords.push_back("Y");
    const auto& r = md.ring;
    std::map<std::string, LaurentPoly> bind{{"th0", LaurentPoly::var(r, kESymbol, k)}};
    auto conv = [&](const LaurentPoly& p) { return p.substitute(bind).in_ring(r); };
    PolyMatrix sym = metric_theta_sym(l, k);
    md.g = PolyMatrix(l + 1, l + 1, r);
    for (int i = 1; i <= l; ++i)
        for (int j = 1; j <= l; ++j) md.g(i - 1, j - 1) = conv(sym(i, j));
    for (int i = 1; i <= l; ++i) {
        md.g(i - 1, l) = LaurentPoly::var(r, md.coords[i - 1]);
        md.g(l, i - 1) = md.g(i - 1, l);
    }
    md.g(l, l) = LaurentPoly::constant(r, rat(1, k));
    if (!christoffel) return md;
    auto G = christoffel_theta_sym(l, k);
    auto Ek = LaurentPoly::var(r, kESymbol, k);
    for (int s = 0; s <= l; ++s) {
        PolyMatrix M(l + 1, l + 1, r);
        int src = s < l ? s + 1 : 0;
        for (int i = 1; i <= l; ++i)
            for (int j = 1; j <= l; ++j) {
                auto e = conv(G[src](i, j));
                M(i - 1, j - 1) = s < l ? e : Rational(k) * Ek * e;
            }
        if (s < l) M(l, s) = LaurentPoly::constant(r, 1);
        md.gamma.push_back(std::move(M));
    }
    return md;
}

MetricData metric_y(int l, int k) {
    auto th = metric_theta(l, k, false);
    const auto& tr = th.ring;
    PolyMatrix J(l + 1, l + 1, tr);
    for (int j = 1; j <= l; ++j) {
        auto t = LaurentPoly::var(tr, th.coords[j - 1]);
        LaurentPoly yj = j < k ? t * LaurentPoly::var(tr, kESymbol, j - k) : t;
        for (int c = 0; c <= l; ++c) J(j - 1, c) = yj.diff(th.coords[c]);
    }
    J(l, l) = LaurentPoly::constant(tr, 1);
    PolyMatrix gy = congruence(J, th.g);
    MetricData md;
    md.ring = y_ring(l);
    md.coords = numbered("y", 1, l);
    md.coords.push_back("Y");
    std::map<std::string, LaurentPoly> bind;
    for (int j = 1; j <= l; ++j) {
        auto y = LaurentPoly::var(md.ring, md.coords[j - 1]);
        bind.emplace(th.coords[j - 1], j < k ? y * LaurentPoly::var(md.ring, kESymbol, k - j) : y);
    }
    md.g = gy.substitute(bind).in_ring(md.ring);
    return md;
}

UnityData unity_coeffs(int l, int k, int m) {
    if (k < 1 || k > l) throw std::invalid_argument("marked vertex out of range");
    if (m < 0 || m > l - k) throw std::invalid_argument("m out of range");
    auto r = make_ring({"u"});
    auto u = LaurentPoly::var(r, "u");
    auto p = (u + LaurentPoly::constant(r, 2)).pow(m) * (u - LaurentPoly::constant(r, 2)).pow(l - k - m);
    UnityData d;
    d.l = l;
    d.k = k;
    d.m = m;
    d.c.assign(l + 1, 0);
    for (auto& [e, c] : p.collect("u")) d.c[l - e] = c.constant_term();
    return d;
}

LaurentPoly unity_residual(const UnityData& d) {
    auto r = make_ring({"u", "v"});
    auto u = LaurentPoly::var(r, "u"), v = LaurentPoly::var(r, "v");
    LaurentPoly Pu(r), Pv(r);
    for (int j = 0; j <= d.l; ++j) {
        Pu += d.c[j] * u.pow(d.l - j);
        Pv += d.c[j] * v.pow(d.l - j);
    }
    auto four = LaurentPoly::constant(r, 4);
    LaurentPoly num = (u * u - four) * Pu.diff("u") * Pv - (v * v - four) * Pu * Pv.diff("v");
    return Rational(d.k - d.l) * Pu * Pv + divide_u_minus_v(num, "u", "v");
}

TauChart tau_chart(int l, int k, int m) {
    if (m < 0 || m > l - k) throw std::invalid_argument("m out of range");
    TauChart T;
    T.l = l;
    T.k = k;
    T.m = m;
    auto ur = make_ring({"u"});
    auto u = LaurentPoly::var(ur, "u");
    auto up = u + LaurentPoly::constant(ur, 2), um = u - LaurentPoly::constant(ur, 2);
    T.M.assign(l + 1, std::vector<Rational>(l + 1, 0));
    for (int j = 0; j <= l; ++j) {
        LaurentPoly b = j <= l - m ? up.pow(m) * um.pow(l - m - j) : -(up.pow(l - j) * um.pow(j - k - 1));
        for (auto& [e, c] : b.collect("u")) T.M[l - e][j] = c.constant_term();
    }
    T.Minv.assign(l + 1, std::vector<Rational>(l + 1, 0));
    for (int c = 0; c <= l; ++c) {
        std::vector<Rational> e(l + 1, 0);
        e[c] = 1;
        auto s = solve_linear(T.M, e);
        if (!s.kernel.empty()) throw AlgebraError("tau chart is singular");
        for (int i = 0; i <= l; ++i) T.Minv[i][c] = s.x[i];
    }
    auto trr = tau_ring(l);
    auto thr = theta_ring(l);
    auto E = [&](const RingPtr& r, int n) { return LaurentPoly::var(r, kESymbol, n); };
    // theta(tau)
    std::vector<LaurentPoly> varpi;
    for (int j = 0; j <= l; ++j) {
        if (j == 0)
            varpi.push_back(E(trr, k));
        else {
            auto t = LaurentPoly::var(trr, "tau" + std::to_string(j));
            varpi.push_back(j < k ? t * E(trr, k - j) : t);
        }
    }
    for (int i = 0; i <= l; ++i) {
        LaurentPoly s(trr);
        for (int j = 0; j <= l; ++j)
            if (T.M[i][j] != 0) s += T.M[i][j] * varpi[j];
        if (i == 0) {
            if (s != varpi[0]) throw AlgebraError("tau chart does not fix theta^0");
            continue;
        }
        T.theta_of_tau.push_back(s);
    }
    // tau(theta)
    std::vector<LaurentPoly> theta{E(thr, k)};
    for (int j = 1; j <= l; ++j) theta.push_back(LaurentPoly::var(thr, "th" + std::to_string(j)));
    T.dtau_dtheta = PolyMatrix(l + 1, l + 1, thr);
    for (int i = 1; i <= l; ++i) {
        LaurentPoly w(thr);
        for (int j = 0; j <= l; ++j)
            if (T.Minv[i][j] != 0) w += T.Minv[i][j] * theta[j];
        if (i < k) w = w * E(thr, i - k);
        T.tau_of_theta.push_back(w);
        for (int c = 1; c <= l; ++c) T.dtau_dtheta(i - 1, c - 1) = w.diff("th" + std::to_string(c));
        T.dtau_dtheta(i - 1, l) = w.diff("Y");
    }
    T.dtau_dtheta(l, l) = LaurentPoly::constant(thr, 1);
    return T;
}

LaurentPoly eta_det_formula(int l, int k, int m, bool stated_sign) {
    auto r = tau_ring(l);
    int N = l - k - m;
    auto tri = [](int n) { return n * (n - 1) / 2; };
    int sgn = stated_sign ? (l % 2 ? -1 : 1) : ((tri(k - 1) + tri(N) + tri(m)) % 2 ? 1 : -1);
    Rational c = sgn * rational_pow(k, k - 1) * rational_pow(4, l - k) * rational_pow(m, m) *
                 rational_pow(N, N);
    return c * LaurentPoly::var(r, "tau" + std::to_string(l - m), N) * LaurentPoly::var(r, "tau" + std::to_string(l), m);
}

PolyMatrix eta_block_form(int l, int k, int m) {
    auto r = tau_ring(l);
    int N = l - k - m;
    auto tau = [&](int j) {
        if (j == 0) return LaurentPoly::constant(r, 1);
        return LaurentPoly::var(r, "tau" + std::to_string(j));
    };
    auto E = LaurentPoly::var(r, kESymbol);
    auto P = [&](int j) { return Rational(4 * (k - j + 1)) * tau(j - 1) * E; };
    auto R = [&](int j) { return P(j) + Rational(k - j) * tau(j); };
    PolyMatrix M(l + 1, l + 1, r);
    for (int i = 1; i < k; ++i)
        for (int j = 1; j < k; ++j) {
            if (i + j == k) M(i - 1, j - 1) = LaurentPoly::constant(r, k);
            if (i + j > k) M(i - 1, j - 1) = R(i + j - k);
        }
    for (int j = 1; j <= k; ++j) {
        M(k - 1, j - 1) = P(j);
        M(j - 1, k - 1) = P(j);
    }
    M(k - 1, l) = M(l, k - 1) = LaurentPoly::constant(r, 1);
    for (int i = 1; i <= N; ++i)
        for (int j = 1; i + j - 1 <= N; ++j) {
            int s = i + j - 1;
            LaurentPoly q = Rational(4 * s) * tau(k + s);
            if (s < N) q += Rational(s + 1) * tau(k + s + 1);
            M(k + i - 1, k + j - 1) = q;
        }
    for (int i = 1; i <= m; ++i)
        for (int j = 1; i + j - 1 <= m; ++j) {
            int s = i + j - 1;
            LaurentPoly q = Rational(4 * s) * tau(l - m + s);
            if (s < m) q -= Rational(4 * s) * tau(l - m + s + 1);
            M(l - m + i - 1, l - m + j - 1) = q;
        }
    return M;
}

EtaData eta_tau(int l, int k, int m) {
    auto T = tau_chart(l, k, m);
    auto th = metric_theta(l, k, false);
    PolyMatrix gth = congruence(T.dtau_dtheta, th.g);
    EtaData out;
    auto& gt = out.g_tau;
    gt.ring = tau_ring(l);
    gt.coords = numbered("tau", 1, l);
    gt.coords.push_back("Y");
    std::map<std::string, LaurentPoly> bind;
    for (int j = 1; j <= l; ++j) bind.emplace("th" + std::to_string(j), T.theta_of_tau[j - 1]);
    gt.g = gth.substitute(bind).in_ring(gt.ring);
    out.eta = gt.g.diff("tau" + std::to_string(k));
    out.det = out.eta.det().in_ring(gt.ring);
    out.det_expected = eta_det_formula(l, k, m);
    out.det_stated = eta_det_formula(l, k, m, true);
    if (out.det != out.det_expected)
        throw AlgebraError("det eta(tau) post-condition failed: " + out.det.to_string() + " vs " +
                           out.det_expected.to_string());
    auto B = eta_block_form(l, k, m);
    std::ostringstream msg;
    out.block_form_ok = true;
    for (int i = 0; i <= l; ++i)
        for (int j = 0; j <= l; ++j)
            if (out.eta(i, j) != B(i, j)) {
                out.block_form_ok = false;
                msg << "(" << i + 1 << "," << j + 1 << "): " << out.eta(i, j).to_string() << " vs stated "
                    << B(i, j).to_string() << "; ";
            }
    out.block_detail = msg.str();
    return out;
}

void transform_tensors(const PolyMatrix& g, const std::vector<PolyMatrix>& gamma, const PolyMatrix& A,
                       const PolyMatrix& B, const std::vector<std::string>& new_coords, PolyMatrix& g_out,
                       std::vector<PolyMatrix>& gamma_out) {
    int n = g.rows();
    g_out = congruence(B, g);
    gamma_out.clear();
    if (gamma.empty()) return;
    RingPtr r = g_out(0, 0).ring();
    // dB[c](b, j) = d B^b_j / d new^c
    std::vector<PolyMatrix> dB;
    for (int c = 0; c < n; ++c) dB.push_back(B.diff(new_coords[c]));
    PolyMatrix Bt = B.transpose();
    PolyMatrix BG = B * g;  // (B g)^a_j
    for (int c = 0; c < n; ++c) {
        PolyMatrix S(n, n, r);
        for (int s = 0; s < n; ++s) {
            const LaurentPoly& a = A(s, c);
            if (a.is_zero()) continue;
            PolyMatrix t = gamma[s];
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (!t(i, j).is_zero()) t(i, j) = t(i, j) * a;
            S = S + t;
        }
        PolyMatrix out = B * S * Bt + BG * dB[c].transpose();
        gamma_out.push_back(std::move(out));
    }
}

BDReport bd_reduction_check(Family f, int l, int k, bool literal) {
    auto b = invariant_basis(f, l, k);
    auto map = bd_to_c_map(f, l, k, literal);
    int kc = (f == Family::B && k == l) ? l : k;
    const auto& r = b.ring;
    LaurentPoly ylast = map.ylast_factor * b.X;
    LaurentPoly Ec = b.expX(map.ylast_factor);
    std::map<std::string, LaurentPoly> real{{"Y", b.X}, {kESymbol, Ec}};
    for (int j = 1; j <= l; ++j) real.emplace("y" + std::to_string(j), b.ytilde[j - 1]);
    std::vector<LaurentPoly> F;
    for (int j = 0; j < l; ++j) F.push_back(map.ybar[j].substitute(real).in_ring(r));
    F.push_back(ylast);
    PolyMatrix G = b.pushforward(F);
    auto gc = metric_y(l, kc);
    std::map<std::string, LaurentPoly> bind{{"Y", ylast}, {kESymbol, Ec}};
    for (int j = 1; j <= l; ++j) bind.emplace("y" + std::to_string(j), F[j - 1]);
    PolyMatrix C = gc.g.substitute(bind).in_ring(r);
    BDReport rep;
    std::ostringstream msg;
    for (int i = 0; i <= l; ++i)
        for (int j = i; j <= l; ++j)
            if (G(i, j) != C(i, j)) {
                ++rep.mismatched_entries;
                if (rep.mismatched_entries <= 3)
                    msg << "g^{" << i + 1 << "," << j + 1 << "} differs by " << (G(i, j) - C(i, j)).size()
                        << " terms; ";
            }
    rep.ok = rep.mismatched_entries == 0;
    rep.detail = msg.str();
    return rep;
}

} // namespace wf
