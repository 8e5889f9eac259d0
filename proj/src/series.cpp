#include "wf/series.hpp"

#include "wf/linalg.hpp"

#include <algorithm>
#include <map>

namespace wf {

PolySeries PolySeries::operator*(const PolySeries& o) const {
    PolySeries r;
    r.order = std::min(order, o.order);
    r.c.assign(r.order + 1, 0);
    for (int a = 0; a <= r.order; ++a)
        for (int b = 0; a + b <= r.order; ++b) r.c[a + b] += c[a] * o.c[b];
    return r;
}

PolySeries PolySeries::derivative() const {
    PolySeries r;
    r.order = std::max(order - 1, 0);
    r.c.assign(r.order + 1, 0);
    for (int a = 1; a <= order; ++a) r.c[a - 1] = c[a] * a;
    return r;
}

PolySeries PolySeries::shift(int s) const {
    PolySeries r;
    r.order = order + s;
    r.c.assign(r.order + 1, 0);
    for (int a = 0; a <= order; ++a) r.c[a + s] = c[a];
    return r;
}

Rational series_kappa(SeriesKind kind, int i, int j) {
    if (kind == SeriesKind::CoshSinh) return Rational(i + j);
    return Rational(-4 * (i + j - 1));
}

std::vector<std::vector<Rational>> block_recursion_table(SeriesKind kind, int n) {
    std::vector<std::vector<Rational>> B(n + 2, std::vector<Rational>(n + 2, 0));
    for (int j = 1; j <= n + 1; ++j) B[j][j] = 1;
    for (int g = 2; g <= n; ++g) {
        // unknowns B^1_g..B^{g-1}_g -> indices 0..g-2
        SparseSystem sys(g - 1);
        auto idx = [&](int i) { return i - 1; };
        for (int i = 1; i <= g; ++i)
            for (int j = i; i + j <= g; ++j) {
                std::map<int, Rational> row;
                Rational rhs = 0;
                auto lhs_term = [&](int upper, const Rational& coef) {
                    if (upper < g)
                        row[idx(upper)] += coef;
                    else if (upper == g)
                        rhs -= coef;
                };
                lhs_term(i + j - 1, Rational(4 * (i + j - 1)));
                lhs_term(i + j, series_kappa(kind, i, j));
                // 4 g sum_{a+b=g+1} B^i_a B^j_b ; terms involving level-g unknowns are linear
                for (int a = i; a <= g + 1 - j; ++a) {
                    int b = g + 1 - a;
                    Rational f = 4 * g;
                    if (a == g) {
                        row[idx(i)] -= f * B[j][b];  // B^i_g * B^j_1 (b=1 only if j=1)
                    } else if (b == g) {
                        row[idx(j)] -= f * B[i][a];
                    } else {
                        rhs += f * B[i][a] * B[j][b];
                    }
                }
                sys.add(std::move(row), rhs);
            }
        SolveResult s = sys.solve();
        if (!s.kernel.empty()) throw AlgebraError("underdetermined block recursion");
        for (int i = 1; i < g; ++i) B[i][g] = s.x[idx(i)];
    }
    B.resize(n + 1);
    for (auto& r : B) r.resize(n + 1);
    return B;
}

PolySeries series_coeffs(SeriesKind kind, int i, int order) {
    auto B = block_recursion_table(kind, i + order);
    PolySeries s;
    s.order = order;
    s.c.assign(order + 1, 0);
    for (int a = 0; a <= order; ++a) s.c[a] = B[i][i + a];
    return s;
}

bool series_recursion_holds(SeriesKind kind, int i, int j, int order) {
    int need = order + 2;
    auto f = [&](int n) { return series_coeffs(kind, n, need); };
    PolySeries lhs1 = f(i + j - 1).shift(i + j - 2);
    PolySeries lhs2 = f(i + j).shift(i + j - 1);
    PolySeries rhs = (f(i) * f(j)).shift(i + j - 1).derivative();
    Rational k = series_kappa(kind, i, j);
    for (int a = 0; a <= order; ++a) {
        Rational l = 4 * (i + j - 1) * lhs1.c[a] + k * lhs2.c[a];
        if (l != 4 * rhs.c[a]) return false;
    }
    return true;
}

} // namespace wf
