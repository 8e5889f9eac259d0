#include "wf/linalg.hpp"

#include <unordered_map>

namespace wf {

void SparseSystem::add(std::map<int, Rational> row, Rational rhs) {
    size_t idx = count_++;
    for (auto it = row.begin(); it != row.end();) {
        if (it->second == 0)
            it = row.erase(it);
        else
            ++it;
    }
    while (!row.empty()) {
        int c = row.begin()->first;
        auto p = pivots_.find(c);
        if (p == pivots_.end()) break;
        Rational f = row.begin()->second;
        for (const auto& [j, v] : p->second.a) {
            Rational& x = row[j];
            x -= f * v;
            if (x == 0) row.erase(j);
        }
        rhs -= f * p->second.rhs;
    }
    if (row.empty()) {
        if (rhs != 0) {
            std::map<int, Rational> res;
            res[-1] = rhs;
            throw InconsistentSystem(idx, res);
        }
        return;
    }
    int c = row.begin()->first;
    Rational inv = 1 / row.begin()->second;
    for (auto& [j, v] : row) v *= inv;
    rhs *= inv;
    pivots_[c] = Row{std::move(row), std::move(rhs)};
}

SolveResult SparseSystem::solve() const {
    SolveResult r;
    auto back = [&](std::vector<Rational>& x, bool homogeneous) {
        for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
            int c = it->first;
            Rational v = homogeneous ? Rational(0) : it->second.rhs;
            for (const auto& [j, a] : it->second.a)
                if (j != c) v -= a * x[j];
            x[c] = v;
        }
    };
    r.x.assign(n_, 0);
    back(r.x, false);
    for (int f = 0; f < n_; ++f) {
        if (pivots_.count(f)) continue;
        std::vector<Rational> k(n_, 0);
        k[f] = 1;
        back(k, true);
        r.kernel.push_back(std::move(k));
    }
    return r;
}

SolveResult solve_linear(const std::vector<std::vector<Rational>>& A, const std::vector<Rational>& b) {
    int n = A.empty() ? 0 : static_cast<int>(A[0].size());
    SparseSystem s(n);
    for (size_t i = 0; i < A.size(); ++i) {
        std::map<int, Rational> row;
        for (int j = 0; j < n; ++j)
            if (A[i][j] != 0) row[j] = A[i][j];
        s.add(std::move(row), b[i]);
    }
    return s.solve();
}

PolyMatrix::PolyMatrix(int rows, int cols, const RingPtr& ring)
    : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, LaurentPoly(ring)) {}

PolyMatrix PolyMatrix::identity(int n, const RingPtr& ring) {
    PolyMatrix m(n, n, ring);
    for (int i = 0; i < n; ++i) m(i, i) = LaurentPoly::constant(ring, 1);
    return m;
}

PolyMatrix PolyMatrix::operator*(const PolyMatrix& o) const {
    if (cols_ != o.rows_) throw AlgebraError("matrix shape mismatch");
    RingPtr r = a_.empty() ? nullptr : a_[0].ring();
    PolyMatrix m(rows_, o.cols_, r);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < o.cols_; ++j) {
            LaurentPoly s(r);
            for (int k = 0; k < cols_; ++k) {
                const LaurentPoly& x = (*this)(i, k);
                const LaurentPoly& y = o(k, j);
                if (x.is_zero() || y.is_zero()) continue;
                s += x * y;
            }
            m(i, j) = std::move(s);
        }
    return m;
}

PolyMatrix PolyMatrix::operator+(const PolyMatrix& o) const {
    PolyMatrix m = *this;
    for (size_t i = 0; i < a_.size(); ++i) m.a_[i] += o.a_[i];
    return m;
}

PolyMatrix PolyMatrix::operator-(const PolyMatrix& o) const {
    PolyMatrix m = *this;
    for (size_t i = 0; i < a_.size(); ++i) m.a_[i] -= o.a_[i];
    return m;
}

PolyMatrix PolyMatrix::transpose() const {
    PolyMatrix m(cols_, rows_, nullptr);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

bool PolyMatrix::operator==(const PolyMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) return false;
    for (size_t i = 0; i < a_.size(); ++i)
        if (a_[i] != o.a_[i]) return false;
    return true;
}

bool PolyMatrix::is_symmetric() const {
    if (rows_ != cols_) return false;
    for (int i = 0; i < rows_; ++i)
        for (int j = i + 1; j < cols_; ++j)
            if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
}

bool PolyMatrix::is_zero() const {
    for (const auto& p : a_)
        if (!p.is_zero()) return false;
    return true;
}

PolyMatrix PolyMatrix::diff(const std::string& v) const {
    PolyMatrix m = *this;
    for (auto& p : m.a_) p = p.diff(v);
    return m;
}

PolyMatrix PolyMatrix::substitute(const std::map<std::string, LaurentPoly>& b) const {
    PolyMatrix m = *this;
    for (auto& p : m.a_) p = p.substitute(b);
    return m;
}

PolyMatrix PolyMatrix::in_ring(const RingPtr& r) const {
    PolyMatrix m = *this;
    for (auto& p : m.a_) p = p.in_ring(r);
    return m;
}

LaurentPoly PolyMatrix::det() const {
    if (rows_ != cols_) throw AlgebraError("det of non-square matrix");
    int n = rows_;
    RingPtr r;
    for (const auto& p : a_)
        if (p.ring()) r = merge_rings(r, p.ring());
    if (n == 0) return LaurentPoly::constant(r ? r : make_ring({}), 1);
    // expansion by minors over column subsets; row index = popcount
    std::unordered_map<unsigned, LaurentPoly> memo;
    std::function<LaurentPoly(int, unsigned)> rec = [&](int row, unsigned used) -> LaurentPoly {
        if (row == n) return LaurentPoly::constant(r, 1);
        auto it = memo.find(used);
        if (it != memo.end()) return it->second;
        LaurentPoly s(r);
        int sign = 1;
        for (int c = 0; c < n; ++c) {
            if (used & (1u << c)) continue;
            const LaurentPoly& x = (*this)(row, c);
            if (!x.is_zero()) {
                LaurentPoly t = x * rec(row + 1, used | (1u << c));
                if (sign > 0)
                    s += t;
                else
                    s -= t;
            }
            sign = -sign;
        }
        memo.emplace(used, s);
        return s;
    };
    return rec(0, 0);
}

nlohmann::json PolyMatrix::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (int i = 0; i < rows_; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < cols_; ++k) row.push_back((*this)(i, k).to_json());
        j.push_back(row);
    }
    return j;
}

PolyMatrix invert_unit_jacobian(const PolyMatrix& J) {
    int n = J.rows();
    if (n != J.cols()) throw AlgebraError("non-square Jacobian");
    RingPtr r;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (J(i, j).ring()) r = merge_rings(r, J(i, j).ring());
    if (!r) r = make_ring({});
    PolyMatrix A = J.in_ring(r);
    PolyMatrix B = PolyMatrix::identity(n, r);
    bool ok = true;
    for (int c = 0; c < n && ok; ++c) {
        int piv = -1;
        for (int i = c; i < n; ++i) {
            if (A(i, c).is_monomial()) {
                if (piv < 0 || A(i, c).terms()[0].m.total(A(i, c).nvars()) == 0) piv = i;
            }
        }
        if (piv < 0) {
            ok = false;
            break;
        }
        if (piv != c)
            for (int j = 0; j < n; ++j) {
                std::swap(A(piv, j), A(c, j));
                std::swap(B(piv, j), B(c, j));
            }
        LaurentPoly inv = A(c, c).pow(-1);
        for (int j = 0; j < n; ++j) {
            if (!A(c, j).is_zero()) A(c, j) = A(c, j) * inv;
            if (!B(c, j).is_zero()) B(c, j) = B(c, j) * inv;
        }
        for (int i = 0; i < n; ++i) {
            if (i == c || A(i, c).is_zero()) continue;
            LaurentPoly f = A(i, c);
            for (int j = 0; j < n; ++j) {
                if (!A(c, j).is_zero()) A(i, j) -= f * A(c, j);
                if (!B(c, j).is_zero()) B(i, j) -= f * B(c, j);
            }
        }
    }
    if (ok) return B;
    LaurentPoly d = J.in_ring(r).det();
    if (!d.is_monomial()) throw AlgebraError("non-unit Jacobian");
    LaurentPoly dinv = d.pow(-1);
    PolyMatrix inv(n, n, r);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            PolyMatrix minor(n - 1, n - 1, r);
            for (int a = 0, ra = 0; a < n; ++a) {
                if (a == j) continue;
                for (int b = 0, cb = 0; b < n; ++b) {
                    if (b == i) continue;
                    minor(ra, cb++) = J(a, b).in_ring(r);
                }
                ++ra;
            }
            LaurentPoly m = minor.det() * dinv;
            inv(i, j) = ((i + j) % 2) ? -m : m;
        }
    return inv;
}

PolyMatrix congruence(const PolyMatrix& A, const PolyMatrix& B) {
    return A * B * A.transpose();
}

} // namespace wf
