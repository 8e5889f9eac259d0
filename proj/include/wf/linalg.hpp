#pragma once

#include "wf/laurent.hpp"

#include <map>
#include <vector>

namespace wf {

class InconsistentSystem : public AlgebraError {
public:
    InconsistentSystem(size_t row, std::map<int, Rational> residual)
        : AlgebraError("inconsistent linear system (equation " + std::to_string(row) + ")"),
          row_(row), residual_(std::move(residual)) {}
    size_t row() const { return row_; }
    // the equation after reduction: all unknown coefficients zero, constant nonzero
    const std::map<int, Rational>& residual() const { return residual_; }

private:
    size_t row_;
    std::map<int, Rational> residual_;
};

struct SolveResult {
    std::vector<Rational> x;                    // particular solution, free variables 0
    std::vector<std::vector<Rational>> kernel;  // basis of the null space
};

// Incremental sparse Gaussian elimination over Q. Equations are
// sum_j a_j x_j = rhs.
class SparseSystem {
public:
    explicit SparseSystem(int nunknowns) : n_(nunknowns) {}
    void add(std::map<int, Rational> row, Rational rhs);
    SolveResult solve() const;
    int rank() const { return static_cast<int>(pivots_.size()); }
    int unknowns() const { return n_; }

private:
    struct Row {
        std::map<int, Rational> a;
        Rational rhs;
    };
    int n_;
    size_t count_ = 0;
    std::map<int, Row> pivots_;  // pivot column -> normalized row
};

SolveResult solve_linear(const std::vector<std::vector<Rational>>& A, const std::vector<Rational>& b);

class PolyMatrix {
public:
    PolyMatrix() = default;
    PolyMatrix(int rows, int cols, const RingPtr& ring);
    static PolyMatrix identity(int n, const RingPtr& ring);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    LaurentPoly& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    const LaurentPoly& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    PolyMatrix operator*(const PolyMatrix& o) const;
    PolyMatrix operator+(const PolyMatrix& o) const;
    PolyMatrix operator-(const PolyMatrix& o) const;
    PolyMatrix transpose() const;
    bool operator==(const PolyMatrix& o) const;
    bool is_symmetric() const;
    bool is_zero() const;
    PolyMatrix diff(const std::string& v) const;
    PolyMatrix substitute(const std::map<std::string, LaurentPoly>& b) const;
    PolyMatrix in_ring(const RingPtr& r) const;

    LaurentPoly det() const;

    nlohmann::json to_json() const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<LaurentPoly> a_;
};

// Exact inverse of a matrix whose determinant is a unit of the Laurent ring.
PolyMatrix invert_unit_jacobian(const PolyMatrix& J);

// A * B * A^T
PolyMatrix congruence(const PolyMatrix& A, const PolyMatrix& B);

} // namespace wf
