#pragma once

#include "wf/rational.hpp"

#include <vector>

namespace wf {

enum class SeriesKind { CoshSinh, Tanh };

struct PolySeries {
    std::vector<Rational> c;  // c[a] is the coefficient of t^a
    int order = 0;            // coefficients known for a <= order

    PolySeries operator*(const PolySeries& o) const;
    PolySeries derivative() const;
    PolySeries shift(int s) const;  // multiply by t^s (s >= 0), keeps order + s
};

// kappa(i,j) of the block recursion
Rational series_kappa(SeriesKind kind, int i, int j);

// Solves the triangular system
//   4(i+j-1) B^{i+j-1}_g + kappa(i,j) B^{i+j}_g = 4 g sum_{a+b=g+1} B^i_a B^j_b,  i+j <= g <= n
// with B^j_j = 1, B^j_a = 0 for a < j. Returns B as an (n+1)x(n+1) table indexed [j][a].
std::vector<std::vector<Rational>> block_recursion_table(SeriesKind kind, int n);

// f^i(t) = sum_a B^i_{i+a} t^a truncated at t^order.
PolySeries series_coeffs(SeriesKind kind, int i, int order);

// Checks 4(i+j-1) t^{i+j-2} f^{i+j-1} + kappa t^{i+j-1} f^{i+j} = 4 d/dt (t^{i+j-1} f^i f^j)
// coefficientwise up to t^order.
bool series_recursion_holds(SeriesKind kind, int i, int j, int order);

} // namespace wf
