#pragma once

#include "wf/flat.hpp"

#include <cstdint>

namespace wf {

struct FrobeniusData {
    FlatChart chart;
    FlatMetrics metrics;
    QMatrix eta_low;                  // eta_{ij}
    std::vector<std::vector<LaurentPoly>> Fup;  // F^{ij}
    LaurentPoly F;
    std::vector<Rational> euler;      // coefficients of t^a d_a, last entry is the constant 1/k on d_{l+1}
};

FrobeniusData solve_potential(int l, int k, int m, bool christoffel = true);
FrobeniusData solve_potential(FlatChart chart, FlatMetrics metrics);

// E(p) with E = sum d~_a t^a d_a + (1/k) d_{l+1}
LaurentPoly euler_apply(const FrobeniusData& d, const LaurentPoly& p);
// monomials whose second derivatives all vanish (no _E, total degree <= 1 in t, Y)
LaurentPoly drop_affine(const LaurentPoly& p);
// monomials of total degree <= 2 in t, Y with no _E
bool is_quadratic(const LaurentPoly& p);

struct WdvvReport {
    bool ok = true;
    long checked = 0;
    size_t max_terms = 0;
    std::vector<std::array<int, 4>> failures;  // 1-based (i, j, p, q)
};

// sum_e c_{ij}^e c_{epq} = sum_e c_{pj}^e c_{eiq} for third derivatives c_{abc} of F.
// samples = 0 checks every quadruple, otherwise a seeded sample.
WdvvReport wdvv_check(const LaurentPoly& F, const QMatrix& eta, const std::vector<std::string>& coords, int samples = 0,
                      uint64_t seed = 0);

struct AxiomReport {
    bool ok = true;
    std::vector<std::string> failures;
    std::vector<std::string> passed;
};

AxiomReport axioms_check(const FrobeniusData& d);

struct EquivalenceReport {
    bool degrees_equal = false;
    bool signature_equal = false;
    bool coefficient_degrees_equal = false;
    std::string detail;
};

EquivalenceReport equivalence_report(int l, int k, int m);

// F - G up to monomials with vanishing second derivatives and quadratic terms
bool potentials_agree(const LaurentPoly& F, const LaurentPoly& G);

QMatrix invert_rational(const QMatrix& A);

} // namespace wf
