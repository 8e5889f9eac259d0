#pragma once

#include "wf/linalg.hpp"

#include <string>
#include <vector>

namespace wf {

enum class Family { B, C, D };

Family parse_family(const std::string& s);
char family_char(Family f);

struct RootSystemData {
    Family family;
    int l = 0, k = 0;
    std::vector<Rational> d;  // d_1..d_l (index 0..l-1)
    Rational gamma;
    int cartan_det = 0;
};

RootSystemData make_root_data(Family f, int l, int k);

using QMatrix = std::vector<std::vector<Rational>>;

// 4 pi^2 (dx_i, dx_j), i,j = 1..l+1 (index 0..l)
QMatrix tilde_metric(Family f, int l, int k);
// v_j = sum_i V[j][i] x_i
QMatrix v_coefficients(Family f, int l);
// the ambient form in (mu_1..mu_l, X) coordinates, mu_j = 2 pi i v_j, X = 2 pi i x_{l+1}
QMatrix tilde_metric_mu(Family f, int l, int k);

// Invariant Fourier polynomials on the torus. Ring: q1..ql (C) or h1..hl
// (half-angle units h_j = e^{i pi v_j}, B and D), plus Z and _E = e^Z with
// Z = X / e_den.
struct InvariantBasis {
    RootSystemData root;
    RingPtr ring;
    bool half_angle = false;
    int e_den = 1;
    std::vector<LaurentPoly> xi;      // xi_1..xi_l
    std::vector<LaurentPoly> y;       // y_1..y_l
    std::vector<LaurentPoly> ytilde;  // e^{d_j X} y_j
    LaurentPoly X;                    // 2 pi i x_{l+1} = e_den * Z

    // derivative along mu_j (j < l) or X (j == l)
    LaurentPoly d_mu(const LaurentPoly& p, int j) const;
    // contravariant pushforward of the ambient form to the functions F
    PolyMatrix pushforward(const std::vector<LaurentPoly>& F) const;
    // E^n with E = e^X (n may be rational with denominator dividing e_den)
    LaurentPoly expX(const Rational& n) const;
};

InvariantBasis invariant_basis(Family f, int l, int k);

// terms of maximal weight, weight = sum_j w_j e_j
LaurentPoly top_part(const LaurentPoly& p, const std::vector<Rational>& w);

struct ChevalleyReport {
    bool ok = false;           // determinant identity (see README for the reading of the stated formula)
    bool model_ok = false;     // limit functions derived from the basis agree with the rho model
    bool stated_ok = false;   // literal stated formula
    int points = 0;
    std::string detail;
};

ChevalleyReport chevalley_limit_check(Family f, int l, int k, int points = 5, unsigned seed = 0);

// Substitution ybar(y) for B/D -> C. The polynomials live in the ring
// {y1..yl, Y, _E} with _E = e^{ybar^{l+1}}; ybar_last is ybar^{l+1} as a
// multiple of Y. literal = true gives the stated (uncorrected) formulas.
struct BDMap {
    Family family;
    int l = 0, k = 0;
    RingPtr ring;
    std::vector<LaurentPoly> ybar;  // ybar^1..ybar^l
    Rational ylast_factor;          // ybar^{l+1} = factor * y^{l+1}
    bool literal = false;
};

BDMap bd_to_c_map(Family f, int l, int k, bool literal = false);

} // namespace wf
