#pragma once

#include "wf/pencil.hpp"
#include "wf/series.hpp"

namespace wf {

struct ZChart {
    int l = 0, k = 0, m = 0;
    RingPtr ring;                        // z1..zl, Y, _E
    std::vector<LaurentPoly> p;          // p_1..p_k over tau_ring, z^j = tau^j + p_j
    QMatrix B2, B3;                      // tau^{k+i} = sum_a B2[i][a] z^{k+a}, same for the last block
    std::vector<LaurentPoly> z_of_tau;   // over tau_ring
    std::vector<LaurentPoly> tau_of_z;   // over ring
    PolyMatrix dz_dtau;                  // over tau_ring, index l = Y
    PolyMatrix eta;                      // eta^{ij}(z)
    bool reduced_form_ok = false;
    std::string detail;
};

RingPtr z_ring(int l);
ZChart build_z_chart(int l, int k, int m);
// eta(z) with R_j = P_j = 0, Q_s = 4s z^{k+s}, S_r = 4r z^{l-m+r}
PolyMatrix reduced_eta_form(int l, int k, int m);

// Flat coordinates b^1..b^n of eta^{ij} = 4(i+j-1) a^{i+j-1} (zero past n),
// a^i of weight 1.
struct HankelFlat {
    int n = 0;
    RingPtr wring;                     // w1..w_{n-1}, om  (om = b^n)
    RingPtr bring;                     // b1..bn
    std::vector<LaurentPoly> a_of_w;   // over wring
    std::vector<LaurentPoly> b_of_w;   // over wring
    std::vector<LaurentPoly> h;        // h_1..h_{n-1} of the triangular form, over wring
    std::vector<LaurentPoly> a_of_b;   // over bring
    QMatrix eta;                       // constant eta^{ij} in the b chart
};

const HankelFlat& hankel_flat(int n);

struct FlatChart {
    int l = 0, k = 0, m = 0;
    std::vector<Rational> degrees;       // d~_1..d~_{l+1}
    RingPtr ring;                        // t1..tl, Y, _E with _E = e^Y
    std::vector<std::string> coords;     // t1..tl, Y
    ZChart z;
    std::vector<LaurentPoly> z_of_t, tau_of_t, theta_of_t, y_of_t;
    PolyMatrix dtheta_dt;                // rows theta^1..theta^l, Y
    PolyMatrix dt_dtheta;
};

std::vector<Rational> flat_degrees(int l, int k, int m);
// 1-based dual index i*
int dual_index(int l, int k, int m, int i);
// closed form; literal = true keeps the corner value 2 for 1x1 blocks
QMatrix eta_closed_form(int l, int k, int m, bool literal = false);

FlatChart build_flat_chart(int l, int k, int m);

struct FlatMetrics {
    QMatrix eta;
    MetricData g;  // over chart.ring, gamma filled when requested
};

// g(t) from g(theta) through the inverse of d theta / d t; eta = d g / d t^k,
// throws if eta is not constant
FlatMetrics flat_metrics(const FlatChart& chart, bool christoffel = true);
// g(t) through the chain tau -> z -> t, each step inverted separately
PolyMatrix flat_metric_stepwise(const FlatChart& chart);

// weighted-homogeneous monomials of the given degree in the listed variables
std::vector<LaurentPoly> weighted_monomials(const RingPtr& r, const std::vector<std::string>& vars,
                                            const std::vector<Rational>& weights, const Rational& degree);

// Lower Christoffel symbols gam[c][a][b] of a contravariant metric on vars.
std::vector<std::vector<std::vector<LaurentPoly>>> lower_christoffel(const PolyMatrix& eta,
                                                                     const std::vector<std::string>& vars);
// Flat function lead + sum x_u basis[u]; throws if none or not unique.
LaurentPoly solve_flat_function(const std::vector<std::vector<std::vector<LaurentPoly>>>& gam,
                                const std::vector<std::string>& vars, const LaurentPoly& lead,
                                const std::vector<LaurentPoly>& basis);

} // namespace wf
