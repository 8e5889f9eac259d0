#pragma once

#include "wf/weyl.hpp"

namespace wf {

// th0..thl, theta^0 kept as a symbol
RingPtr theta_sym_ring(int l);
// th1..thl, Y, _E with _E = e^Y (theta^0 = _E^k)
RingPtr theta_ring(int l);
RingPtr y_ring(int l);
RingPtr tau_ring(int l);

struct MetricData {
    RingPtr ring;
    std::vector<std::string> coords;  // coordinate names, last one is the exponential variable
    PolyMatrix g;
    std::vector<PolyMatrix> gamma;    // gamma[r](i, j) = Gamma^{ij}_r, empty if not computed
};

// g^{ij}(theta), 0 <= i,j <= l+1, over theta_sym_ring; row l+1 is mu_{l+1}
PolyMatrix metric_theta_sym(int l, int k);
// Gamma^{ij}_r for 0 <= i,j,r <= l over theta_sym_ring
std::vector<PolyMatrix> christoffel_theta_sym(int l, int k);

// chart (theta^1..theta^l, Y)
MetricData metric_theta(int l, int k, bool christoffel = true);
// chart (y^1..y^l, Y), metric only
MetricData metric_y(int l, int k);

struct UnityData {
    int l = 0, k = 0, m = 0;
    std::vector<Rational> c;  // c_0..c_l, zero below k
};

UnityData unity_coeffs(int l, int k, int m);
// residual of the separated equation for P_0 = sum c_j u^{l-j}; zero for valid data
LaurentPoly unity_residual(const UnityData& u);

struct TauChart {
    int l = 0, k = 0, m = 0;
    QMatrix M, Minv;                        // theta^i = sum_j M[i][j] varpi^j, i,j = 0..l
    std::vector<LaurentPoly> theta_of_tau;  // theta^1..theta^l over tau_ring
    std::vector<LaurentPoly> tau_of_theta;  // tau^1..tau^l over theta_ring
    PolyMatrix dtau_dtheta;                 // over theta_ring, index l = Y
};

TauChart tau_chart(int l, int k, int m);

struct EtaData {
    MetricData g_tau;
    PolyMatrix eta;            // d g(tau) / d tau^k
    LaurentPoly det;
    LaurentPoly det_expected;
    LaurentPoly det_stated;  // with the (-1)^l sign
    bool block_form_ok = false;
    std::string block_detail;
};

// determinant closed form, 0^0 = 1. The sign follows from the block form,
// -(-1)^{C(k-1,2)+C(l-k-m,2)+C(m,2)}; stated_sign uses (-1)^l instead.
LaurentPoly eta_det_formula(int l, int k, int m, bool stated_sign = false);
// builds g(tau) and eta(tau); throws AlgebraError if the determinant
// post-condition fails
EtaData eta_tau(int l, int k, int m);
// stated block form of eta(tau), tau^0 read as 1
PolyMatrix eta_block_form(int l, int k, int m);

// Pushes a contravariant metric and its connection through a change of
// coordinates. A = d(old)/d(new) and B = A^{-1}, both over the new ring; g and
// gamma already expressed over the new ring.
void transform_tensors(const PolyMatrix& g, const std::vector<PolyMatrix>& gamma, const PolyMatrix& A,
                       const PolyMatrix& B, const std::vector<std::string>& new_coords, PolyMatrix& g_out,
                       std::vector<PolyMatrix>& gamma_out);

struct BDReport {
    bool ok = false;
    int mismatched_entries = 0;
    std::string detail;
};

// pushforward of the B/D metric through bd_to_c_map against the C_l metric,
// both realized on the torus of the B/D root system
BDReport bd_reduction_check(Family f, int l, int k, bool literal = false);

// polynomial quotient by (u - v); throws if not exact
LaurentPoly divide_u_minus_v(const LaurentPoly& N, const std::string& u, const std::string& v);

} // namespace wf
