#pragma once

#include "wf/frobenius.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>

namespace wf {

using cd = std::complex<double>;

class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// lambda(z) = a0 (z-1)^{-m} z^{-n} prod (z - p_j^2), z = cos^2(phi)
struct LGPoint {
    int k = 1, m = 0, n = 0, l = 1;
    cd a0;
    std::vector<cd> p_sq;  // p_1^2..p_l^2
    std::vector<cd> a;     // a_0..a_l
    std::vector<cd> phi;   // phi_1..phi_{l+1}, p_j = cos(phi_j), a0 = exp(2 i k phi_{l+1})

    cd lambda_z(cd z) const;        // product form
    cd lambda_coeff_z(cd z) const;  // (z-1)^{-m} sum a_j z^{k+m-j}
    cd dlambda_coeff_z(cd z) const;
    cd lambda(cd phi) const { return lambda_z(std::cos(phi) * std::cos(phi)); }
    cd lambda_coeff(cd phi) const { return lambda_coeff_z(std::cos(phi) * std::cos(phi)); }
    // d lambda / d phi from the coefficient form
    cd dlambda(cd phi) const;
    // d lambda / d a_j at fixed phi
    cd dlambda_da(int j, cd phi) const;
};

LGPoint build_point(int k, int m, int n, cd a0, const std::vector<cd>& p_sq);
LGPoint point_from_phi(int k, int m, int n, const std::vector<cd>& phi);
// p_j^2 recovered as roots of sum a_j z^{l-j}
LGPoint point_from_coeffs(int k, int m, int n, const std::vector<cd>& a);

struct CriticalData {
    std::vector<cd> q_sq, psi, u, lam2;
    std::vector<int> c;       // 1 on the roots z = 1 (m = 0) and z = 0 (n = 0), 2 otherwise
    std::vector<bool> forced;
    bool conditioning_warning = false;
    double separation = 0;   // least distance among q^2, p^2, 0 and 1 (forced roots excluded)
    double value_ratio = 0;  // min |u| / max |u|; u = 0 on the discriminant
};

// Roots of z(z-1) d lambda/dz. With track set, roots are matched to the
// given q^2 values instead of being sorted.
CriticalData critical_data(const LGPoint& pt, const std::vector<cd>* track = nullptr);

struct CanonicalMetrics {
    std::vector<cd> eta;  // eta_{aa}
    std::vector<cd> g;    // g_{aa}
};

CanonicalMetrics metrics_canonical(const LGPoint& pt, const CriticalData& cd);

// d u_a / d a_j = d lambda / d a_j at psi_a
Eigen::MatrixXcd du_da(const LGPoint& pt, const CriticalData& cd);
// d u_a / d phi_b
Eigen::MatrixXcd du_dphi(const LGPoint& pt, const CriticalData& cd);
// d phi_b / d u_a as [b][a] from the closed form; lead is the root used for phi_{l+1}
Eigen::MatrixXcd dphi_du(const LGPoint& pt, const CriticalData& cd, int lead = -1);
Eigen::MatrixXcd dphi_du_fd(const LGPoint& pt, const CriticalData& cd, double h = 1e-6);

struct ResidueMetrics {
    Eigen::MatrixXcd eta, g;  // canonical lower components
    double richardson = 0;    // change when halving the radius, relative
};

ResidueMetrics metrics_residue(const LGPoint& pt, const CriticalData& cd, double radius = 1e-3, int nodes = 64);
// c(d_a, d_b, d_c) in canonical directions, index a*(n*n) + b*n + c
std::vector<cd> structure_constants(const LGPoint& pt, const CriticalData& cd, double radius = 1e-3, int nodes = 64);

struct Check {
    Check() = default;
    Check(std::string n, double err, double t, std::string why = "")
        : name(std::move(n)), max_err(err), tol(t), note(std::move(why)) {}
    std::string name;
    double max_err = 0;
    double tol = 0;
    bool ok = true;
    std::string note;
};

struct LemmaReport {
    bool ok = true;
    std::vector<Check> checks;
    void add(Check c);
};

LemmaReport lemma_suite(const LGPoint& pt, const CriticalData& cd);

double relative_error(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

struct SampleFailure {
    int sample = 0;
    std::vector<double> x;
    std::string what;
};

struct IsoReport {
    int l = 0, k = 0, m = 0, samples = 0;
    bool ok = true;
    double case_err = 0;    // g in phi vs diag(1/4, .., -1/(4k))
    double g_err = 0;       // g pushed to t vs g(t)
    double eta_err = 0;     // eta pushed to t vs eta_scale * eta
    double c_err = 0;       // canonical structure constants vs F_ijk
    double eta_scale = 0;   // 4^k
    double newton_residual = 0;
    int redrawn = 0;  // draws rejected as degenerate or too close to the discriminant
    std::vector<SampleFailure> failures;
};

// threads <= 0 uses WEYL_FROBENIUS_THREADS or the hardware count
IsoReport isomorphism_check(int l, int k, int m, int samples, uint64_t seed, double tol = 1e-8, int threads = 0);

struct LemmaSuiteSummary {
    int k = 0, m = 0, n = 0, points = 0, skipped = 0;  // skipped: rejected draws
    bool ok = true;
    std::vector<Check> worst;  // per check name, the largest error seen
    double residue_err = 0;
    double richardson = 0;
};

LemmaSuiteSummary lemma_suite_random(int k, int m, int n, int points, uint64_t seed, int threads = 0);

int worker_threads(int requested = 0);

} // namespace wf
