#ifndef GEOMAG_POLARIZATION_HPP
#define GEOMAG_POLARIZATION_HPP

// Polarization tensors P0, D, M and the combined P = mu0 M - eps0 D - P0
// for one anomaly's shape and materials, with analytic unit-ball oracles
// and the nonsingularity diagnostic.

#include <complex>
#include <vector>

#include "geomag/layerpot.hpp"
#include "geomag/types.hpp"

namespace geomag {

struct Materials {
    double mu0 = 1.0;   // background permeability
    double eps0 = 1.0;  // free-space permittivity
    double eps_s = 2.0; // shell permittivity (must differ from eps0)
    double omega = 1e-6;

    struct Anomaly {
        double mu = 2.0;
        double eps = 1.0;
        double sigma = 0.0;
    };
    std::vector<Anomaly> anomalies;

    std::complex<double> gamma(int l) const; // eps_l + i sigma_l / omega
};

struct LambdaParams {
    std::complex<double> lambda_gamma;
    double lambda_mu;
    double lambda_eps;
};

LambdaParams lambda_params(const Materials& mat, int l);

struct PolarizationSet {
    CMat3 P0;
    CMat3 D;
    CMat3 M;
    CMat3 P; // mu0 M - eps0 D - P0
};

// Resolvent sign in the D tensor: two conventions are in circulation;
// both are available.
enum class DResolventSign {
    Display,  // (lambda_gamma I + K*)^{-1}  (default)
    Component // (lambda_gamma I - K*)^{-1}
};

struct PolarizationOptions {
    DResolventSign d_resolvent_sign = DResolventSign::Display;
};

PolarizationSet compute_tensors(const NPOperator& op, const Materials& mat,
                                int l, const PolarizationOptions& opts = {});

// Closed forms on the unit ball, from the degree-1 NP eigenvalue 1/6.
PolarizationSet analytic_ball_tensors(const Materials& mat, int l,
                                      const PolarizationOptions& opts = {});

struct NonsingularityDiagnostic {
    std::complex<double> condition_value;
    bool nonsingular;
};

// Ball-shape nonsingularity condition
//   mu_l eps_s^2 + 2(mu0-mu_l) eps_s gamma_l + 2(mu_l+2 mu0) eps0 gamma_l
//   != mu0 eps_s^2
NonsingularityDiagnostic check_nonsingular(const Materials& mat, int l);

} // namespace geomag

#endif
