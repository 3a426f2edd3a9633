#include "geomag/polarization.hpp"

#include <cmath>

namespace geomag {

namespace {
constexpr double kPi = 3.14159265358979323846;

const Materials::Anomaly& anomaly_at(const Materials& mat, int l) {
    if (l < 0 || l >= static_cast<int>(mat.anomalies.size())) {
        throw DomainError("materials: anomaly index out of range");
    }
    return mat.anomalies[l];
}
} // namespace

std::complex<double> Materials::gamma(int l) const {
    const Anomaly& a = anomaly_at(*this, l);
    if (a.sigma > 0.0 && omega <= 0.0) {
        throw DomainError("materials: omega must be positive when sigma > 0");
    }
    return {a.eps, a.sigma > 0.0 ? a.sigma / omega : 0.0};
}

LambdaParams lambda_params(const Materials& mat, int l) {
    const Materials::Anomaly& a = anomaly_at(mat, l);
    if (a.mu == mat.mu0) {
        throw DomainError("lambda_params: mu_l - mu0 vanishes");
    }
    if (mat.eps_s == mat.eps0) {
        throw DomainError("lambda_params: eps_s - eps0 vanishes");
    }
    const std::complex<double> g = mat.gamma(l);
    if (g == std::complex<double>(mat.eps_s, 0.0)) {
        throw DomainError("lambda_params: gamma_l - eps_s vanishes");
    }
    LambdaParams lam;
    lam.lambda_gamma = (g + mat.eps_s) / (2.0 * (g - mat.eps_s));
    lam.lambda_mu = (a.mu + mat.mu0) / (2.0 * (a.mu - mat.mu0));
    lam.lambda_eps = (mat.eps_s + mat.eps0) / (2.0 * (mat.eps_s - mat.eps0));
    return lam;
}

PolarizationSet compute_tensors(const NPOperator& op, const Materials& mat,
                                int l, const PolarizationOptions& opts) {
    const Materials::Anomaly& a = anomaly_at(mat, l);
    const LambdaParams lam = lambda_params(mat, l);
    const std::complex<double> g = mat.gamma(l);
    const TriMesh& mesh = op.mesh();
    const int n = mesh.panel_count();

    const int d_sign = opts.d_resolvent_sign == DResolventSign::Display ? 1 : -1;
    const ResolventSolver eps_solver(op, lam.lambda_eps, -1);
    const ResolventSolver gamma_solver(op, lam.lambda_gamma, d_sign);
    const ResolventSolver mu_solver(op, lam.lambda_mu, -1);

    const std::complex<double> d_pref =
        1.0 / (g - mat.eps_s) * mat.eps_s / (mat.eps_s - mat.eps0);
    const double m_pref =
        1.0 / (a.mu - mat.mu0) * mat.eps_s / (mat.eps_s - mat.eps0);

    auto surface_moment = [&](const PanelDensity& phi) {
        CVec3 v = CVec3::Zero();
        for (int i = 0; i < n; ++i) {
            v += phi(i) * mesh.area[i] * mesh.centroid[i].cast<Complex>();
        }
        return v;
    };

    PolarizationSet out;
    for (int k = 0; k < 3; ++k) {
        PanelDensity nu(n);
        for (int i = 0; i < n; ++i) nu(i) = mesh.normal[i](k);

        const PanelDensity phi_eps = eps_solver.apply(nu);
        out.P0.col(k) = surface_moment(phi_eps);
        out.D.col(k) = d_pref * surface_moment(gamma_solver.apply(phi_eps));
        out.M.col(k) = m_pref * surface_moment(mu_solver.apply(phi_eps));
    }
    out.P = mat.mu0 * out.M - mat.eps0 * out.D - out.P0;
    return out;
}

PolarizationSet analytic_ball_tensors(const Materials& mat, int l,
                                      const PolarizationOptions& opts) {
    const Materials::Anomaly& a = anomaly_at(mat, l);
    const LambdaParams lam = lambda_params(mat, l);
    const std::complex<double> g = mat.gamma(l);
    const double ball = 4.0 * kPi / 3.0;

    // (lambda I +- K*)^{-1}[nu] = nu / (lambda +- 1/6) on the unit sphere,
    // and int y nu^T ds = (4 pi / 3) I.
    const std::complex<double> gamma_res =
        opts.d_resolvent_sign == DResolventSign::Display
            ? lam.lambda_gamma + 1.0 / 6.0
            : lam.lambda_gamma - 1.0 / 6.0;

    PolarizationSet out;
    out.P0 = ball / (lam.lambda_eps - 1.0 / 6.0) * CMat3::Identity();
    out.D = 1.0 / (g - mat.eps_s) * mat.eps_s / (mat.eps_s - mat.eps0) * ball /
            (gamma_res * (lam.lambda_eps - 1.0 / 6.0)) * CMat3::Identity();
    out.M = 1.0 / (a.mu - mat.mu0) * mat.eps_s / (mat.eps_s - mat.eps0) * ball /
            ((lam.lambda_mu - 1.0 / 6.0) * (lam.lambda_eps - 1.0 / 6.0)) *
            CMat3::Identity();
    out.P = mat.mu0 * out.M - mat.eps0 * out.D - out.P0;
    return out;
}

NonsingularityDiagnostic check_nonsingular(const Materials& mat, int l) {
    const Materials::Anomaly& a = anomaly_at(mat, l);
    const std::complex<double> g = mat.gamma(l);
    const double es2 = mat.eps_s * mat.eps_s;
    NonsingularityDiagnostic diag;
    diag.condition_value = a.mu * es2 + 2.0 * (mat.mu0 - a.mu) * mat.eps_s * g +
                           2.0 * (a.mu + 2.0 * mat.mu0) * mat.eps0 * g -
                           mat.mu0 * es2;
    const double scale = mat.mu0 * es2;
    diag.nonsingular = std::abs(diag.condition_value) > 1e-10 * scale;
    return diag;
}

} // namespace geomag
