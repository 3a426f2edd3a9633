#include "geomag/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace geomag {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_coverage(const VectorFieldSamples& samples) {
    if (samples.values.size() != samples.quad.nodes.size()) {
        throw CoverageError("sample count does not match quadrature");
    }
    double w = 0.0;
    for (const QuadNode& node : samples.quad.nodes) w += node.weight;
    if (std::abs(w - 4.0 * kPi) > 1e-6) {
        throw CoverageError("samples do not cover the full sphere");
    }
}

} // namespace

MomentTable extract_moments(const VectorFieldSamples& samples, int nmax) {
    if (nmax < 1) throw DomainError("extract_moments: nmax must be >= 1");
    check_coverage(samples);
    if (samples.quad.exactness < 2 * (nmax + 1)) {
        throw PrecisionError("extract_moments: quadrature exactness below 2(nmax+1)");
    }
    const double R = samples.radius;
    MomentTable table(nmax);
    for (size_t q = 0; q < samples.values.size(); ++q) {
        const QuadNode& node = samples.quad.nodes[q];
        for (int n = 1; n <= nmax; ++n) {
            const double scale =
                -std::pow(R, n + 2) / ((n + 1.0) * (2.0 * n + 1.0)) * node.weight;
            for (int m = -n; m <= n; ++m) {
                const CVec3 N =
                    eval_vector_harmonic(VectorHarmonicKind::N, n, m, node.dir);
                table.at(n, m) += scale * N.dot(samples.values[q]);
            }
        }
    }
    return table;
}

CVec3 eval_moment_field(const MomentTable& moments, const Vec3& x) {
    CVec3 out = CVec3::Zero();
    for (int n = 1; n <= moments.nmax(); ++n) {
        for (int m = -n; m <= n; ++m) {
            out += moments.at(n, m) * grad_irregular_solid_harmonic(n, m, x);
        }
    }
    return out;
}

MomentTable dipole_model_moments(const std::vector<Vec3>& centers,
                                 const std::vector<CVec3>& u, int nmax) {
    if (centers.size() != u.size()) {
        throw DomainError("dipole_model_moments: size mismatch");
    }
    MomentTable table(nmax);
    for (int n = 1; n <= nmax; ++n) {
        for (int m = -n; m <= n; ++m) {
            Complex c(0.0);
            for (size_t l = 0; l < centers.size(); ++l) {
                const CVec3 g = grad_solid_harmonic(n, m, centers[l]).conjugate();
                c += u[l].cwiseProduct(g).sum();
            }
            table.at(n, m) = c / (2.0 * n + 1.0);
        }
    }
    return table;
}

std::vector<CVec3> vector_d_moments(const std::vector<Vec3>& centers,
                                   const std::vector<CVec3>& u, int nmax) {
    if (centers.size() != u.size()) {
        throw DomainError("vector_d_moments: size mismatch");
    }
    std::vector<CVec3> d(static_cast<size_t>((nmax + 1) * (nmax + 1)),
                         CVec3::Zero());
    for (int n = 0; n <= nmax; ++n) {
        for (int m = -n; m <= n; ++m) {
            CVec3 acc = CVec3::Zero();
            for (size_t l = 0; l < centers.size(); ++l) {
                acc += std::conj(solid_harmonic(n, m, centers[l])) * u[l];
            }
            d[static_cast<size_t>(n * (n + 1) + m)] = acc;
        }
    }
    return d;
}

CVec3 project_vector_harmonic(const VectorFieldSamples& samples,
                              ProjectionKind kind) {
    check_coverage(samples);
    if (samples.quad.exactness < 6) {
        throw PrecisionError("project_vector_harmonic: quadrature exactness must be >= 6");
    }
    CVec3 out = CVec3::Zero();
    for (size_t q = 0; q < samples.values.size(); ++q) {
        const QuadNode& node = samples.quad.nodes[q];
        for (int mp = -1; mp <= 1; ++mp) {
            const CVec3 basis = eval_vector_harmonic(
                kind == ProjectionKind::N2 ? VectorHarmonicKind::N
                                           : VectorHarmonicKind::Q,
                1, mp, node.dir);
            out(mp + 1) += node.weight * basis.dot(samples.values[q]);
        }
    }
    return out;
}

AggregateF recover_aggregate_F(const VectorFieldSamples& samples,
                               const ProjectionMatrices& pm, double delta) {
    if (delta <= 0.0) throw DomainError("recover_aggregate_F: delta must be > 0");
    AggregateF out;
    const CVec3 projN = project_vector_harmonic(samples, ProjectionKind::N2);
    out.q_projections = project_vector_harmonic(samples, ProjectionKind::Q0);

    const double R = samples.radius;
    const double scale = -2.0 * std::sqrt(kPi) * R * R * R / (delta * delta * delta);
    out.F = scale * pm.C.partialPivLu().solve(projN);
    out.q_null_residual =
        out.q_projections.norm() / (projN.norm() + 1e-300);
    return out;
}

LocateResult locate_single(const MomentTable& moments, double delta) {
    if (moments.nmax() < 2) {
        throw DomainError("locate_single: moments up to degree 2 required");
    }
    const double d3 = delta * delta * delta;

    // Degree 1: c[1][m] = -(delta^3/3) conj(grad R_1^m)^T w with constant
    // gradients, a 3x3 linear system for w.
    CMat3 A;
    CVec3 rhs;
    for (int m = -1; m <= 1; ++m) {
        A.row(m + 1) =
            grad_solid_harmonic(1, m, Vec3(0, 0, 1)).conjugate().transpose();
        rhs(m + 1) = -3.0 * moments.at(1, m) / d3;
    }
    LocateResult out;
    out.w = A.partialPivLu().solve(rhs);
    if (out.w.norm() < 1e-13 * (rhs.norm() + 1e-300)) {
        throw DomainError("locate_single: vanishing weight (alpha = 0: no change)");
    }

    // Degree 2: c[2][m] = -(delta^3/5) w^T conj(G_m) z with G_m the constant
    // Hessians of R_2^m; 5 complex equations, least squares in real z.
    Eigen::MatrixXd M(10, 3);
    Eigen::VectorXd b(10);
    for (int m = -2; m <= 2; ++m) {
        const CMat3 G = hess_solid_harmonic(2, m, Vec3(0, 0, 1)).conjugate();
        const Eigen::RowVector3cd t = out.w.transpose() * G;
        const Complex r = -5.0 * moments.at(2, m) / d3;
        M.row(2 * (m + 2)) = t.real();
        M.row(2 * (m + 2) + 1) = t.imag();
        b(2 * (m + 2)) = r.real();
        b(2 * (m + 2) + 1) = r.imag();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues()(2) < 1e-10 * svd.singularValues()(0)) {
        if (b.norm() < 1e-12 * (out.w.norm() + 1.0)) {
            out.z = Vec3::Zero();
            return out;
        }
        throw DomainError("locate_single: rank-deficient degree-2 system");
    }
    out.z = svd.solve(b);
    return out;
}

double recover_alpha(const CVec3& w, const CVec3& v, double delta) {
    if (delta <= 0.0 || delta >= 1.0) {
        throw DomainError("recover_alpha: delta must be in (0, 1)");
    }
    const double vn2 = v.squaredNorm();
    if (vn2 <= 0.0) throw DomainError("recover_alpha: v vanishes");
    const Complex rho = v.dot(w) / vn2; // w . conj(v) / |v|^2
    if ((w - rho * v).norm() > 1e-6 * (w.norm() + 1e-300)) {
        throw DomainError("recover_alpha: w and v are not parallel (inconsistent epochs)");
    }
    const double rho_r = rho.real();
    if (1.0 + rho_r <= 0.0) {
        throw DomainError("recover_alpha: 1 + rho <= 0 (impossible delta^{3 alpha})");
    }
    if (rho_r == 0.0) return 0.0;
    return std::log(1.0 + rho_r) / (3.0 * std::log(delta));
}

namespace {

Complex field_projection(const CVec3& v, const Vec3& h0) {
    const double h2 = h0.squaredNorm();
    if (h2 <= 0.0) throw DomainError("recover_mu: background field vanishes");
    const Complex p = (v.transpose() * h0.cast<Complex>())(0) / h2;
    if ((v - p * h0.cast<Complex>()).norm() > 1e-6 * (v.norm() + 1e-300)) {
        throw DomainError("recover_mu: v not parallel to H0 (anisotropy mismatch)");
    }
    return p;
}

} // namespace

double recover_mu_ball(const CVec3& v, const Vec3& h0_at_z,
                       const Materials& mat, int l) {
    (void)l;
    const double p = field_projection(v, h0_at_z).real();

    // P = mu0 M - P0 on the unit ball (sigma > 0, omega -> 0: D -> 0):
    //   p(mu) = 4 pi mu0 efac / ((mu + 2 mu0) le) - (4 pi / 3) / le
    // with le = lambda_eps - 1/6, efac = eps_s / (eps_s - eps0).
    if (mat.eps_s == mat.eps0) {
        throw DomainError("recover_mu_ball: eps_s - eps0 vanishes");
    }
    const double le = (mat.eps_s + mat.eps0) / (2.0 * (mat.eps_s - mat.eps0)) -
                      1.0 / 6.0;
    const double efac = mat.eps_s / (mat.eps_s - mat.eps0);
    const double p0 = 4.0 * kPi / 3.0 / le;

    const double denom = (p + p0) * le;
    if (denom == 0.0 || !std::isfinite(denom)) {
        throw DomainError("recover_mu_ball: p outside the attainable range");
    }
    const double mu = 4.0 * kPi * mat.mu0 * efac / denom - 2.0 * mat.mu0;
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw DomainError("recover_mu_ball: p outside the attainable range");
    }
    if (std::abs(mu - mat.mu0) < 1e-10 * mat.mu0) {
        throw DomainError("recover_mu_ball: contrast-zero limit (mu = mu0 excluded)");
    }
    return mu;
}

double recover_mu_mesh(const CVec3& v, const Vec3& h0_at_z,
                       const Materials& mat, int l, const NPOperator& op) {
    const double p_target = field_projection(v, h0_at_z).real();
    const TriMesh& mesh = op.mesh();
    const int n = mesh.panel_count();

    // mu-independent pieces are factored once; only the lambda_mu resolvent
    // changes inside the root find.
    const LambdaParams lam0 = lambda_params(mat, l);
    const Complex g = mat.gamma(l);
    const ResolventSolver eps_solver(op, lam0.lambda_eps, -1);
    const ResolventSolver gamma_solver(op, lam0.lambda_gamma, 1);

    auto surface_moment = [&](const PanelDensity& phi) {
        CVec3 out = CVec3::Zero();
        for (int i = 0; i < n; ++i) {
            out += phi(i) * mesh.area[i] * mesh.centroid[i].cast<Complex>();
        }
        return out;
    };

    std::vector<PanelDensity> phi_eps(3);
    CMat3 P0, D;
    const Complex d_pref = 1.0 / (g - mat.eps_s) * mat.eps_s / (mat.eps_s - mat.eps0);
    for (int k = 0; k < 3; ++k) {
        PanelDensity nu(n);
        for (int i = 0; i < n; ++i) nu(i) = mesh.normal[i](k);
        phi_eps[k] = eps_solver.apply(nu);
        P0.col(k) = surface_moment(phi_eps[k]);
        D.col(k) = d_pref * surface_moment(gamma_solver.apply(phi_eps[k]));
    }

    const Vec3 h = h0_at_z / h0_at_z.norm();
    auto p_model = [&](double mu) {
        const double lam_mu = (mu + mat.mu0) / (2.0 * (mu - mat.mu0));
        const ResolventSolver mu_solver(op, lam_mu, -1);
        const double m_pref = 1.0 / (mu - mat.mu0) * mat.eps_s / (mat.eps_s - mat.eps0);
        CMat3 M;
        for (int k = 0; k < 3; ++k) {
            M.col(k) = m_pref * surface_moment(mu_solver.apply(phi_eps[k]));
        }
        const CMat3 P = mat.mu0 * M - mat.eps0 * D - P0;
        return ((h.cast<Complex>().transpose() * P * h.cast<Complex>())(0)).real();
    };

    auto safe_mu = [&](double mu) {
        if (std::abs(mu - mat.mu0) < 1e-9 * mat.mu0) {
            return mu + 2e-9 * mat.mu0;
        }
        return mu;
    };

    double lo = 1e-3 * mat.mu0;
    double hi = 1e3 * mat.mu0;
    double flo = p_model(safe_mu(lo)) - p_target;
    double fhi = p_model(safe_mu(hi)) - p_target;
    if (flo * fhi > 0.0) {
        throw DomainError("recover_mu_mesh: p outside the attainable range");
    }

    for (int it = 0; it < 12 && (hi - lo) > 1e-2 * std::min(std::abs(lo), std::abs(hi)); ++it) {
        const double mid = safe_mu(0.5 * (lo + hi));
        const double fm = p_model(mid) - p_target;
        if (flo * fm <= 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }

    // secant polish inside the bracket
    double a = lo, b = hi, fa = flo, fb = fhi;
    for (int it = 0; it < 60; ++it) {
        if (fb == fa) break;
        double c = b - fb * (b - a) / (fb - fa);
        if (!(c > lo && c < hi)) c = 0.5 * (a + b);
        c = safe_mu(c);
        const double fc = p_model(c) - p_target;
        a = b;
        fa = fb;
        b = c;
        fb = fc;
        if (std::abs(b - a) <= 1e-10 * std::abs(b)) break;
    }
    return b;
}

// Variable-projection dipole fit ------------------------------------------

namespace {

struct VarProModel {
    int nmax;
    int L;
    Eigen::VectorXcd data; // stacked moments

    Eigen::VectorXcd stack(const MomentTable& t) const {
        Eigen::VectorXcd out((nmax + 1) * (nmax + 1) - 1);
        int row = 0;
        for (int n = 1; n <= nmax; ++n) {
            for (int m = -n; m <= n; ++m) out(row++) = t.at(n, m);
        }
        return out;
    }

    // Model matrix: column block l holds conj(grad R_n^m(z_l)) / (2n+1).
    Eigen::MatrixXcd design(const std::vector<Vec3>& centers) const {
        Eigen::MatrixXcd M(data.size(), 3 * L);
        int row = 0;
        for (int n = 1; n <= nmax; ++n) {
            for (int m = -n; m <= n; ++m) {
                for (int l = 0; l < L; ++l) {
                    M.block<1, 3>(row, 3 * l) =
                        grad_solid_harmonic(n, m, centers[l])
                            .conjugate()
                            .transpose() /
                        (2.0 * n + 1.0);
                }
                ++row;
            }
        }
        return M;
    }

    // Inner linear solve for the weights; returns the stacked real residual.
    Eigen::VectorXd residual(const Eigen::VectorXd& theta,
                             Eigen::VectorXcd* u_out = nullptr) const {
        std::vector<Vec3> centers(L);
        for (int l = 0; l < L; ++l) centers[l] = theta.segment<3>(3 * l);
        const Eigen::MatrixXcd M = design(centers);
        const Eigen::VectorXcd u = M.colPivHouseholderQr().solve(data);
        if (u_out) *u_out = u;
        const Eigen::VectorXcd r = M * u - data;
        Eigen::VectorXd out(2 * r.size());
        out << r.real(), r.imag();
        return out;
    }
};

struct LMOutcome {
    Eigen::VectorXd theta;
    double cost = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

LMOutcome levenberg_marquardt(const VarProModel& model, Eigen::VectorXd theta,
                              int max_iter) {
    const int p = static_cast<int>(theta.size());
    Eigen::VectorXd r = model.residual(theta);
    double cost = r.squaredNorm();
    double damping = 1e-3;
    LMOutcome out;

    for (int iter = 0; iter < max_iter; ++iter) {
        out.iterations = iter + 1;
        Eigen::MatrixXd J(r.size(), p);
        for (int i = 0; i < p; ++i) {
            const double h = 1e-6 * std::max(1.0, std::abs(theta(i)));
            Eigen::VectorXd tp = theta, tm = theta;
            tp(i) += h;
            tm(i) -= h;
            J.col(i) = (model.residual(tp) - model.residual(tm)) / (2.0 * h);
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;

        bool stepped = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal().array() += damping;
            const Eigen::VectorXd step = A.ldlt().solve(-g);
            const Eigen::VectorXd trial = theta + step;
            const Eigen::VectorXd rt = model.residual(trial);
            const double trial_cost = rt.squaredNorm();
            if (trial_cost < cost) {
                theta = trial;
                r = rt;
                cost = trial_cost;
                damping = std::max(damping / 3.0, 1e-14);
                stepped = true;
                if (step.norm() < 1e-12 || std::sqrt(cost) < 1e-14) {
                    out.converged = true;
                }
                break;
            }
            damping *= 10.0;
        }
        if (!stepped || out.converged) {
            out.converged = out.converged || !stepped;
            break;
        }
    }
    out.theta = theta;
    out.cost = cost;
    return out;
}

double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

} // namespace

ReconstructionResult reconstruct_multi(const VectorFieldSamples& samples_delta,
                                       const VectorFieldSamples* samples_epoch0,
                                       int l0, double delta,
                                       const ReconstructionOptions& options) {
    if (l0 < 1) throw DomainError("reconstruct_multi: l0 must be >= 1");
    const int nmax = std::max(options.nmax, l0 + 2);
    if (nmax < l0 + 2) {
        throw DomainError("reconstruct_multi: nmax must be >= l0 + 2");
    }

    ReconstructionResult result;
    const MomentTable moments = extract_moments(samples_delta, nmax);

    VarProModel model;
    model.nmax = nmax;
    model.L = l0;
    model.data = model.stack(moments);

    const double r_max = options.center_radius > 0.0
                             ? options.center_radius
                             : 0.45 * samples_delta.radius;

    std::vector<Eigen::VectorXd> starts;
    // one informed start from the single-anomaly closed form
    try {
        const LocateResult single = locate_single(moments, delta);
        Eigen::VectorXd theta(3 * l0);
        for (int l = 0; l < l0; ++l) {
            for (int j = 0; j < 3; ++j) {
                theta(3 * l + j) =
                    l == 0 ? single.z(j)
                           : (2.0 * halton(7 * l + j + 1, 2) - 1.0) * r_max / 2.0;
            }
        }
        starts.push_back(theta);
    } catch (const Error&) {
        // zero-weight or degenerate data: quasi-random starts only
    }
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23};
    for (int s = 0; s < options.starts; ++s) {
        Eigen::VectorXd theta(3 * l0);
        for (int i = 0; i < 3 * l0; ++i) {
            theta(i) = (2.0 * halton(s + 1, primes[i % 9]) - 1.0) * r_max /
                       std::sqrt(3.0);
        }
        starts.push_back(theta);
    }

    LMOutcome best;
    for (const auto& start : starts) {
        const LMOutcome fit = levenberg_marquardt(model, start, options.max_iter);
        result.iterations += fit.iterations;
        if (fit.cost < best.cost) best = fit;
        if (best.cost < 1e-28) break;
    }
    if (!best.theta.size()) {
        throw OptimizationError("reconstruct_multi: no fit produced");
    }

    Eigen::VectorXcd u;
    model.residual(best.theta, &u);

    result.anomalies.resize(l0);
    for (int l = 0; l < l0; ++l) {
        result.anomalies[l].z = best.theta.segment<3>(3 * l);
        result.anomalies[l].w = -u.segment<3>(3 * l) / (delta * delta * delta);
    }
    // deterministic output order
    std::sort(result.anomalies.begin(), result.anomalies.end(),
              [](const RecoveredAnomaly& a, const RecoveredAnomaly& b) {
                  if (a.z.x() != b.z.x()) return a.z.x() < b.z.x();
                  if (a.z.y() != b.z.y()) return a.z.y() < b.z.y();
                  return a.z.z() < b.z.z();
              });

    for (int i = 0; i < l0; ++i) {
        for (int j = i + 1; j < l0; ++j) {
            if ((result.anomalies[i].z - result.anomalies[j].z).norm() <
                1e-3 * samples_delta.radius) {
                result.warnings.push_back(
                    "identifiability: fitted centers " + std::to_string(i) + "," +
                    std::to_string(j) + " within merge radius");
            }
        }
    }

    double w_max = 0.0;
    for (const RecoveredAnomaly& a : result.anomalies) {
        w_max = std::max(w_max, a.w.norm());
    }
    for (int l = 0; l < l0; ++l) {
        if (result.anomalies[l].w.norm() <= 1e-6 * w_max) {
            result.warnings.push_back(
                "identifiability: anomaly " + std::to_string(l) +
                " carries a near-zero weight (overparameterized fit?)");
        }
    }

    // RMS misfit against the input samples (field of the fitted dipoles)
    {
        double acc = 0.0;
        for (size_t q = 0; q < samples_delta.values.size(); ++q) {
            const Vec3 x = samples_delta.radius * samples_delta.quad.nodes[q].dir.u;
            CVec3 modeled = CVec3::Zero();
            for (const RecoveredAnomaly& a : result.anomalies) {
                modeled -= delta * delta * delta *
                           (hessian_gamma0(x - a.z).cast<Complex>() * a.w);
            }
            acc += (modeled - samples_delta.values[q]).squaredNorm();
        }
        result.residual = std::sqrt(acc / std::max<size_t>(1, samples_delta.values.size()));
    }

    if (!samples_epoch0) {
        result.warnings.push_back(
            "epoch-0 data required for alpha/mu recovery (blind mode)");
        return result;
    }

    // Same fit on the epoch-0 perturbation, seeded at the recovered centers.
    const MomentTable moments0 = extract_moments(*samples_epoch0, nmax);
    VarProModel model0 = model;
    model0.data = model0.stack(moments0);
    Eigen::VectorXd theta0(3 * l0);
    for (int l = 0; l < l0; ++l) theta0.segment<3>(3 * l) = result.anomalies[l].z;
    LMOutcome fit0 = levenberg_marquardt(model0, theta0, options.max_iter);
    for (int s = 0; s < options.starts / 4; ++s) {
        Eigen::VectorXd theta(3 * l0);
        for (int i = 0; i < 3 * l0; ++i) {
            theta(i) = (2.0 * halton(s + 1, primes[i % 9]) - 1.0) * r_max /
                       std::sqrt(3.0);
        }
        const LMOutcome alt = levenberg_marquardt(model0, theta, options.max_iter);
        if (alt.cost < fit0.cost) fit0 = alt;
    }
    Eigen::VectorXcd u0;
    model0.residual(fit0.theta, &u0);

    // greedy nearest-center pairing
    std::vector<bool> used(l0, false);
    for (int l = 0; l < l0; ++l) {
        int pick = -1;
        double dist = std::numeric_limits<double>::infinity();
        for (int j = 0; j < l0; ++j) {
            if (used[j]) continue;
            const double d =
                (result.anomalies[l].z - Vec3(fit0.theta.segment<3>(3 * j))).norm();
            if (d < dist) {
                dist = d;
                pick = j;
            }
        }
        used[pick] = true;
        result.anomalies[l].v = CVec3(u0.segment<3>(3 * pick) /
                                      (delta * delta * delta));
    }

    for (int l = 0; l < l0; ++l) {
        RecoveredAnomaly& a = result.anomalies[l];
        try {
            a.alpha = recover_alpha(a.w, *a.v, delta);
        } catch (const Error& e) {
            result.warnings.push_back("anomaly " + std::to_string(l) +
                                      ": alpha not recovered: " + e.what());
            continue;
        }
        if (options.background && options.materials) {
            try {
                const Vec3 h0 = eval_background(*options.background, a.z);
                const int mat_l =
                    std::min<int>(l, static_cast<int>(
                                         options.materials->anomalies.size()) -
                                         1);
                a.mu = options.mesh_op
                           ? recover_mu_mesh(*a.v, h0, *options.materials, mat_l,
                                             *options.mesh_op)
                           : recover_mu_ball(*a.v, h0, *options.materials, mat_l);
            } catch (const Error& e) {
                result.warnings.push_back("anomaly " + std::to_string(l) +
                                          ": mu not recovered: " + e.what());
            }
        }
    }

    // separability diagnostic on the fitted exponents
    for (int i = 0; i < l0; ++i) {
        for (int j = 0; j < l0; ++j) {
            if (i == j || !result.anomalies[i].alpha || !result.anomalies[j].alpha)
                continue;
            if (std::abs(3.0 * (*result.anomalies[i].alpha + 1.0) -
                         4.0 * (*result.anomalies[j].alpha + 1.0)) < 1e-6) {
                result.warnings.push_back(
                    "separability: fitted alphas of anomalies " +
                    std::to_string(i) + "," + std::to_string(j) +
                    " violate 3(a_i+1) != 4(a_j+1)");
            }
        }
    }
    return result;
}

} // namespace geomag
