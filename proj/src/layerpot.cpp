#include "geomag/layerpot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace geomag {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

NPOperator assemble_K_star(const TriMesh& mesh) {
    const int n = mesh.panel_count();
    for (int i = 0; i < n; ++i) {
        if (mesh.area[i] < 1e-14) throw MeshError("degenerate panel in K* assembly");
    }
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const Vec3 d = mesh.centroid[i] - mesh.centroid[j];
            const double r = d.norm();
            const double v =
                mesh.area[j] * mesh.normal[i].dot(d) / (4.0 * kPi * r * r * r);
            K(i, j) = v;
            row += v;
        }
        // Row-sum calibration: K*[1] = 1/2 on a closed surface. The planar
        // self-panel contribution is zero; this restores the curvature part.
        K(i, i) = 0.5 - row;
    }
    return NPOperator(std::move(K), mesh);
}

const Eigen::VectorXd& NPOperator::eigenvalues() const {
    if (evals_) return *evals_;
    const int n = static_cast<int>(K_.rows());

    // Similarity transform with sqrt(area) weights symmetrizes K* whenever
    // the underlying kernel is symmetric (true on a sphere); use the fast
    // self-adjoint solver in that case.
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s(i) = std::sqrt(mesh_.area[i]);
    Eigen::MatrixXd S = s.asDiagonal() * K_ * s.cwiseInverse().asDiagonal();
    const double asym = (S - S.transpose()).norm();
    if (asym <= 1e-8 * S.norm()) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
        evals_ = es.eigenvalues();
    } else {
        Eigen::EigenSolver<Eigen::MatrixXd> es(K_, false);
        Eigen::VectorXd ev = es.eigenvalues().real();
        std::sort(ev.data(), ev.data() + n);
        evals_ = ev;
    }
    return *evals_;
}

ResolventSolver::ResolventSolver(const NPOperator& op,
                                 std::complex<double> lambda, int sign,
                                 double resonance_tol) {
    if (sign != 1 && sign != -1) {
        throw DomainError("ResolventSolver: sign must be +1 or -1");
    }
    // (lambda I + sign K*) is singular when lambda = -sign * eigenvalue.
    const Eigen::VectorXd& ev = op.eigenvalues();
    double dist = std::numeric_limits<double>::infinity();
    double nearest = 0.0;
    for (int i = 0; i < ev.size(); ++i) {
        const double d = std::abs(lambda + double(sign) * ev(i));
        if (d < dist) {
            dist = d;
            nearest = ev(i);
        }
    }
    if (dist < resonance_tol) {
        throw ResonanceError(
            "resolvent at a plasmonic eigenvalue: nearest spectral point " +
                std::to_string(nearest),
            nearest);
    }

    const int n = static_cast<int>(op.matrix().rows());
    if (lambda.imag() == 0.0) {
        Eigen::MatrixXd M = double(sign) * op.matrix();
        M.diagonal().array() += lambda.real();
        real_lu_.emplace(M);
    } else {
        Eigen::MatrixXcd M = std::complex<double>(sign, 0.0) *
                             op.matrix().cast<std::complex<double>>();
        M.diagonal().array() += lambda;
        complex_lu_.emplace(M);
    }
    (void)n;
}

PanelDensity ResolventSolver::apply(const PanelDensity& rhs) const {
    if (real_lu_) {
        PanelDensity out(rhs.size());
        out.real() = real_lu_->solve(rhs.real().eval());
        out.imag() = real_lu_->solve(rhs.imag().eval());
        return out;
    }
    return complex_lu_->solve(rhs);
}

PanelDensity resolvent_apply(const NPOperator& op, std::complex<double> lambda,
                             int sign, const PanelDensity& rhs) {
    if (rhs.size() != op.matrix().rows()) {
        throw DomainError("resolvent_apply: density length mismatch");
    }
    return ResolventSolver(op, lambda, sign).apply(rhs);
}

Eigen::Vector3cd eval_single_layer_grad(const TriMesh& mesh,
                                        const PanelDensity& density,
                                        const Vec3& point) {
    const int n = mesh.panel_count();
    if (density.size() != n) {
        throw DomainError("eval_single_layer_grad: density length mismatch");
    }
    const double dmax = mesh.max_panel_diameter();
    Eigen::Vector3cd g = Eigen::Vector3cd::Zero();
    for (int j = 0; j < n; ++j) {
        const Vec3 d = point - mesh.centroid[j];
        const double r = d.norm();
        if (r <= dmax) {
            throw PrecisionError(
                "eval_single_layer_grad: point too close to the surface");
        }
        g += density(j) * mesh.area[j] / (4.0 * kPi * r * r * r) *
             d.cast<std::complex<double>>();
    }
    return g;
}

} // namespace geomag
