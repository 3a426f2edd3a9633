#ifndef GEOMAG_LAYERPOT_HPP
#define GEOMAG_LAYERPOT_HPP

// Collocation discretization of the Laplace layer potentials on a TriMesh:
// the Neumann-Poincare operator K*, its resolvents, and far-field
// evaluation of the single-layer gradient. Kernel convention
// Gamma_0(x) = -1/(4 pi |x|).

#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "geomag/mesh.hpp"

namespace geomag {

using PanelDensity = Eigen::VectorXcd;

class NPOperator {
  public:
    NPOperator(Eigen::MatrixXd K, TriMesh mesh)
        : K_(std::move(K)), mesh_(std::move(mesh)) {}

    const Eigen::MatrixXd& matrix() const { return K_; }
    const TriMesh& mesh() const { return mesh_; }

    // Real spectrum of the discretized K*, ascending. Computed once,
    // then cached.
    const Eigen::VectorXd& eigenvalues() const;

  private:
    Eigen::MatrixXd K_;
    TriMesh mesh_;
    mutable std::optional<Eigen::VectorXd> evals_;
};

// K*[i][j] ~ area_j * nu_i . (x_i - x_j) / (4 pi |x_i - x_j|^3) off the
// diagonal; diagonal calibrated so each row sums to +1/2 (Gauss identity,
// K*[1] = 1/2 on a closed surface).
NPOperator assemble_K_star(const TriMesh& mesh);

// Factored solver for (lambda I + sign K*). Uses a real factorization when
// lambda is real. Construction throws ResonanceError when lambda is within
// resonance_tol of the (negated, for sign=+1) discrete spectrum.
class ResolventSolver {
  public:
    ResolventSolver(const NPOperator& op, std::complex<double> lambda, int sign,
                    double resonance_tol = 1e-8);

    PanelDensity apply(const PanelDensity& rhs) const;

  private:
    std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> real_lu_;
    std::optional<Eigen::PartialPivLU<Eigen::MatrixXcd>> complex_lu_;
};

// One-shot convenience wrapper around ResolventSolver.
PanelDensity resolvent_apply(const NPOperator& op, std::complex<double> lambda,
                             int sign, const PanelDensity& rhs);

// grad_x int Gamma_0(x-y) phi(y) ds_y by centroid quadrature; far field
// only (point must be further from the surface than one panel diameter).
Eigen::Vector3cd eval_single_layer_grad(const TriMesh& mesh,
                                        const PanelDensity& density,
                                        const Vec3& point);

} // namespace geomag

#endif
