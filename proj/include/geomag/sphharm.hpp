#ifndef GEOMAG_SPHHARM_HPP
#define GEOMAG_SPHHARM_HPP

// Scalar and vector spherical harmonics on S^2, sphere quadrature,
// coupling coefficients and the Hessian-kernel angular matrices.
//
// Conventions (fixed once, used everywhere):
//   * orthonormal complex harmonics Y_n^m with Condon-Shortley phase,
//     so that int_{S^2} Y_n^m conj(Y_{n'}^{m'}) ds = delta delta
//   * Y_n^{-m} = (-1)^m conj(Y_n^m)
//   * vector harmonics
//       N^m_{n+1} = (n+1) Y x^ - grad_s Y
//       Q^m_{n-1} = grad_s Y + n Y x^
//       T^m_n     = grad_s Y x x^
//
// All gradients are evaluated through Cartesian solid-harmonic ladder
// recurrences, so there is no sin(theta) pole anywhere.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "geomag/errors.hpp"
#include "geomag/types.hpp"

namespace geomag {

// A direction on the unit sphere. Stored as the unit vector; angles are
// derived views.
struct SphDir {
    Vec3 u;

    static SphDir from_unit(const Vec3& v);
    static SphDir from_angles(double theta, double phi);

    double theta() const; // polar angle in [0, pi]
    double phi() const;   // azimuth in [0, 2*pi)
};

struct QuadNode {
    SphDir dir;
    double weight;
};

// Product rule: Gauss-Legendre in cos(theta) x uniform azimuth.
// Exact for spherical polynomials of total degree <= exactness.
struct QuadRule {
    std::vector<QuadNode> nodes;
    int exactness = 0;
};

QuadRule sphere_quadrature(int level);

// Scalar harmonics ---------------------------------------------------------

Complex eval_ynm(int n, int m, const SphDir& dir);

// Surface gradient grad_s Y_n^m, tangential to the sphere.
CVec3 eval_grad_s_ynm(int n, int m, const SphDir& dir);

enum class VectorHarmonicKind { N, Q, T };

// N: any n >= 0 (gives N^m_{n+1}); Q, T: n >= 1 (gives Q^m_{n-1}, T^m_n).
CVec3 eval_vector_harmonic(VectorHarmonicKind kind, int n, int m,
                           const SphDir& dir);

// Solid harmonics ----------------------------------------------------------
// Regular   R_n^m(x) = r^n Y_n^m(x^)        (entire harmonic polynomial)
// Irregular I_n^m(x) = Y_n^m(x^) / r^{n+1}  (exterior harmonic)

Complex solid_harmonic(int n, int m, const Vec3& x);
CVec3 grad_solid_harmonic(int n, int m, const Vec3& x);
CMat3 hess_solid_harmonic(int n, int m, const Vec3& x);

Complex irregular_solid_harmonic(int n, int m, const Vec3& x);
CVec3 grad_irregular_solid_harmonic(int n, int m, const Vec3& x);
CMat3 hess_irregular_solid_harmonic(int n, int m, const Vec3& x);

// Angular matrix A_n^m of the Hessian-kernel expansion
//   grad^2 Gamma_0(x - z) = sum_{n,m} A_n^m(x^) conj(Y_n^m(z^)) |z|^n
//                           / ((2n+1) |x|^{n+3})
// evaluated as -grad^2 I_n^m restricted to the unit sphere.
CMat3 eval_A(int n, int m, const SphDir& dir);

// Coupling coefficients ----------------------------------------------------
//   a = int conj(Y_{n'}^{m'}) grad_s Y_n^m ds
//   b = int conj(Y_{n'}^{m'}) Y_n^m x^ ds
// Always evaluated by quadrature.

struct CouplingAB {
    CVec3 a;
    CVec3 b;
};

CouplingAB coupling_ab(int np, int mp, int n, int m, const QuadRule& quad);

// Precomputed a, b for all degree pairs up to a cutoff.
class CouplingTables {
  public:
    CouplingTables() = default;
    CouplingTables(int cutoff, const QuadRule& quad);

    int cutoff() const { return cutoff_; }
    const CVec3& a(int np, int mp, int n, int m) const;
    const CVec3& b(int np, int mp, int n, int m) const;

  private:
    int cutoff_ = -1;
    std::vector<CVec3> a_, b_;
    int index(int np, int mp, int n, int m) const;
};

struct CouplingCD {
    CVec3 c;
    CVec3 d;
};

// The c, d combinations of a and b. Only the n' = n+1 branch of c carries
// the Hessian-kernel decomposition (see eval_A and the tests); the other
// branches are provided as printed combinations for diagnostics.
CouplingCD coupling_cd(int np, int mp, int n, int m,
                       const CouplingTables& tables);

// Projection matrices ------------------------------------------------------
//   C[m'][k] = int conj(N_2^{m'}) . A_0^0 e_k ds
//   D[m'][k] = int conj(Q_0^{m'}) . A_0^0 e_k ds
// Rows ordered m' = -1, 0, +1. D vanishes identically for the kernel-true
// A (Q-harmonics are orthogonal to exterior gradient fields); its norm is
// reported so callers can use it as a consistency diagnostic.
struct ProjectionMatrices {
    CMat3 C;
    CMat3 D;
    double cond_C = 0.0; // singular-value condition number of C
    double norm_D = 0.0; // Frobenius norm of D (expected ~0)
};

ProjectionMatrices projection_matrices(const QuadRule& quad);

} // namespace geomag

#endif
