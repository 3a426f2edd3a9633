#ifndef GEOMAG_INVERSE_HPP
#define GEOMAG_INVERSE_HPP

// Constructive inversion: multipole moment extraction from sphere samples,
// aggregate-weight recovery, and single/multi anomaly reconstruction of
// centers, weights, variation exponents and permeabilities.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geomag/forward.hpp"

namespace geomag {

// Scalar-potential multipole coefficients c[n][m], 1 <= n <= nmax:
//   dH(x) = grad sum c[n][m] Y_n^m(x^) / r^{n+1}
//         = -sum c[n][m] N^m_{n+1}(x^) / r^{n+2}
class MomentTable {
  public:
    MomentTable() = default;
    explicit MomentTable(int nmax)
        : nmax_(nmax),
          c_(nmax >= 1 ? static_cast<size_t>((nmax + 1) * (nmax + 1) - 1) : 0,
             Complex(0.0)) {}

    int nmax() const { return nmax_; }
    Complex& at(int n, int m) { return c_[index(n, m)]; }
    const Complex& at(int n, int m) const { return c_[index(n, m)]; }

  private:
    size_t index(int n, int m) const {
        if (n < 1 || n > nmax_ || std::abs(m) > n) {
            throw DomainError("MomentTable: index out of range");
        }
        return static_cast<size_t>(n * n - 1 + (m + n));
    }
    int nmax_ = 0;
    std::vector<Complex> c_;
};

MomentTable extract_moments(const VectorFieldSamples& samples, int nmax);

// Field of the fitted multipole model at an exterior point.
CVec3 eval_moment_field(const MomentTable& moments, const Vec3& x);

// Moments of a point-dipole sum with weights u_l at centers z_l:
//   c[n][m] = sum_l u_l . conj(grad R_n^m(z_l)) / (2n+1)
MomentTable dipole_model_moments(const std::vector<Vec3>& centers,
                                 const std::vector<CVec3>& u, int nmax);

// Alternative vector-moment parameterization d^{n,m} = sum_l u_l conj(Y_n^m(z^_l)) |z_l|^n,
// for cross-checks against the fitted dipoles.
std::vector<CVec3> vector_d_moments(const std::vector<Vec3>& centers,
                                   const std::vector<CVec3>& u, int nmax);

enum class ProjectionKind { N2, Q0 };

// int conj(basis^{m'}) . samples ds for m' = -1, 0, +1.
CVec3 project_vector_harmonic(const VectorFieldSamples& samples,
                              ProjectionKind kind);

struct AggregateF {
    CVec3 F;               // N-route estimate of sum (delta^{3a}-1) P H0
    CVec3 q_projections;   // Q0 content of the samples (model check, ~0)
    double q_null_residual; // |Q0 proj| / |N2 proj|
};

AggregateF recover_aggregate_F(const VectorFieldSamples& samples,
                               const ProjectionMatrices& pm, double delta);

struct LocateResult {
    Vec3 z;
    CVec3 w;
};

// Single-anomaly closed-form recovery from degree-1 and degree-2 moments.
LocateResult locate_single(const MomentTable& moments, double delta);

double recover_alpha(const CVec3& w, const CVec3& v, double delta);

// Ball closed form (sigma > 0, omega -> 0 regime: P = mu0 M - P0).
double recover_mu_ball(const CVec3& v, const Vec3& h0_at_z,
                       const Materials& mat, int l);

// General shape: 1-D root find on the BEM-projected p(mu).
double recover_mu_mesh(const CVec3& v, const Vec3& h0_at_z,
                       const Materials& mat, int l, const NPOperator& op);

struct ReconstructionOptions {
    int nmax = 5;
    int starts = 32;
    int max_iter = 120;
    std::uint64_t seed = 12345;
    double center_radius = 0.0; // 0: auto (0.45 * sample radius)

    // Optional prior knowledge enabling alpha/mu recovery.
    const BackgroundField* background = nullptr;
    const Materials* materials = nullptr;
    const NPOperator* mesh_op = nullptr; // non-ball reference shape
};

struct RecoveredAnomaly {
    Vec3 z = Vec3::Zero();
    CVec3 w = CVec3::Zero();
    std::optional<CVec3> v;
    std::optional<double> alpha;
    std::optional<double> mu;
};

struct ReconstructionResult {
    std::vector<RecoveredAnomaly> anomalies;
    double residual = 0.0; // RMS misfit of the fitted model vs input samples
    int iterations = 0;
    std::vector<std::string> warnings;
};

ReconstructionResult reconstruct_multi(const VectorFieldSamples& samples_delta,
                                       const VectorFieldSamples* samples_epoch0,
                                       int l0, double delta,
                                       const ReconstructionOptions& options = {});

} // namespace geomag

#endif
