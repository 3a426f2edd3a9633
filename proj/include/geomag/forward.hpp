#ifndef GEOMAG_FORWARD_HPP
#define GEOMAG_FORWARD_HPP

// Scene description and the leading-order forward model: the secular
// variation field dH = H_s^(0) - H^(0) and the epoch-0 perturbation
// H^(0) - H_0^(0) sampled on a measurement sphere.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "geomag/polarization.hpp"
#include "geomag/sphharm.hpp"

namespace geomag {

// Background field H_0^(0) = grad u0: analytic harmonic gradient fields.
struct UniformField {
    Vec3 h;
};
struct DipoleField {
    Vec3 source;
    Vec3 moment;
};
// u0 = g.x + x^T A x with A symmetric trace-free, so grad u0 = g + 2 A x.
struct HarmonicPolyField {
    Vec3 linear = Vec3::Zero();
    Mat3 quadratic = Mat3::Zero();
};
using BackgroundField = std::variant<UniformField, DipoleField, HarmonicPolyField>;

Vec3 eval_background(const BackgroundField& field, const Vec3& x);

enum class AnomalyShape { Ball, Mesh };

struct Anomaly {
    Vec3 z = Vec3::Zero();
    AnomalyShape shape = AnomalyShape::Ball;
    std::string mesh_path; // when shape == Mesh
    double alpha = 0.0;
    int material = 0; // index into Materials::anomalies
};

struct Scene {
    std::vector<Anomaly> anomalies;
    Materials materials;
    BackgroundField background = UniformField{Vec3(0, 0, 1)};
    double delta = 0.1;  // base scale, s_l = delta^alpha_l
    double radius = 5.0; // measurement sphere radius
};

struct DipoleWeight {
    CVec3 v; // P_l H_0(z_l)
    CVec3 w; // (delta^{3 alpha_l} - 1) v
};

struct VectorFieldSamples {
    double radius = 0.0;
    QuadRule quad;
    std::vector<CVec3> values;
    std::string epoch; // "delta" | "epoch0"
    double noise_rel = 0.0;
    std::uint64_t seed = 0;
};

// grad^2 Gamma_0(r) = (I - 3 r^ r^T) / (4 pi |r|^3)
Mat3 hessian_gamma0(const Vec3& r);

// Truncated multipole expansions of the kernels about the origin;
// requires |z| < 0.9 |x|.
CVec3 kernel_multipole_grad(const Vec3& x, const Vec3& z, int N);
CMat3 kernel_multipole_hess(const Vec3& x, const Vec3& z, int N);

std::vector<DipoleWeight> dipole_weights(
    const Scene& scene, const std::vector<PolarizationSet>& tensors);

// dH(x) = -delta^3 sum_l grad^2 Gamma_0(x - z_l) w_l
CVec3 secular_variation(const Scene& scene,
                        const std::vector<DipoleWeight>& weights, const Vec3& x);

// H^(0)(x) - H_0^(0)(x) = +delta^3 sum_l grad^2 Gamma_0(x - z_l) v_l
CVec3 epoch_perturbation(const Scene& scene,
                         const std::vector<DipoleWeight>& weights, const Vec3& x);

enum class Epoch { Delta, Epoch0 };

VectorFieldSamples synthesize_measurement(const Scene& scene,
                                          const std::vector<DipoleWeight>& weights,
                                          const QuadRule& quad, Epoch epoch,
                                          double noise_rel = 0.0,
                                          std::uint64_t rng_seed = 0);

struct ValidationItem {
    std::string code;
    std::string message;
    bool fatal = true;
};

struct ValidationReport {
    std::vector<ValidationItem> items;
    bool ok() const {
        for (const auto& it : items) {
            if (it.fatal) return false;
        }
        return true;
    }
};

ValidationReport validate_scene(const Scene& scene);

} // namespace geomag

#endif
