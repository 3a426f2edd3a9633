#include "geomag/forward.hpp"

#include <cmath>
#include <random>

namespace geomag {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Deterministic standard normal from raw mt19937_64 output (Box-Muller
// with explicit bit-to-double conversion, so streams are byte-stable
// across platforms and standard libraries).
class NormalStream {
  public:
    explicit NormalStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 1e-300) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

  private:
    double uniform01() { return (rng_() >> 11) * 0x1.0p-53; }
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace

Vec3 eval_background(const BackgroundField& field, const Vec3& x) {
    if (const auto* u = std::get_if<UniformField>(&field)) {
        return u->h;
    }
    if (const auto* d = std::get_if<DipoleField>(&field)) {
        const Vec3 r = x - d->source;
        const double rn = r.norm();
        if (rn < 1e-14) {
            throw SingularityError("background field evaluated at its dipole source");
        }
        const Vec3 rhat = r / rn;
        return (3.0 * rhat * rhat.dot(d->moment) - d->moment) /
               (4.0 * kPi * rn * rn * rn);
    }
    const auto& p = std::get<HarmonicPolyField>(field);
    return p.linear + 2.0 * p.quadratic * x;
}

Mat3 hessian_gamma0(const Vec3& r) {
    const double rn = r.norm();
    if (rn < 1e-14) throw SingularityError("hessian_gamma0 at r = 0");
    const Vec3 rhat = r / rn;
    return (Mat3::Identity() - 3.0 * rhat * rhat.transpose()) /
           (4.0 * kPi * rn * rn * rn);
}

namespace {

void check_expansion_region(const Vec3& x, const Vec3& z) {
    if (z.norm() > 0.9 * x.norm()) {
        throw GeometryError(
            "kernel multipole: |z|/|x| > 0.9 (outside the convergence margin)");
    }
}

} // namespace

CVec3 kernel_multipole_grad(const Vec3& x, const Vec3& z, int N) {
    if (N < 0) throw DomainError("kernel_multipole: negative truncation");
    check_expansion_region(x, z);
    const double R = x.norm();
    const SphDir xhat{x / R};
    const double zn = z.norm();

    CVec3 sum = CVec3::Zero();
    for (int n = 0; n <= N; ++n) {
        const double radial = std::pow(zn, n) / ((2.0 * n + 1.0) * std::pow(R, n + 2));
        if (n > 0 && radial == 0.0) break;
        for (int m = -n; m <= n; ++m) {
            const Complex yz = n == 0 ? Complex(1.0 / (2.0 * std::sqrt(kPi)))
                                      : eval_ynm(n, m, SphDir{z / zn});
            sum += eval_vector_harmonic(VectorHarmonicKind::N, n, m, xhat) *
                   std::conj(yz) * radial;
        }
    }
    return sum;
}

CMat3 kernel_multipole_hess(const Vec3& x, const Vec3& z, int N) {
    if (N < 0) throw DomainError("kernel_multipole: negative truncation");
    check_expansion_region(x, z);
    const double R = x.norm();
    const SphDir xhat{x / R};
    const double zn = z.norm();

    CMat3 sum = CMat3::Zero();
    for (int n = 0; n <= N; ++n) {
        const double radial = std::pow(zn, n) / ((2.0 * n + 1.0) * std::pow(R, n + 3));
        if (n > 0 && radial == 0.0) break;
        for (int m = -n; m <= n; ++m) {
            const Complex yz = n == 0 ? Complex(1.0 / (2.0 * std::sqrt(kPi)))
                                      : eval_ynm(n, m, SphDir{z / zn});
            sum += eval_A(n, m, xhat) * std::conj(yz) * radial;
        }
    }
    return sum;
}

std::vector<DipoleWeight> dipole_weights(
    const Scene& scene, const std::vector<PolarizationSet>& tensors) {
    if (tensors.size() != scene.anomalies.size()) {
        throw DomainError("dipole_weights: one PolarizationSet per anomaly required");
    }
    std::vector<DipoleWeight> out(scene.anomalies.size());
    for (size_t l = 0; l < scene.anomalies.size(); ++l) {
        const Anomaly& a = scene.anomalies[l];
        const Vec3 h0 = eval_background(scene.background, a.z);
        if (h0.norm() < 1e-14) {
            throw DomainError("dipole_weights: background field vanishes at anomaly " +
                              std::to_string(l));
        }
        out[l].v = tensors[l].P * h0.cast<Complex>();
        out[l].w = (std::pow(scene.delta, 3.0 * a.alpha) - 1.0) * out[l].v;
    }
    return out;
}

namespace {

void check_sparsity(const Scene& scene, const Vec3& x) {
    for (size_t l = 0; l < scene.anomalies.size(); ++l) {
        const Anomaly& a = scene.anomalies[l];
        const double sl = std::pow(scene.delta, a.alpha);
        if ((x - a.z).norm() < 10.0 * sl * scene.delta) {
            throw GeometryError("evaluation point within 10 scaled radii of anomaly " +
                                std::to_string(l));
        }
    }
}

} // namespace

CVec3 secular_variation(const Scene& scene,
                        const std::vector<DipoleWeight>& weights, const Vec3& x) {
    if (weights.size() != scene.anomalies.size()) {
        throw DomainError("secular_variation: weight count mismatch");
    }
    check_sparsity(scene, x);
    const double d3 = scene.delta * scene.delta * scene.delta;
    CVec3 out = CVec3::Zero();
    for (size_t l = 0; l < weights.size(); ++l) {
        out -= d3 * (hessian_gamma0(x - scene.anomalies[l].z).cast<Complex>() *
                     weights[l].w);
    }
    return out;
}

CVec3 epoch_perturbation(const Scene& scene,
                         const std::vector<DipoleWeight>& weights, const Vec3& x) {
    if (weights.size() != scene.anomalies.size()) {
        throw DomainError("epoch_perturbation: weight count mismatch");
    }
    check_sparsity(scene, x);
    const double d3 = scene.delta * scene.delta * scene.delta;
    CVec3 out = CVec3::Zero();
    for (size_t l = 0; l < weights.size(); ++l) {
        out += d3 * (hessian_gamma0(x - scene.anomalies[l].z).cast<Complex>() *
                     weights[l].v);
    }
    return out;
}

VectorFieldSamples synthesize_measurement(const Scene& scene,
                                          const std::vector<DipoleWeight>& weights,
                                          const QuadRule& quad, Epoch epoch,
                                          double noise_rel,
                                          std::uint64_t rng_seed) {
    double zmax = 0.0;
    for (const Anomaly& a : scene.anomalies) zmax = std::max(zmax, a.z.norm());
    if (scene.radius <= 2.0 * zmax) {
        throw GeometryError("measurement radius must exceed 2 max |z_l|");
    }
    if (noise_rel < 0.0) throw DomainError("noise_rel must be >= 0");

    VectorFieldSamples s;
    s.radius = scene.radius;
    s.quad = quad;
    s.epoch = epoch == Epoch::Delta ? "delta" : "epoch0";
    s.noise_rel = noise_rel;
    s.seed = rng_seed;
    s.values.reserve(quad.nodes.size());
    for (const QuadNode& node : quad.nodes) {
        const Vec3 x = scene.radius * node.dir.u;
        s.values.push_back(epoch == Epoch::Delta
                               ? secular_variation(scene, weights, x)
                               : epoch_perturbation(scene, weights, x));
    }

    if (noise_rel > 0.0 && !s.values.empty()) {
        double ms = 0.0;
        for (const CVec3& v : s.values) ms += v.squaredNorm();
        ms /= static_cast<double>(s.values.size());
        // per real degree of freedom, so the per-node RMS deviation of the
        // complex 3-vector equals noise_rel * (RMS field magnitude)
        const double sigma = noise_rel * std::sqrt(ms / 6.0);
        NormalStream noise(rng_seed);
        for (CVec3& v : s.values) {
            for (int c = 0; c < 3; ++c) {
                v(c) += Complex(sigma * noise.next(), sigma * noise.next());
            }
        }
    }
    return s;
}

ValidationReport validate_scene(const Scene& scene) {
    ValidationReport rep;
    const bool multi = scene.anomalies.size() > 1;

    for (size_t l = 0; l < scene.anomalies.size(); ++l) {
        const Anomaly& a = scene.anomalies[l];
        if (a.alpha <= -1.0) {
            rep.items.push_back({"alpha-bound",
                                 "anomaly " + std::to_string(l) +
                                     ": alpha <= -1 is inadmissible",
                                 true});
        } else if (a.alpha <= -0.25 || a.alpha >= 1.0 / 3.0) {
            rep.items.push_back({"alpha-window",
                                 "anomaly " + std::to_string(l) +
                                     ": alpha outside (-1/4, 1/3)" +
                                     (multi ? "" : " (single-anomaly mode: warning only)"),
                                 multi});
        }
    }

    for (size_t i = 0; i < scene.anomalies.size(); ++i) {
        for (size_t j = 0; j < scene.anomalies.size(); ++j) {
            if (i == j) continue;
            const double lhs = 3.0 * (scene.anomalies[i].alpha + 1.0);
            const double rhs = 4.0 * (scene.anomalies[j].alpha + 1.0);
            if (std::abs(lhs - rhs) < 1e-9) {
                rep.items.push_back(
                    {"separability",
                     "anomalies " + std::to_string(i) + "," + std::to_string(j) +
                         ": 3(alpha_i+1) = 4(alpha_j+1) masks the leading term",
                     true});
            }
        }
    }

    for (size_t i = 0; i < scene.anomalies.size(); ++i) {
        for (size_t j = i + 1; j < scene.anomalies.size(); ++j) {
            const double si = std::pow(scene.delta, scene.anomalies[i].alpha);
            const double sj = std::pow(scene.delta, scene.anomalies[j].alpha);
            const double sep = (scene.anomalies[i].z - scene.anomalies[j].z).norm();
            if (sep < scene.delta * (si + sj)) {
                rep.items.push_back({"sparsity",
                                     "anomalies " + std::to_string(i) + "," +
                                         std::to_string(j) + " overlap",
                                     true});
            }
        }
    }

    double zmax = 0.0;
    for (const Anomaly& a : scene.anomalies) zmax = std::max(zmax, a.z.norm());
    if (scene.radius <= 2.0 * zmax) {
        rep.items.push_back(
            {"radius", "measurement radius must exceed 2 max |z_l|", true});
    }

    for (size_t l = 0; l < scene.anomalies.size(); ++l) {
        const Anomaly& a = scene.anomalies[l];
        try {
            if (eval_background(scene.background, a.z).norm() < 1e-14) {
                rep.items.push_back({"background-zero",
                                     "background field vanishes at anomaly " +
                                         std::to_string(l),
                                     true});
            }
        } catch (const SingularityError&) {
            rep.items.push_back({"background-singular",
                                 "background dipole source coincides with anomaly " +
                                     std::to_string(l),
                                 true});
        }
        if (a.material < 0 ||
            a.material >= static_cast<int>(scene.materials.anomalies.size())) {
            rep.items.push_back({"material-index",
                                 "anomaly " + std::to_string(l) +
                                     ": material index out of range",
                                 true});
            continue;
        }
        const NonsingularityDiagnostic diag =
            check_nonsingular(scene.materials, a.material);
        if (!diag.nonsingular) {
            rep.items.push_back({"nonsingular",
                                 "anomaly " + std::to_string(l) +
                                     ": polarization nonsingularity condition violated",
                                 true});
        }
    }

    return rep;
}

} // namespace geomag
