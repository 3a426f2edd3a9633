#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "geomag/forward.hpp"

using namespace geomag;

namespace {

Scene one_ball_scene(const Vec3& z, double alpha, double delta = 0.1,
                     double radius = 5.0) {
    Scene scene;
    scene.materials.eps_s = 2.0;
    scene.materials.anomalies.push_back({2.0, 1.0, 1.0});
    scene.anomalies.push_back({z, AnomalyShape::Ball, "", alpha, 0});
    scene.background = UniformField{Vec3(0.3, -1.0, 2.0)};
    scene.delta = delta;
    scene.radius = radius;
    return scene;
}

std::vector<DipoleWeight> ball_weights(const Scene& scene) {
    std::vector<PolarizationSet> tensors;
    for (size_t l = 0; l < scene.anomalies.size(); ++l) {
        tensors.push_back(
            analytic_ball_tensors(scene.materials, scene.anomalies[l].material));
    }
    return dipole_weights(scene, tensors);
}

} // namespace

TEST_CASE("background fields") {
    const BackgroundField uni = UniformField{Vec3(0, 0, 1)};
    CHECK((eval_background(uni, Vec3(3, -2, 7)) - Vec3(0, 0, 1)).norm() == 0.0);

    // dipole: (3 r^ (r^.m) - m) / (4 pi ||r||^3), checked by finite differences
    // of the potential u = m.r/(4 pi ||r||^3)
    const Vec3 src(10, 0, 0), mom(0, 0, 1);
    const BackgroundField dip = DipoleField{src, mom};
    const Vec3 x(1, 2, -1);
    // field (3 r^ (r^.m) - m)/(4 pi r^3) is the gradient of -m.r/(4 pi r^3)
    const auto pot = [&](const Vec3& p) {
        const Vec3 r = p - src;
        return -mom.dot(r) / (4.0 * M_PI * std::pow(r.norm(), 3));
    };
    Vec3 fd;
    const double h = 1e-6;
    for (int k = 0; k < 3; ++k) {
        Vec3 xp = x, xm = x;
        xp(k) += h;
        xm(k) -= h;
        fd(k) = (pot(xp) - pot(xm)) / (2.0 * h);
    }
    CHECK((eval_background(dip, x) - fd).norm() < 1e-7 * fd.norm());
    CHECK_THROWS_AS(eval_background(dip, src), SingularityError);

    // u0 = x1 x2: grad = (x2, x1, 0)
    HarmonicPolyField poly;
    poly.quadratic << 0, 0.5, 0, 0.5, 0, 0, 0, 0, 0;
    const Vec3 g = eval_background(poly, Vec3(3, 5, -2));
    CHECK((g - Vec3(5, 3, 0)).norm() < 1e-14);
}

TEST_CASE("hessian of the fundamental solution") {
    const Mat3 h = hessian_gamma0(Vec3(0, 0, 2));
    Mat3 expect = Mat3::Zero();
    expect.diagonal() << 1, 1, -2;
    expect /= 32.0 * M_PI;
    CHECK((h - expect).norm() < 1e-15);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Vec3 r(u(rng) + 1.1, u(rng), u(rng));
        CHECK(std::abs(hessian_gamma0(r).trace()) < 1e-15);

        // rotation equivariance
        const Eigen::AngleAxisd rot(0.3 + trial * 0.1,
                                    Vec3(u(rng), u(rng), u(rng) + 1.1).normalized());
        const Mat3 Q = rot.toRotationMatrix();
        const Mat3 lhs = hessian_gamma0(Q * r);
        const Mat3 rhs = Q * hessian_gamma0(r) * Q.transpose();
        CHECK((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }

    CHECK_THROWS_AS(hessian_gamma0(Vec3::Zero()), SingularityError);
}

TEST_CASE("kernel multipole expansions") {
    // z = 0: only the n=0 term, exact grad = x / (4 pi ||x||^3)
    const Vec3 x(1, -2, 2);
    const CVec3 g0 = kernel_multipole_grad(x, Vec3::Zero(), 0);
    const Vec3 expect = x / (4.0 * M_PI * 27.0);
    CHECK((g0 - expect.cast<Complex>()).norm() < 1e-14);

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Vec3 xx(u(rng), u(rng), u(rng));
        xx = 3.0 * xx.normalized();
        Vec3 zz(u(rng), u(rng), u(rng));
        zz = 0.9 * zz.normalized(); // ratio 0.3

        const Vec3 d = xx - zz;
        const CVec3 grad_direct =
            (d / (4.0 * M_PI * std::pow(d.norm(), 3))).cast<Complex>();
        const CMat3 hess_direct = hessian_gamma0(d).cast<Complex>();
        CHECK((kernel_multipole_grad(xx, zz, 25) - grad_direct).norm() <
              1e-8 * grad_direct.norm());
        CHECK((kernel_multipole_hess(xx, zz, 25) - hess_direct).norm() <
              1e-8 * hess_direct.norm());
    }

    // geometric decay of the truncation error
    const Vec3 xs(3, 0, 0), zs(0.54, 0.54, 0.54);
    const CMat3 hd = hessian_gamma0(xs - zs).cast<Complex>();
    double prev = (kernel_multipole_hess(xs, zs, 5) - hd).norm();
    double ratio_acc = 0.0;
    for (int N = 6; N <= 15; ++N) {
        const double err = (kernel_multipole_hess(xs, zs, N) - hd).norm();
        ratio_acc += err / prev;
        prev = err;
    }
    CHECK(ratio_acc / 10.0 == doctest::Approx(zs.norm() / 3.0).epsilon(0.15));

    CHECK_THROWS_AS(kernel_multipole_grad(Vec3(1, 0, 0), Vec3(0.95, 0, 0), 5),
                    GeometryError);
}

TEST_CASE("dipole weights") {
    Scene scene = one_ball_scene(Vec3(0.5, 0, 0), 0.0);
    auto weights = ball_weights(scene);
    CHECK(weights[0].w.norm() == 0.0);
    CHECK(weights[0].v.norm() > 0.0);

    scene.anomalies[0].alpha = 0.2;
    weights = ball_weights(scene);
    const double factor = std::pow(0.1, 0.6) - 1.0; // ~ -0.74881
    CHECK(factor == doctest::Approx(-0.74881).epsilon(1e-4));
    CHECK((weights[0].w - factor * weights[0].v).norm() <
          1e-12 * weights[0].v.norm());

    // ball isotropy: v parallel to H0
    const Vec3 h0 = eval_background(scene.background, scene.anomalies[0].z);
    const CVec3 vhat = weights[0].v / weights[0].v.norm();
    const Vec3 hhat = h0 / h0.norm();
    CHECK(std::abs(std::abs(vhat.dot(hhat.cast<Complex>())) - 1.0) < 1e-12);

    // vanishing background at a center is rejected
    Scene degenerate = scene;
    degenerate.background = UniformField{Vec3::Zero()};
    CHECK_THROWS_AS(ball_weights(degenerate), DomainError);
}

TEST_CASE("secular variation and epoch perturbation") {
    Scene empty;
    empty.materials.anomalies.push_back({2.0, 1.0, 0.0});
    CHECK(secular_variation(empty, {}, Vec3(3, 0, 0)).norm() == 0.0);

    Scene scene = one_ball_scene(Vec3(0.4, -0.2, 0.3), 0.25);
    const auto weights = ball_weights(scene);

    // superposition across anomalies
    Scene pair = scene;
    pair.anomalies.push_back({Vec3(-0.5, 0.1, 0.6), AnomalyShape::Ball, "",
                              -0.1, 0});
    const auto pw = ball_weights(pair);
    Scene second = scene;
    second.anomalies[0] = pair.anomalies[1];
    const auto sw = ball_weights(second);
    const Vec3 probe(2.5, 1.0, -3.0);
    const CVec3 sum = secular_variation(scene, weights, probe) +
                      secular_variation(second, sw, probe);
    const CVec3 joint = secular_variation(pair, pw, probe);
    CHECK((joint - sum).norm() < 1e-14 * joint.norm());

    // alpha = 0: delta-epoch zero, epoch-0 nonzero
    Scene still = one_ball_scene(Vec3(0.4, 0, 0), 0.0);
    const auto still_w = ball_weights(still);
    CHECK(secular_variation(still, still_w, probe).norm() == 0.0);
    CHECK(epoch_perturbation(still, still_w, probe).norm() > 0.0);

    // recombining weights relates the two epochs exactly
    const double rho = std::pow(scene.delta, 3.0 * 0.25) - 1.0;
    const CVec3 dh = secular_variation(scene, weights, probe);
    const CVec3 e0 = epoch_perturbation(scene, weights, probe);
    CHECK((dh + rho * e0).norm() < 1e-14 * dh.norm());

    // sparsity guard
    CHECK_THROWS_AS(
        secular_variation(scene, weights, scene.anomalies[0].z + Vec3(1e-4, 0, 0)),
        GeometryError);
}

TEST_CASE("field structure: decay, flux, divergence, curl") {
    Scene scene = one_ball_scene(Vec3(0.3, 0.2, -0.1), 0.2);
    const auto weights = ball_weights(scene);
    const double znorm = scene.anomalies[0].z.norm();

    // r^-3 decay in the distance to the anomaly (log-log slope)
    const Vec3 dir = Vec3(1, 1, 0.5).normalized();
    const Vec3& zc = scene.anomalies[0].z;
    const double r1 = 5.0 * znorm, r2 = 50.0 * znorm;
    const double f1 = secular_variation(scene, weights, zc + r1 * dir).norm();
    const double f2 = secular_variation(scene, weights, zc + r2 * dir).norm();
    const double slope = std::log(f2 / f1) / std::log(r2 / r1);
    CHECK(slope == doctest::Approx(-3.0).epsilon(0.01 / 3.0));

    // delta^{3(1+alpha)} scale law: the scaled-anomaly perturbation is the
    // difference of the two epoch fields, with magnitude delta^3 s^3 = d^{3(1+a)}
    double prev_mag = 0.0, prev_delta = 0.0;
    for (double delta : {0.2, 0.1, 0.05}) {
        Scene s = one_ball_scene(scene.anomalies[0].z, 0.2, delta);
        const auto ws = ball_weights(s);
        const double mag = (epoch_perturbation(s, ws, 4.0 * dir) -
                            secular_variation(s, ws, 4.0 * dir))
                               .norm();
        if (prev_mag > 0.0) {
            const double expo =
                std::log(mag / prev_mag) / std::log(delta / prev_delta);
            CHECK(expo == doctest::Approx(3.0 * 1.2).epsilon(0.02 / 3.6));
        }
        prev_mag = mag;
        prev_delta = delta;
    }

    // net flux through the measurement sphere
    const QuadRule quad = sphere_quadrature(12);
    Complex flux(0.0);
    double rms = 0.0;
    for (const QuadNode& node : quad.nodes) {
        const CVec3 f =
            secular_variation(scene, weights, scene.radius * node.dir.u);
        flux += node.weight * f.dot(node.dir.u.cast<Complex>());
        rms += node.weight * f.squaredNorm();
    }
    rms = std::sqrt(rms / (4.0 * M_PI));
    CHECK(std::abs(flux) < 1e-10 * rms);

    // divergence- and curl-free by central differences
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double h = 1e-4 * scene.radius;
    for (int trial = 0; trial < 20; ++trial) {
        Vec3 p(u(rng), u(rng), u(rng));
        p = (3.0 + 2.0 * u(rng)) * p.normalized();
        CMat3 jac;
        for (int k = 0; k < 3; ++k) {
            Vec3 pp = p, pm = p;
            pp(k) += h;
            pm(k) -= h;
            jac.col(k) = (secular_variation(scene, weights, pp) -
                          secular_variation(scene, weights, pm)) /
                         (2.0 * h);
        }
        const double scale = jac.norm();
        CHECK(std::abs(jac.trace()) < 1e-6 * scale);
        CHECK((jac - jac.transpose()).norm() < 1e-6 * scale);
    }
}

TEST_CASE("measurement synthesis") {
    Scene scene = one_ball_scene(Vec3(0.5, -0.3, 0.8), 0.25);
    const auto weights = ball_weights(scene);
    const QuadRule quad = sphere_quadrature(8);

    const auto a = synthesize_measurement(scene, weights, quad, Epoch::Delta,
                                          0.0, 1);
    const auto b = synthesize_measurement(scene, weights, quad, Epoch::Delta,
                                          0.0, 2);
    for (size_t q = 0; q < a.values.size(); ++q) {
        CHECK((a.values[q] - b.values[q]).norm() == 0.0);
    }

    // noise statistics at 1%
    const auto noisy = synthesize_measurement(scene, weights, quad, Epoch::Delta,
                                              0.01, 42);
    double dev = 0.0, rms = 0.0;
    for (size_t q = 0; q < a.values.size(); ++q) {
        dev += (noisy.values[q] - a.values[q]).squaredNorm();
        rms += a.values[q].squaredNorm();
    }
    const double rel = std::sqrt(dev / rms);
    CHECK(rel > 0.8 * 0.01);
    CHECK(rel < 1.2 * 0.01);

    // same seed reproduces the noise exactly
    const auto noisy2 = synthesize_measurement(scene, weights, quad,
                                               Epoch::Delta, 0.01, 42);
    for (size_t q = 0; q < noisy.values.size(); ++q) {
        CHECK((noisy.values[q] - noisy2.values[q]).norm() == 0.0);
    }

    Scene empty;
    empty.materials.anomalies.push_back({2.0, 1.0, 0.0});
    const auto zero = synthesize_measurement(empty, {}, quad, Epoch::Delta);
    for (const CVec3& v : zero.values) CHECK(v.norm() == 0.0);

    Scene tight = one_ball_scene(Vec3(3.0, 0, 0), 0.2);
    const auto tw = ball_weights(tight);
    CHECK_THROWS_AS(synthesize_measurement(tight, tw, quad, Epoch::Delta),
                    GeometryError);
}

TEST_CASE("scene validation guards") {
    // (i) alpha outside (-1/4, 1/3) in a multi-anomaly scene
    Scene multi = one_ball_scene(Vec3(0.5, 0, 0), 0.9);
    multi.anomalies.push_back({Vec3(-0.5, 0, 0), AnomalyShape::Ball, "", 0.1, 0});
    CHECK(!validate_scene(multi).ok());

    // the same alpha alone only warns (single-anomaly regime)
    Scene single = one_ball_scene(Vec3(0.5, 0, 0), 0.9);
    const ValidationReport rs = validate_scene(single);
    CHECK(rs.ok());
    CHECK(!rs.items.empty());

    // (ii) separability collision 3(alpha2+1) = 4(alpha1+1)
    Scene collide = one_ball_scene(Vec3(0.5, 0, 0), -0.175);
    collide.anomalies.push_back(
        {Vec3(-0.5, 0, 0), AnomalyShape::Ball, "", 0.1, 0});
    const ValidationReport rc = validate_scene(collide);
    CHECK(!rc.ok());
    bool found = false;
    for (const auto& item : rc.items) {
        found = found || item.code.find("separab") != std::string::npos;
    }
    CHECK(found);

    // (iii) vanishing background at a center
    Scene dead = one_ball_scene(Vec3(0.5, 0, 0), 0.1);
    HarmonicPolyField poly;
    poly.quadratic << 1, 0, 0, 0, 1, 0, 0, 0, -2;
    dead.background = poly; // grad = 2 A x vanishes at the origin
    dead.anomalies[0].z = Vec3::Zero();
    CHECK(!validate_scene(dead).ok());

    // (iv) singular material combination
    Scene sing = one_ball_scene(Vec3(0.5, 0, 0), 0.1);
    sing.materials.eps_s = 1.0;
    sing.materials.eps0 = 1.0;
    sing.materials.anomalies[0] = {3.0, -1.0 / 3.0, 0.0};
    CHECK(!validate_scene(sing).ok());

    // overlapping anomalies
    Scene overlap = one_ball_scene(Vec3(0.5, 0, 0), 0.1);
    overlap.anomalies.push_back(
        {Vec3(0.5 + 1e-3, 0, 0), AnomalyShape::Ball, "", 0.05, 0});
    CHECK(!validate_scene(overlap).ok());

    // a healthy scene passes
    Scene good = one_ball_scene(Vec3(0.5, 0, 0), 0.1);
    good.anomalies.push_back({Vec3(-0.6, 0.2, 0), AnomalyShape::Ball, "", -0.1, 0});
    CHECK(validate_scene(good).ok());
}
