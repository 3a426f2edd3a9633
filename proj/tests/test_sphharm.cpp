#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "geomag/sphharm.hpp"

using namespace geomag;

namespace {
const double kSqrtPi = std::sqrt(M_PI);
}

TEST_CASE("scalar harmonics: closed-form values") {
    const SphDir north = SphDir::from_unit(Vec3(0, 0, 1));
    const SphDir skew = SphDir::from_unit(Vec3(0.3, -0.4, 0.86).normalized());

    CHECK(std::abs(eval_ynm(0, 0, skew) - 1.0 / (2.0 * kSqrtPi)) < 1e-14);
    CHECK(std::abs(eval_ynm(1, 0, north) - std::sqrt(3.0 / (4.0 * M_PI))) < 1e-14);

    // conjugation symmetry Y_n^{-m} = (-1)^m conj(Y_n^m)
    for (int n = 1; n <= 5; ++n) {
        for (int m = 1; m <= n; ++m) {
            const Complex lhs = eval_ynm(n, -m, skew);
            const Complex rhs =
                std::pow(-1.0, m) * std::conj(eval_ynm(n, m, skew));
            CHECK(std::abs(lhs - rhs) < 1e-13);
        }
    }

    CHECK_THROWS_AS(eval_ynm(2, 3, north), DomainError);
}

TEST_CASE("scalar harmonics: orthonormality to degree 6") {
    const QuadRule quad = sphere_quadrature(10);
    double worst = 0.0;
    for (int n = 0; n <= 6; ++n) {
        for (int np = n; np <= 6; ++np) {
            for (int m = -n; m <= n; ++m) {
                for (int mp = -np; mp <= np; ++mp) {
                    Complex acc(0.0);
                    for (const QuadNode& node : quad.nodes) {
                        acc += node.weight * eval_ynm(n, m, node.dir) *
                               std::conj(eval_ynm(np, mp, node.dir));
                    }
                    const double expect = (n == np && m == mp) ? 1.0 : 0.0;
                    worst = std::max(worst, std::abs(acc - expect));
                }
            }
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("surface gradient: values, tangentiality, Laplace-Beltrami norm") {
    const SphDir skew = SphDir::from_unit(Vec3(1, 2, -0.5).normalized());
    CHECK(eval_grad_s_ynm(0, 0, skew).norm() < 1e-14);

    // Y_1^0 = sqrt(3/4pi) cos(theta); at the equator (phi = 0) the gradient
    // is -sqrt(3/4pi) e_theta = (0, 0, sqrt(3/4pi)).
    const SphDir equator = SphDir::from_angles(M_PI / 2.0, 0.0);
    const CVec3 g = eval_grad_s_ynm(1, 0, equator);
    const double mag = std::sqrt(3.0 / (4.0 * M_PI));
    CHECK((g - CVec3(0, 0, mag)).norm() < 1e-13);

    // pole evaluation must be finite (Cartesian ladder, no sin(theta) pole)
    const SphDir north = SphDir::from_unit(Vec3(0, 0, 1));
    const CVec3 gp = eval_grad_s_ynm(3, 1, north);
    CHECK(std::isfinite(gp.norm()));

    const QuadRule quad = sphere_quadrature(8);
    for (int n = 1; n <= 4; ++n) {
        for (int m : {0, 1, n}) {
            double acc = 0.0;
            for (const QuadNode& node : quad.nodes) {
                const CVec3 gs = eval_grad_s_ynm(n, m, node.dir);
                CHECK(std::abs(gs.dot(node.dir.u.cast<Complex>())) < 1e-12);
                acc += node.weight * gs.squaredNorm();
            }
            CHECK(std::abs(acc - n * (n + 1.0)) < 1e-9);
        }
    }
}

TEST_CASE("vector harmonics: values, norms, cross-orthogonality") {
    const SphDir skew = SphDir::from_unit(Vec3(-0.2, 0.9, 0.4).normalized());
    const CVec3 n00 = eval_vector_harmonic(VectorHarmonicKind::N, 0, 0, skew);
    CHECK((n00 - (skew.u / (2.0 * kSqrtPi)).cast<Complex>()).norm() < 1e-14);

    CHECK_THROWS_AS(eval_vector_harmonic(VectorHarmonicKind::Q, 0, 0, skew),
                    DomainError);
    CHECK_THROWS_AS(eval_vector_harmonic(VectorHarmonicKind::T, 0, 0, skew),
                    DomainError);

    const QuadRule quad = sphere_quadrature(10);
    for (int n = 0; n <= 4; ++n) {
        for (int m : {0, std::min(n, 1), n}) {
            double acc = 0.0;
            for (const QuadNode& node : quad.nodes) {
                acc += node.weight *
                       eval_vector_harmonic(VectorHarmonicKind::N, n, m, node.dir)
                           .squaredNorm();
            }
            CHECK(std::abs(acc - (n + 1.0) * (2.0 * n + 1.0)) < 1e-9);
        }
    }

    // int conj(N^m_{n+1}) . Q^{m'}_{n'-1} ds = 0 for n != n'
    for (int n = 0; n <= 3; ++n) {
        for (int np = 1; np <= 3; ++np) {
            if (n == np) continue;
            for (int m = -n; m <= n; ++m) {
                for (int mp = -np; mp <= np; ++mp) {
                    Complex acc(0.0);
                    for (const QuadNode& node : quad.nodes) {
                        acc += node.weight *
                               eval_vector_harmonic(VectorHarmonicKind::N, n, m,
                                                    node.dir)
                                   .dot(eval_vector_harmonic(
                                       VectorHarmonicKind::Q, np, mp, node.dir));
                    }
                    CHECK(std::abs(acc) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("sphere quadrature: node counts, weights, exactness") {
    const QuadRule q1 = sphere_quadrature(1);
    CHECK(q1.nodes.size() == 2);
    double wsum = 0.0;
    for (const QuadNode& node : q1.nodes) wsum += node.weight;
    CHECK(std::abs(wsum - 4.0 * M_PI) < 1e-13);

    const QuadRule q8 = sphere_quadrature(8);
    CHECK(q8.nodes.size() == 8 * 16);
    CHECK(q8.exactness == 15);
    Complex self(0.0), cross(0.0);
    for (const QuadNode& node : q8.nodes) {
        const Complex y32 = eval_ynm(3, 2, node.dir);
        self += node.weight * y32 * std::conj(y32);
        cross += node.weight * y32 * std::conj(eval_ynm(2, 1, node.dir));
    }
    CHECK(std::abs(self - 1.0) < 1e-12);
    CHECK(std::abs(cross) < 1e-12);
}

TEST_CASE("solid harmonics: gradient identities") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    // grad(Y_n^m(x^)/r^{n+1}) = -N^m_{n+1}(x^)/r^{n+2}
    for (int trial = 0; trial < 20; ++trial) {
        const Vec3 x(u(rng) + 1.5, u(rng), u(rng));
        const double r = x.norm();
        const SphDir dir = SphDir::from_unit(x / r);
        for (int n = 0; n <= 4; ++n) {
            const int m = std::min(n, trial % 3);
            const CVec3 lhs = grad_irregular_solid_harmonic(n, m, x);
            const CVec3 rhs =
                -eval_vector_harmonic(VectorHarmonicKind::N, n, m, dir) /
                std::pow(r, n + 2);
            CHECK((lhs - rhs).norm() < 1e-10 * std::max(1.0, rhs.norm()));
        }
    }

    // central finite differences, step 1e-5, both families
    const double h = 1e-5;
    for (int trial = 0; trial < 5; ++trial) {
        const Vec3 x(u(rng) + 1.2, u(rng), u(rng));
        for (int n = 1; n <= 3; ++n) {
            for (int m : {0, n}) {
                CVec3 fd_r, fd_i;
                for (int k = 0; k < 3; ++k) {
                    Vec3 xp = x, xm = x;
                    xp(k) += h;
                    xm(k) -= h;
                    fd_r(k) = (solid_harmonic(n, m, xp) -
                               solid_harmonic(n, m, xm)) /
                              (2.0 * h);
                    fd_i(k) = (irregular_solid_harmonic(n, m, xp) -
                               irregular_solid_harmonic(n, m, xm)) /
                              (2.0 * h);
                }
                const CVec3 gr = grad_solid_harmonic(n, m, x);
                const CVec3 gi = grad_irregular_solid_harmonic(n, m, x);
                CHECK((fd_r - gr).norm() < 1e-6 * std::max(1.0, gr.norm()));
                CHECK((fd_i - gi).norm() < 1e-6 * std::max(1.0, gi.norm()));
            }
        }
    }
}

TEST_CASE("coupling coefficients: selection rules and identities") {
    const QuadRule quad = sphere_quadrature(10);

    const CouplingAB c10 = coupling_ab(1, 0, 0, 0, quad);
    CHECK(c10.a.norm() < 1e-12);
    CHECK((c10.b - CVec3(0, 0, 1.0 / std::sqrt(3.0))).norm() < 1e-12);

    // selection rule: a, b vanish unless n' in {n-1, n+1}
    for (int mp = -3; mp <= 3; ++mp) {
        for (int m = -1; m <= 1; ++m) {
            const CouplingAB c = coupling_ab(3, mp, 1, m, quad);
            CHECK(c.a.norm() < 1e-10);
            CHECK(c.b.norm() < 1e-10);
        }
    }

    // a_{1,2} = 3 b_{1,2}, componentwise
    for (int mp = -1; mp <= 1; ++mp) {
        for (int m = -2; m <= 2; ++m) {
            const CouplingAB c = coupling_ab(1, mp, 2, m, quad);
            CHECK((c.a - 3.0 * c.b).norm() < 1e-9);
        }
    }
}

TEST_CASE("coupling tables and c,d combinations") {
    const QuadRule quad = sphere_quadrature(12);
    const CouplingTables tables(5, quad);

    // tables agree with direct quadrature
    const CouplingAB direct = coupling_ab(2, 1, 1, 0, quad);
    CHECK((tables.a(2, 1, 1, 0) - direct.a).norm() < 1e-13);
    CHECK((tables.b(2, 1, 1, 0) - direct.b).norm() < 1e-13);

    CHECK_THROWS_AS(coupling_cd(0, 0, 1, 0, tables), DomainError);

    // d for (n'=1, n=2): with a_{1,2} = 3 b_{1,2} the combination collapses
    // to -(b_{1,2} + conj(a_{2,1}))/3
    for (int mp = -1; mp <= 1; ++mp) {
        for (int m = -2; m <= 2; ++m) {
            const CouplingCD cd = coupling_cd(1, mp, 2, m, tables);
            const CVec3 expect =
                -(tables.b(1, mp, 2, m) +
                  tables.a(2, m, 1, mp).conjugate()) /
                3.0;
            CHECK((cd.d - expect).norm() < 1e-10);
        }
    }
}

TEST_CASE("Hessian angular matrices: closed form and decomposition") {
    const SphDir skew = SphDir::from_unit(Vec3(0.6, -0.3, 0.9).normalized());

    // A_0^0 = (1/2 sqrt(pi)) (I - 3 x^ x^T), symmetric trace-free
    const CMat3 a00 = eval_A(0, 0, skew);
    const Mat3 expect =
        (Mat3::Identity() - 3.0 * skew.u * skew.u.transpose()) /
        (2.0 * kSqrtPi);
    CHECK((a00 - expect.cast<Complex>()).norm() < 1e-13);
    CHECK(std::abs(a00.trace()) < 1e-13);

    // decomposition: A_n^m xi = sum_{m'} (c^{m',m}_{n+1,n} . xi) N^{m'}_{n+2}
    const QuadRule quad = sphere_quadrature(12);
    const CouplingTables tables(6, quad);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Vec3 raw(u(rng), u(rng), u(rng));
        if (raw.norm() < 0.1) continue;
        const SphDir dir = SphDir::from_unit(raw.normalized());
        for (int n = 0; n <= 3; ++n) {
            for (int m = -n; m <= n; ++m) {
                const CMat3 a = eval_A(n, m, dir);
                for (int k = 0; k < 3; ++k) {
                    CVec3 xi = CVec3::Zero();
                    xi(k) = 1.0;
                    CVec3 rhs = CVec3::Zero();
                    for (int mp = -(n + 1); mp <= n + 1; ++mp) {
                        const CouplingCD cd = coupling_cd(n + 1, mp, n, m, tables);
                        rhs += cd.c.conjugate().dot(xi) *
                               eval_vector_harmonic(VectorHarmonicKind::N, n + 1,
                                                    mp, dir);
                    }
                    worst = std::max(worst, (a * xi - rhs).norm());
                }
            }
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("projection matrices") {
    const QuadRule quad = sphere_quadrature(8);
    const ProjectionMatrices pm = projection_matrices(quad);

    // row order m' = -1, 0, +1; columns k = 1..3
    CHECK(std::abs(pm.C(1, 2) - Complex(-2.0 * std::sqrt(3.0))) < 1e-10);
    CHECK(std::abs(pm.C(1, 0)) < 1e-12);
    CHECK(pm.cond_C < 10.0);
    CHECK(std::abs(pm.C.determinant()) > 1.0);

    // Q-projection of the exterior-gradient kernel vanishes identically
    CHECK(pm.norm_D < 1e-10);
}
