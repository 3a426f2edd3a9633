#include "geomag/sphharm.hpp"

#include <cmath>

namespace geomag {

namespace {

constexpr double kPi = 3.14159265358979323846;
const Complex kI(0.0, 1.0);

// Y_n^m on the unit sphere, m >= 0, via the normalized Legendre recurrence
// carried directly in Cartesian components (no trigonometric singularities:
// sin(theta) e^{i phi} == x + i y on the unit sphere).
Complex ynm_nonneg(int n, int m, const Vec3& u) {
    const double z = u.z();
    const Complex xy(u.x(), u.y());

    // sectoral start Y_m^m
    Complex ymm(1.0 / std::sqrt(4.0 * kPi), 0.0);
    for (int k = 1; k <= m; ++k) {
        ymm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * xy;
    }
    if (n == m) return ymm;

    Complex prev = ymm;
    Complex cur = std::sqrt(2.0 * m + 3.0) * z * ymm; // Y_{m+1}^m
    for (int k = m + 2; k <= n; ++k) {
        const double A = std::sqrt((2.0 * k - 1.0) * (2.0 * k + 1.0) /
                                   ((k - m) * (k + m)));
        const double B = std::sqrt((2.0 * k + 1.0) * (k - 1.0 - m) * (k - 1.0 + m) /
                                   ((2.0 * k - 3.0) * (k - m) * (k + m)));
        const Complex next = A * z * cur - B * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

Complex ynm_unit(int n, int m, const Vec3& u) {
    if (m >= 0) return ynm_nonneg(n, m, u);
    const Complex y = ynm_nonneg(n, -m, u);
    return ((-m) % 2 == 0 ? std::conj(y) : -std::conj(y));
}

struct LadderTerm {
    Complex coef;
    int m;
};

// Per-Cartesian-component expansion of grad R_n^m in degree n-1 regular
// solid harmonics. Terms with |m'| > n-1 carry zero coefficients.
struct LadderTerms {
    LadderTerm t[3][2];
    int count[3] = {0, 0, 0};
};

LadderTerms regular_grad_terms(int n, int m) {
    LadderTerms out;
    if (n == 0) return out;
    const double f = (2.0 * n + 1.0) / (2.0 * n - 1.0);
    const double s1 = std::sqrt(f * (n - m) * (n - m - 1.0)); // raises m
    const double s2 = std::sqrt(f * (n + m) * (n + m - 1.0)); // lowers m
    const double s3 = std::sqrt(f * (n - m) * (n + m));
    out.t[0][out.count[0]++] = {0.5 * s1, m + 1};
    out.t[0][out.count[0]++] = {-0.5 * s2, m - 1};
    out.t[1][out.count[1]++] = {-0.5 * kI * s1, m + 1};
    out.t[1][out.count[1]++] = {-0.5 * kI * s2, m - 1};
    out.t[2][out.count[2]++] = {Complex(s3), m};
    return out;
}

// Same for grad I_n^m in degree n+1 irregular solid harmonics.
LadderTerms irregular_grad_terms(int n, int m) {
    LadderTerms out;
    const double f = (2.0 * n + 1.0) / (2.0 * n + 3.0);
    const double t1 = std::sqrt(f * (n + m + 1.0) * (n + m + 2.0)); // raises m
    const double t2 = std::sqrt(f * (n - m + 1.0) * (n - m + 2.0)); // lowers m
    const double t3 = std::sqrt(f * (n + 1.0 - m) * (n + 1.0 + m));
    out.t[0][out.count[0]++] = {0.5 * t1, m + 1};
    out.t[0][out.count[0]++] = {-0.5 * t2, m - 1};
    out.t[1][out.count[1]++] = {-0.5 * kI * t1, m + 1};
    out.t[1][out.count[1]++] = {-0.5 * kI * t2, m - 1};
    out.t[2][out.count[2]++] = {Complex(-t3), m};
    return out;
}

void check_degree_order(int n, int m) {
    if (n < 0 || std::abs(m) > n) {
        throw DomainError("spherical harmonic degree/order out of range: n=" +
                          std::to_string(n) + " m=" + std::to_string(m));
    }
}

} // namespace

SphDir SphDir::from_unit(const Vec3& v) {
    const double r = v.norm();
    if (std::abs(r - 1.0) > 1e-12) {
        throw DomainError("SphDir: vector is not unit length");
    }
    return SphDir{v / r};
}

SphDir SphDir::from_angles(double theta, double phi) {
    const double s = std::sin(theta);
    return SphDir{Vec3(s * std::cos(phi), s * std::sin(phi), std::cos(theta))};
}

double SphDir::theta() const {
    return std::atan2(std::hypot(u.x(), u.y()), u.z());
}

double SphDir::phi() const {
    double p = std::atan2(u.y(), u.x());
    if (p < 0.0) p += 2.0 * kPi;
    return p;
}

QuadRule sphere_quadrature(int level) {
    if (level < 1) throw DomainError("sphere_quadrature: level must be >= 1");

    // Gauss-Legendre nodes in cos(theta) by the Golub-Welsch method.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(level, level);
    for (int k = 1; k < level; ++k) {
        const double beta = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = beta;
        J(k - 1, k) = beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    const Eigen::VectorXd t = es.eigenvalues();
    Eigen::VectorXd wgl(level);
    for (int i = 0; i < level; ++i) {
        const double v0 = es.eigenvectors()(0, i);
        wgl(i) = 2.0 * v0 * v0;
    }

    const int nphi = 2 * level;
    QuadRule rule;
    rule.exactness = 2 * level - 1;
    rule.nodes.reserve(static_cast<size_t>(level) * nphi);
    for (int i = 0; i < level; ++i) {
        const double ct = t(i);
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int j = 0; j < nphi; ++j) {
            const double phi = 2.0 * kPi * j / nphi;
            QuadNode node;
            node.dir.u = Vec3(st * std::cos(phi), st * std::sin(phi), ct);
            node.weight = wgl(i) * kPi / level;
            rule.nodes.push_back(node);
        }
    }
    return rule;
}

Complex eval_ynm(int n, int m, const SphDir& dir) {
    check_degree_order(n, m);
    return ynm_unit(n, m, dir.u);
}

Complex solid_harmonic(int n, int m, const Vec3& x) {
    check_degree_order(n, m);
    const double r = x.norm();
    if (r == 0.0) {
        return n == 0 ? Complex(1.0 / std::sqrt(4.0 * kPi)) : Complex(0.0);
    }
    return std::pow(r, n) * ynm_unit(n, m, x / r);
}

Complex irregular_solid_harmonic(int n, int m, const Vec3& x) {
    check_degree_order(n, m);
    const double r = x.norm();
    if (r == 0.0) throw SingularityError("irregular solid harmonic at r = 0");
    return ynm_unit(n, m, x / r) / std::pow(r, n + 1);
}

namespace {

Complex solid_or_zero(int n, int m, const Vec3& x) {
    if (std::abs(m) > n) return Complex(0.0);
    return solid_harmonic(n, m, x);
}

Complex irregular_or_zero(int n, int m, const Vec3& x) {
    if (std::abs(m) > n) return Complex(0.0);
    return irregular_solid_harmonic(n, m, x);
}

} // namespace

CVec3 grad_solid_harmonic(int n, int m, const Vec3& x) {
    check_degree_order(n, m);
    CVec3 g = CVec3::Zero();
    if (n == 0) return g;
    const LadderTerms lt = regular_grad_terms(n, m);
    for (int c = 0; c < 3; ++c) {
        for (int k = 0; k < lt.count[c]; ++k) {
            g(c) += lt.t[c][k].coef * solid_or_zero(n - 1, lt.t[c][k].m, x);
        }
    }
    return g;
}

CMat3 hess_solid_harmonic(int n, int m, const Vec3& x) {
    check_degree_order(n, m);
    CMat3 H = CMat3::Zero();
    if (n <= 1) return H;
    const LadderTerms lt = regular_grad_terms(n, m);
    for (int c = 0; c < 3; ++c) {
        for (int k = 0; k < lt.count[c]; ++k) {
            const int mk = lt.t[c][k].m;
            if (std::abs(mk) > n - 1) continue;
            H.col(c) += lt.t[c][k].coef * grad_solid_harmonic(n - 1, mk, x);
        }
    }
    return H;
}

CVec3 grad_irregular_solid_harmonic(int n, int m, const Vec3& x) {
    check_degree_order(n, m);
    CVec3 g = CVec3::Zero();
    const LadderTerms lt = irregular_grad_terms(n, m);
    for (int c = 0; c < 3; ++c) {
        for (int k = 0; k < lt.count[c]; ++k) {
            g(c) += lt.t[c][k].coef * irregular_or_zero(n + 1, lt.t[c][k].m, x);
        }
    }
    return g;
}

CMat3 hess_irregular_solid_harmonic(int n, int m, const Vec3& x) {
    check_degree_order(n, m);
    CMat3 H = CMat3::Zero();
    const LadderTerms lt = irregular_grad_terms(n, m);
    for (int c = 0; c < 3; ++c) {
        for (int k = 0; k < lt.count[c]; ++k) {
            const int mk = lt.t[c][k].m;
            if (std::abs(mk) > n + 1) continue;
            H.col(c) += lt.t[c][k].coef *
                        grad_irregular_solid_harmonic(n + 1, mk, x);
        }
    }
    return H;
}

CVec3 eval_grad_s_ynm(int n, int m, const SphDir& dir) {
    check_degree_order(n, m);
    // On r = 1: grad R_n^m = grad_s Y + n Y x^.
    const CVec3 g = grad_solid_harmonic(n, m, dir.u);
    const Complex y = ynm_unit(n, m, dir.u);
    return g - double(n) * y * dir.u.cast<Complex>();
}

CVec3 eval_vector_harmonic(VectorHarmonicKind kind, int n, int m,
                           const SphDir& dir) {
    check_degree_order(n, m);
    if (kind != VectorHarmonicKind::N && n < 1) {
        throw DomainError("vector harmonics Q, T need degree n >= 1");
    }
    const Complex y = ynm_unit(n, m, dir.u);
    const CVec3 gs = eval_grad_s_ynm(n, m, dir);
    const CVec3 xhat = dir.u.cast<Complex>();
    switch (kind) {
        case VectorHarmonicKind::N:
            return double(n + 1) * y * xhat - gs;
        case VectorHarmonicKind::Q:
            return gs + double(n) * y * xhat;
        case VectorHarmonicKind::T:
            return gs.cross(xhat);
    }
    throw DomainError("unknown vector harmonic kind");
}

CMat3 eval_A(int n, int m, const SphDir& dir) {
    check_degree_order(n, m);
    return -hess_irregular_solid_harmonic(n, m, dir.u);
}

CouplingAB coupling_ab(int np, int mp, int n, int m, const QuadRule& quad) {
    check_degree_order(np, mp);
    check_degree_order(n, m);
    if (quad.exactness < n + np + 2) {
        throw PrecisionError("coupling_ab: quadrature exactness " +
                             std::to_string(quad.exactness) +
                             " below required " + std::to_string(n + np + 2));
    }
    CouplingAB out;
    out.a = CVec3::Zero();
    out.b = CVec3::Zero();
    for (const QuadNode& node : quad.nodes) {
        const Complex yp = std::conj(ynm_unit(np, mp, node.dir.u));
        const Complex y = ynm_unit(n, m, node.dir.u);
        const CVec3 gs = eval_grad_s_ynm(n, m, node.dir);
        out.a += node.weight * yp * gs;
        out.b += node.weight * yp * y * node.dir.u.cast<Complex>();
    }
    return out;
}

int CouplingTables::index(int np, int mp, int n, int m) const {
    const int stride = (cutoff_ + 1) * (cutoff_ + 1);
    const int i = np * (np + 1) + mp;
    const int j = n * (n + 1) + m;
    return i * stride + j;
}

CouplingTables::CouplingTables(int cutoff, const QuadRule& quad)
    : cutoff_(cutoff) {
    if (cutoff < 0) throw DomainError("CouplingTables: negative cutoff");
    if (quad.exactness < 2 * cutoff + 2) {
        throw PrecisionError("CouplingTables: quadrature exactness below 2*cutoff+2");
    }
    const int stride = (cutoff + 1) * (cutoff + 1);
    a_.assign(static_cast<size_t>(stride) * stride, CVec3::Zero());
    b_.assign(static_cast<size_t>(stride) * stride, CVec3::Zero());

    // Cache Y and grad_s Y at every node, then accumulate all pair integrals.
    const size_t nn = quad.nodes.size();
    std::vector<Complex> yv(nn * stride);
    std::vector<CVec3> gv(nn * stride);
    for (size_t q = 0; q < nn; ++q) {
        for (int n = 0; n <= cutoff; ++n) {
            for (int m = -n; m <= n; ++m) {
                const int j = n * (n + 1) + m;
                yv[q * stride + j] = ynm_unit(n, m, quad.nodes[q].dir.u);
                gv[q * stride + j] = eval_grad_s_ynm(n, m, quad.nodes[q].dir);
            }
        }
    }
    for (size_t q = 0; q < nn; ++q) {
        const double w = quad.nodes[q].weight;
        const CVec3 xhat = quad.nodes[q].dir.u.cast<Complex>();
        for (int ip = 0; ip < stride; ++ip) {
            const Complex yp = std::conj(yv[q * stride + ip]);
            for (int j = 0; j < stride; ++j) {
                a_[static_cast<size_t>(ip) * stride + j] +=
                    w * yp * gv[q * stride + j];
                b_[static_cast<size_t>(ip) * stride + j] +=
                    w * yp * yv[q * stride + j] * xhat;
            }
        }
    }
}

const CVec3& CouplingTables::a(int np, int mp, int n, int m) const {
    if (np > cutoff_ || n > cutoff_) {
        throw DomainError("CouplingTables: degree beyond cutoff");
    }
    check_degree_order(np, mp);
    check_degree_order(n, m);
    return a_[index(np, mp, n, m)];
}

const CVec3& CouplingTables::b(int np, int mp, int n, int m) const {
    if (np > cutoff_ || n > cutoff_) {
        throw DomainError("CouplingTables: degree beyond cutoff");
    }
    check_degree_order(np, mp);
    check_degree_order(n, m);
    return b_[index(np, mp, n, m)];
}

CouplingCD coupling_cd(int np, int mp, int n, int m,
                       const CouplingTables& tables) {
    if (np == 0) {
        throw DomainError("coupling_cd: d undefined for n' = 0");
    }
    const CVec3 a = tables.a(np, mp, n, m);
    const CVec3 b = tables.b(np, mp, n, m);
    const CVec3 aswap = tables.a(n, m, np, mp).conjugate();

    CouplingCD out;
    const double cn = (np + 1.0) * (np + n + 1.0);
    out.c = (cn * a - cn * (n + 2.0) * b + aswap) / ((np + 1.0) * (2.0 * np + 1.0));
    const double dn = np * (n - np);
    out.d = (dn * a - dn * (n + 2.0) * b - aswap) / (np * (2.0 * np + 1.0));
    return out;
}

ProjectionMatrices projection_matrices(const QuadRule& quad) {
    if (quad.exactness < 6) {
        throw PrecisionError("projection_matrices: quadrature exactness must be >= 6");
    }
    ProjectionMatrices out;
    out.C = CMat3::Zero();
    out.D = CMat3::Zero();
    for (const QuadNode& node : quad.nodes) {
        const CMat3 A = eval_A(0, 0, node.dir);
        for (int mp = -1; mp <= 1; ++mp) {
            const CVec3 N2 =
                eval_vector_harmonic(VectorHarmonicKind::N, 1, mp, node.dir);
            const CVec3 Q0 =
                eval_vector_harmonic(VectorHarmonicKind::Q, 1, mp, node.dir);
            for (int k = 0; k < 3; ++k) {
                // Eigen's dot conjugates its first argument.
                out.C(mp + 1, k) += node.weight * N2.dot(A.col(k));
                out.D(mp + 1, k) += node.weight * Q0.dot(A.col(k));
            }
        }
    }
    Eigen::JacobiSVD<CMat3> svd(out.C);
    out.cond_C = svd.singularValues()(0) / svd.singularValues()(2);
    out.norm_D = out.D.norm();
    return out;
}

} // namespace geomag
