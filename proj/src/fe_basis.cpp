#include "carreau/fe_basis.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace carreau {

namespace {

// Barycentric helpers: l = (1-x-y, x, y), with constant gradients.
const Vec2 kGradL[3] = {Vec2(-1.0, -1.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};

// Edges in node-ordering convention: (0,1), (1,2), (2,0).
const int kEdgeV[3][2] = {{0, 1}, {1, 2}, {2, 0}};

ReferenceBasis make_basis(int degree) {
    ReferenceBasis b;
    b.degree = degree;
    const Vec2 V[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    b.node_coords = {V[0], V[1], V[2]};
    if (degree >= 2) {
        for (const auto& e : kEdgeV) {
            const Vec2 p = V[e[0]], q = V[e[1]];
            if (degree == 2) {
                b.node_coords.push_back(0.5 * (p + q));
            } else {
                b.node_coords.push_back(p + (q - p) / 3.0);
                b.node_coords.push_back(p + 2.0 * (q - p) / 3.0);
            }
        }
    }
    if (degree == 3) b.node_coords.push_back(Vec2(1.0 / 3.0, 1.0 / 3.0));
    return b;
}

} // namespace

void ReferenceBasis::eval(const Vec2& p, std::vector<double>& values) const {
    const double l[3] = {1.0 - p.x() - p.y(), p.x(), p.y()};
    values.resize(node_coords.size());
    switch (degree) {
    case 1:
        for (int i = 0; i < 3; ++i) values[i] = l[i];
        break;
    case 2:
        for (int i = 0; i < 3; ++i) values[i] = l[i] * (2.0 * l[i] - 1.0);
        for (int e = 0; e < 3; ++e)
            values[3 + e] = 4.0 * l[kEdgeV[e][0]] * l[kEdgeV[e][1]];
        break;
    case 3:
        for (int i = 0; i < 3; ++i)
            values[i] = 0.5 * l[i] * (3.0 * l[i] - 1.0) * (3.0 * l[i] - 2.0);
        for (int e = 0; e < 3; ++e) {
            const double li = l[kEdgeV[e][0]], lj = l[kEdgeV[e][1]];
            values[3 + 2 * e] = 4.5 * li * lj * (3.0 * li - 1.0);
            values[3 + 2 * e + 1] = 4.5 * li * lj * (3.0 * lj - 1.0);
        }
        values[9] = 27.0 * l[0] * l[1] * l[2];
        break;
    default:
        throw std::invalid_argument("lagrange_basis: degree must be 1, 2 or 3");
    }
}

void ReferenceBasis::grad(const Vec2& p, std::vector<Vec2>& gradients) const {
    const double l[3] = {1.0 - p.x() - p.y(), p.x(), p.y()};
    gradients.assign(node_coords.size(), Vec2::Zero());
    switch (degree) {
    case 1:
        for (int i = 0; i < 3; ++i) gradients[i] = kGradL[i];
        break;
    case 2:
        for (int i = 0; i < 3; ++i)
            gradients[i] = (4.0 * l[i] - 1.0) * kGradL[i];
        for (int e = 0; e < 3; ++e) {
            const int i = kEdgeV[e][0], j = kEdgeV[e][1];
            gradients[3 + e] = 4.0 * (l[j] * kGradL[i] + l[i] * kGradL[j]);
        }
        break;
    case 3:
        for (int i = 0; i < 3; ++i)
            gradients[i] = 0.5 * (27.0 * l[i] * l[i] - 18.0 * l[i] + 2.0) * kGradL[i];
        for (int e = 0; e < 3; ++e) {
            const int i = kEdgeV[e][0], j = kEdgeV[e][1];
            const double li = l[i], lj = l[j];
            gradients[3 + 2 * e] =
                4.5 * (lj * (6.0 * li - 1.0) * kGradL[i] + li * (3.0 * li - 1.0) * kGradL[j]);
            gradients[3 + 2 * e + 1] =
                4.5 * (lj * (3.0 * lj - 1.0) * kGradL[i] + li * (6.0 * lj - 1.0) * kGradL[j]);
        }
        gradients[9] = 27.0 * (l[1] * l[2] * kGradL[0] + l[0] * l[2] * kGradL[1] +
                               l[0] * l[1] * kGradL[2]);
        break;
    default:
        throw std::invalid_argument("lagrange_basis: degree must be 1, 2 or 3");
    }
}

const ReferenceBasis& reference_basis(int degree) {
    if (degree < 1 || degree > 3)
        throw std::invalid_argument("reference_basis: degree must be 1, 2 or 3");
    static const ReferenceBasis b1 = make_basis(1);
    static const ReferenceBasis b2 = make_basis(2);
    static const ReferenceBasis b3 = make_basis(3);
    switch (degree) {
    case 1: return b1;
    case 2: return b2;
    default: return b3;
    }
}

void lagrange_basis(int degree, const Vec2& p, std::vector<double>& values,
                    std::vector<Vec2>& gradients) {
    const ReferenceBasis& b = reference_basis(degree);
    b.eval(p, values);
    b.grad(p, gradients);
}

namespace {

// Gauss-Legendre nodes/weights on [0,1] by Newton iteration on P_n.
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double r = std::cos(M_PI * (4.0 * i + 3.0) / (4.0 * n + 2.0));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p2 = 0.0, p3 = 1.0;
            for (int j = 0; j < n; ++j) {
                const double p1 = p2;
                p2 = p3;
                p3 = ((2.0 * j + 1.0) * r * p2 - j * p1) / (j + 1.0);
            }
            dp = n * (r * p3 - p2) / (r * r - 1.0);
            const double dr = p3 / dp;
            r -= dr;
            if (std::abs(dr) < 1e-16 * (1.0 + std::abs(r))) break;
        }
        const double weight = 1.0 / ((1.0 - r * r) * dp * dp);
        x[i] = 0.5 - r / 2.0;
        x[n - 1 - i] = 0.5 + r / 2.0;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
}

// Collapsed product rule: x = xi*(1-eta), y = eta, weight absorbs the
// Jacobian (1-eta). A monomial x^a y^b with a+b <= d pulls back to
// xi-degree a and eta-degree a+b+1 <= d+1, so n = ceil((d+1)/2) points in
// xi and m = ceil((d+2)/2) points in eta give exact integration.
QuadratureRule make_rule(int d) {
    QuadratureRule rule;
    rule.exactness = d;
    const int n = (d + 2) / 2;
    const int m = (d + 3) / 2;
    std::vector<double> xi, wxi, eta, weta;
    gauss_legendre_01(std::max(n, 1), xi, wxi);
    gauss_legendre_01(std::max(m, 1), eta, weta);
    for (size_t j = 0; j < eta.size(); ++j) {
        for (size_t i = 0; i < xi.size(); ++i) {
            rule.points.emplace_back(xi[i] * (1.0 - eta[j]), eta[j]);
            rule.weights.push_back(wxi[i] * weta[j] * (1.0 - eta[j]));
        }
    }
    return rule;
}

} // namespace

const QuadratureRule& quadrature(int exactness_degree) {
    if (exactness_degree < 0 || exactness_degree > kMaxQuadratureExactness)
        throw std::invalid_argument("quadrature: exactness degree out of range");
    static std::vector<QuadratureRule> rules;
    static std::once_flag once;
    std::call_once(once, [] {
        rules.resize(kMaxQuadratureExactness + 1);
        for (int d = 0; d <= kMaxQuadratureExactness; ++d) rules[d] = make_rule(d);
    });
    return rules[exactness_degree];
}

AffineMap affine_map(const Vec2& a, const Vec2& b, const Vec2& c) {
    AffineMap map;
    map.v0 = a;
    map.jac.col(0) = b - a;
    map.jac.col(1) = c - a;
    map.det = map.jac.determinant();
    if (!(map.det > 0.0))
        throw std::invalid_argument("affine_map: triangle is degenerate or clockwise");
    Mat2 inv;
    inv << map.jac(1, 1), -map.jac(0, 1), -map.jac(1, 0), map.jac(0, 0);
    inv /= map.det;
    map.jac_inv_t = inv.transpose();
    return map;
}

AffineMap affine_map(const Mesh& m, int tri) {
    const Tri& t = m.triangles[tri];
    return affine_map(m.vertices[t.v[0]], m.vertices[t.v[1]], m.vertices[t.v[2]]);
}

} // namespace carreau
