#include "carreau/fe_eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace carreau {

const BasisCache& BasisCache::get(int degree, int exactness) {
    static std::map<std::pair<int, int>, BasisCache> caches;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(degree, exactness);
    auto it = caches.find(key);
    if (it != caches.end()) return it->second;

    BasisCache c;
    c.rule = &quadrature(exactness);
    c.degree = degree;
    const ReferenceBasis& basis = reference_basis(degree);
    c.n_local = basis.n_nodes();
    const int nq = c.rule->n_points();
    c.values.resize(static_cast<size_t>(nq) * c.n_local);
    c.ref_grads.resize(static_cast<size_t>(nq) * c.n_local);
    std::vector<double> vals;
    std::vector<Vec2> grads;
    for (int q = 0; q < nq; ++q) {
        basis.eval(c.rule->points[q], vals);
        basis.grad(c.rule->points[q], grads);
        for (int i = 0; i < c.n_local; ++i) {
            c.values[q * c.n_local + i] = vals[i];
            c.ref_grads[q * c.n_local + i] = grads[i];
        }
    }
    return caches.emplace(key, std::move(c)).first->second;
}

void ElementBasis::bind(const Mesh& mesh, int elem, const BasisCache& c) {
    cache = &c;
    map = affine_map(mesh, elem);
    const int nq = c.rule->n_points();
    phys_grads.resize(static_cast<size_t>(nq) * c.n_local);
    for (int q = 0; q < nq; ++q)
        for (int i = 0; i < c.n_local; ++i)
            phys_grads[q * c.n_local + i] = map.jac_inv_t * c.ref_grad(q, i);
}

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh) {
    nbins_ = std::max(1, static_cast<int>(std::sqrt(mesh.n_triangles() / 2.0)));
    bins_.resize(static_cast<size_t>(nbins_) * nbins_);
    auto bin_of = [this](double t) {
        int b = static_cast<int>(t * nbins_);
        return std::clamp(b, 0, nbins_ - 1);
    };
    for (int e = 0; e < mesh.n_triangles(); ++e) {
        const auto& v = mesh.triangles[e].v;
        double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
        for (int k = 0; k < 3; ++k) {
            x0 = std::min(x0, mesh.vertices[v[k]].x());
            x1 = std::max(x1, mesh.vertices[v[k]].x());
            y0 = std::min(y0, mesh.vertices[v[k]].y());
            y1 = std::max(y1, mesh.vertices[v[k]].y());
        }
        for (int bj = bin_of(y0); bj <= bin_of(y1); ++bj)
            for (int bi = bin_of(x0); bi <= bin_of(x1); ++bi)
                bins_[bj * nbins_ + bi].push_back(e);
    }
}

int PointLocator::locate(const Vec2& p) const {
    auto bin_of = [this](double t) {
        int b = static_cast<int>(t * nbins_);
        return std::clamp(b, 0, nbins_ - 1);
    };
    const double tol = 1e-10;
    for (int e : bins_[bin_of(p.y()) * nbins_ + bin_of(p.x())]) {
        const AffineMap map = affine_map(*mesh_, e);
        const Vec2 r = map.pull_back(p);
        if (r.x() >= -tol && r.y() >= -tol && r.x() + r.y() <= 1.0 + tol) return e;
    }
    return -1;
}

namespace {

Vec2 clamped_ref(const AffineMap& map, const Vec2& p) {
    Vec2 r = map.pull_back(p);
    r.x() = std::max(r.x(), 0.0);
    r.y() = std::max(r.y(), 0.0);
    const double s = r.x() + r.y();
    if (s > 1.0) r /= s;
    return r;
}

} // namespace

double eval_scalar_at(const FeSpace& space, const Vector& coeffs,
                      const PointLocator& loc, const Vec2& p) {
    const int e = loc.locate(p);
    if (e < 0) throw std::out_of_range("eval_scalar_at: point outside mesh");
    const AffineMap map = affine_map(loc.mesh(), e);
    const ReferenceBasis& basis = reference_basis(space.degree());
    std::vector<double> vals;
    basis.eval(clamped_ref(map, p), vals);
    double out = 0.0;
    for (int i = 0; i < basis.n_nodes(); ++i)
        out += coeffs[space.scalar_dof(e, i)] * vals[i];
    return out;
}

Vec2 eval_velocity_at(const FeSpace& space, const Vector& coeffs,
                      const PointLocator& loc, const Vec2& p) {
    const int e = loc.locate(p);
    if (e < 0) throw std::out_of_range("eval_velocity_at: point outside mesh");
    const AffineMap map = affine_map(loc.mesh(), e);
    const ReferenceBasis& basis = reference_basis(space.degree());
    std::vector<double> vals;
    basis.eval(clamped_ref(map, p), vals);
    Vec2 out = Vec2::Zero();
    for (int i = 0; i < basis.n_nodes(); ++i) {
        out.x() += coeffs[space.dof(e, i, 0)] * vals[i];
        out.y() += coeffs[space.dof(e, i, 1)] * vals[i];
    }
    return out;
}

double eval_scalar(const FeSpace& space, const Vector& coeffs, int elem,
                   const ElementBasis& eb, int q) {
    double v = 0.0;
    for (int i = 0; i < eb.n_local(); ++i)
        v += coeffs[space.scalar_dof(elem, i)] * eb.value(q, i);
    return v;
}

Vec2 grad_scalar(const FeSpace& space, const Vector& coeffs, int elem,
                 const ElementBasis& eb, int q) {
    Vec2 g = Vec2::Zero();
    for (int i = 0; i < eb.n_local(); ++i)
        g += coeffs[space.scalar_dof(elem, i)] * eb.grad(q, i);
    return g;
}

Vec2 eval_velocity(const FeSpace& space, const Vector& coeffs, int elem,
                   const ElementBasis& eb, int q) {
    Vec2 v = Vec2::Zero();
    for (int i = 0; i < eb.n_local(); ++i) {
        const double phi = eb.value(q, i);
        v.x() += coeffs[space.dof(elem, i, 0)] * phi;
        v.y() += coeffs[space.dof(elem, i, 1)] * phi;
    }
    return v;
}

Eigen::Matrix2d grad_velocity(const FeSpace& space, const Vector& coeffs, int elem,
                              const ElementBasis& eb, int q) {
    Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
    for (int i = 0; i < eb.n_local(); ++i) {
        const Vec2& g = eb.grad(q, i);
        const double cx = coeffs[space.dof(elem, i, 0)];
        const double cy = coeffs[space.dof(elem, i, 1)];
        J(0, 0) += cx * g.x();
        J(0, 1) += cx * g.y();
        J(1, 0) += cy * g.x();
        J(1, 1) += cy * g.y();
    }
    return J;
}

} // namespace carreau
