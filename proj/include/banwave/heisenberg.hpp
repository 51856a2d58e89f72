#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "banwave/common.hpp"

namespace banwave {

/// Point (t, z) of the Heisenberg group H^n: t real central coordinate,
/// z in C^n. Group law  (t,z)*(t',z') = (t + t' + 1/2 Im<z,z'>, z + z')
/// with <z,z'> = sum conj(z_j) z'_j.
struct GroupElement {
    double t = 0.0;
    std::vector<Complex> z;

    int n() const { return static_cast<int>(z.size()); }
};

inline GroupElement group_identity(int n) { return GroupElement{0.0, std::vector<Complex>(n, 0.0)}; }

inline GroupElement compose(const GroupElement& a, const GroupElement& b) {
    require(a.n() == b.n(), "compose: dimension mismatch");
    GroupElement out;
    out.z.resize(a.z.size());
    double twist = 0.0;
    for (std::size_t j = 0; j < a.z.size(); ++j) {
        twist += std::imag(std::conj(a.z[j]) * b.z[j]);
        out.z[j] = a.z[j] + b.z[j];
    }
    out.t = a.t + b.t + 0.5 * twist;
    return out;
}

/// Inverse of (t,z) is (-t,-z); the twist term vanishes between z and -z.
inline GroupElement inverse(const GroupElement& g) {
    GroupElement out;
    out.t = -g.t;
    out.z.resize(g.z.size());
    for (std::size_t j = 0; j < g.z.size(); ++j) out.z[j] = -g.z[j];
    return out;
}

/// Subgroup choices. Center = {(t,0)}, homogeneous space X = C^n.
/// RealHyperplane = {(t,z) : Im z = 0}, homogeneous space X = R^n.
enum class SubgroupKind { Center, RealHyperplane };

/// Point of X. RealHyperplane: coords has length n. Center: length 2n,
/// interleaved as (Re z_1, Im z_1, ..., Re z_n, Im z_n).
struct HomogeneousPoint {
    std::vector<double> coords;
};

inline int homogeneous_dim(SubgroupKind kind, int n) {
    return kind == SubgroupKind::Center ? 2 * n : n;
}

/// Section s: X -> G. RealHyperplane: s(x) = (0, i x). Center: s(z) = (0, z).
inline GroupElement section(const HomogeneousPoint& x, SubgroupKind kind) {
    GroupElement g;
    g.t = 0.0;
    if (kind == SubgroupKind::RealHyperplane) {
        g.z.resize(x.coords.size());
        for (std::size_t j = 0; j < x.coords.size(); ++j) g.z[j] = Complex(0.0, x.coords[j]);
    } else {
        require(x.coords.size() % 2 == 0, "section: Center point needs 2n coords");
        g.z.resize(x.coords.size() / 2);
        for (std::size_t j = 0; j < g.z.size(); ++j)
            g.z[j] = Complex(x.coords[2 * j], x.coords[2 * j + 1]);
    }
    return g;
}

/// Unique decomposition g = s(x) h with h in the subgroup; returns (x, h).
/// Closed forms: Center: x = z, h = (t, 0).
/// RealHyperplane: x = Im z, h = (t + 1/2 Re z . Im z, Re z).
inline std::pair<HomogeneousPoint, GroupElement> project(const GroupElement& g, SubgroupKind kind) {
    HomogeneousPoint x;
    GroupElement h;
    const int n = g.n();
    if (kind == SubgroupKind::Center) {
        x.coords.resize(2 * n);
        for (int j = 0; j < n; ++j) {
            x.coords[2 * j] = std::real(g.z[j]);
            x.coords[2 * j + 1] = std::imag(g.z[j]);
        }
        h.t = g.t;
        h.z.assign(n, Complex(0.0, 0.0));
    } else {
        x.coords.resize(n);
        double corr = 0.0;
        h.z.resize(n);
        for (int j = 0; j < n; ++j) {
            const double u = std::real(g.z[j]), v = std::imag(g.z[j]);
            x.coords[j] = v;
            h.z[j] = Complex(u, 0.0);
            corr += u * v;
        }
        h.t = g.t + 0.5 * corr;
    }
    return {std::move(x), std::move(h)};
}

/// Left action of g on X together with the subgroup remainder:
/// returns (x', h) with s(x') h = g^{-1} s(x). Both subgroup choices act on
/// the coordinates of X by Euclidean shifts.
inline std::pair<HomogeneousPoint, GroupElement> act(const GroupElement& g, const HomogeneousPoint& x,
                                                     SubgroupKind kind) {
    return project(compose(inverse(g), section(x, kind)), kind);
}

inline constexpr double subgroup_tol = 1e-12;

inline bool in_subgroup(const GroupElement& h, SubgroupKind kind, double tol = subgroup_tol) {
    for (const Complex& zj : h.z) {
        const double off = (kind == SubgroupKind::Center) ? std::abs(zj) : std::abs(std::imag(zj));
        if (off > tol) return false;
    }
    return true;
}

/// Character of the subgroup used by both realizations: chi(h) = e^{2 i t}.
inline Complex character(const GroupElement& h, SubgroupKind kind) {
    require(in_subgroup(h, kind), "character: element not in subgroup");
    return std::exp(Complex(0.0, 2.0 * h.t));
}

}  // namespace banwave
