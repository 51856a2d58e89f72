#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "banwave/common.hpp"
#include "banwave/grid.hpp"
#include "banwave/heisenberg.hpp"
#include "banwave/schrodinger.hpp"

namespace banwave {

/// A representation of H^n by isometries of grid functions, together with the
/// subgroup choice and the quadrature grid on X = G/H. The closed-form state
/// evaluators are optional fast paths; when absent the engine falls back to
/// act / adjoint_act.
struct RepresentationHandle {
    SubgroupKind kind = SubgroupKind::Center;
    int n = 1;
    Grid domain;
    Grid x;
    std::function<GridFunction(const GroupElement&, const GridFunction&)> act;
    std::function<GridFunction(const GroupElement&, const GridFunction&)> adjoint_act;
    /// Values of the coherent state b_x = pi(s(x)) b0 on the domain nodes.
    std::function<void(std::span<const double>, const Grid&, std::span<Complex>)> coherent_state_into;
    /// Values of the analysing functional pi*(s(x)) l0 on the domain nodes.
    std::function<void(std::span<const double>, const Grid&, std::span<Complex>)> analysis_state_into;
};

/// Admissible set: representation, vacuum vector b0, test functional l0 and
/// the calibrated measure density on X. c0 = <b0,l0>. Singular tuples keep
/// the vacuum in the extended space (bounded grid functions) and carry a
/// probe vector instead of norm constraints.
struct AdmissibleTuple {
    RepresentationHandle rep;
    GridFunction b0;
    GridFunction l0;
    double measure_scale = 1.0;
    Complex c0{};
    bool singular_vacuum = false;
    GridFunction probe;
};

namespace detail {

inline HomogeneousPoint x_point(const Grid& xg, std::size_t flat) {
    HomogeneousPoint p;
    p.coords.resize(xg.dim);
    xg.node(flat, p.coords);
    return p;
}

/// Euclidean shift of X induced by the left action of g.
inline std::vector<double> action_shift(const GroupElement& g, SubgroupKind kind) {
    std::vector<double> s;
    if (kind == SubgroupKind::Center) {
        s.resize(2 * g.z.size());
        for (std::size_t j = 0; j < g.z.size(); ++j) {
            s[2 * j] = std::real(g.z[j]);
            s[2 * j + 1] = std::imag(g.z[j]);
        }
    } else {
        s.resize(g.z.size());
        for (std::size_t j = 0; j < g.z.size(); ++j) s[j] = std::imag(g.z[j]);
    }
    return s;
}

/// chi-bar of the subgroup remainder of s(x)^{-1} s(y); the closed form is
/// validated against the group operations in the test suite.
inline Complex reproducing_phase(SubgroupKind kind, std::span<const double> x, std::span<const double> y) {
    if (kind == SubgroupKind::RealHyperplane) return Complex(1.0, 0.0);
    double im = 0.0;  // Im <x, y> over C^n with interleaved coordinates
    for (std::size_t j = 0; j + 1 < x.size(); j += 2)
        im += x[j] * y[j + 1] - x[j + 1] * y[j];
    return std::polar(1.0, im);
}

}  // namespace detail

/// X nodes whose analysing action stays within the trusted half-box of the
/// domain grid. Periodization contaminates the rest; they are flagged, not
/// fatal.
inline std::vector<std::uint8_t> trusted_mask(const AdmissibleTuple& tuple, const Grid& xg) {
    std::vector<std::uint8_t> mask(xg.size(), 1);
    if (tuple.rep.kind == SubgroupKind::RealHyperplane) return mask;  // pure modulations
    std::vector<double> pt(xg.dim);
    const double bound = tuple.rep.domain.L / (2.0 * sqrt2);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        xg.node(i, pt);
        for (int j = 0; j < xg.dim; j += 2)
            if (std::abs(pt[j]) > bound) mask[i] = 0;
    }
    return mask;
}

inline std::vector<std::uint8_t> trusted_mask(const AdmissibleTuple& tuple) {
    return trusted_mask(tuple, tuple.rep.x);
}

/// Reduced wavelet transform W: v |-> <pi(s(x)^{-1}) v, l0> on the nodes of xg.
inline WaveletField wavelet_transform_on(const AdmissibleTuple& tuple, const GridFunction& v, const Grid& xg) {
    require(v.grid == tuple.rep.domain, "wavelet_transform: v not on the representation grid");
    WaveletField out(xg);
    const std::size_t dn = tuple.rep.domain.size();
    const double w = tuple.rep.domain.weight();
    if (tuple.rep.analysis_state_into) {
        parallel_for_chunks(xg.size(), 64, [&](std::size_t, std::size_t b, std::size_t e) {
            std::vector<double> pt(xg.dim);
            std::vector<Complex> kernel(dn), prod(dn);
            for (std::size_t i = b; i < e; ++i) {
                xg.node(i, pt);
                tuple.rep.analysis_state_into(pt, tuple.rep.domain, kernel);
                for (std::size_t k = 0; k < dn; ++k) prod[k] = v.values[k] * kernel[k];
                out.values[i] = pairwise_sum(std::span<const Complex>(prod)) * w;
            }
        });
        return out;
    }
    parallel_for_chunks(xg.size(), 16, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const GroupElement s_inv = inverse(section(detail::x_point(xg, i), tuple.rep.kind));
            out.values[i] = pair(tuple.rep.act(s_inv, v), tuple.l0).value;
        }
    });
    return out;
}

inline WaveletField wavelet_transform(const AdmissibleTuple& tuple, const GridFunction& v) {
    return wavelet_transform_on(tuple, v, tuple.rep.x);
}

/// Oracle path that ignores the closed-form kernels and drives the
/// representation action directly.
inline WaveletField wavelet_transform_generic(const AdmissibleTuple& tuple, const GridFunction& v) {
    AdmissibleTuple t = tuple;
    t.rep.analysis_state_into = nullptr;
    return wavelet_transform_on(t, v, tuple.rep.x);
}

/// Inverse wavelet transform M: f |-> integral of f(x) pi(s(x)) b0 over X
/// with the calibrated measure.
inline GridFunction inverse_transform(const AdmissibleTuple& tuple, const WaveletField& f) {
    require(f.grid == tuple.rep.x, "inverse_transform: field not on the X grid");
    const Grid& dom = tuple.rep.domain;
    const Grid& xg = tuple.rep.x;
    const std::size_t dn = dom.size();
    const double w = xg.weight() * tuple.measure_scale;
    const std::size_t chunk = 64;
    const std::size_t nchunks = (xg.size() + chunk - 1) / chunk;
    std::vector<std::vector<Complex>> partial(nchunks);
    parallel_for_chunks(xg.size(), chunk, [&](std::size_t c, std::size_t b, std::size_t e) {
        std::vector<double> pt(xg.dim);
        std::vector<Complex> state(dn);
        std::vector<Complex> acc(dn, Complex{});
        for (std::size_t i = b; i < e; ++i) {
            const Complex fx = f.values[i] * w;
            if (fx == Complex{}) continue;
            if (tuple.rep.coherent_state_into) {
                xg.node(i, pt);
                tuple.rep.coherent_state_into(pt, dom, state);
            } else {
                const GridFunction bx =
                    tuple.rep.act(section(detail::x_point(xg, i), tuple.rep.kind), tuple.b0);
                std::copy(bx.values.begin(), bx.values.end(), state.begin());
            }
            for (std::size_t k = 0; k < dn; ++k) acc[k] += fx * state[k];
        }
        partial[c] = std::move(acc);
    });
    GridFunction out(dom);
    for (const auto& acc : partial) {
        if (acc.empty()) continue;
        for (std::size_t k = 0; k < dn; ++k) out.values[k] += acc[k];
    }
    return out;
}

/// P = M W; the identity on irreducible realizations, a projection in general.
inline GridFunction projection(const AdmissibleTuple& tuple, const GridFunction& v) {
    return inverse_transform(tuple, wavelet_transform(tuple, v));
}

/// lambda(g) f (x) = chi-bar(r(g^{-1} x)) f(g^{-1} x): the X-side
/// representation intertwined with pi by W and M. The geometric part is an
/// exact Euclidean shift supplied by the group operations; the field is
/// interpolated by phase ramps.
inline WaveletField lambda_act(const AdmissibleTuple& tuple, const GroupElement& g, const WaveletField& f) {
    require(f.grid == tuple.rep.x, "lambda_act: field not on the X grid");
    const Grid& xg = tuple.rep.x;
    const std::vector<double> shift = detail::action_shift(g, tuple.rep.kind);
    for (double s : shift)
        if (std::abs(s) > xg.L / 2.0)
            throw std::domain_error("lambda_act: shift exceeds trusted half-box of the X grid");
    WaveletField out = shift_periodic(f, shift);
    parallel_for_chunks(xg.size(), 2048, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const auto [xp, h] = act(g, detail::x_point(xg, i), tuple.rep.kind);
            out.values[i] *= std::conj(character(h, tuple.rep.kind));
        }
    });
    return out;
}

/// Admissibility constant c = integral over X (Lebesgue weights) of
/// <pi(x^{-1}) b0, l0> <pi(x) b0, l0>. Must be finite and away from zero.
inline Complex admissibility_constant(const AdmissibleTuple& candidate) {
    const Grid& xg = candidate.rep.x;
    WaveletField analysis = wavelet_transform_on(candidate, candidate.b0, xg);
    WaveletField synthesis(xg);
    const Grid& dom = candidate.rep.domain;
    const double wdom = dom.weight();
    parallel_for_chunks(xg.size(), 64, [&](std::size_t, std::size_t b, std::size_t e) {
        std::vector<double> pt(xg.dim);
        std::vector<Complex> state(dom.size()), prod(dom.size());
        for (std::size_t i = b; i < e; ++i) {
            xg.node(i, pt);
            candidate.rep.coherent_state_into(pt, dom, state);
            for (std::size_t k = 0; k < state.size(); ++k) prod[k] = state[k] * candidate.l0.values[k];
            synthesis.values[i] = pairwise_sum(std::span<const Complex>(prod)) * wdom;
        }
    });
    GridFunction integrand(xg);
    for (std::size_t i = 0; i < integrand.values.size(); ++i)
        integrand.values[i] = analysis.values[i] * synthesis.values[i];
    if (boundary_mass(integrand) > 1e-6)
        throw std::domain_error("admissibility_constant: integrand boundary mass above 1e-6, X box too small");
    std::vector<Complex> terms = integrand.values;
    const Complex c = pairwise_sum(std::span<const Complex>(terms)) * xg.weight();
    if (std::abs(c) < 1e-10) throw std::domain_error("admissibility_constant: tuple is not admissible (|c| too small)");
    return c;
}

/// Calibrates the X measure so that the admissibility identity returns
/// c0 = <b0,l0> exactly: measure_scale = c0 / c.
inline AdmissibleTuple calibrate(AdmissibleTuple candidate) {
    const Complex c = admissibility_constant(candidate);
    const Complex scale = candidate.c0 / c;
    require(std::abs(scale.imag()) <= 1e-8 * std::abs(scale), "calibrate: measure scale is not real");
    candidate.measure_scale *= scale.real();
    return candidate;
}

/// Relative residual of the bilinear identity
/// integral <pi(x^{-1}) v, l0> <pi(x) b0, l> dmu(x) = <v, l>.
inline double isometry_identity_residual(const AdmissibleTuple& tuple, const GridFunction& v,
                                         const GridFunction& l) {
    const Grid& xg = tuple.rep.x;
    const WaveletField vf = wavelet_transform(tuple, v);
    const Grid& dom = tuple.rep.domain;
    const double wdom = dom.weight();
    std::vector<Complex> terms(xg.size());
    parallel_for_chunks(xg.size(), 64, [&](std::size_t, std::size_t b, std::size_t e) {
        std::vector<double> pt(xg.dim);
        std::vector<Complex> state(dom.size()), prod(dom.size());
        for (std::size_t i = b; i < e; ++i) {
            xg.node(i, pt);
            tuple.rep.coherent_state_into(pt, dom, state);
            for (std::size_t k = 0; k < state.size(); ++k) prod[k] = state[k] * l.values[k];
            terms[i] = vf.values[i] * pairwise_sum(std::span<const Complex>(prod)) * wdom;
        }
    });
    const Complex lhs = pairwise_sum(std::span<const Complex>(terms)) * xg.weight() * tuple.measure_scale;
    const Complex rhs = pair(v, l).value;
    return rel_or_abs(std::abs(lhs - rhs), std::abs(rhs));
}

/// Sup-norm residual of the reproducing identity
/// f(y) = integral f(x) b0hat(x^{-1} y) dmu(x) over interior X nodes
/// (innermost 50% of each axis). f must be a transform W v.
inline double reproducing_residual(const AdmissibleTuple& tuple, const WaveletField& f) {
    const Grid& xg = tuple.rep.x;
    require(f.grid == xg, "reproducing_residual: field not on the X grid");
    const Grid xg2(xg.dim, 2.0 * xg.L, 2 * xg.N);
    const WaveletField b0hat = wavelet_transform_on(tuple, tuple.b0, xg2);

    std::vector<std::size_t> interior;
    std::vector<int> idx(xg.dim);
    for (std::size_t i = 0; i < xg.size(); ++i) {
        xg.unflatten(i, idx);
        bool inner = true;
        for (int a = 0; a < xg.dim; ++a)
            if (idx[a] < xg.N / 4 || idx[a] >= 3 * xg.N / 4) inner = false;
        if (inner) interior.push_back(i);
    }

    const double w = xg.weight() * tuple.measure_scale;
    std::vector<double> resid(interior.size(), 0.0);
    double fsup = 0.0;
    for (std::size_t i : interior) fsup = std::max(fsup, std::abs(f.values[i]));
    parallel_for_chunks(interior.size(), 8, [&](std::size_t, std::size_t b, std::size_t e) {
        std::vector<int> yidx(xg.dim), xidx(xg.dim);
        std::vector<double> ypt(xg.dim), xpt(xg.dim);
        std::vector<Complex> terms(xg.size());
        for (std::size_t q = b; q < e; ++q) {
            const std::size_t yi = interior[q];
            xg.unflatten(yi, yidx);
            xg.node(yi, ypt);
            for (std::size_t xi = 0; xi < xg.size(); ++xi) {
                xg.unflatten(xi, xidx);
                std::size_t flat2 = 0;
                for (int a = 0; a < xg.dim; ++a)
                    flat2 = flat2 * (2 * xg.N) + static_cast<std::size_t>(yidx[a] - xidx[a] + xg.N);
                xg.node(xi, xpt);
                terms[xi] = f.values[xi] * b0hat.values[flat2] *
                            detail::reproducing_phase(tuple.rep.kind, xpt, ypt);
            }
            const Complex rec = pairwise_sum(std::span<const Complex>(terms)) * w;
            resid[q] = std::abs(rec - f.values[yi]);
        }
    });
    double sup = 0.0;
    for (double r : resid) sup = std::max(sup, r);
    return rel_or_abs(sup, fsup);
}

/// Probe-vector admissibility residual for singular vacua:
/// | <M W p0, l0> - <p0, l0> | / |<p0, l0>|.
inline double probe_residual(const AdmissibleTuple& tuple, const GridFunction& p0) {
    require_decaying(p0, "probe_residual: probe vector must decay (lie in B)");
    const Complex rhs = pair(p0, tuple.l0).value;
    if (std::abs(rhs) < 1e-12) throw std::domain_error("probe_residual: <p0,l0> vanishes");
    const Complex lhs = pair(projection(tuple, p0), tuple.l0).value;
    return std::abs(lhs - rhs) / std::abs(rhs);
}

/// Residuals of the defining invariants of an admissible tuple, evaluated on
/// sampled subgroup elements.
struct TupleDiagnostics {
    double b0_norm_defect = 0.0;
    double l0_norm_defect = 0.0;
    double vacuum_equivariance = 0.0;
    double functional_equivariance = 0.0;
    double isometry_defect = 0.0;
};

inline TupleDiagnostics validate_tuple(const AdmissibleTuple& tuple,
                                       const std::vector<GroupElement>& subgroup_samples,
                                       const GridFunction& packet) {
    TupleDiagnostics d;
    if (!tuple.singular_vacuum) {
        d.b0_norm_defect = std::abs(l2_norm(tuple.b0) - 1.0);
        d.l0_norm_defect = std::abs(l2_norm(tuple.l0) - 1.0);
    }
    require(std::abs(tuple.c0) > 1e-10, "validate_tuple: <b0,l0> vanishes");
    const double pnorm = l2_norm(packet);
    for (const GroupElement& h : subgroup_samples) {
        const Complex chi = character(h, tuple.rep.kind);
        d.vacuum_equivariance =
            std::max(d.vacuum_equivariance, l2_norm(tuple.rep.act(h, tuple.b0) - chi * tuple.b0));
        d.functional_equivariance = std::max(
            d.functional_equivariance, l2_norm(tuple.rep.adjoint_act(h, tuple.l0) - std::conj(chi) * tuple.l0));
        d.isometry_defect =
            std::max(d.isometry_defect, std::abs(l2_norm(tuple.rep.act(h, packet)) - pnorm) / pnorm);
    }
    return d;
}

}  // namespace banwave
