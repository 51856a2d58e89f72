#pragma once

#include <cmath>
#include <vector>

#include "banwave/common.hpp"
#include "banwave/grid.hpp"
#include "banwave/heisenberg.hpp"
#include "banwave/schrodinger.hpp"
#include "banwave/wavelet.hpp"

namespace banwave {

// ---------------------------------------------------------------------------
// Default desk-scale grid profiles.
// ---------------------------------------------------------------------------

inline Grid default_domain_grid(int n) {
    require(n >= 1 && n <= 2, "default_domain_grid: n must be 1 or 2");
    return n == 1 ? Grid(1, 8.0, 256) : Grid(2, 6.0, 96);
}

inline Grid default_fourier_x_grid(int n) { return default_domain_grid(n); }

inline Grid default_sb_x_grid(int n) {
    require(n >= 1 && n <= 2, "default_sb_x_grid: n must be 1 or 2");
    return n == 1 ? Grid(2, 6.0, 96) : Grid(4, 6.0, 32);
}

namespace detail {

/// Contracts tensor axis `axis` (length ext[axis]) against kernel rows:
/// out[..., r, ...] = sum_j K[r*in + j] in[..., j, ...]. Row-major extents.
inline std::vector<Complex> contract_axis(const std::vector<Complex>& data, std::vector<std::size_t>& ext,
                                          std::size_t axis, const std::vector<Complex>& K,
                                          std::size_t out_len) {
    const std::size_t in_len = ext[axis];
    std::size_t inner = 1;
    for (std::size_t a = axis + 1; a < ext.size(); ++a) inner *= ext[a];
    std::size_t outer = 1;
    for (std::size_t a = 0; a < axis; ++a) outer *= ext[a];
    std::vector<Complex> out(outer * out_len * inner, Complex{});
    parallel_for_chunks(outer * out_len, 16, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t q = b; q < e; ++q) {
            const std::size_t o = q / out_len, r = q % out_len;
            const Complex* krow = K.data() + r * in_len;
            Complex* dst = out.data() + (o * out_len + r) * inner;
            const Complex* src = data.data() + o * in_len * inner;
            for (std::size_t j = 0; j < in_len; ++j) {
                const Complex kj = krow[j];
                const Complex* s = src + j * inner;
                for (std::size_t i = 0; i < inner; ++i) dst[i] += kj * s[i];
            }
        }
    });
    ext[axis] = out_len;
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Fourier realization: subgroup {(t,u) : u real}, X = R^n, singular vacuum
// b0 = (2pi)^{-n/2} in the extended space of bounded grid functions, test
// functional l0 = (2pi)^{-n/2} integration. The reduced wavelet transform is
// f |-> (2pi)^{-n/2} int e^{i sqrt2 x.y} f(y) dy (opposite sign to the usual
// Fourier convention).
// ---------------------------------------------------------------------------

inline AdmissibleTuple make_fourier_tuple(int n, const Grid& domain, const Grid& xgrid) {
    require(domain.dim == n, "make_fourier_tuple: domain grid must have dim n");
    require(xgrid.dim == n, "make_fourier_tuple: X grid must have dim n");
    AdmissibleTuple t;
    t.rep.kind = SubgroupKind::RealHyperplane;
    t.rep.n = n;
    t.rep.domain = domain;
    t.rep.x = xgrid;
    t.rep.act = [](const GroupElement& g, const GridFunction& f) { return schrodinger_act_periodic(g, f); };
    t.rep.adjoint_act = [](const GroupElement& g, const GridFunction& f) {
        return adjoint_schrodinger_act(g, f);
    };
    const double norm = std::pow(2.0 * pi, -0.5 * n);
    t.rep.analysis_state_into = [norm](std::span<const double> x, const Grid& dom, std::span<Complex> out) {
        std::vector<double> y(dom.dim);
        for (std::size_t i = 0; i < out.size(); ++i) {
            dom.node(i, y);
            double phase = 0.0;
            for (int j = 0; j < dom.dim; ++j) phase += sqrt2 * x[j] * y[j];
            out[i] = std::polar(norm, phase);
        }
    };
    t.rep.coherent_state_into = [norm](std::span<const double> x, const Grid& dom, std::span<Complex> out) {
        std::vector<double> y(dom.dim);
        for (std::size_t i = 0; i < out.size(); ++i) {
            dom.node(i, y);
            double phase = 0.0;
            for (int j = 0; j < dom.dim; ++j) phase -= sqrt2 * x[j] * y[j];
            out[i] = std::polar(norm, phase);
        }
    };
    t.singular_vacuum = true;
    t.b0 = sample([norm](std::span<const double>) { return Complex(norm, 0.0); }, domain);
    t.l0 = t.b0;
    t.probe = sample(
        [](std::span<const double> y) {
            double q = 0.0;
            for (double c : y) q += c * c;
            return Complex(std::exp(-0.5 * q), 0.0);
        },
        domain);
    t.c0 = pair(t.probe, t.l0).value;  // probe pairing replaces <b0,l0> in the singular case

    // Calibrate the X measure through the probe identity <M W p0, l0> = <p0, l0>.
    t.measure_scale = 1.0;
    const Complex lhs = pair(projection(t, t.probe), t.l0).value;
    const Complex scale = t.c0 / lhs;
    require(std::abs(scale.imag()) < 1e-8 * std::abs(scale), "make_fourier_tuple: measure scale not real");
    t.measure_scale = scale.real();
    return t;
}

inline AdmissibleTuple make_fourier_tuple(int n = 1) {
    return make_fourier_tuple(n, default_domain_grid(n), default_fourier_x_grid(n));
}

/// Fast path: tensorized scaled discrete Fourier transform onto the X grid.
inline WaveletField fourier_wavelet(const AdmissibleTuple& t, const GridFunction& v) {
    require(v.grid == t.rep.domain, "fourier_wavelet: wrong domain grid");
    require_decaying(v, "fourier_wavelet");
    const Grid& dom = t.rep.domain;
    const Grid& xg = t.rep.x;
    const double amp = std::pow(2.0 * pi, -0.5) * dom.h();
    std::vector<Complex> K(static_cast<std::size_t>(xg.N) * dom.N);
    for (int r = 0; r < xg.N; ++r)
        for (int j = 0; j < dom.N; ++j)
            K[static_cast<std::size_t>(r) * dom.N + j] =
                std::polar(amp, sqrt2 * xg.axis_node(r) * dom.axis_node(j));
    std::vector<Complex> data = v.values;
    std::vector<std::size_t> ext(dom.dim, static_cast<std::size_t>(dom.N));
    for (int a = 0; a < dom.dim; ++a) data = detail::contract_axis(data, ext, a, K, xg.N);
    return WaveletField(xg, std::move(data));
}

/// Slow oracle path: flat per-node quadrature of the same integral.
inline WaveletField fourier_wavelet_direct(const AdmissibleTuple& t, const GridFunction& v) {
    return wavelet_transform(t, v);
}

/// Inverse transform f(y) = (2pi)^{-n/2} int fhat(x) e^{-i sqrt2 x.y} dmu(x)
/// with the calibrated measure; a left and right inverse of fourier_wavelet.
inline GridFunction fourier_inverse(const AdmissibleTuple& t, const WaveletField& f) {
    require(f.grid == t.rep.x, "fourier_inverse: wrong X grid");
    const Grid& dom = t.rep.domain;
    const Grid& xg = t.rep.x;
    const double amp = std::pow(2.0 * pi, -0.5) * xg.h() * std::pow(t.measure_scale, 1.0 / dom.dim);
    std::vector<Complex> K(static_cast<std::size_t>(dom.N) * xg.N);
    for (int r = 0; r < dom.N; ++r)
        for (int j = 0; j < xg.N; ++j)
            K[static_cast<std::size_t>(r) * xg.N + j] =
                std::polar(amp, -sqrt2 * dom.axis_node(r) * xg.axis_node(j));
    std::vector<Complex> data = f.values;
    std::vector<std::size_t> ext(xg.dim, static_cast<std::size_t>(xg.N));
    for (int a = 0; a < xg.dim; ++a) data = detail::contract_axis(data, ext, a, K, dom.N);
    return GridFunction(dom, std::move(data));
}

/// Scaled Fourier transform evaluated at scattered frequency points
/// (row-major point list, n coordinates per point).
inline std::vector<Complex> fourier_wavelet_at(const GridFunction& v, std::span<const double> points) {
    const Grid& dom = v.grid;
    const std::size_t npts = points.size() / dom.dim;
    std::vector<Complex> out(npts);
    const double amp = std::pow(2.0 * pi, -0.5 * dom.dim) * dom.weight();
    parallel_for_chunks(npts, 32, [&](std::size_t, std::size_t b, std::size_t e) {
        std::vector<double> y(dom.dim);
        std::vector<Complex> terms(dom.size());
        for (std::size_t p = b; p < e; ++p) {
            const double* x = points.data() + p * dom.dim;
            for (std::size_t i = 0; i < dom.size(); ++i) {
                dom.node(i, y);
                double phase = 0.0;
                for (int j = 0; j < dom.dim; ++j) phase += sqrt2 * x[j] * y[j];
                terms[i] = v.values[i] * std::polar(1.0, phase);
            }
            out[p] = pairwise_sum(std::span<const Complex>(terms)) * amp;
        }
    });
    return out;
}

/// Mollified Dirac-delta resolution: residuals of
/// (2pi)^{-n} int int e^{i xi (x - y0)} e^{-eps |xi|^2} test(x) dx dxi
/// against test(y0) for eps in {1e-1, 1e-2, 1e-3}. Must shrink monotonically.
struct DeltaResolutionReport {
    std::vector<double> residuals;
    bool monotone = false;
    bool y0_trusted = true;
};

/// y0 must lie on a grid node; the frequency integral per axis uses a
/// midpoint rule sized to the Gaussian cutoff. The double integral factorizes
/// over axes only through the per-axis xi sums computed below.
inline DeltaResolutionReport delta_resolution_check(const GridFunction& test, std::span<const double> y0) {
    const Grid& dom = test.grid;
    require(static_cast<int>(y0.size()) == dom.dim, "delta_resolution_check: y0 dim mismatch");
    require_decaying(test, "delta_resolution_check");
    DeltaResolutionReport rep;
    for (double c : y0)
        if (std::abs(c) > dom.L / 2.0) rep.y0_trusted = false;

    std::vector<int> idx(dom.dim);
    for (int a = 0; a < dom.dim; ++a) {
        const double k = (y0[a] + dom.L) / dom.h();
        idx[a] = static_cast<int>(std::lround(k));
        require(std::abs(k - idx[a]) < 1e-9 && idx[a] >= 0 && idx[a] < dom.N,
                "delta_resolution_check: y0 must be a grid node");
    }
    std::size_t flat = 0;
    for (int a = 0; a < dom.dim; ++a) flat = flat * dom.N + idx[a];
    const Complex at_y0 = test.values[flat];

    for (const double eps : {1e-1, 1e-2, 1e-3}) {
        const double xi_max = std::sqrt(36.0 / eps);
        const int M = 512;
        const double dxi = 2.0 * xi_max / M;
        // per-axis mollified kernel k_eps(s) = int e^{i xi s - eps xi^2} dxi / (2 pi),
        // tabulated at every lattice difference s = (j - idx) h
        std::vector<Complex> kernel1d(2 * static_cast<std::size_t>(dom.N) - 1);
        for (int off = -(dom.N - 1); off <= dom.N - 1; ++off) {
            Complex acc{};
            const double s = off * dom.h();
            for (int k = 0; k < M; ++k) {
                const double xi = -xi_max + (k + 0.5) * dxi;
                acc += std::polar(std::exp(-eps * xi * xi), xi * s);
            }
            kernel1d[off + dom.N - 1] = acc * dxi / (2.0 * pi);
        }
        Complex total{};
        for (std::size_t i = 0; i < dom.size(); ++i) {
            Complex k = 1.0;
            std::size_t rem = i;
            for (int a = dom.dim - 1; a >= 0; --a) {
                const int ja = static_cast<int>(rem % dom.N);
                rem /= dom.N;
                k *= kernel1d[ja - idx[a] + dom.N - 1];
            }
            total += test.values[i] * k;
        }
        total *= dom.weight();
        rep.residuals.push_back(std::abs(total - at_y0));
    }
    rep.monotone = rep.residuals[0] > rep.residuals[1] && rep.residuals[1] > rep.residuals[2];
    return rep;
}

// ---------------------------------------------------------------------------
// Segal-Bargmann realization: subgroup = center {(t,0)}, X = C^n, Gaussian
// vacuum b0 = l0 = pi^{-n/4} e^{-y^2/2}. Coherent states and analysing
// functionals in closed form:
//   pi(s(z)) b0 (y)  = pi^{-n/4} e^{-(y - sqrt2 u)^2/2} e^{i(u.v - sqrt2 v.y)}
//   pi*(s(z)) l0 (y) = pi^{-n/4} e^{-(y - sqrt2 u)^2/2} e^{i(sqrt2 v.y - u.v)}
// with z = u + iv. The transform of the vacuum is e^{-|z|^2/2} and the
// calibrated measure is du dv / pi^n.
// ---------------------------------------------------------------------------

namespace detail {

inline void sb_state_into(std::span<const double> x, const Grid& dom, std::span<Complex> out, double sign) {
    const int n = dom.dim;
    const double norm = std::pow(pi, -0.25 * n);
    double uv = 0.0;
    for (int j = 0; j < n; ++j) uv += x[2 * j] * x[2 * j + 1];
    std::vector<double> y(n);
    for (std::size_t i = 0; i < out.size(); ++i) {
        dom.node(i, y);
        double q = 0.0, ph = -sign * uv;
        for (int j = 0; j < n; ++j) {
            const double dy = y[j] - sqrt2 * x[2 * j];
            q += dy * dy;
            ph += sign * sqrt2 * x[2 * j + 1] * y[j];
        }
        out[i] = std::polar(norm * std::exp(-0.5 * q), ph);
    }
}

}  // namespace detail

inline AdmissibleTuple make_segal_bargmann_tuple(int n, const Grid& domain, const Grid& xgrid) {
    require(domain.dim == n, "make_segal_bargmann_tuple: domain grid must have dim n");
    require(xgrid.dim == 2 * n, "make_segal_bargmann_tuple: X grid must have dim 2n");
    AdmissibleTuple t;
    t.rep.kind = SubgroupKind::Center;
    t.rep.n = n;
    t.rep.domain = domain;
    t.rep.x = xgrid;
    t.rep.act = [](const GroupElement& g, const GridFunction& f) { return schrodinger_act_periodic(g, f); };
    t.rep.adjoint_act = [](const GroupElement& g, const GridFunction& f) {
        return adjoint_schrodinger_act(g, f);
    };
    t.rep.coherent_state_into = [](std::span<const double> x, const Grid& dom, std::span<Complex> out) {
        detail::sb_state_into(x, dom, out, -1.0);
    };
    t.rep.analysis_state_into = [](std::span<const double> x, const Grid& dom, std::span<Complex> out) {
        detail::sb_state_into(x, dom, out, +1.0);
    };
    t.b0 = sample(
        [n](std::span<const double> y) {
            double q = 0.0;
            for (double c : y) q += c * c;
            return Complex(std::pow(pi, -0.25 * n) * std::exp(-0.5 * q), 0.0);
        },
        domain);
    t.l0 = t.b0;
    t.c0 = pair(t.b0, t.l0).value;
    return calibrate(t);
}

inline AdmissibleTuple make_segal_bargmann_tuple(int n = 1) {
    return make_segal_bargmann_tuple(n, default_domain_grid(n), default_sb_x_grid(n));
}

/// Fast path: tensorized Segal-Bargmann transform onto the C^n grid. One
/// complex axis of X (a u,v pair) is contracted against one domain axis.
inline WaveletField sb_transform(const AdmissibleTuple& t, const GridFunction& v) {
    require(v.grid == t.rep.domain, "sb_transform: wrong domain grid");
    require_decaying(v, "sb_transform");
    const Grid& dom = t.rep.domain;
    const Grid& xg = t.rep.x;
    const int n = dom.dim;
    const std::size_t M = static_cast<std::size_t>(xg.N) * xg.N;  // nodes of one complex axis
    const double amp = std::pow(pi, -0.25) * dom.h();
    std::vector<Complex> K(M * dom.N);
    for (int iu = 0; iu < xg.N; ++iu) {
        const double u = xg.axis_node(iu);
        for (int iv = 0; iv < xg.N; ++iv) {
            const double vv = xg.axis_node(iv);
            const std::size_t row = static_cast<std::size_t>(iu) * xg.N + iv;
            for (int j = 0; j < dom.N; ++j) {
                const double y = dom.axis_node(j);
                const double dy = y - sqrt2 * u;
                K[row * dom.N + j] = std::polar(amp * std::exp(-0.5 * dy * dy), sqrt2 * vv * y - u * vv);
            }
        }
    }
    std::vector<Complex> data = v.values;
    std::vector<std::size_t> ext(n, static_cast<std::size_t>(dom.N));
    for (int a = 0; a < n; ++a) data = detail::contract_axis(data, ext, a, K, M);
    return WaveletField(xg, std::move(data));
}

/// Inverse: f(y) = int fhat(z) pi(s(z)) b0 (y) dmu(z) with dmu = du dv / pi^n.
inline GridFunction sb_inverse(const AdmissibleTuple& t, const WaveletField& f) {
    require(f.grid == t.rep.x, "sb_inverse: wrong X grid");
    const Grid& dom = t.rep.domain;
    const Grid& xg = t.rep.x;
    const int n = dom.dim;
    const std::size_t M = static_cast<std::size_t>(xg.N) * xg.N;
    const double amp =
        std::pow(pi, -0.25) * xg.h() * xg.h() * std::pow(t.measure_scale, 1.0 / n);
    std::vector<Complex> K(static_cast<std::size_t>(dom.N) * M);
    for (int r = 0; r < dom.N; ++r) {
        const double y = dom.axis_node(r);
        for (int iu = 0; iu < xg.N; ++iu) {
            const double u = xg.axis_node(iu);
            const double dy = y - sqrt2 * u;
            for (int iv = 0; iv < xg.N; ++iv) {
                const double vv = xg.axis_node(iv);
                K[static_cast<std::size_t>(r) * M + static_cast<std::size_t>(iu) * xg.N + iv] =
                    std::polar(amp * std::exp(-0.5 * dy * dy), u * vv - sqrt2 * vv * y);
            }
        }
    }
    std::vector<Complex> data = f.values;
    std::vector<std::size_t> ext(n, M);
    for (int a = 0; a < n; ++a) data = detail::contract_axis(data, ext, a, K, dom.N);
    return GridFunction(dom, std::move(data));
}

/// Reproducing kernel of the transform image:
/// K(z,w) = exp( (-|z|^2 - |w|^2)/2 + w . conj z ).
inline Complex sb_kernel(std::span<const Complex> z, std::span<const Complex> w) {
    require(z.size() == w.size(), "sb_kernel: dimension mismatch");
    Complex expo{};
    for (std::size_t j = 0; j < z.size(); ++j)
        expo += w[j] * std::conj(z[j]) - 0.5 * (std::norm(z[j]) + std::norm(w[j]));
    return std::exp(expo);
}

/// Orthoprojection of a field on C^1 onto the transform image, computed by a
/// Fock-mode expansion of the kernel integral (exact up to mode `modes`,
/// whose tail is below 1e-9 on the default box).
inline WaveletField sb_project(const AdmissibleTuple& t, const WaveletField& f, int modes = 160) {
    require(t.rep.n == 1, "sb_project: implemented for the C^1 profile");
    require(f.grid == t.rep.x, "sb_project: wrong X grid");
    require_decaying(f, "sb_project");
    const Grid& xg = t.rep.x;
    const double w = xg.weight() * t.measure_scale;

    // phi_k(z) = e^{-|z|^2/2} z^k / sqrt(k!), accumulated per node with a
    // running power to avoid factorial overflow
    std::vector<Complex> coef(modes, Complex{});
    std::vector<double> upt(xg.dim);
    std::vector<Complex> phi(modes);
    for (std::size_t i = 0; i < xg.size(); ++i) {
        xg.node(i, upt);
        const Complex z(upt[0], upt[1]);
        Complex p = std::exp(-0.5 * std::norm(z));
        for (int k = 0; k < modes; ++k) {
            phi[k] = p;
            p *= z / std::sqrt(double(k + 1));
        }
        const Complex fw = f.values[i] * w;
        for (int k = 0; k < modes; ++k) coef[k] += fw * std::conj(phi[k]);
    }
    WaveletField out(xg);
    for (std::size_t i = 0; i < xg.size(); ++i) {
        xg.node(i, upt);
        const Complex z(upt[0], upt[1]);
        Complex p = std::exp(-0.5 * std::norm(z));
        Complex acc{};
        for (int k = 0; k < modes; ++k) {
            acc += coef[k] * p;
            p *= z / std::sqrt(double(k + 1));
        }
        out.values[i] = acc;
    }
    return out;
}

/// Direct kernel-integral evaluation of the projection at one X node
/// (quadratic cost; used as the oracle for sb_project).
inline Complex sb_project_at(const AdmissibleTuple& t, const WaveletField& f, std::span<const double> wpt) {
    const Grid& xg = t.rep.x;
    const Complex wz(wpt[0], wpt[1]);
    std::vector<Complex> terms(xg.size());
    std::vector<double> upt(xg.dim);
    for (std::size_t i = 0; i < xg.size(); ++i) {
        xg.node(i, upt);
        const Complex z(upt[0], upt[1]);
        terms[i] = f.values[i] * sb_kernel(std::span<const Complex>(&z, 1), std::span<const Complex>(&wz, 1));
    }
    return pairwise_sum(std::span<const Complex>(terms)) * xg.weight() * t.measure_scale;
}

/// Discrete Cauchy-Riemann defect of a transform image: sup over interior
/// nodes of |(d/dconj z + z/2) f| computed with centered differences. Small
/// values certify that e^{|z|^2/2} f(z) is analytic.
inline double sb_analyticity_defect(const AdmissibleTuple& t, const WaveletField& f) {
    const Grid& xg = t.rep.x;
    require(t.rep.n == 1 && f.grid == xg, "sb_analyticity_defect: C^1 field expected");
    const double h = xg.h();
    const auto at = [&](int a, int b) { return f.values[static_cast<std::size_t>(a) * xg.N + b]; };
    double sup = 0.0;
    for (int a = xg.N / 4; a < 3 * xg.N / 4; ++a) {
        for (int b = xg.N / 4; b < 3 * xg.N / 4; ++b) {
            const Complex du = (at(a + 1, b) - at(a - 1, b)) / (2.0 * h);
            const Complex dv = (at(a, b + 1) - at(a, b - 1)) / (2.0 * h);
            const Complex z(xg.axis_node(a), xg.axis_node(b));
            const Complex dbar = 0.5 * (du + iu * dv);
            sup = std::max(sup, std::abs(dbar + 0.5 * z * at(a, b)));
        }
    }
    return sup;
}

}  // namespace banwave
