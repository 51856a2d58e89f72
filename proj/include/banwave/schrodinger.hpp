#pragma once

#include <cmath>
#include <vector>

#include "banwave/common.hpp"
#include "banwave/grid.hpp"
#include "banwave/heisenberg.hpp"

namespace banwave {

/// Dense unitary DFT along one axis (N is small at desk scale, so an O(N^2)
/// transform with a precomputed twiddle table is plenty).
class AxisDft {
  public:
    explicit AxisDft(int N) : N_(N), tw_(N) {
        for (int m = 0; m < N; ++m) tw_[m] = std::polar(1.0, -2.0 * pi * m / N);
    }

    void forward(std::span<const Complex> in, std::span<Complex> out) const { run(in, out, false); }
    void inverse(std::span<const Complex> in, std::span<Complex> out) const { run(in, out, true); }

    /// Signed integer frequency of bin k: k for k < N/2, k - N otherwise.
    int signed_freq(int k) const { return k < N_ / 2 ? k : k - N_; }

  private:
    void run(std::span<const Complex> in, std::span<Complex> out, bool inv) const {
        for (int k = 0; k < N_; ++k) {
            Complex acc{};
            std::size_t m = 0;
            for (int j = 0; j < N_; ++j) {
                acc += in[j] * (inv ? std::conj(tw_[m]) : tw_[m]);
                m += k;
                if (m >= static_cast<std::size_t>(N_)) m -= N_;
            }
            out[k] = acc / std::sqrt(double(N_));
        }
    }

    int N_;
    std::vector<Complex> tw_;
};

namespace detail {

template <typename LineOp>
void for_each_axis_line(const Grid& g, int axis, std::vector<Complex>& data, LineOp&& op) {
    std::size_t stride = 1;
    for (int a = g.dim - 1; a > axis; --a) stride *= g.N;
    const std::size_t block = stride * g.N;
    const std::size_t nblocks = data.size() / block;
    std::vector<Complex> line(g.N), out(g.N);
    for (std::size_t b = 0; b < nblocks; ++b) {
        for (std::size_t s = 0; s < stride; ++s) {
            const std::size_t base = b * block + s;
            for (int k = 0; k < g.N; ++k) line[k] = data[base + k * stride];
            op(line, out);
            for (int k = 0; k < g.N; ++k) data[base + k * stride] = out[k];
        }
    }
}

}  // namespace detail

/// Translate f by s per axis (result(y) = f(y - s)) using frequency-domain
/// phase ramps on the periodized grid. Exact for band-limited periodic data;
/// integer multiples of h reduce to array rotation.
inline GridFunction shift_periodic(const GridFunction& f, std::span<const double> s) {
    const Grid& g = f.grid;
    require(static_cast<int>(s.size()) == g.dim, "shift_periodic: shift dim mismatch");
    GridFunction out = f;
    AxisDft dft(g.N);
    for (int axis = 0; axis < g.dim; ++axis) {
        detail::for_each_axis_line(g, axis, out.values,
                                   [&](std::span<const Complex> in, std::span<Complex> o) { dft.forward(in, o); });
        const double dxi = 2.0 * pi / (g.N * g.h());
        std::vector<Complex> ramp(g.N);
        for (int k = 0; k < g.N; ++k) ramp[k] = std::polar(1.0, -dft.signed_freq(k) * dxi * s[axis]);
        std::size_t stride = 1;
        for (int a = g.dim - 1; a > axis; --a) stride *= g.N;
        for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= ramp[(i / stride) % g.N];
        detail::for_each_axis_line(g, axis, out.values,
                                   [&](std::span<const Complex> in, std::span<Complex> o) { dft.inverse(in, o); });
    }
    return out;
}

/// Schroedinger representation of H^n on grid functions over R^n:
/// [pi(t,z) f](y) = e^{i(2t - sqrt2 v.y + u.v)} f(y - sqrt2 u),  z = u + iv.
/// Isometric in every L^p. The periodic variant lets the phase-ramp shift
/// wrap around the box (used by the transform engine on flagged outer X
/// nodes); the checked variant rejects shifts outside the trusted half-box.
inline GridFunction schrodinger_act_periodic(const GroupElement& g, const GridFunction& f) {
    const Grid& grid = f.grid;
    require(g.n() == grid.dim, "schrodinger_act: group/grid dimension mismatch");
    std::vector<double> s(grid.dim), u(grid.dim), v(grid.dim);
    double uv = 0.0;
    for (int j = 0; j < grid.dim; ++j) {
        u[j] = std::real(g.z[j]);
        v[j] = std::imag(g.z[j]);
        s[j] = sqrt2 * u[j];
        uv += u[j] * v[j];
    }
    GridFunction out = shift_periodic(f, s);
    parallel_for_chunks(out.values.size(), 8192, [&](std::size_t, std::size_t b, std::size_t e) {
        std::vector<double> pt(grid.dim);
        for (std::size_t i = b; i < e; ++i) {
            grid.node(i, pt);
            double phase = 2.0 * g.t + uv;
            for (int j = 0; j < grid.dim; ++j) phase -= sqrt2 * v[j] * pt[j];
            out.values[i] *= std::polar(1.0, phase);
        }
    });
    return out;
}

inline GridFunction schrodinger_act(const GroupElement& g, const GridFunction& f) {
    for (const Complex& zj : g.z)
        if (std::abs(sqrt2 * std::real(zj)) > f.grid.L / 2.0)
            throw std::domain_error("schrodinger_act: shift sqrt2|u| exceeds trusted half-box L/2");
    return schrodinger_act_periodic(g, f);
}

/// Adjoint representation on the dual side of the bilinear pairing:
/// pi*(g) = transpose(pi(g^{-1})), realized as pi(-t, conj z). It satisfies
/// pair(pi(g) v, l) = pair(v, pi*(g^{-1}) l) and pi*(h) l0 = conj(chi(h)) l0
/// for subgroup vacua.
inline GridFunction adjoint_schrodinger_act(const GroupElement& g, const GridFunction& l) {
    GroupElement a;
    a.t = -g.t;
    a.z.resize(g.z.size());
    for (std::size_t j = 0; j < g.z.size(); ++j) a.z[j] = std::conj(g.z[j]);
    return schrodinger_act(a, l);
}

}  // namespace banwave
