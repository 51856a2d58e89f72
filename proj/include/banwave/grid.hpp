#pragma once

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "banwave/common.hpp"

namespace banwave {

/// Uniform tensor grid over [-L, L)^dim with N nodes per axis,
/// x_k = -L + k h, h = 2L/N. Node count N^dim is capped at 2^24.
struct Grid {
    int dim = 1;
    double L = 8.0;
    int N = 256;

    Grid() = default;
    Grid(int dim_, double L_, int N_) : dim(dim_), L(L_), N(N_) {
        require(dim >= 1 && dim <= 6, "Grid: dim out of range");
        require(L > 0.0, "Grid: L must be positive");
        require(N >= 8 && N % 2 == 0, "Grid: N must be even and >= 8");
        std::size_t total = 1;
        for (int a = 0; a < dim; ++a) {
            total *= static_cast<std::size_t>(N);
            require(total <= (std::size_t{1} << 24), "Grid: node count exceeds 2^24 budget");
        }
    }

    double h() const { return 2.0 * L / N; }
    std::size_t size() const {
        std::size_t total = 1;
        for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(N);
        return total;
    }
    double axis_node(int k) const { return -L + k * h(); }
    /// Quadrature weight of one node (periodic trapezoid rule).
    double weight() const { return std::pow(h(), dim); }

    /// Multi-index of a flat index; last axis fastest.
    void unflatten(std::size_t flat, std::span<int> idx) const {
        for (int a = dim - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(flat % N);
            flat /= N;
        }
    }
    void node(std::size_t flat, std::span<double> out) const {
        for (int a = dim - 1; a >= 0; --a) {
            out[a] = axis_node(static_cast<int>(flat % N));
            flat /= N;
        }
    }

    bool operator==(const Grid& o) const { return dim == o.dim && L == o.L && N == o.N; }
};

/// Complex samples of a function on a Grid. Values are stored flat,
/// last axis fastest.
struct GridFunction {
    Grid grid;
    std::vector<Complex> values;

    GridFunction() = default;
    explicit GridFunction(const Grid& g) : grid(g), values(g.size(), Complex{}) {}
    GridFunction(const Grid& g, std::vector<Complex> v) : grid(g), values(std::move(v)) {
        require(values.size() == grid.size(), "GridFunction: value count mismatch");
    }
};

/// Function on the homogeneous space X, realized on its quadrature grid.
using WaveletField = GridFunction;

inline bool all_finite(const GridFunction& f) {
    for (const Complex& v : f.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

/// Fraction of the L^1 mass carried by the outermost node layer.
inline double boundary_mass(const GridFunction& f) {
    const Grid& g = f.grid;
    double total = 0.0, edge = 0.0;
    std::vector<int> idx(g.dim);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double a = std::abs(f.values[i]);
        total += a;
        g.unflatten(i, idx);
        for (int ax = 0; ax < g.dim; ++ax) {
            if (idx[ax] == 0 || idx[ax] == g.N - 1) {
                edge += a;
                break;
            }
        }
    }
    return total > 0.0 ? edge / total : 0.0;
}

inline constexpr double decay_tol = 1e-8;

inline void require_decaying(const GridFunction& f, const char* what) {
    if (boundary_mass(f) > decay_tol)
        throw std::domain_error(std::string(what) + ": boundary mass above 1e-8, grid box too small");
}

/// Samples a pointwise expression at every node. Throws on non-finite values.
template <typename Fn>
GridFunction sample(Fn&& expr, const Grid& g) {
    GridFunction f(g);
    parallel_for_chunks(g.size(), 4096, [&](std::size_t, std::size_t b, std::size_t e) {
        std::vector<double> pt(g.dim);
        for (std::size_t i = b; i < e; ++i) {
            g.node(i, pt);
            f.values[i] = expr(std::span<const double>(pt));
        }
    });
    require(all_finite(f), "sample: expression produced a non-finite value");
    return f;
}

struct PairingResult {
    Complex value{};
    double quadrature_error_estimate = 0.0;
};

/// Bilinear duality pairing <v,l> = integral of v*l (no conjugation),
/// periodic trapezoid rule. The error estimate adds the boundary-layer mass
/// of the integrand to a roundoff floor.
inline PairingResult pair(const GridFunction& v, const GridFunction& l) {
    require(v.grid == l.grid, "pair: grid mismatch");
    const std::size_t n = v.values.size();
    const std::size_t chunk = 4096;
    const std::size_t nchunks = (n + chunk - 1) / chunk;
    std::vector<Complex> partial(nchunks, Complex{});
    std::vector<double> partial_abs(nchunks, 0.0);
    parallel_for_chunks(n, chunk, [&](std::size_t c, std::size_t b, std::size_t e) {
        std::vector<Complex> prod(e - b);
        for (std::size_t i = b; i < e; ++i) prod[i - b] = v.values[i] * l.values[i];
        partial[c] = pairwise_sum(prod);
        double a = 0.0;
        for (const Complex& p : prod) a += std::abs(p);
        partial_abs[c] = a;
    });
    const double w = v.grid.weight();
    const Complex total = pairwise_sum(partial) * w;
    double l1 = 0.0;
    for (double a : partial_abs) l1 += a;
    l1 *= w;

    GridFunction prod(v.grid);
    for (std::size_t i = 0; i < n; ++i) prod.values[i] = v.values[i] * l.values[i];
    const double est = boundary_mass(prod) * l1 + 16.0 * std::numeric_limits<double>::epsilon() * l1;
    return {total, est};
}

/// L^p norm by the same quadrature; p = infinity gives max |v|.
inline double lp_norm(const GridFunction& v, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (const Complex& x : v.values) m = std::max(m, std::abs(x));
        return m;
    }
    require(p >= 1.0, "lp_norm: p must be >= 1");
    std::vector<double> terms(v.values.size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::pow(std::abs(v.values[i]), p);
    const double s = pairwise_sum(std::span<const double>(terms)) * v.grid.weight();
    return std::pow(s, 1.0 / p);
}

inline double l2_norm(const GridFunction& v) { return lp_norm(v, 2.0); }

inline GridFunction operator*(Complex a, const GridFunction& v) {
    GridFunction out = v;
    for (Complex& x : out.values) x *= a;
    return out;
}

inline GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    require(a.grid == b.grid, "GridFunction+: grid mismatch");
    GridFunction out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
    return out;
}

inline GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    require(a.grid == b.grid, "GridFunction-: grid mismatch");
    GridFunction out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= b.values[i];
    return out;
}

inline double rel_or_abs(double diff, double ref) { return ref > 1e-12 ? diff / ref : diff; }

// ---------------------------------------------------------------------------
// Serialization: little-endian binary {i32 dim, f64 L, i32 N} + (re,im) f64
// pairs, and CSV (node coords, re, im).
// ---------------------------------------------------------------------------

inline void write_binary(const GridFunction& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    require(os.good(), "write_binary: cannot open " + path);
    const std::int32_t dim = f.grid.dim, N = f.grid.N;
    const double L = f.grid.L;
    os.write(reinterpret_cast<const char*>(&dim), 4);
    os.write(reinterpret_cast<const char*>(&L), 8);
    os.write(reinterpret_cast<const char*>(&N), 4);
    for (const Complex& v : f.values) {
        const double re = v.real(), im = v.imag();
        os.write(reinterpret_cast<const char*>(&re), 8);
        os.write(reinterpret_cast<const char*>(&im), 8);
    }
    require(os.good(), "write_binary: write failed for " + path);
}

inline GridFunction read_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(is.good(), "read_binary: cannot open " + path);
    std::int32_t dim = 0, N = 0;
    double L = 0.0;
    is.read(reinterpret_cast<char*>(&dim), 4);
    is.read(reinterpret_cast<char*>(&L), 8);
    is.read(reinterpret_cast<char*>(&N), 4);
    require(is.good(), "read_binary: truncated header in " + path);
    Grid g(dim, L, N);
    GridFunction f(g);
    for (Complex& v : f.values) {
        double re = 0.0, im = 0.0;
        is.read(reinterpret_cast<char*>(&re), 8);
        is.read(reinterpret_cast<char*>(&im), 8);
        v = Complex(re, im);
    }
    require(is.good(), "read_binary: truncated payload in " + path);
    require(all_finite(f), "read_binary: non-finite sample in " + path);
    return f;
}

inline void write_csv(const GridFunction& f, const std::string& path) {
    std::ofstream os(path);
    require(os.good(), "write_csv: cannot open " + path);
    for (int a = 0; a < f.grid.dim; ++a) os << "x" << a << ",";
    os << "abs,re,im\n";
    std::vector<double> pt(f.grid.dim);
    char buf[64];
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        f.grid.node(i, pt);
        for (double c : pt) {
            std::snprintf(buf, sizeof buf, "%.17g,", c);
            os << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", std::abs(f.values[i]),
                      f.values[i].real(), f.values[i].imag());
        os << buf;
    }
    require(os.good(), "write_csv: write failed for " + path);
}

}  // namespace banwave
