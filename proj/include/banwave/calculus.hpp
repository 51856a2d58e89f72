#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "banwave/common.hpp"
#include "banwave/grid.hpp"
#include "banwave/heisenberg.hpp"
#include "banwave/realizations.hpp"
#include "banwave/wavelet.hpp"

namespace banwave::calculus {

using Matrix = Eigen::MatrixXcd;

/// n-tuple of Hermitian d x d matrices T_1..T_n (T_0 = identity is implicit).
struct OperatorTuple {
    std::vector<Matrix> T;

    int n() const { return static_cast<int>(T.size()); }
    int d() const { return T.empty() ? 0 : static_cast<int>(T[0].rows()); }
};

inline OperatorTuple make_tuple(std::vector<Matrix> mats) {
    require(!mats.empty() && mats.size() <= 4, "OperatorTuple: need 1..4 matrices");
    const Eigen::Index d = mats[0].rows();
    require(d >= 1 && d <= 64, "OperatorTuple: d out of range");
    for (const Matrix& m : mats) {
        require(m.rows() == d && m.cols() == d, "OperatorTuple: inconsistent dimensions");
        require((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-12, "OperatorTuple: matrix not Hermitian");
    }
    return OperatorTuple{std::move(mats)};
}

inline OperatorTuple pauli_tuple() {
    Matrix s1(2, 2), s2(2, 2);
    s1 << 0, 1, 1, 0;
    s2 << 0, Complex(0, -1), Complex(0, 1), 0;
    return make_tuple({s1, s2});
}

inline OperatorTuple diag_tuple(const std::vector<double>& spectrum) {
    Matrix m = Matrix::Zero(spectrum.size(), spectrum.size());
    for (std::size_t k = 0; k < spectrum.size(); ++k) m(k, k) = spectrum[k];
    return make_tuple({m});
}

/// Largest spectral radius among the T_j.
inline double spectral_radius(const OperatorTuple& t) {
    double r = 0.0;
    for (const Matrix& m : t.T) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(m);
        r = std::max({r, std::abs(es.eigenvalues().minCoeff()), std::abs(es.eigenvalues().maxCoeff())});
    }
    return r;
}

/// Parameter point (a0, a) of the unitary family T(a0,a) = e^{i a0} e^{i a.T}.
struct ParamPoint {
    double a0 = 0.0;
    std::vector<double> a;
};

/// e^{i a0} exp(i sum a_j T_j) through the Hermitian eigendecomposition, so
/// the result is unitary to roundoff.
inline Matrix unitary_of(const ParamPoint& p, const OperatorTuple& t) {
    require(static_cast<int>(p.a.size()) == t.n(), "unitary_of: parameter dimension mismatch");
    Matrix H = Matrix::Zero(t.d(), t.d());
    for (int j = 0; j < t.n(); ++j) H += p.a[j] * t.T[j];
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    Matrix ph = Matrix::Zero(t.d(), t.d());
    for (int k = 0; k < t.d(); ++k) ph(k, k) = std::polar(1.0, es.eigenvalues()[k]);
    return std::polar(1.0, p.a0) * (es.eigenvectors() * ph * es.eigenvectors().adjoint());
}

/// Evaluator of the family T(a0,a); caches the eigendecomposition when the
/// tuple is a single matrix, which covers the hot quadrature loops.
class UnitaryFamily {
  public:
    explicit UnitaryFamily(const OperatorTuple& t) : t_(&t) {
        if (t.n() == 1) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(t.T[0]);
            V_ = es.eigenvectors();
            lam_ = es.eigenvalues();
            cached_ = true;
        }
    }

    Matrix operator()(const ParamPoint& p) const {
        if (!cached_) return unitary_of(p, *t_);
        const int d = t_->d();
        Matrix ph = Matrix::Zero(d, d);
        for (int k = 0; k < d; ++k) ph(k, k) = std::polar(1.0, p.a0 + p.a[0] * lam_[k]);
        return V_ * ph * V_.adjoint();
    }

  private:
    const OperatorTuple* t_;
    Matrix V_;
    Eigen::VectorXd lam_;
    bool cached_ = false;
};

/// Geometric action of H^n on the parameter space of the unitary family:
/// omega(t,z): (a0, a) -> (a0 + 2t + sum(u_j v_j - sqrt2 a_j u_j), a - sqrt2 v).
/// The central coefficient 2t is forced jointly by the group law
/// omega(g') omega(g'') = omega(g' g'') and by the e^{2it} central character
/// of the Schroedinger representation.
inline ParamPoint omega_act(const GroupElement& g, const ParamPoint& p) {
    require(g.n() == static_cast<int>(p.a.size()), "omega_act: dimension mismatch");
    ParamPoint out;
    out.a.resize(p.a.size());
    double extra = 2.0 * g.t;
    for (std::size_t j = 0; j < p.a.size(); ++j) {
        const double u = std::real(g.z[j]), v = std::imag(g.z[j]);
        extra += u * v - sqrt2 * p.a[j] * u;
        out.a[j] = p.a[j] - sqrt2 * v;
    }
    out.a0 = p.a0 + extra;
    return out;
}

/// Symmetric midpoint rule on [-L, L]^n; the node set is exactly symmetric
/// about the origin, which keeps real symbols Hermitian to roundoff.
struct MidpointGrid {
    double L = 8.0;
    int M = 128;
    double step() const { return 2.0 * L / M; }
    double node(int k) const { return -L + (k + 0.5) * step(); }
};

struct QuadratureDiagnostics {
    double box = 0.0;
    int nodes_per_axis = 0;
    double tail_mass = 0.0;
};

struct CalculusResult {
    Matrix op;
    QuadratureDiagnostics diag;
};

namespace detail {

template <typename Fn>
void for_each_midpoint(const MidpointGrid& q, int n, Fn&& fn) {
    std::vector<int> idx(n, 0);
    std::vector<double> pt(n);
    const std::size_t total = static_cast<std::size_t>(std::pow(double(q.M), n));
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (int a = n - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(rem % q.M);
            rem /= q.M;
        }
        for (int a = 0; a < n; ++a) pt[a] = q.node(idx[a]);
        fn(std::span<const double>(pt));
    }
}

}  // namespace detail

/// Weyl functional calculus
///   f(T) = (2 pi)^{-n/2} 2^{n/2} int fhat(x) exp(-i sqrt2 sum x_j T_j) dx,
/// with fhat the e^{i sqrt2 x y} transform of f and the calibrated X measure.
/// The scale pair (2^{n/2}, -sqrt2) is pinned by requiring f(T) = diag f(l_k)
/// on commuting diagonal tuples; real symbols give Hermitian results.
inline CalculusResult weyl_calc(const GridFunction& f, const OperatorTuple& t) {
    require(f.grid.dim == t.n(), "weyl_calc: symbol dimension must match the tuple");
    require_decaying(f, "weyl_calc");
    const int n = t.n(), d = t.d();
    const double rho = std::max(spectral_radius(t), 1e-6);
    const double Lf = f.grid.L;
    const double dx = std::min(pi / (4.0 * sqrt2 * rho), 0.5 * pi / (sqrt2 * (Lf + rho)));
    // the sampled transform is periodic with period pi sqrt2 / h; never
    // integrate past the first period or alias copies enter the integral
    const double alias_cap = 0.9 * pi / (sqrt2 * f.grid.h());

    MidpointGrid q;
    double tail = 1.0;
    std::vector<Complex> fhat;
    for (double Lx = std::min(8.0, alias_cap);; Lx = std::min(2.0 * Lx, alias_cap)) {
        q.L = Lx;
        q.M = std::max(32, 2 * static_cast<int>(std::ceil(Lx / dx)));
        if (q.M > 4096) throw std::domain_error("weyl_calc: quadrature box exceeds the node budget");
        std::vector<double> pts;
        pts.reserve(static_cast<std::size_t>(std::pow(double(q.M), n)) * n);
        detail::for_each_midpoint(q, n, [&](std::span<const double> p) {
            pts.insert(pts.end(), p.begin(), p.end());
        });
        fhat = fourier_wavelet_at(f, pts);
        // outermost-layer magnitude relative to the transform peak; the edge
        // cannot drop below the quadrature noise floor, so the threshold is
        // relative, not absolute
        double peak = 0.0, edge = 0.0;
        std::size_t i = 0;
        detail::for_each_midpoint(q, n, [&](std::span<const double> p) {
            const double a = std::abs(fhat[i++]);
            peak = std::max(peak, a);
            for (double c : p)
                if (std::abs(c) > q.L - q.step()) {
                    edge = std::max(edge, a);
                    break;
                }
        });
        tail = peak > 0.0 ? edge / peak : 0.0;
        if (tail < 1e-11 || Lx >= alias_cap) break;
    }

    const double w = std::pow(2.0 * pi, -0.5 * n) * std::pow(2.0, 0.5 * n) * std::pow(q.step(), n);
    const UnitaryFamily U(t);
    Matrix acc = Matrix::Zero(d, d);
    std::size_t i = 0;
    detail::for_each_midpoint(q, n, [&](std::span<const double> p) {
        ParamPoint pp;
        pp.a.assign(p.begin(), p.end());
        for (double& a : pp.a) a *= -sqrt2;
        acc += (w * fhat[i++]) * U(pp);
    });

    // real symbols must stay Hermitian (the symmetric node set guarantees it
    // to roundoff; the output is reported raw)
    double fmax = 0.0, fimag = 0.0;
    for (const Complex& v : f.values) {
        fmax = std::max(fmax, std::abs(v));
        fimag = std::max(fimag, std::abs(v.imag()));
    }
    if (fmax > 0.0 && fimag < 1e-14 * fmax) {
        const double drift = (acc - acc.adjoint()).cwiseAbs().maxCoeff() /
                             std::max(1e-300, acc.cwiseAbs().maxCoeff());
        if (drift > 1e-8) throw std::runtime_error("weyl_calc: Hermitian drift above 1e-8 for a real symbol");
    }
    return {std::move(acc), {q.L, q.M, tail}};
}

/// Gaussian of a tuple: e^{-sum T_j^2 / 2} realized as
/// (2 pi)^{-n/2} int e^{-|x|^2/2} e^{i x.T} dx.
inline CalculusResult gaussian_of_tuple(const OperatorTuple& t) {
    const int n = t.n(), d = t.d();
    const double rho = std::max(spectral_radius(t), 1e-6);
    MidpointGrid q;
    q.L = 9.0;
    q.M = std::max(128, 2 * static_cast<int>(std::ceil(q.L * 4.0 * rho / pi)));
    const double w = std::pow(2.0 * pi, -0.5 * n) * std::pow(q.step(), n);
    const UnitaryFamily U(t);
    Matrix acc = Matrix::Zero(d, d);
    double total = 0.0, edge = 0.0;
    detail::for_each_midpoint(q, n, [&](std::span<const double> p) {
        double quad = 0.0;
        for (double c : p) quad += c * c;
        const double g = std::exp(-0.5 * quad);
        total += g;
        for (double c : p)
            if (std::abs(c) > q.L - q.step()) {
                edge += g;
                break;
            }
        ParamPoint pp;
        pp.a.assign(p.begin(), p.end());
        acc += (w * g) * U(pp);
    });
    return {std::move(acc), {q.L, q.M, total > 0.0 ? edge / total : 0.0}};
}

namespace detail {

/// omega(0,z) applied to the Gaussian vacuum e^{-sum T_j^2/2}, evaluated by
/// the inner x-quadrature
///   (2 pi)^{-n/2} int e^{-|x|^2/2} e^{i(u.v - sqrt2 x.u)}
///                     exp(i sum (x_j - sqrt2 v_j) T_j) dx.
inline Matrix omega_gaussian_state(const OperatorTuple& t, const UnitaryFamily& U,
                                   std::span<const double> uv_pt, const MidpointGrid& q) {
    const int n = t.n(), d = t.d();
    double udotv = 0.0;
    for (int j = 0; j < n; ++j) udotv += uv_pt[2 * j] * uv_pt[2 * j + 1];
    const double w = std::pow(2.0 * pi, -0.5 * n) * std::pow(q.step(), n);
    Matrix acc = Matrix::Zero(d, d);
    for_each_midpoint(q, n, [&](std::span<const double> x) {
        double quad = 0.0, phase = udotv;
        ParamPoint pp;
        pp.a.resize(n);
        for (int j = 0; j < n; ++j) {
            quad += x[j] * x[j];
            phase -= sqrt2 * x[j] * uv_pt[2 * j];
            pp.a[j] = x[j] - sqrt2 * uv_pt[2 * j + 1];
        }
        pp.a0 = phase;
        acc += (w * std::exp(-0.5 * quad)) * U(pp);
    });
    return acc;
}

inline MidpointGrid omega_inner_grid(const OperatorTuple& t, double vmax) {
    const double rho = std::max(spectral_radius(t), 1e-6);
    MidpointGrid q;
    q.L = 9.0;
    // resolve both the Gaussian and the e^{i x (lambda + sqrt2 v)} phases
    const double freq = rho + sqrt2 * vmax + 1.0;
    q.M = std::max(96, 2 * static_cast<int>(std::ceil(q.L * freq)));
    return q;
}

}  // namespace detail

/// Functional calculus over the Segal-Bargmann realization, evaluated at the
/// base point of X:
///   f(T) = int_X f(z) omega(0,z) e^{-sum T_j^2/2} dmu(z),  dmu = du dv/pi^n.
inline CalculusResult sb_calc(const AdmissibleTuple& sb, const WaveletField& f, const OperatorTuple& t) {
    require(sb.rep.kind == SubgroupKind::Center, "sb_calc: Segal-Bargmann tuple required");
    require(f.grid == sb.rep.x, "sb_calc: field not on the tuple's X grid");
    require(sb.rep.n == t.n(), "sb_calc: tuple dimension mismatch");
    require_decaying(f, "sb_calc");
    const Grid& xg = sb.rep.x;
    const MidpointGrid inner = detail::omega_inner_grid(t, xg.L);
    const double w = xg.weight() * sb.measure_scale;
    const int d = t.d();
    const UnitaryFamily U(t);
    const std::size_t total = xg.size();
    const std::size_t chunk = 256;
    const std::size_t nchunks = (total + chunk - 1) / chunk;
    std::vector<Matrix> partial(nchunks, Matrix::Zero(d, d));
    parallel_for_chunks(total, chunk, [&](std::size_t c, std::size_t b, std::size_t e) {
        std::vector<double> pt(xg.dim);
        for (std::size_t i = b; i < e; ++i) {
            if (f.values[i] == Complex{}) continue;
            xg.node(i, pt);
            partial[c] += (w * f.values[i]) * detail::omega_gaussian_state(t, U, pt, inner);
        }
    });
    Matrix acc = Matrix::Zero(d, d);
    for (const Matrix& m : partial) acc += m;
    return {std::move(acc), {inner.L, inner.M, boundary_mass(f)}};
}

enum class CalculusRealization { Weyl, SegalBargmann };

/// Residual of the vacuum fixed-point identity
///   int b0hat(x') tau(x') T0 dmu(x') = T0
/// for the calculus vacua: T0 = (2 pi)^{-n/2} I over the Fourier/Weyl
/// realization (with a Gaussian-mollified b0hat) and T0 = e^{-sum T_j^2/2}
/// over the Segal-Bargmann realization. candidate_scale rescales the vacuum
/// fed into the integral; the comparison target stays canonical, so a wrongly
/// normalized vacuum is flagged with residual near |scale - 1|.
inline double tau_vacuum_residual(const OperatorTuple& t, CalculusRealization which,
                                  double candidate_scale = 1.0,
                                  const AdmissibleTuple* sb_tuple = nullptr) {
    const int n = t.n(), d = t.d();
    const UnitaryFamily U(t);
    if (which == CalculusRealization::Weyl) {
        // mollify the singular vacuum transform: b0hat_eps(x) =
        // (2pi)^{-n/2} eps^{-n/2} e^{-|x|^2/eps}, which tends to the
        // delta-type kernel as eps -> 0
        const double rho = std::max(spectral_radius(t), 1.0);
        const double eps = 1e-7 / (rho * rho);
        MidpointGrid q;
        q.L = 7.0 * std::sqrt(eps);
        q.M = 256;
        // both sides carry the common (2pi)^{-n/2} of the vacuum, so compare
        // against the identity; the calibrated measure contributes 2^{n/2}
        const double amp = candidate_scale * std::pow(2.0 * pi, -0.5 * n) * std::pow(eps, -0.5 * n) *
                           std::pow(2.0, 0.5 * n) * std::pow(q.step(), n);
        Matrix acc = Matrix::Zero(d, d);
        detail::for_each_midpoint(q, n, [&](std::span<const double> x) {
            double quad = 0.0;
            ParamPoint pp;
            pp.a.resize(n);
            pp.a0 = 0.0;
            for (int j = 0; j < n; ++j) {
                quad += x[j] * x[j];
                pp.a[j] = -sqrt2 * x[j];
            }
            acc += (amp * std::exp(-quad / eps)) * U(pp);
        });
        return (acc - Matrix::Identity(d, d)).norm() / std::sqrt(double(d));
    }
    require(sb_tuple != nullptr, "tau_vacuum_residual: Segal-Bargmann tuple required");
    const Grid& xg = sb_tuple->rep.x;
    const MidpointGrid inner = detail::omega_inner_grid(t, xg.L);
    const Matrix T0 = gaussian_of_tuple(t).op;
    const double w = xg.weight() * sb_tuple->measure_scale * candidate_scale;
    const std::size_t chunk = 256;
    const std::size_t nchunks = (xg.size() + chunk - 1) / chunk;
    std::vector<Matrix> partial(nchunks, Matrix::Zero(d, d));
    parallel_for_chunks(xg.size(), chunk, [&](std::size_t c, std::size_t b, std::size_t e) {
        std::vector<double> pt(xg.dim);
        for (std::size_t i = b; i < e; ++i) {
            xg.node(i, pt);
            double zsq = 0.0;
            for (double v : pt) zsq += v * v;
            partial[c] += (w * std::exp(-0.5 * zsq)) * detail::omega_gaussian_state(t, U, pt, inner);
        }
    });
    Matrix acc = Matrix::Zero(d, d);
    for (const Matrix& m : partial) acc += m;
    return (acc - T0).norm() / T0.norm();
}

/// Mollified spectral density: the spectral norm of the calculus applied to
/// the normalized Gaussian bump of width sigma centered at y.
inline double weyl_spectral_density(const OperatorTuple& t, std::span<const double> y, double sigma) {
    require(sigma > 0.0, "weyl_spectral_density: sigma must be positive");
    const int n = t.n();
    require(static_cast<int>(y.size()) == n, "weyl_spectral_density: point dimension mismatch");
    double ymax = 0.0;
    for (double c : y) ymax = std::max(ymax, std::abs(c));
    const double L = std::max(8.0, ymax + 10.0 * sigma);
    int N = 2 * static_cast<int>(std::ceil(L * 3.0 / sigma));
    N += N % 2;
    if (N > 4096) throw std::domain_error("weyl_spectral_density: sigma below the grid resolution budget");
    N = std::max(N, 64);
    const Grid g(n, L, N);
    const double norm = std::pow(2.0 * pi * sigma * sigma, -0.5 * n);
    const GridFunction bump = sample(
        [&](std::span<const double> x) {
            double q = 0.0;
            for (int j = 0; j < n; ++j) q += (x[j] - y[j]) * (x[j] - y[j]);
            return Complex(norm * std::exp(-0.5 * q / (sigma * sigma)), 0.0);
        },
        g);
    const Matrix m = weyl_calc(bump, t).op;
    return m.operatorNorm();
}

/// Recovered symbol samples of a commuting tuple: value of f at each joint
/// eigenvalue, read off in a common eigenbasis.
struct SpectralSamples {
    std::vector<std::vector<double>> points;  // joint eigenvalue tuples
    std::vector<Complex> values;
};

inline SpectralSamples recover_commuting(const Matrix& F, const OperatorTuple& t) {
    const int n = t.n(), d = t.d();
    require(F.rows() == d && F.cols() == d, "recover_commuting: dimension mismatch");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if ((t.T[i] * t.T[j] - t.T[j] * t.T[i]).cwiseAbs().maxCoeff() > 1e-10)
                throw std::domain_error("recover_commuting: tuple does not commute");
    // a fixed irrational combination splits distinct joint eigenvalues
    Matrix H = Matrix::Zero(d, d);
    static const double primes[4] = {2.0, 3.0, 5.0, 7.0};
    for (int j = 0; j < n; ++j) H += std::sqrt(primes[j]) * t.T[j];
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    const Matrix V = es.eigenvectors();
    SpectralSamples out;
    for (int k = 0; k < d; ++k) {
        std::vector<double> lam(n);
        for (int j = 0; j < n; ++j)
            lam[j] = (V.col(k).adjoint() * t.T[j] * V.col(k)).value().real();
        out.points.push_back(std::move(lam));
        out.values.push_back((V.col(k).adjoint() * F * V.col(k)).value());
    }
    return out;
}

}  // namespace banwave::calculus
