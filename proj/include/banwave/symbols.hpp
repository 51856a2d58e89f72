#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "banwave/common.hpp"
#include "banwave/grid.hpp"
#include "banwave/heisenberg.hpp"

namespace banwave::symbols {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Coherent state truncated to the first d Fock (Hermite) modes:
/// b_z[k] = e^{-|z|^2/2} conj(z)^k / sqrt(k!).
inline Vector coherent_vector(int d, Complex z) {
    Vector b(d);
    Complex p = std::exp(-0.5 * std::norm(z));
    for (int k = 0; k < d; ++k) {
        b[k] = p;
        p *= std::conj(z) / std::sqrt(double(k + 1));
    }
    return b;
}

/// Annihilation operator on the truncated Fock basis.
inline Matrix lowering(int d) {
    Matrix a = Matrix::Zero(d, d);
    for (int k = 1; k < d; ++k) a(k - 1, k) = std::sqrt(double(k));
    return a;
}

/// Finite-model representation matrix U(t,z) = e^{2it} exp(conj(z) a+ - z a);
/// unitary on C^d, and U(g) e_0 equals the coherent vector of z up to the
/// central phase.
inline Matrix displacement(int d, const GroupElement& g) {
    require(g.n() == 1, "displacement: finite model is over C^1");
    const Complex z = g.z[0];
    const Matrix a = lowering(d);
    const Matrix gen = std::conj(z) * a.adjoint() - z * a;        // skew-Hermitian
    const Matrix herm = Complex(0, -1) * gen;                     // gen = i herm
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
    Matrix ph = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k) ph(k, k) = std::polar(1.0, es.eigenvalues()[k]);
    return std::polar(1.0, 2.0 * g.t) * (es.eigenvectors() * ph * es.eigenvectors().adjoint());
}

/// Conjugation action on operators, A |-> U(g)^{-1} A U(g).
inline Matrix hat_act(const GroupElement& g, const Matrix& A) {
    const Matrix U = displacement(static_cast<int>(A.rows()), g);
    return U.adjoint() * A * U;
}

/// Coherent states sampled on a C^1 quadrature grid together with the
/// calibrated measure du dv / pi. In this Hilbert model the dual family is
/// the entrywise conjugate of the states, so the bilinear pairing against
/// l_z realizes the inner product with b_z.
struct CoherentFrame {
    int d = 2;
    Grid x;
    double measure_scale = 1.0 / pi;
    Matrix states;  // d x M, column per X node

    std::size_t nodes() const { return static_cast<std::size_t>(states.cols()); }
    double node_weight() const { return x.weight() * measure_scale; }

    Matrix resolution() const {
        return (states * states.adjoint()) * node_weight();
    }
    double resolution_residual() const {
        const Matrix R = resolution() - Matrix::Identity(d, d);
        Eigen::SelfAdjointEigenSolver<Matrix> es(R);
        double r = 0.0;
        for (int k = 0; k < d; ++k) r = std::max(r, std::abs(es.eigenvalues()[k]));
        return r;
    }
};

/// Frame over the first d modes on an m x m box. The box half-width defaults
/// to a rule that keeps the top-mode tail outside the box negligible.
inline CoherentFrame make_frame_finite(int d, int m, double L = -1.0) {
    require(d >= 1 && d <= 64, "make_frame_finite: d out of range");
    if (L <= 0.0) L = std::max(6.0, std::sqrt(double(d)) + 3.5);
    CoherentFrame f;
    f.d = d;
    f.x = Grid(2, L, m);
    f.states.resize(d, static_cast<Eigen::Index>(f.x.size()));
    std::vector<double> pt(2);
    for (std::size_t i = 0; i < f.x.size(); ++i) {
        f.x.node(i, pt);
        f.states.col(static_cast<Eigen::Index>(i)) = coherent_vector(d, Complex(pt[0], pt[1]));
    }
    const double res = f.resolution_residual();
    if (res > 1e-4)
        throw std::domain_error("make_frame_finite: resolution residual " + std::to_string(res) +
                                " too large; increase m or the box");
    return f;
}

/// Covariant symbol or presymbol values on the frame nodes.
struct Symbol {
    bool on_pairs = false;
    Grid x;
    Vector values;       // on X, length M
    Matrix pair_values;  // on X x X, (x1, x2) entry
};

/// A(x) = <A b_x, l_x>.
inline Symbol covariant_symbol(const Matrix& A, const CoherentFrame& f) {
    require(A.rows() == f.d && A.cols() == f.d, "covariant_symbol: dimension mismatch");
    Symbol s;
    s.x = f.x;
    const Matrix E = A * f.states;
    s.values = (f.states.conjugate().cwiseProduct(E)).colwise().sum().transpose();
    return s;
}

/// A(x1, x2) = <A b_{x2}, l_{x1}>; the diagonal is the covariant symbol.
inline Symbol covariant_presymbol(const Matrix& A, const CoherentFrame& f) {
    require(A.rows() == f.d && A.cols() == f.d, "covariant_presymbol: dimension mismatch");
    Symbol s;
    s.on_pairs = true;
    s.x = f.x;
    s.pair_values = f.states.adjoint() * A * f.states;
    return s;
}

/// Integral composition (sigma1 . sigma2)(x1,x3) =
/// int sigma1(x1,x2) sigma2(x2,x3) dmu(x2); an algebra homomorphism from
/// operator products to presymbol composition.
inline Symbol compose_symbols(const Symbol& s1, const Symbol& s2, const CoherentFrame& f) {
    require(s1.on_pairs && s2.on_pairs, "compose_symbols: presymbols required");
    require(s1.x == f.x && s2.x == f.x, "compose_symbols: frame mismatch");
    Symbol out;
    out.on_pairs = true;
    out.x = f.x;
    out.pair_values = s1.pair_values * (f.node_weight() * s2.pair_values);
    return out;
}

/// A = int int A(x1,x2) <v, l_{x2}> b_{x1} dmu(x2) dmu(x1).
inline Matrix reconstruct_from_presymbol(const Symbol& s, const CoherentFrame& f) {
    require(s.on_pairs, "reconstruct_from_presymbol: presymbol required");
    const double w = f.node_weight();
    return (f.states * (w * s.pair_values) * f.states.adjoint()) * w;
}

/// A = int breve(x) <., l_x> b_x dmu(x)  (anti-Wick assembly).
inline Matrix contravariant_reconstruct(const Vector& breve, const CoherentFrame& f) {
    require(breve.size() == static_cast<Eigen::Index>(f.nodes()), "contravariant_reconstruct: size mismatch");
    const double w = f.node_weight();
    Matrix A = Matrix::Zero(f.d, f.d);
    A.noalias() = f.states * (w * breve).asDiagonal() * f.states.adjoint();
    return A;
}

struct BerezinReport {
    double cov_min = 0.0, cov_max = 0.0;        // normalized quadratic-form values
    double eig_min = 0.0, eig_max = 0.0;        // spectrum of A
    double contra_min = 0.0, contra_max = 0.0;  // range of the contravariant symbol
    double reproduce_residual = 0.0;            // || assemble(breve) - A || / ||A||
    double cov_imag_defect = 0.0;

    bool inclusions_hold(double tol) const {
        return cov_min >= eig_min - tol && cov_max <= eig_max + tol && eig_min >= contra_min - tol &&
               eig_max <= contra_max + tol;
    }
};

/// Range-inclusion check for Hermitian A: normalized covariant values (which
/// are genuine quadratic-form values on unit vectors) sit inside the
/// spectrum, and the spectrum sits inside the range of any contravariant
/// symbol that reproduces A.
inline BerezinReport berezin_inclusion_check(const Matrix& A, const Vector& breve, const CoherentFrame& f,
                                             double reproduce_tol = 1e-4) {
    require((A - A.adjoint()).cwiseAbs().maxCoeff() < 1e-12, "berezin_inclusion_check: A must be Hermitian");
    BerezinReport r;
    const Matrix B = contravariant_reconstruct(breve, f);
    r.reproduce_residual = (B - A).norm() / std::max(1e-300, A.norm());
    if (r.reproduce_residual > reproduce_tol)
        throw std::domain_error("berezin_inclusion_check: contravariant symbol does not reproduce A");

    Eigen::SelfAdjointEigenSolver<Matrix> es(A);
    r.eig_min = es.eigenvalues().minCoeff();
    r.eig_max = es.eigenvalues().maxCoeff();

    const Symbol cov = covariant_symbol(A, f);
    const Symbol den = covariant_symbol(Matrix::Identity(f.d, f.d), f);
    r.cov_min = std::numeric_limits<double>::infinity();
    r.cov_max = -r.cov_min;
    for (Eigen::Index i = 0; i < cov.values.size(); ++i) {
        const Complex q = cov.values[i] / den.values[i];
        r.cov_imag_defect = std::max(r.cov_imag_defect, std::abs(q.imag()));
        r.cov_min = std::min(r.cov_min, q.real());
        r.cov_max = std::max(r.cov_max, q.real());
    }
    r.contra_min = breve.real().minCoeff();
    r.contra_max = breve.real().maxCoeff();
    return r;
}

}  // namespace banwave::symbols
