#pragma once

#include <cmath>
#include <complex>
#include <cstddef>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "warpsim/errors.hpp"

namespace warpsim {

using Complex = std::complex<double>;
using OperatorMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using SparseOperator = Eigen::SparseMatrix<Complex>;

inline constexpr Complex kI{0.0, 1.0};

/// Truncated single-mode Fock space with levels 0 .. n_max-1.
struct FockSpace {
    int n_max;

    explicit FockSpace(int n_max) : n_max(n_max) {
        if (n_max < 2) throw InvalidArgument("FockSpace: n_max must be at least 2");
    }

    /// Dimension of the spin(2) ⊗ Fock product space.
    int product_dim() const { return 2 * n_max; }
};

/// Annihilation operator, a[n-1, n] = √n.
inline OperatorMatrix annihilation(const FockSpace& space) {
    OperatorMatrix a = OperatorMatrix::Zero(space.n_max, space.n_max);
    for (int n = 1; n < space.n_max; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

inline OperatorMatrix creation(const FockSpace& space) {
    return annihilation(space).adjoint();
}

inline OperatorMatrix number_operator(const FockSpace& space) {
    OperatorMatrix n = OperatorMatrix::Zero(space.n_max, space.n_max);
    for (int k = 0; k < space.n_max; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

/// Position quadrature X = (a + a†)/√(2·nu) for dimensionless trap
/// frequency nu (hbar = m0 = 1); the library default nu = 1 gives
/// X = (a + a†)/√2.
inline OperatorMatrix position_op(const FockSpace& space, double nu = 1.0) {
    if (nu <= 0.0) throw InvalidArgument("position_op: nu must be positive");
    const double scale = 1.0 / std::sqrt(2.0 * nu);
    OperatorMatrix a = annihilation(space);
    return scale * (a + a.adjoint());
}

/// Momentum quadrature P = -i·√(nu/2)·(a - a†); canonical partner of X.
inline OperatorMatrix momentum_op(const FockSpace& space, double nu = 1.0) {
    if (nu <= 0.0) throw InvalidArgument("momentum_op: nu must be positive");
    const double scale = std::sqrt(nu / 2.0);
    OperatorMatrix a = annihilation(space);
    return -kI * scale * (a - a.adjoint());
}

enum class PauliAxis { X, Y, Z };

inline OperatorMatrix pauli(PauliAxis axis) {
    OperatorMatrix s(2, 2);
    switch (axis) {
        case PauliAxis::X: s << 0, 1, 1, 0; break;
        case PauliAxis::Y: s << 0, -kI, kI, 0; break;
        case PauliAxis::Z: s << 1, 0, 0, -1; break;
    }
    return s;
}

/// Kronecker product spin ⊗ Fock in the spin-major basis |s⟩⊗|n⟩ with flat
/// index s·n_max + n.
inline OperatorMatrix tensor(const OperatorMatrix& spin_part,
                             const OperatorMatrix& fock_part) {
    if (spin_part.rows() != 2 || spin_part.cols() != 2) {
        throw InvalidArgument("tensor: spin part must be 2x2");
    }
    const Eigen::Index n = fock_part.rows();
    if (fock_part.cols() != n) throw InvalidArgument("tensor: fock part must be square");
    OperatorMatrix out(2 * n, 2 * n);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out.block(i * n, j * n, n, n) = spin_part(i, j) * fock_part;
        }
    }
    return out;
}

/// Normalized harmonic-oscillator eigenfunction ⟨X|n⟩ evaluated by the
/// stable three-term recurrence; valid far beyond the n ≈ 30 limit of the
/// explicit Hermite-polynomial formula.
inline double hermite_overlap(int n, double x) {
    if (n < 0) throw InvalidArgument("hermite_overlap: n must be nonnegative");
    const double phi0 = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    if (n == 0) return phi0;
    double prev = phi0;
    double cur = std::sqrt(2.0) * x * phi0;
    for (int k = 2; k <= n; ++k) {
        const double next =
            x * std::sqrt(2.0 / k) * cur - std::sqrt((k - 1.0) / k) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// All oscillator functions ⟨X|0..n_max-1⟩ at once; shares the recurrence.
inline Eigen::VectorXd hermite_overlap_column(int n_max, double x) {
    Eigen::VectorXd col(n_max);
    col(0) = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    if (n_max > 1) col(1) = std::sqrt(2.0) * x * col(0);
    for (int k = 2; k < n_max; ++k) {
        col(k) = x * std::sqrt(2.0 / k) * col(k - 1) -
                 std::sqrt((k - 1.0) / k) * col(k - 2);
    }
    return col;
}

/// Normalized state on the spin ⊗ Fock product space, spin-major layout.
struct QuantumState {
    int n_max;
    StateVector amplitudes;

    QuantumState(int n_max, StateVector amps)
        : n_max(n_max), amplitudes(std::move(amps)) {
        if (amplitudes.size() != 2 * n_max) {
            throw InvalidArgument("QuantumState: amplitude length must be 2·n_max");
        }
    }

    int dim() const { return 2 * n_max; }
    double norm() const { return amplitudes.norm(); }

    /// View of one spin block (s = 0 for |↑⟩, 1 for |↓⟩).
    Eigen::VectorBlock<StateVector> spin_block(int s) {
        return amplitudes.segment(s * n_max, n_max);
    }
    Eigen::VectorBlock<const StateVector> spin_block(int s) const {
        return amplitudes.segment(s * n_max, n_max);
    }
};

/// ⟨ψ|O|ψ⟩.  For Hermitian O the caller usually wants real_expectation.
inline Complex expectation(const QuantumState& state, const OperatorMatrix& op) {
    if (op.rows() != state.dim() || op.cols() != state.dim()) {
        throw InvalidArgument("expectation: operator/state dimension mismatch");
    }
    return state.amplitudes.dot(op * state.amplitudes);
}

/// Real part of ⟨ψ|O|ψ⟩, asserting the imaginary part is numerically zero.
inline double real_expectation(const QuantumState& state, const OperatorMatrix& op) {
    const Complex v = expectation(state, op);
    if (std::abs(v.imag()) > 1e-10 * (1.0 + std::abs(v.real()))) {
        throw InvalidArgument("real_expectation: expectation has imaginary part " +
                              std::to_string(v.imag()));
    }
    return v.real();
}

/// Max-norm Hermiticity defect ‖M - M†‖_max.
inline double hermiticity_defect(const OperatorMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const OperatorMatrix& m, double rel_tol = 1e-12) {
    const double scale = m.cwiseAbs().maxCoeff();
    return hermiticity_defect(m) <= rel_tol * (scale > 0.0 ? scale : 1.0);
}

} // namespace warpsim
