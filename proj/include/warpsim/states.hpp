#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "warpsim/errors.hpp"
#include "warpsim/operators.hpp"

namespace warpsim {

/// Gaussian spatial wavepacket ⊗ spin state.  width = 1 matches the
/// oscillator ground state; center_X is in oscillator-length units.
struct InitialStateSpec {
    double center_X = 0.0;
    double width = 1.0;
    Eigen::Vector2cd spin{1.0, 0.0};

    InitialStateSpec() = default;
    InitialStateSpec(double center_X, double width, Eigen::Vector2cd spin_in)
        : center_X(center_X), width(width), spin(std::move(spin_in)) {
        if (width <= 0.0) throw InvalidArgument("InitialStateSpec: width must be positive");
        const double n = spin.norm();
        if (n < 1e-12) throw InvalidArgument("InitialStateSpec: spin vector is zero");
        spin /= n;
    }

    static InitialStateSpec spin_up() { return {}; }
    static InitialStateSpec spin_down() {
        return InitialStateSpec(0.0, 1.0, Eigen::Vector2cd(0.0, 1.0));
    }
    static InitialStateSpec spin_superposition() {
        return InitialStateSpec(0.0, 1.0, Eigen::Vector2cd(1.0, 1.0));
    }

    /// Position-space wavefunction (πw²)^{-1/4} exp(-(X-X₀)²/2w²).
    double psi(double x) const {
        const double d = (x - center_X) / width;
        return std::pow(M_PI * width * width, -0.25) * std::exp(-0.5 * d * d);
    }
};

namespace detail {

/// Overlap integrals ⟨n|ψ⟩ for all n < n_max by trapezoid quadrature.  The
/// integrand decays like the Gaussian at both ends, so the rule converges
/// superalgebraically; the step resolves the fastest oscillator wavenumber
/// √(2·n_max) with margin.
inline Eigen::VectorXd gaussian_overlaps_quadrature(const InitialStateSpec& spec,
                                                    int n_max, double step_scale) {
    const double k_max = std::sqrt(2.0 * n_max) + 4.0 / spec.width + 4.0;
    const double h = step_scale * M_PI / (4.0 * k_max);
    const double lo = spec.center_X - 10.0 * spec.width - 1.0;
    const double hi = spec.center_X + 10.0 * spec.width + 1.0;
    const int npts = static_cast<int>(std::ceil((hi - lo) / h)) + 1;
    const double dx = (hi - lo) / (npts - 1);

    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_max);
    for (int i = 0; i < npts; ++i) {
        const double x = lo + i * dx;
        const double w = (i == 0 || i == npts - 1) ? 0.5 : 1.0;
        const double f = w * spec.psi(x);
        if (f == 0.0) continue;
        c += f * hermite_overlap_column(n_max, x);
    }
    return c * dx;
}

} // namespace detail

/// Fock-basis coefficients of the Gaussian packet, normalized after the
/// truncation-tail check.  Ground-state-width packets use the closed
/// coherent-state form; other widths use certified quadrature.
inline Eigen::VectorXcd gaussian_fock_coefficients(const InitialStateSpec& spec,
                                                   const FockSpace& space) {
    Eigen::VectorXd c(space.n_max);
    if (spec.width == 1.0) {
        // Coherent state with amplitude α = X₀/√2: c_n = e^{-α²/2} αⁿ/√n!.
        const double alpha = spec.center_X / std::sqrt(2.0);
        c(0) = std::exp(-0.5 * alpha * alpha);
        for (int n = 1; n < space.n_max; ++n) {
            c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
        }
    } else {
        c = detail::gaussian_overlaps_quadrature(spec, space.n_max, 1.0);
        const Eigen::VectorXd fine =
            detail::gaussian_overlaps_quadrature(spec, space.n_max, 0.5);
        const double defect = (c - fine).cwiseAbs().maxCoeff();
        if (defect > 1e-10) {
            throw GridError("gaussian_fock_coefficients: quadrature failed to certify "
                            "1e-10 accuracy (defect " + std::to_string(defect) + ")");
        }
        c = fine;
    }

    const double mass = c.squaredNorm();
    const double tail = 1.0 - mass;
    if (tail > 1e-8) {
        throw TruncationError(
            "gaussian_fock_coefficients: truncated Fock space holds only " +
                std::to_string(mass) + " of the packet",
            tail);
    }
    return (c / std::sqrt(mass)).cast<Complex>();
}

/// Assemble the product state amplitudes[s·n_max + n] = spin[s]·c_n.
inline QuantumState build_initial_state(const InitialStateSpec& spec,
                                        const FockSpace& space) {
    const Eigen::VectorXcd c = gaussian_fock_coefficients(spec, space);
    StateVector amps(space.product_dim());
    amps.segment(0, space.n_max) = spec.spin(0) * c;
    amps.segment(space.n_max, space.n_max) = spec.spin(1) * c;
    return QuantumState(space.n_max, std::move(amps));
}

/// Uniform momentum grid symmetric about zero; midpoints avoid an exact
/// p = 0 node.
struct MomentumGrid {
    int n_points = 4096;
    double p_max = 12.0;

    double spacing() const { return 2.0 * p_max / n_points; }
    double point(int j) const { return -p_max + (j + 0.5) * spacing(); }
};

/// Gaussian packet in momentum space over a grid, spin factored out:
/// φ(p) = (w²/π)^{1/4} exp(-w²p²/2 - i p X₀).
struct MomentumState {
    MomentumGrid grid;
    Eigen::Vector2cd spin;
    Eigen::VectorXcd envelope;  // shared spatial factor over grid points

    Complex amplitude(int s, int j) const { return spin(s) * envelope(j); }
};

inline MomentumState momentum_representation(const InitialStateSpec& spec,
                                             const MomentumGrid& grid) {
    const double sigma_p = 1.0 / (spec.width * std::sqrt(2.0));
    if (grid.spacing() > sigma_p / 16.0) {
        throw GridError("momentum_representation: grid spacing does not resolve the "
                        "packet (need >= 16 points per momentum standard deviation)");
    }
    if (grid.p_max < 6.0 * sigma_p) {
        throw GridError("momentum_representation: grid does not cover the packet "
                        "(need p_max >= 6 momentum standard deviations)");
    }

    MomentumState state;
    state.grid = grid;
    state.spin = spec.spin;
    state.envelope.resize(grid.n_points);
    const double w2 = spec.width * spec.width;
    const double amp = std::pow(w2 / M_PI, 0.25);
    for (int j = 0; j < grid.n_points; ++j) {
        const double p = grid.point(j);
        state.envelope(j) =
            amp * std::exp(-0.5 * w2 * p * p) * std::exp(-kI * p * spec.center_X);
    }

    const double parseval = state.envelope.squaredNorm() * grid.spacing();
    if (std::abs(parseval - 1.0) > 1e-8) {
        throw GridError("momentum_representation: Parseval sum deviates from 1 by " +
                        std::to_string(parseval - 1.0));
    }
    return state;
}

} // namespace warpsim
