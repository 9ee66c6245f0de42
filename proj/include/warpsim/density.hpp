#pragma once

#include <cmath>
#include <vector>

#include "warpsim/errors.hpp"
#include "warpsim/operators.hpp"
#include "warpsim/record.hpp"

namespace warpsim {

/// Uniform x/c grid centered on the warp drift s(t), wide enough to hold
/// both lightcone branches (±c·t around the drift) plus half_width_X of
/// packet margin.  Shared by the Fock and momentum backends so densities
/// compare pointwise.
inline std::vector<double> drift_centered_grid(double kappa, double shift, double t,
                                               int n_points = 2048,
                                               double half_width_X = 8.0) {
    const double half = t + half_width_X / kappa;
    std::vector<double> grid(n_points);
    for (int i = 0; i < n_points; ++i) {
        grid[i] = shift - half + 2.0 * half * i / (n_points - 1);
    }
    return grid;
}

/// Spin-traced position density of a Fock-space state, evaluated pointwise
/// with the oscillator-function recurrence.  `kappa` converts the x/c axis
/// to X units and `warp_shift_x_over_c` is the analytic drift offset of the
/// state (zero when the state already contains its displacement).
inline DensitySnapshot wavepacket_density(const QuantumState& state,
                                          const std::vector<double>& x_over_c_grid,
                                          double kappa, double t = 0.0,
                                          double warp_shift_x_over_c = 0.0) {
    if (x_over_c_grid.size() < 2) {
        throw GridError("wavepacket_density: grid needs at least two points");
    }
    DensitySnapshot snap;
    snap.t = t;
    snap.x_over_c = x_over_c_grid;
    snap.density.resize(x_over_c_grid.size());

    for (std::size_t i = 0; i < x_over_c_grid.size(); ++i) {
        const double x_flat = kappa * (x_over_c_grid[i] - warp_shift_x_over_c);
        const Eigen::VectorXd column = hermite_overlap_column(state.n_max, x_flat);
        double rho = 0.0;
        for (int s = 0; s < 2; ++s) {
            const Complex amp = state.spin_block(s).dot(column.cast<Complex>());
            rho += std::norm(amp);
        }
        // per-unit-x/c density
        snap.density[i] = rho * kappa;
    }

    const double edge = std::max(snap.density.front(), snap.density.back());
    if (edge > 1e-6 * kappa) {
        throw GridError("wavepacket_density: grid does not cover the packet "
                        "(boundary density above threshold)");
    }
    return snap;
}

/// Trapezoid integral of a snapshot; 1 within 1e-6 for a covering grid.
inline double snapshot_integral(const DensitySnapshot& snap) {
    double total = 0.0;
    for (std::size_t i = 1; i < snap.x_over_c.size(); ++i) {
        total += 0.5 * (snap.density[i] + snap.density[i - 1]) *
                 (snap.x_over_c[i] - snap.x_over_c[i - 1]);
    }
    return total;
}

} // namespace warpsim
