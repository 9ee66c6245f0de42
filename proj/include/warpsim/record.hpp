#pragma once

#include <string>
#include <vector>

namespace warpsim {

/// Spin-traced position density at one instant, on the x/c axis (seconds).
/// The density is per unit x/c, so its trapezoid integral over the grid is 1.
struct DensitySnapshot {
    double t = 0.0;
    std::vector<double> x_over_c;
    std::vector<double> density;
};

/// Sampled time series of the propagated observables.  Positions are kept
/// on both axes: dimensionless X (oscillator-length units) and x/c
/// (seconds); variances likewise.
struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<double> mean_X;
    std::vector<double> mean_x_over_c;
    std::vector<double> var_X;
    std::vector<double> var_x_over_c2;
    std::vector<double> sx, sy, sz;
    std::vector<double> norm;
    std::vector<DensitySnapshot> snapshots;

    // provenance / convergence metadata
    std::string backend;
    int n_max = 0;
    double dt = 0.0;
    double max_norm_drift = 0.0;
    double boundary_occupancy = 0.0;  // max weight seen in the top two levels

    std::size_t size() const { return times.size(); }
};

} // namespace warpsim
