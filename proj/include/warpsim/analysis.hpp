#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "warpsim/errors.hpp"
#include "warpsim/record.hpp"

namespace warpsim {

/// Least-squares line y = a + b·x; returns (intercept, slope, rms residual).
struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double residual_rms = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidArgument("linear_fit: need two equal-length series");
    }
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LinearFit fit;
    const double denom = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    return fit;
}

/// Fitted lightcone edges from the two spin-branch trajectories.
struct LightconeFit {
    double slope_up = 0.0;
    double slope_down = 0.0;
    double residual_rms = 0.0;
};

inline LightconeFit fit_lightcone(const TrajectoryRecord& record_up,
                                  const TrajectoryRecord& record_down) {
    const LinearFit up = linear_fit(record_up.times, record_up.mean_x_over_c);
    const LinearFit down = linear_fit(record_down.times, record_down.mean_x_over_c);
    return {up.slope, down.slope,
            std::sqrt(0.5 * (up.residual_rms * up.residual_rms +
                             down.residual_rms * down.residual_rms))};
}

/// Dominant oscillation extracted from a detrended trajectory.
struct SpectralPeak {
    double omega = 0.0;      // rad/s
    double amplitude = 0.0;  // window-normalized magnitude
};

/// Detrend ⟨x⟩/c by a linear fit, Hann-window, DFT, and return the peak
/// refined by quadratic interpolation of the log magnitude.  Returns
/// nullopt (NoPeak) when the largest bin is below 3x the median floor,
/// which is what a massless run produces.
inline std::optional<SpectralPeak> zitterbewegung_spectrum(const TrajectoryRecord& rec) {
    const std::size_t n = rec.size();
    if (n < 16) throw InvalidArgument("zitterbewegung_spectrum: record too short");
    const double h = rec.times[1] - rec.times[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(rec.times[i] - rec.times[i - 1] - h) > 1e-9 * h) {
            throw InvalidArgument("zitterbewegung_spectrum: sampling must be uniform");
        }
    }

    const LinearFit trend = linear_fit(rec.times, rec.mean_x_over_c);
    std::vector<double> y(n);
    double window_sum = 0.0;
    double span = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / (n - 1)));
        y[i] = w * (rec.mean_x_over_c[i] - trend.intercept - trend.slope * rec.times[i]);
        window_sum += w;
        span = std::max(span, std::abs(rec.mean_x_over_c[i]));
    }
    // residual at the propagator's numerical floor: unresolved or massless
    if (trend.residual_rms < 1e-6 * std::max(span, 1e-300)) {
        return std::nullopt;
    }

    const std::size_t n_bins = n / 2;
    std::vector<double> mag(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            const double ang = -2.0 * M_PI * static_cast<double>(k * i) / n;
            acc += y[i] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        mag[k] = std::abs(acc);
    }

    // skip DC and the first bin, where detrending leakage lives
    std::size_t peak = 2;
    for (std::size_t k = 3; k < n_bins; ++k) {
        if (mag[k] > mag[peak]) peak = k;
    }
    std::vector<double> floor_est(mag.begin() + 2, mag.end());
    std::nth_element(floor_est.begin(), floor_est.begin() + floor_est.size() / 2,
                     floor_est.end());
    const double median = floor_est[floor_est.size() / 2];
    if (!(mag[peak] > 3.0 * median) || mag[peak] == 0.0) {
        return std::nullopt;
    }

    double delta = 0.0;
    if (peak + 1 < n_bins && peak >= 3 && mag[peak - 1] > 0.0 && mag[peak + 1] > 0.0) {
        const double la = std::log(mag[peak - 1]);
        const double lb = std::log(mag[peak]);
        const double lc = std::log(mag[peak + 1]);
        const double denom = la - 2.0 * lb + lc;
        if (denom != 0.0) delta = 0.5 * (la - lc) / denom;
        delta = std::clamp(delta, -0.5, 0.5);
    }

    SpectralPeak out;
    out.omega = 2.0 * M_PI * (peak + delta) / (n * h);
    out.amplitude = 2.0 * mag[peak] / window_sum;
    return out;
}

/// Position spread per sample, on both axes: (t, ΔX, Δx/c).
struct VariancePoint {
    double t = 0.0;
    double delta_X = 0.0;
    double delta_x_over_c = 0.0;
};

inline std::vector<VariancePoint> variance_series(const TrajectoryRecord& rec) {
    if (rec.var_X.size() != rec.size()) {
        throw InvalidArgument("variance_series: record has no variance samples");
    }
    std::vector<VariancePoint> out(rec.size());
    for (std::size_t i = 0; i < rec.size(); ++i) {
        const double vx = std::max(0.0, rec.var_X[i]);
        const double vc = std::max(0.0, rec.var_x_over_c2[i]);
        out[i] = {rec.times[i], std::sqrt(vx), std::sqrt(vc)};
    }
    return out;
}

/// Locations of the (up to two) local density maxima, refined by quadratic
/// interpolation; used for the two-branch separation analysis.
inline std::vector<double> density_peaks(const DensitySnapshot& snap,
                                         double min_height_fraction = 0.1) {
    const auto& d = snap.density;
    const double top = *std::max_element(d.begin(), d.end());
    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < d.size(); ++i) {
        if (d[i] > d[i - 1] && d[i] >= d[i + 1] && d[i] > min_height_fraction * top) {
            double delta = 0.0;
            const double denom = d[i - 1] - 2.0 * d[i] + d[i + 1];
            if (denom != 0.0) delta = 0.5 * (d[i - 1] - d[i + 1]) / denom;
            const double dx = snap.x_over_c[1] - snap.x_over_c[0];
            peaks.push_back(snap.x_over_c[i] + delta * dx);
        }
    }
    std::sort(peaks.begin(), peaks.end());
    return peaks;
}

} // namespace warpsim
