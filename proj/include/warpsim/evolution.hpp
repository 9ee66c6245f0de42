#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "warpsim/density.hpp"
#include "warpsim/errors.hpp"
#include "warpsim/hamiltonians.hpp"
#include "warpsim/operators.hpp"
#include "warpsim/record.hpp"
#include "warpsim/spacetime.hpp"
#include "warpsim/states.hpp"

namespace warpsim {

enum class Backend { ExactCommuting, TimeOrdered, MomentumOracle };

inline const char* backend_name(Backend b) {
    switch (b) {
        case Backend::ExactCommuting: return "exact_commuting";
        case Backend::TimeOrdered: return "time_ordered";
        case Backend::MomentumOracle: return "momentum_oracle";
    }
    return "?";
}

struct PropagatorConfig {
    Backend backend = Backend::ExactCommuting;
    double dt = 0.0;  // TimeOrdered only
    double t_max = 0.0;
    double sample_interval = 0.0;
    double tolerance = 1e-8;         // relative norm-drift bound
    double truncation_guard = 1e-8;  // admissible weight in the top two levels

    void validate() const {
        if (t_max <= 0.0) throw InvalidArgument("PropagatorConfig: t_max must be positive");
        if (sample_interval <= 0.0 || sample_interval > t_max * (1.0 + 1e-12)) {
            throw InvalidArgument(
                "PropagatorConfig: need 0 < sample_interval <= t_max");
        }
        if (backend == Backend::TimeOrdered &&
            (dt <= 0.0 || dt > sample_interval * (1.0 + 1e-12))) {
            throw InvalidArgument("PropagatorConfig: need 0 < dt <= sample_interval");
        }
        if (tolerance <= 0.0) throw InvalidArgument("PropagatorConfig: tolerance must be positive");
    }

    std::vector<double> sample_times() const {
        const int count = static_cast<int>(std::floor(t_max / sample_interval + 1e-9));
        std::vector<double> times(count + 1);
        for (int k = 0; k <= count; ++k) times[k] = k * sample_interval;
        return times;
    }
};

/// Density snapshots to collect during a run, on drift-centered grids.
struct SnapshotRequest {
    std::vector<double> times;
    int n_points = 2048;
    double half_width_X = 8.0;
};

namespace detail {

struct Observables {
    double norm2 = 0.0;
    double mean_X = 0.0;
    double mean_X2 = 0.0;
    double sx = 0.0, sy = 0.0, sz = 0.0;
    double boundary = 0.0;
};

/// O(n) expectation kernel: X is tridiagonal, spins are block reductions.
inline Observables compute_observables(const QuantumState& psi) {
    const int n = psi.n_max;
    Observables obs;
    Complex cross{0.0, 0.0};
    for (int s = 0; s < 2; ++s) {
        const auto block = psi.spin_block(s);
        double x1 = 0.0, x2 = 0.0;
        // y = X·block accumulated on the fly
        for (int m = 0; m < n; ++m) {
            Complex y = 0.0;
            if (m > 0) y += std::sqrt(static_cast<double>(m)) * block(m - 1);
            if (m + 1 < n) y += std::sqrt(static_cast<double>(m + 1)) * block(m + 1);
            y /= std::sqrt(2.0);
            x1 += (std::conj(block(m)) * y).real();
            x2 += std::norm(y);
        }
        obs.mean_X += x1;
        obs.mean_X2 += x2;
        const double mass = block.squaredNorm();
        obs.norm2 += mass;
        obs.sz += (s == 0 ? mass : -mass);
        obs.boundary += std::norm(block(n - 1)) + std::norm(block(n - 2));
    }
    const auto up = psi.spin_block(0);
    const auto dn = psi.spin_block(1);
    for (int m = 0; m < n; ++m) cross += std::conj(up(m)) * dn(m);
    obs.sx = 2.0 * cross.real();
    obs.sy = 2.0 * cross.imag();
    return obs;
}

inline void append_sample(TrajectoryRecord& rec, double t, const Observables& obs,
                          double kappa, double warp_shift, const PropagatorConfig& cfg) {
    const double drift = std::abs(std::sqrt(obs.norm2) - 1.0);
    if (drift > cfg.tolerance) {
        throw NormDriftError("norm drifted by " + std::to_string(drift) + " at t = " +
                                 std::to_string(t),
                             drift);
    }
    if (obs.boundary > cfg.truncation_guard) {
        throw TruncationError("state reached the truncation boundary at t = " +
                                  std::to_string(t) + " (top-level weight " +
                                  std::to_string(obs.boundary) + ")",
                              obs.boundary);
    }
    const double mean_X = obs.mean_X + kappa * warp_shift;
    const double var_X = obs.mean_X2 - obs.mean_X * obs.mean_X;
    rec.times.push_back(t);
    rec.mean_X.push_back(mean_X);
    rec.mean_x_over_c.push_back(mean_X / kappa);
    rec.var_X.push_back(var_X);
    rec.var_x_over_c2.push_back(var_X / (kappa * kappa));
    rec.sx.push_back(obs.sx);
    rec.sy.push_back(obs.sy);
    rec.sz.push_back(obs.sz);
    rec.norm.push_back(std::sqrt(obs.norm2));
    rec.max_norm_drift = std::max(rec.max_norm_drift, drift);
    rec.boundary_occupancy = std::max(rec.boundary_occupancy, obs.boundary);
}

} // namespace detail

/// Momentum eigenbasis of the truncated space plus the per-mode 2x2 flat
/// Dirac blocks; the commuting factorization makes this the whole exact
/// propagator.  The eigendecomposition is done once per basis.
class DiracModeBasis {
public:
    DiracModeBasis(Frame frame, double kappa, double mass_energy, const FockSpace& space)
        : frame_(frame), kappa_(kappa), mu_(mass_energy), n_(space.n_max) {
        if (!is_dirac_frame(frame)) {
            throw InvalidArgument("DiracModeBasis: frame must be a Dirac frame");
        }
        Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(momentum_op(space));
        V_ = es.eigenvectors();
        p_ = es.eigenvalues();
    }

    int n_max() const { return n_; }
    double kappa() const { return kappa_; }
    double mass_energy() const { return mu_; }
    const Eigen::VectorXd& momenta() const { return p_; }

    std::pair<StateVector, StateVector> to_modes(const QuantumState& psi) const {
        return {V_.adjoint() * psi.spin_block(0), V_.adjoint() * psi.spin_block(1)};
    }

    QuantumState from_modes(const StateVector& up, const StateVector& dn) const {
        StateVector amps(2 * n_);
        amps.segment(0, n_).noalias() = V_ * up;
        amps.segment(n_, n_).noalias() = V_ * dn;
        return QuantumState(n_, std::move(amps));
    }

    /// Apply exp(-i·H_flat·tau) in mode space.
    void propagate_modes(const StateVector& up_in, const StateVector& dn_in, double tau,
                         StateVector& up_out, StateVector& dn_out) const {
        up_out.resize(n_);
        dn_out.resize(n_);
        for (int k = 0; k < n_; ++k) {
            const double kp = kappa_ * p_(k);
            const double energy = std::hypot(kp, mu_);
            const double phase = energy * tau;
            const double c1 = std::cos(phase);
            const double s1 = (std::abs(phase) < 1e-8)
                                  ? tau
                                  : std::sin(phase) / energy;
            // 2x2 block: chiral h = kp·σz - μ·σx, hadamard h = kp·σx - μ·σz
            Complex h00, h01;
            if (frame_ == Frame::DiracChiral) {
                h00 = kp;
                h01 = -mu_;
            } else {
                h00 = -mu_;
                h01 = kp;
            }
            const Complex u = up_in(k);
            const Complex d = dn_in(k);
            up_out(k) = c1 * u - kI * s1 * (h00 * u + h01 * d);
            dn_out(k) = c1 * d - kI * s1 * (h01 * u - h00 * d);
        }
    }

    QuantumState evolve_flat(const QuantumState& psi0, double tau) const {
        auto [up, dn] = to_modes(psi0);
        StateVector up_t, dn_t;
        propagate_modes(up, dn, tau, up_t, dn_t);
        return from_modes(up_t, dn_t);
    }

private:
    Frame frame_;
    double kappa_;
    double mu_;
    int n_;
    OperatorMatrix V_;
    Eigen::VectorXd p_;
};

/// Exact propagation of a Dirac-frame spec via the commuting factorization
/// U(t) = exp(-i·cA·s(t)·P)·exp(-i·H_flat·t).  The flat factor is applied in
/// the momentum eigenbasis; the warp factor is a rigid translation by
/// cA·s(t) and enters the recorded observables in closed form, which keeps
/// the stored state clear of the truncation boundary.
inline TrajectoryRecord evolve_exact(const HamiltonianSpec& spec, const QuantumState& state,
                                     const PropagatorConfig& config,
                                     const SnapshotRequest& snapshots = {}) {
    if (!is_dirac_frame(spec.frame)) {
        throw InvalidArgument("evolve_exact: ion frames do not commute across time; "
                              "use evolve_timeordered");
    }
    config.validate();
    const DiracParams& d = spec.dirac_params();
    const double kappa = d.kappa();
    DiracModeBasis basis(spec.frame, kappa, d.mass_energy(), spec.space);
    auto [up0, dn0] = basis.to_modes(state);

    TrajectoryRecord rec;
    rec.backend = backend_name(Backend::ExactCommuting);
    rec.n_max = spec.space.n_max;
    rec.dt = config.sample_interval;

    StateVector up_t, dn_t;
    for (double t : config.sample_times()) {
        basis.propagate_modes(up0, dn0, t, up_t, dn_t);
        const QuantumState psi = basis.from_modes(up_t, dn_t);
        detail::append_sample(rec, t, detail::compute_observables(psi), kappa,
                              d.shift(t), config);
    }

    for (double ts : snapshots.times) {
        basis.propagate_modes(up0, dn0, ts, up_t, dn_t);
        const QuantumState psi = basis.from_modes(up_t, dn_t);
        const double shift = d.shift(ts);
        const auto grid = drift_centered_grid(kappa, shift, ts, snapshots.n_points,
                                              snapshots.half_width_X);
        rec.snapshots.push_back(wavepacket_density(psi, grid, kappa, ts, shift));
    }
    return rec;
}

namespace detail {

/// w ≈ exp(-i·dt·H)·v by a Lanczos subspace with full reorthogonalization.
/// The small exponential is unitary, so the result's norm equals ‖v‖ up to
/// roundoff regardless of subspace size; the returned estimate certifies
/// accuracy.
template <typename MatVec>
StateVector krylov_exp_apply(const MatVec& apply_h, const StateVector& v, double dt,
                             double tol, int m_max = 48) {
    const double nv = v.norm();
    if (nv == 0.0) return v;
    const Eigen::Index dim = v.size();
    std::vector<StateVector> basis;
    basis.reserve(16);
    basis.push_back(v / nv);
    std::vector<double> alpha, beta;
    StateVector w(dim);

    auto small_exp = [&](int m, Eigen::VectorXcd& y) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        const Eigen::VectorXd lam = es.eigenvalues();
        const Eigen::MatrixXd Q = es.eigenvectors();
        Eigen::VectorXcd phases(m);
        for (int i = 0; i < m; ++i) phases(i) = std::exp(-kI * lam(i) * dt);
        y = Q.cast<Complex>() * phases.cwiseProduct(Q.row(0).transpose().cast<Complex>());
    };

    Eigen::VectorXcd y;
    for (int j = 0; j < m_max; ++j) {
        apply_h(basis[j], w);
        double a = (basis[j].dot(w)).real();
        alpha.push_back(a);
        w -= a * basis[j];
        if (j > 0) w -= beta[j - 1] * basis[j - 1];
        for (std::size_t i = 0; i < basis.size(); ++i) {
            w -= basis[i].dot(w) * basis[i];
        }
        const double b = w.norm();
        const int m = j + 1;
        if (b < 1e-14) {  // happy breakdown: subspace is invariant
            small_exp(m, y);
            break;
        }
        if (m >= 3 || m == m_max) {
            small_exp(m, y);
            const double err = std::abs(b * dt * y(m - 1));
            if (err < tol) break;
            if (m == m_max) {
                throw StepSizeError("krylov_exp_apply: no convergence at subspace size " +
                                    std::to_string(m_max) + "; reduce dt");
            }
        }
        beta.push_back(b);
        basis.push_back(w / b);
    }

    StateVector out = StateVector::Zero(dim);
    for (Eigen::Index i = 0; i < y.size(); ++i) out += y(i) * basis[i];
    return nv * out;
}

} // namespace detail

/// Hook applied to a copy of the state before observables are taken; used
/// to unwind lab-frame transformations at sample times.
using ObservableFrame = std::function<void(double, StateVector&)>;

/// Generic time-ordered propagation with the midpoint-exponential rule
/// U_step = exp(-i·H(t + dt/2)·dt), the step applied through a Krylov
/// subspace on the banded term decomposition.
inline TrajectoryRecord evolve_timeordered(const HamiltonianSpec& spec,
                                           const QuantumState& state,
                                           const PropagatorConfig& config,
                                           const SnapshotRequest& snapshots = {},
                                           const ObservableFrame& observable_frame = {}) {
    config.validate();
    if (config.dt <= 0.0) throw InvalidArgument("evolve_timeordered: dt required");
    const HamiltonianTerms terms = hamiltonian_terms(spec);

    const double hnorm = terms.norm_bound(config.t_max);
    if (config.dt * hnorm > 0.1 * (1.0 + 1e-9)) {
        throw StepSizeError("evolve_timeordered: dt·‖H‖ = " +
                            std::to_string(config.dt * hnorm) + " exceeds 0.1");
    }
    if (spec.frame == Frame::IonLab) {
        const double dt_qubit = 2.0 * M_PI / (50.0 * spec.ion_params().omega0);
        if (config.dt > dt_qubit * (1.0 + 1e-9)) {
            throw StepSizeError("evolve_timeordered: dt does not resolve the qubit "
                                "splitting (need dt <= 2π/(50·ω₀))");
        }
    }

    const double kappa = is_dirac_frame(spec.frame)
                             ? spec.dirac_params().kappa()
                             : spec.ion_params().Omega0 / std::sqrt(2.0);

    TrajectoryRecord rec;
    rec.backend = backend_name(Backend::TimeOrdered);
    rec.n_max = spec.space.n_max;

    const int n_sub = std::max(1, static_cast<int>(std::ceil(
                                      config.sample_interval / config.dt - 1e-9)));
    const double dt = config.sample_interval / n_sub;
    rec.dt = dt;

    const auto times = config.sample_times();
    std::vector<double> frozen(terms.matrices.size());
    auto apply_frozen = [&](const StateVector& x, StateVector& y) {
        y.setZero();
        for (std::size_t k = 0; k < terms.matrices.size(); ++k) {
            if (frozen[k] != 0.0) y.noalias() += frozen[k] * (terms.matrices[k] * x);
        }
    };

    auto record_at = [&](double t, const StateVector& amps) {
        StateVector view = amps;
        if (observable_frame) observable_frame(t, view);
        const QuantumState psi(spec.space.n_max, std::move(view));
        detail::append_sample(rec, t, detail::compute_observables(psi), kappa, 0.0,
                              config);
    };

    // snapshot times land on the nearest sample of the stepped run
    std::vector<std::size_t> snap_at;
    if (is_dirac_frame(spec.frame)) {
        for (double ts : snapshots.times) {
            const auto idx = static_cast<std::size_t>(
                std::llround(ts / config.sample_interval));
            snap_at.push_back(std::min(idx, times.size() - 1));
        }
    }
    auto snapshot_at = [&](std::size_t s, const StateVector& amps) {
        for (std::size_t k = 0; k < snap_at.size(); ++k) {
            if (snap_at[k] != s) continue;
            const QuantumState snap_psi(spec.space.n_max, amps);
            const double shift = spec.dirac_params().shift(times[s]);
            const auto grid = drift_centered_grid(kappa, shift, times[s],
                                                  snapshots.n_points,
                                                  snapshots.half_width_X);
            // state carries its own drift; no analytic offset
            rec.snapshots.push_back(
                wavepacket_density(snap_psi, grid, kappa, times[s], 0.0));
        }
    };

    StateVector psi = state.amplitudes;
    record_at(0.0, psi);
    snapshot_at(0, psi);
    const double krylov_tol = 1e-13;

    for (std::size_t s = 1; s < times.size(); ++s) {
        const double t0 = times[s - 1];
        for (int i = 0; i < n_sub; ++i) {
            const double t_mid = t0 + (i + 0.5) * dt;
            for (std::size_t k = 0; k < terms.matrices.size(); ++k) {
                frozen[k] = terms.coeffs[k](t_mid);
            }
            psi = detail::krylov_exp_apply(apply_frozen, psi, dt, krylov_tol);
        }
        record_at(times[s], psi);
        snapshot_at(s, psi);
    }
    return rec;
}

/// Closed-form per-momentum-mode evolution of the continuum problem; the
/// independent cross-check for the Fock-space backends.  Works in the
/// chiral frame.
inline TrajectoryRecord evolve_momentum_oracle(const DiracParams& dirac,
                                               const InitialStateSpec& init,
                                               const PropagatorConfig& config,
                                               const SnapshotRequest& snapshots = {},
                                               const MomentumGrid& grid = {}) {
    config.validate();
    const MomentumState phi0 = momentum_representation(init, grid);
    const double kappa = dirac.kappa();
    const double mu = dirac.mass_energy();
    const double dp = grid.spacing();
    const int npts = grid.n_points;
    const double w2 = init.width * init.width;

    TrajectoryRecord rec;
    rec.backend = backend_name(Backend::MomentumOracle);
    rec.n_max = 0;
    rec.dt = config.sample_interval;

    // Flat factor U(p,t)·φ₀(p) and its analytic p-derivative; the warp phase
    // exp(-i·κ·s(t)·p) is kept symbolic since it cancels from every spin sum.
    Eigen::Matrix2Xcd flat(2, npts), dflat(2, npts);

    auto propagate = [&](double t) {
        for (int j = 0; j < npts; ++j) {
            const double p = grid.point(j);
            const double kp = kappa * p;
            const double energy = std::hypot(kp, mu);
            const double phase = energy * t;
            const double c1 = std::cos(phase);
            const double s1 = (std::abs(phase) < 1e-4)
                                  ? t * (1.0 - phase * phase / 6.0)
                                  : std::sin(phase) / energy;
            const double dEdp = (energy > 0.0) ? kappa * kp / energy : 0.0;
            const double dc1 = -std::sin(phase) * t * dEdp;
            // d/dE [sin(Et)/E] = (t·cos(Et) - sin(Et)/E)/E; series near 0
            const double ds1 = (std::abs(phase) < 1e-4)
                                   ? -dEdp * energy * t * t * t / 3.0
                                   : dEdp * (t * c1 - s1) / energy;

            const Complex f0 = phi0.amplitude(0, j);
            const Complex f1 = phi0.amplitude(1, j);
            // chiral h(p) = kp·σz - μ·σx; U = c1·I - i·s1·h
            const Complex u0 = c1 * f0 - kI * s1 * (kp * f0 - mu * f1);
            const Complex u1 = c1 * f1 - kI * s1 * (-mu * f0 - kp * f1);
            // dU/dp·φ0 + U·dφ0/dp with Gaussian dφ0/dp = (-w²p - iX₀)·φ0
            const Complex g = Complex(-w2 * p, -init.center_X);
            const Complex df0 = g * f0;
            const Complex df1 = g * f1;
            const Complex du0 = dc1 * f0 - kI * (ds1 * (kp * f0 - mu * f1) +
                                                 s1 * (kappa * f0)) +
                                c1 * df0 - kI * s1 * (kp * df0 - mu * df1);
            const Complex du1 = dc1 * f1 - kI * (ds1 * (-mu * f0 - kp * f1) +
                                                 s1 * (-kappa * f1)) +
                                c1 * df1 - kI * s1 * (-mu * df0 - kp * df1);
            flat(0, j) = u0;
            flat(1, j) = u1;
            dflat(0, j) = du0;
            dflat(1, j) = du1;
        }
        return integrated_shift(dirac.profile, t);
    };

    for (double t : config.sample_times()) {
        const double shift = propagate(t);
        const double ks = kappa * shift;
        detail::Observables obs;
        Complex cross{0.0, 0.0};
        double x1 = 0.0, x2 = 0.0;
        for (int j = 0; j < npts; ++j) {
            const Complex u0 = flat(0, j);
            const Complex u1 = flat(1, j);
            const double n0 = std::norm(u0);
            const double n1 = std::norm(u1);
            obs.norm2 += n0 + n1;
            obs.sz += n0 - n1;
            cross += std::conj(u0) * u1;
            // i∂_p(warp·flat) = warp·(κs·flat + i·∂_p flat); warp drops out
            const Complex w0 = ks * u0 + kI * dflat(0, j);
            const Complex w1 = ks * u1 + kI * dflat(1, j);
            x1 += (std::conj(u0) * w0).real() + (std::conj(u1) * w1).real();
            x2 += std::norm(w0) + std::norm(w1);
        }
        obs.sx = 2.0 * cross.real() * dp;
        obs.sy = 2.0 * cross.imag() * dp;
        obs.sz *= dp;
        obs.norm2 *= dp;
        obs.mean_X = x1 * dp;
        obs.mean_X2 = x2 * dp;
        obs.boundary =
            (flat.col(0).squaredNorm() + flat.col(npts - 1).squaredNorm()) * dp;
        detail::append_sample(rec, t, obs, kappa, 0.0, config);
    }

    for (double ts : snapshots.times) {
        const double shift = propagate(ts);
        const auto xgrid = drift_centered_grid(kappa, shift, ts, snapshots.n_points,
                                               snapshots.half_width_X);
        DensitySnapshot snap;
        snap.t = ts;
        snap.x_over_c = xgrid;
        snap.density.resize(xgrid.size());
        const double ft_norm = dp / std::sqrt(2.0 * M_PI);
        for (std::size_t i = 0; i < xgrid.size(); ++i) {
            const double x_flat = kappa * (xgrid[i] - shift);
            Complex acc0{0.0, 0.0}, acc1{0.0, 0.0};
            for (int j = 0; j < npts; ++j) {
                // warp phase folded into the evaluation point
                const Complex e = std::exp(kI * grid.point(j) * x_flat);
                acc0 += e * flat(0, j);
                acc1 += e * flat(1, j);
            }
            snap.density[i] =
                (std::norm(acc0) + std::norm(acc1)) * ft_norm * ft_norm * kappa;
        }
        rec.snapshots.push_back(std::move(snap));
    }
    return rec;
}

/// Central second differences of ⟨x⟩/c over a uniformly sampled record;
/// endpoints one-sided.  Units 1/s.
inline std::vector<std::pair<double, double>> acceleration_series(
    const TrajectoryRecord& rec) {
    const std::size_t n = rec.size();
    if (n < 5) throw InvalidArgument("acceleration_series: need at least 5 samples");
    const double h = rec.times[1] - rec.times[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(rec.times[i] - rec.times[i - 1] - h) > 1e-9 * h) {
            throw InvalidArgument("acceleration_series: sampling must be uniform");
        }
    }
    const auto& f = rec.mean_x_over_c;
    std::vector<std::pair<double, double>> out(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        out[i] = {rec.times[i], (f[i - 1] - 2.0 * f[i] + f[i + 1]) / (h * h)};
    }
    out[0] = {rec.times[0], (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h)};
    out[n - 1] = {rec.times[n - 1],
                  (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (h * h)};
    return out;
}

/// Right-hand side of the acceleration identity on the x/c axis:
/// -2·mc²·Re⟨ψ₀| e^{2i·H_flat·t} σ_y |ψ₀⟩ (chiral frame).
inline std::vector<double> acceleration_identity_rhs(const DiracModeBasis& basis,
                                                     const QuantumState& psi0,
                                                     const std::vector<double>& times) {
    const int n = psi0.n_max;
    StateVector sy_psi(2 * n);
    sy_psi.segment(0, n) = -kI * psi0.spin_block(1);
    sy_psi.segment(n, n) = kI * psi0.spin_block(0);
    const QuantumState seed(n, std::move(sy_psi));
    auto [up0, dn0] = basis.to_modes(seed);

    std::vector<double> rhs(times.size());
    StateVector up_t, dn_t;
    for (std::size_t i = 0; i < times.size(); ++i) {
        // e^{2iHt} = exp(-i·H·(-2t))
        basis.propagate_modes(up0, dn0, -2.0 * times[i], up_t, dn_t);
        const QuantumState w = basis.from_modes(up_t, dn_t);
        const Complex val = psi0.amplitudes.dot(w.amplitudes);
        rhs[i] = -2.0 * basis.mass_energy() * val.real();
    }
    return rhs;
}

/// exp(α·a† - α*·a) on the truncated space.
inline OperatorMatrix displacement_operator(const FockSpace& space, Complex alpha) {
    const OperatorMatrix a = annihilation(space);
    const OperatorMatrix k = kI * (alpha * a.adjoint() - std::conj(alpha) * a);
    Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(k);
    const Eigen::VectorXd lam = es.eigenvalues();
    Eigen::VectorXcd phases(space.n_max);
    for (int i = 0; i < space.n_max; ++i) phases(i) = std::exp(-kI * lam(i));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Observable-frame hook that undoes the lab-frame book-keeping: the
/// displacement D[-η] followed by the rotation generated by
/// H₀ = (ω₀-Δ)/2·σz + ν·a†a.
inline ObservableFrame make_lab_unwinding(const IonParams& ion, const FockSpace& space,
                                          std::optional<Complex> eta_override = {}) {
    const Complex eta = eta_override.value_or(Complex(ion.eta, 0.0));
    const OperatorMatrix d_minus = displacement_operator(space, -eta);
    const double half_split = 0.5 * (ion.omega0 - ion.Delta);
    const double nu = ion.nu;
    const int n = space.n_max;
    return [d_minus, half_split, nu, n](double t, StateVector& amps) {
        StateVector tmp(2 * n);
        tmp.segment(0, n).noalias() = d_minus * amps.segment(0, n);
        tmp.segment(n, n).noalias() = d_minus * amps.segment(n, n);
        for (int s = 0; s < 2; ++s) {
            const double spin_phase = (s == 0 ? half_split : -half_split) * t;
            for (int m = 0; m < n; ++m) {
                tmp(s * n + m) *= std::exp(kI * (spin_phase + nu * m * t));
            }
        }
        amps = std::move(tmp);
    };
}

/// The effective ion Hamiltonian is the Hadamard-frame Dirac Hamiltonian
/// under the parameter correspondence; evolving that spec is the exact
/// effective-frame propagation.
inline HamiltonianSpec effective_to_dirac_spec(const IonParams& ion, const FockSpace& space) {
    return HamiltonianSpec::dirac_hadamard(ion_to_dirac(ion), space);
}

} // namespace warpsim
