#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "warpsim/errors.hpp"

namespace warpsim {

// Simulation units used throughout: hbar = 1, reference mass m0 = 1, and
// positions measured in units of the oscillator ground-state length, so the
// dimensionless quadratures are X = (a + a†)/√2 and P = -i(a - a†)/√2.
// Trajectories are additionally reported on the x/c axis (seconds), which is
// independent of the length unit.

/// Warp velocity profile v_s(t).  Either a constant, or the exact analytic
/// derivative of a polynomial bubble trajectory x_s(t) (coefficients in
/// ascending powers of t; t in seconds, x_s in units of c·seconds).
struct AlcubierreProfile {
    enum class Kind { Constant, PolynomialTrajectory };

    Kind kind = Kind::Constant;
    double constant_vs = 0.0;
    std::vector<double> trajectory_coeffs;

    static AlcubierreProfile constant(double vs) {
        AlcubierreProfile p;
        p.kind = Kind::Constant;
        p.constant_vs = vs;
        return p;
    }

    static AlcubierreProfile polynomial(std::vector<double> coeffs) {
        AlcubierreProfile p;
        p.kind = Kind::PolynomialTrajectory;
        p.trajectory_coeffs = std::move(coeffs);
        return p;
    }

    bool is_flat() const {
        if (kind == Kind::Constant) return constant_vs == 0.0;
        for (std::size_t k = 1; k < trajectory_coeffs.size(); ++k) {
            if (trajectory_coeffs[k] != 0.0) return false;
        }
        return true;
    }
};

/// v_s(t); for polynomial trajectories this is the analytic derivative.
inline double velocity_profile(const AlcubierreProfile& profile, double t) {
    if (profile.kind == AlcubierreProfile::Kind::Constant) {
        return profile.constant_vs;
    }
    // Horner evaluation of d/dt sum_k c_k t^k = sum_{k>=1} k c_k t^{k-1}.
    const auto& c = profile.trajectory_coeffs;
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
        v = v * t + static_cast<double>(k) * c[k];
    }
    return v;
}

/// s(t) = ∫₀ᵗ v_s dτ, evaluated as the exact polynomial antiderivative
/// x_s(t) - x_s(0); never by quadrature.
inline double integrated_shift(const AlcubierreProfile& profile, double t) {
    if (profile.kind == AlcubierreProfile::Kind::Constant) {
        return profile.constant_vs * t;
    }
    // x_s(t) - x_s(0) = t · sum_{k>=1} c_k t^{k-1}, Horner form.
    const auto& c = profile.trajectory_coeffs;
    double x = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
        x = x * t + c[k];
    }
    return x * t;
}

/// Lightcone edge slopes (1/c)·dx/dt, returned as (v_s - 1, v_s + 1).
inline std::pair<double, double> lightcone_slopes(double vs) {
    return {vs - 1.0, vs + 1.0};
}

/// Opening angle of the lightcone, arctan(v_s+1) - arctan(v_s-1).
inline double lightcone_angle(double vs) {
    return std::atan(vs + 1.0) - std::atan(vs - 1.0);
}

/// Parameters of the simulated Dirac particle.  mass_m may carry either
/// sign; only |m| affects observables.  c_sim is the simulated light speed
/// in oscillator-length units per second.
struct DiracParams {
    double c_sim = 1.0;
    double A = 1.0;
    double mass_m = 0.0;
    double hbar = 1.0;
    AlcubierreProfile profile;

    DiracParams() = default;
    DiracParams(double c_sim, double A, double mass_m, AlcubierreProfile profile)
        : c_sim(c_sim), A(A), mass_m(mass_m), profile(std::move(profile)) {
        if (c_sim <= 0.0) throw InvalidArgument("DiracParams: c_sim must be positive");
        if (A <= 0.0) throw InvalidArgument("DiracParams: A must be positive");
    }

    /// Momentum coupling c·A, the rate of ⟨X⟩ motion per unit slope.
    double kappa() const { return c_sim * A; }

    /// Rest energy m·c² (rad/s); sign follows mass_m.
    double mass_energy() const { return mass_m * c_sim * c_sim; }

    double velocity(double t) const { return velocity_profile(profile, t); }
    double shift(double t) const { return integrated_shift(profile, t); }
};

/// Trapped-ion parameter frame.  The sideband resonance
/// omega_b - nu = omega_r + nu = omega0 - Delta is enforced at construction;
/// the strength hierarchy max(|Delta|,|Omega_p|,|Omega0|) << nu << omega0 and
/// eta << 1 are checked and recorded as warnings, never failures.
struct IonParams {
    double nu = 0.0;
    double omega0 = 0.0;
    double omega_b = 0.0;
    double omega_r = 0.0;
    double Omega0 = 0.0;
    double Delta = 0.0;
    double eta = 0.0;
    double m0 = 1.0;
    AlcubierreProfile profile;
    // Constant parametric amplitude; a profile-driven frame derives
    // Omega_p(t) = v_s(t)·Omega0/(4·eta) instead.
    double omega_p_const = 0.0;
    bool omega_p_from_profile = false;

    double hierarchy_ratio_drive = 0.0;  // max(|Delta|,|Omega_p(0)|,|Omega0|)/nu
    double hierarchy_ratio_qubit = 0.0;  // nu/omega0
    std::vector<std::string> warnings;

    IonParams() = default;

    IonParams(double nu, double omega0, double Omega0, double Delta, double eta,
              AlcubierreProfile profile, double warn_threshold = 0.05)
        : nu(nu), omega0(omega0), Omega0(Omega0), Delta(Delta), eta(eta),
          profile(std::move(profile)), omega_p_from_profile(true) {
        finish_construction(warn_threshold);
    }

    /// Ion frame with a constant parametric amplitude Omega_p.
    static IonParams with_constant_drive(double nu, double omega0, double Omega0,
                                         double Omega_p, double Delta, double eta,
                                         double warn_threshold = 0.05) {
        if (Omega0 == 0.0) throw InvalidArgument("IonParams: Omega0 must be nonzero");
        IonParams p;
        p.nu = nu;
        p.omega0 = omega0;
        p.Omega0 = Omega0;
        p.Delta = Delta;
        p.eta = eta;
        p.profile = AlcubierreProfile::constant(4.0 * eta * Omega_p / Omega0);
        p.omega_p_const = Omega_p;
        p.omega_p_from_profile = false;
        p.finish_construction(warn_threshold);
        return p;
    }

    /// Parametric modulation amplitude at time t.
    double omega_p(double t) const {
        if (!omega_p_from_profile) return omega_p_const;
        const double vs = velocity_profile(profile, t);
        if (vs == 0.0) return 0.0;
        if (eta == 0.0) {
            throw InvalidArgument("IonParams: nonzero v_s requires nonzero eta");
        }
        return vs * Omega0 / (4.0 * eta);
    }

private:
    void finish_construction(double warn_threshold) {
        if (nu <= 0.0) throw InvalidArgument("IonParams: nu must be positive");
        if (omega0 <= 0.0) throw InvalidArgument("IonParams: omega0 must be positive");
        omega_b = omega0 - Delta + nu;
        omega_r = omega0 - Delta - nu;
        const double omega_p0 = std::abs(omega_p(0.0));
        hierarchy_ratio_drive =
            std::max({std::abs(Delta), omega_p0, std::abs(Omega0)}) / nu;
        hierarchy_ratio_qubit = nu / omega0;
        if (hierarchy_ratio_drive > warn_threshold) {
            warnings.push_back("drive/trap hierarchy ratio " +
                               std::to_string(hierarchy_ratio_drive) + " exceeds " +
                               std::to_string(warn_threshold));
        }
        if (hierarchy_ratio_qubit > warn_threshold) {
            warnings.push_back("trap/qubit hierarchy ratio " +
                               std::to_string(hierarchy_ratio_qubit) + " exceeds " +
                               std::to_string(warn_threshold));
        }
        if (std::abs(eta) > 0.1) {
            warnings.push_back("displacement parameter eta = " + std::to_string(eta) +
                               " exceeds 0.1");
        }
    }
};

/// Map ion parameters onto the simulated Dirac frame:
/// v_s(t) = 4·eta·Omega_p(t)/Omega0, c = Omega0/(√2·A), m·c² = -Delta/2.
inline DiracParams ion_to_dirac(const IonParams& ion, double A = 1.0) {
    if (ion.Omega0 == 0.0) {
        throw InvalidArgument("ion_to_dirac: correspondence undefined at Omega0 = 0");
    }
    const double c_sim = ion.Omega0 / (std::sqrt(2.0) * A);
    const double mass_m = -ion.Delta / (2.0 * c_sim * c_sim);
    return DiracParams(c_sim, A, mass_m, ion.profile);
}

/// Inverse correspondence.  eta is resolved against the chosen reference
/// drive amplitude omega_p_ref via eta = v_s(0)·Omega0/(4·Omega_p); a flat
/// profile leaves eta = 0 and needs no drive.
inline IonParams dirac_to_ion(const DiracParams& dirac, double nu, double Omega0,
                              double omega_p_ref, double omega0 = 0.0) {
    if (Omega0 <= 0.0) throw InvalidArgument("dirac_to_ion: Omega0 must be positive");
    if (nu <= 0.0) throw InvalidArgument("dirac_to_ion: nu must be positive");
    const double vs0 = velocity_profile(dirac.profile, 0.0);
    double eta = 0.0;
    if (!dirac.profile.is_flat()) {
        if (omega_p_ref == 0.0) {
            throw InvalidArgument(
                "dirac_to_ion: nonzero v_s cannot be driven with Omega_p = 0");
        }
        eta = vs0 * Omega0 / (4.0 * omega_p_ref);
    }
    const double Delta = -2.0 * dirac.mass_m * dirac.c_sim * dirac.c_sim;
    // Default qubit splitting sits well inside the nu << omega0 hierarchy.
    if (omega0 <= 0.0) omega0 = nu * 300.0;
    return IonParams(nu, omega0, Omega0, Delta, eta, dirac.profile);
}

} // namespace warpsim
