#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "warpsim/errors.hpp"
#include "warpsim/operators.hpp"
#include "warpsim/spacetime.hpp"

namespace warpsim {

enum class Frame { DiracChiral, DiracHadamard, IonLab, IonEffective };

inline bool is_dirac_frame(Frame f) {
    return f == Frame::DiracChiral || f == Frame::DiracHadamard;
}

inline const char* frame_name(Frame f) {
    switch (f) {
        case Frame::DiracChiral: return "dirac_chiral";
        case Frame::DiracHadamard: return "dirac_hadamard";
        case Frame::IonLab: return "ion_lab";
        case Frame::IonEffective: return "ion_effective";
    }
    return "?";
}

/// Which Hamiltonian to build, over which truncated space.
struct HamiltonianSpec {
    Frame frame;
    FockSpace space;
    std::optional<DiracParams> dirac;
    std::optional<IonParams> ion;

    static HamiltonianSpec dirac_chiral(DiracParams p, FockSpace s) {
        return {Frame::DiracChiral, s, std::move(p), std::nullopt};
    }
    static HamiltonianSpec dirac_hadamard(DiracParams p, FockSpace s) {
        return {Frame::DiracHadamard, s, std::move(p), std::nullopt};
    }
    static HamiltonianSpec ion_lab(IonParams p, FockSpace s) {
        return {Frame::IonLab, s, std::nullopt, std::move(p)};
    }
    static HamiltonianSpec ion_effective(IonParams p, FockSpace s) {
        return {Frame::IonEffective, s, std::nullopt, std::move(p)};
    }

    const DiracParams& dirac_params() const {
        if (!dirac) throw InvalidArgument("HamiltonianSpec: missing Dirac parameters");
        return *dirac;
    }
    const IonParams& ion_params() const {
        if (!ion) throw InvalidArgument("HamiltonianSpec: missing ion parameters");
        return *ion;
    }
};

/// Dirac Hamiltonian at time t.  Chiral frame:
///   H = cA·σz⊗P + cA·v_s(t)·I⊗P - mc²·σx⊗I,
/// Hadamard frame (σx ↔ σz rotated):
///   H = cA·σx⊗P + cA·v_s(t)·I⊗P - mc²·σz⊗I.
inline OperatorMatrix dirac_hamiltonian(const HamiltonianSpec& spec, double t) {
    if (!is_dirac_frame(spec.frame)) {
        throw InvalidArgument("dirac_hamiltonian: spec frame is not a Dirac frame");
    }
    const DiracParams& d = spec.dirac_params();
    const OperatorMatrix P = momentum_op(spec.space);
    const OperatorMatrix I_f = OperatorMatrix::Identity(spec.space.n_max, spec.space.n_max);
    const OperatorMatrix I_s = OperatorMatrix::Identity(2, 2);
    const double kappa = d.kappa();
    const double vs = d.velocity(t);

    const PauliAxis momentum_axis =
        spec.frame == Frame::DiracChiral ? PauliAxis::Z : PauliAxis::X;
    const PauliAxis mass_axis =
        spec.frame == Frame::DiracChiral ? PauliAxis::X : PauliAxis::Z;

    return kappa * tensor(pauli(momentum_axis), P) + kappa * vs * tensor(I_s, P) -
           d.mass_energy() * tensor(pauli(mass_axis), I_f);
}

/// Flat-spacetime Dirac Hamiltonian Ac·σz⊗P - mc²·σx⊗I (chiral frame,
/// v_s forced to zero).
inline OperatorMatrix flat_hamiltonian(const DiracParams& dirac, const FockSpace& space) {
    DiracParams flat = dirac;
    flat.profile = AlcubierreProfile::constant(0.0);
    return dirac_hamiltonian(HamiltonianSpec::dirac_chiral(flat, space), 0.0);
}

/// Lab-frame trapped-ion Hamiltonian
///   H = (ω₀/2)σz + ν a†a + Ω_p(t)·sin(νt)·(a+a†)²
///       + Ω₀·{ |↑⟩⟨↓| ⊗ [a†·sin(ω_b t) - a·sin(ω_r t)] + h.c. }.
inline OperatorMatrix ion_lab_hamiltonian(const IonParams& ion, const FockSpace& space,
                                          double t) {
    const OperatorMatrix a = annihilation(space);
    const OperatorMatrix ad = a.adjoint();
    const OperatorMatrix I_f = OperatorMatrix::Identity(space.n_max, space.n_max);
    OperatorMatrix sigma_plus(2, 2);  // |↑⟩⟨↓| with |↑⟩ the first basis state
    sigma_plus << 0, 1, 0, 0;

    const OperatorMatrix quad = a + ad;
    OperatorMatrix h = 0.5 * ion.omega0 * tensor(pauli(PauliAxis::Z), I_f) +
                       ion.nu * tensor(OperatorMatrix::Identity(2, 2), ad * a) +
                       ion.omega_p(t) * std::sin(ion.nu * t) *
                           tensor(OperatorMatrix::Identity(2, 2), quad * quad);
    const OperatorMatrix drive =
        ion.Omega0 * tensor(sigma_plus, std::sin(ion.omega_b * t) * ad -
                                            std::sin(ion.omega_r * t) * a);
    h += drive + drive.adjoint();
    return h;
}

/// Effective interaction-picture ion Hamiltonian
///   H = (Δ/2)σz - 2iη·Ω_p(t)·(a-a†) + (Ω₀/2i)·(a-a†)·σx.
inline OperatorMatrix ion_effective_hamiltonian(const IonParams& ion,
                                                const FockSpace& space, double t) {
    const OperatorMatrix a = annihilation(space);
    const OperatorMatrix amad = a - a.adjoint();
    const OperatorMatrix I_f = OperatorMatrix::Identity(space.n_max, space.n_max);
    return 0.5 * ion.Delta * tensor(pauli(PauliAxis::Z), I_f) -
           2.0 * kI * ion.eta * ion.omega_p(t) *
               tensor(OperatorMatrix::Identity(2, 2), amad) -
           0.5 * kI * ion.Omega0 * tensor(pauli(PauliAxis::X), amad);
}

/// Dispatch on the spec frame.
inline OperatorMatrix build_hamiltonian(const HamiltonianSpec& spec, double t) {
    switch (spec.frame) {
        case Frame::DiracChiral:
        case Frame::DiracHadamard:
            return dirac_hamiltonian(spec, t);
        case Frame::IonLab:
            return ion_lab_hamiltonian(spec.ion_params(), spec.space, t);
        case Frame::IonEffective:
            return ion_effective_hamiltonian(spec.ion_params(), spec.space, t);
    }
    throw InvalidArgument("build_hamiltonian: unknown frame");
}

/// H(t) decomposed as Σ_k f_k(t)·M_k with constant Hermitian M_k and real
/// coefficient functions; this is what the time-ordered stepper consumes.
struct HamiltonianTerms {
    int dim = 0;
    std::vector<SparseOperator> matrices;
    std::vector<std::function<double(double)>> coeffs;

    void apply(double t, const StateVector& x, StateVector& y) const {
        y.setZero();
        for (std::size_t k = 0; k < matrices.size(); ++k) {
            const double c = coeffs[k](t);
            if (c != 0.0) y.noalias() += c * (matrices[k] * x);
        }
    }

    OperatorMatrix assemble(double t) const {
        OperatorMatrix h = OperatorMatrix::Zero(dim, dim);
        for (std::size_t k = 0; k < matrices.size(); ++k) {
            h += coeffs[k](t) * OperatorMatrix(matrices[k]);
        }
        return h;
    }

    /// Infinity-norm bound of H(t) maximized over a time sample.
    double norm_bound(double t_max, int samples = 64) const {
        std::vector<double> term_norms;
        term_norms.reserve(matrices.size());
        for (const auto& m : matrices) {
            double max_row = 0.0;
            OperatorMatrix dense(m);
            for (Eigen::Index i = 0; i < dense.rows(); ++i) {
                max_row = std::max(max_row, dense.row(i).cwiseAbs().sum());
            }
            term_norms.push_back(max_row);
        }
        double bound = 0.0;
        for (int s = 0; s <= samples; ++s) {
            const double t = t_max * s / samples;
            double b = 0.0;
            for (std::size_t k = 0; k < matrices.size(); ++k) {
                b += std::abs(coeffs[k](t)) * term_norms[k];
            }
            bound = std::max(bound, b);
        }
        return bound;
    }
};

inline HamiltonianTerms hamiltonian_terms(const HamiltonianSpec& spec) {
    HamiltonianTerms terms;
    terms.dim = spec.space.product_dim();
    const OperatorMatrix a = annihilation(spec.space);
    const OperatorMatrix ad = a.adjoint();
    const OperatorMatrix I_f = OperatorMatrix::Identity(spec.space.n_max, spec.space.n_max);
    const OperatorMatrix I_s = OperatorMatrix::Identity(2, 2);
    auto push = [&](const OperatorMatrix& m, std::function<double(double)> f) {
        terms.matrices.push_back(m.sparseView(1.0, 1e-300));
        terms.coeffs.push_back(std::move(f));
    };

    switch (spec.frame) {
        case Frame::DiracChiral:
        case Frame::DiracHadamard: {
            const DiracParams d = spec.dirac_params();
            const OperatorMatrix P = momentum_op(spec.space);
            const PauliAxis maxis =
                spec.frame == Frame::DiracChiral ? PauliAxis::Z : PauliAxis::X;
            const PauliAxis saxis =
                spec.frame == Frame::DiracChiral ? PauliAxis::X : PauliAxis::Z;
            push(tensor(pauli(maxis), P), [d](double) { return d.kappa(); });
            push(tensor(I_s, P), [d](double t) { return d.kappa() * d.velocity(t); });
            push(tensor(pauli(saxis), I_f), [d](double) { return -d.mass_energy(); });
            break;
        }
        case Frame::IonLab: {
            const IonParams ion = spec.ion_params();
            const OperatorMatrix quad = a + ad;
            OperatorMatrix sigma_plus(2, 2);
            sigma_plus << 0, 1, 0, 0;
            const OperatorMatrix blue = tensor(sigma_plus, ad) + tensor(sigma_plus.adjoint(), a);
            const OperatorMatrix red = tensor(sigma_plus, a) + tensor(sigma_plus.adjoint(), ad);
            push(tensor(pauli(PauliAxis::Z), I_f), [ion](double) { return 0.5 * ion.omega0; });
            push(tensor(I_s, ad * a), [ion](double) { return ion.nu; });
            push(tensor(I_s, quad * quad),
                 [ion](double t) { return ion.omega_p(t) * std::sin(ion.nu * t); });
            push(blue, [ion](double t) { return ion.Omega0 * std::sin(ion.omega_b * t); });
            push(red, [ion](double t) { return -ion.Omega0 * std::sin(ion.omega_r * t); });
            break;
        }
        case Frame::IonEffective: {
            const IonParams ion = spec.ion_params();
            const OperatorMatrix amad = a - ad;
            push(tensor(pauli(PauliAxis::Z), I_f), [ion](double) { return 0.5 * ion.Delta; });
            push(-2.0 * kI * ion.eta * tensor(I_s, amad),
                 [ion](double t) { return ion.omega_p(t); });
            push(-0.5 * kI * tensor(pauli(PauliAxis::X), amad),
                 [ion](double) { return ion.Omega0; });
            break;
        }
    }
    return terms;
}

/// Hadamard spin rotation (σx ↔ σz) on the product space.
inline OperatorMatrix hadamard_map(const FockSpace& space) {
    OperatorMatrix h(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    h << r, r, r, -r;
    return tensor(h, OperatorMatrix::Identity(space.n_max, space.n_max));
}

} // namespace warpsim
