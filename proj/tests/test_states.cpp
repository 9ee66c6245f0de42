#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "warpsim/operators.hpp"
#include "warpsim/states.hpp"

using namespace warpsim;
using Catch::Approx;

namespace {

// Brute-force overlap ⟨n|ψ⟩ by Simpson quadrature, independent of the
// production quadrature path.
double overlap_oracle(const InitialStateSpec& spec, int n) {
    const double lo = spec.center_X - 12.0 * spec.width - 2.0;
    const double hi = spec.center_X + 12.0 * spec.width + 2.0;
    const int npts = 20001;
    const double h = (hi - lo) / (npts - 1);
    double s = 0.0;
    for (int i = 0; i < npts; ++i) {
        const double x = lo + i * h;
        const double w = (i == 0 || i == npts - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * spec.psi(x) * hermite_overlap(n, x);
    }
    return s * h / 3.0;
}

} // namespace

TEST_CASE("ground-width packet at the origin is the vacuum") {
    const FockSpace space(64);
    const auto c = gaussian_fock_coefficients(InitialStateSpec{}, space);
    CHECK(std::abs(c(0) - Complex(1.0, 0.0)) < 1e-14);
    for (int n = 1; n < space.n_max; ++n) CHECK(std::abs(c(n)) < 1e-14);
}

TEST_CASE("displaced ground-width packet gives coherent coefficients") {
    const double alpha = 0.8;
    const InitialStateSpec spec(std::sqrt(2.0) * alpha, 1.0, {1.0, 0.0});
    const FockSpace space(64);
    const auto c = gaussian_fock_coefficients(spec, space);
    for (int n = 0; n < 20; ++n) {
        double expected = std::exp(-0.5 * alpha * alpha);
        for (int k = 1; k <= n; ++k) expected *= alpha / std::sqrt(static_cast<double>(k));
        CHECK(std::abs(c(n) - Complex(expected, 0.0)) < 1e-12);
        CHECK(c(n).real() == Approx(overlap_oracle(spec, n)).margin(1e-9));
    }
}

TEST_CASE("general width coefficients match the quadrature oracle") {
    const InitialStateSpec spec(0.7, 1.3, {1.0, 0.0});
    const FockSpace space(96);
    const auto c = gaussian_fock_coefficients(spec, space);
    CHECK(c.squaredNorm() == Approx(1.0).epsilon(1e-12));
    double raw_mass = 0.0;
    for (int n = 0; n < space.n_max; ++n) {
        const double expected = overlap_oracle(spec, n);
        raw_mass += expected * expected;
        // tail below 1e-8 makes normalization a sub-1e-8 effect
        CHECK(std::abs(c(n).real() - expected) < 2e-8);
    }
    CHECK(raw_mass == Approx(1.0).margin(1e-8));
}

TEST_CASE("insufficient truncation is rejected") {
    const FockSpace space(16);
    const InitialStateSpec far(9.0, 1.0, {1.0, 0.0});
    CHECK_THROWS_AS(gaussian_fock_coefficients(far, space), TruncationError);
}

TEST_CASE("initial state assembly and normalization") {
    const FockSpace space(32);
    const auto up = build_initial_state(InitialStateSpec::spin_up(), space);
    CHECK(up.norm() == Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(up.amplitudes(0) - Complex(1.0, 0.0)) < 1e-14);

    const auto super = build_initial_state(InitialStateSpec::spin_superposition(), space);
    CHECK(super.norm() == Approx(1.0).epsilon(1e-14));
    const OperatorMatrix zi =
        tensor(pauli(PauliAxis::Z), OperatorMatrix::Identity(32, 32));
    CHECK(real_expectation(super, zi) == Approx(0.0).margin(1e-14));

    const OperatorMatrix xi =
        tensor(pauli(PauliAxis::X), OperatorMatrix::Identity(32, 32));
    CHECK(real_expectation(super, xi) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("momentum representation of the ground packet") {
    const MomentumGrid grid;
    const auto phi = momentum_representation(InitialStateSpec{}, grid);
    const double dp = grid.spacing();

    double norm = 0.0, p1 = 0.0, p2 = 0.0;
    for (int j = 0; j < grid.n_points; ++j) {
        const double w = std::norm(phi.envelope(j)) * dp;
        norm += w;
        p1 += grid.point(j) * w;
        p2 += grid.point(j) * grid.point(j) * w;
    }
    CHECK(norm == Approx(1.0).margin(1e-8));
    CHECK(p1 == Approx(0.0).margin(1e-12));
    CHECK(std::sqrt(p2) == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("center shift changes only the momentum-space phase") {
    const MomentumGrid grid;
    const auto centered = momentum_representation(InitialStateSpec{}, grid);
    const auto shifted =
        momentum_representation(InitialStateSpec(1.7, 1.0, {1.0, 0.0}), grid);
    for (int j = 0; j < grid.n_points; j += 97) {
        CHECK(std::abs(shifted.envelope(j)) ==
              Approx(std::abs(centered.envelope(j))).margin(1e-14));
    }
}

TEST_CASE("momentum grid resolution errors") {
    MomentumGrid coarse;
    coarse.n_points = 128;  // spacing too coarse for 16 points per sigma
    CHECK_THROWS_AS(momentum_representation(InitialStateSpec{}, coarse), GridError);

    MomentumGrid narrow;
    narrow.p_max = 2.0;
    narrow.n_points = 4096;
    CHECK_THROWS_AS(momentum_representation(InitialStateSpec(0.0, 0.2, {1.0, 0.0}), narrow),
                    GridError);
}

TEST_CASE("fock and momentum representations agree on momentum moments") {
    const InitialStateSpec spec(1.1, 1.0, {1.0, 0.0});
    const FockSpace space(128);
    const auto state = build_initial_state(spec, space);
    const OperatorMatrix P =
        tensor(OperatorMatrix::Identity(2, 2), momentum_op(space));
    const double p1_fock = real_expectation(state, P);
    const double p2_fock = real_expectation(state, OperatorMatrix(P * P));

    const MomentumGrid grid;
    const auto phi = momentum_representation(spec, grid);
    double p1 = 0.0, p2 = 0.0;
    for (int j = 0; j < grid.n_points; ++j) {
        const double w = std::norm(phi.envelope(j)) * grid.spacing();
        p1 += grid.point(j) * w;
        p2 += grid.point(j) * grid.point(j) * w;
    }
    CHECK(p1_fock == Approx(p1).margin(1e-6));
    CHECK(p2_fock == Approx(p2).margin(1e-6));
}

TEST_CASE("position density reconstructed from coefficients matches the input") {
    const InitialStateSpec spec(1.2, 1.0, {1.0, 0.0});
    const FockSpace space(128);
    const auto c = gaussian_fock_coefficients(spec, space);
    for (double x = -6.0; x <= 6.0; x += 0.37) {
        const Eigen::VectorXd col = hermite_overlap_column(space.n_max, x);
        Complex val{0.0, 0.0};
        for (int n = 0; n < space.n_max; ++n) val += c(n) * col(n);
        CHECK(std::abs(val - Complex(spec.psi(x), 0.0)) < 1e-6);
    }

    // completeness: the reconstructed normalization integral is 1
    const double lo = -10.0, hi = 12.0;
    const int npts = 8001;
    const double dx = (hi - lo) / (npts - 1);
    double integral = 0.0;
    for (int i = 0; i < npts; ++i) {
        const double x = lo + i * dx;
        const Eigen::VectorXd col = hermite_overlap_column(space.n_max, x);
        Complex val{0.0, 0.0};
        for (int n = 0; n < space.n_max; ++n) val += c(n) * col(n);
        const double w = (i == 0 || i == npts - 1) ? 0.5 : 1.0;
        integral += w * std::norm(val);
    }
    CHECK(integral * dx == Approx(1.0).margin(1e-6));
}

TEST_CASE("spin vector is normalized on construction") {
    const InitialStateSpec spec(0.0, 1.0, {3.0, 4.0});
    CHECK(spec.spin.norm() == Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(InitialStateSpec(0.0, -1.0, {1.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(InitialStateSpec(0.0, 1.0, {0.0, 0.0}), InvalidArgument);
}
