#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "warpsim/analysis.hpp"
#include "warpsim/density.hpp"
#include "warpsim/evolution.hpp"
#include "warpsim/states.hpp"

using namespace warpsim;
using Catch::Approx;

namespace {

DiracParams reference_dirac(double vs, double Delta) {
    const double Omega0 = 2 * M_PI * 1.46e3;
    DiracParams d(Omega0 / std::sqrt(2.0), 1.0, 0.0, AlcubierreProfile::constant(vs));
    d.mass_m = -Delta / (2.0 * d.c_sim * d.c_sim);
    return d;
}

PropagatorConfig sampled(double t_max, int samples) {
    PropagatorConfig c;
    c.backend = Backend::ExactCommuting;
    c.t_max = t_max;
    c.sample_interval = t_max / samples;
    return c;
}

} // namespace

TEST_CASE("ground-state density is the squared oscillator gaussian") {
    const FockSpace space(64);
    const auto psi = build_initial_state(InitialStateSpec::spin_up(), space);
    const double kappa = 1.0;  // x/c axis equals X for unit kappa
    std::vector<double> grid(513);
    for (int i = 0; i < 513; ++i) grid[i] = -8.0 + 16.0 * i / 512;
    const auto snap = wavepacket_density(psi, grid, kappa);
    for (std::size_t i = 0; i < grid.size(); i += 16) {
        const double x = grid[i];
        const double expected = std::exp(-x * x) / std::sqrt(M_PI);
        CHECK(snap.density[i] == Approx(expected).margin(1e-10));
    }
    CHECK(snapshot_integral(snap) == Approx(1.0).margin(1e-8));
}

TEST_CASE("density grid must cover the packet") {
    const FockSpace space(64);
    const auto psi =
        build_initial_state(InitialStateSpec(3.0, 1.0, {1.0, 0.0}), space);
    std::vector<double> grid(65);
    for (int i = 0; i < 65; ++i) grid[i] = -4.0 + 8.0 * i / 64;
    CHECK_THROWS_AS(wavepacket_density(psi, grid, 1.0), GridError);
}

TEST_CASE("late-time superposition density splits at the cone velocities") {
    const FockSpace space(256);
    const DiracParams d = reference_dirac(2.0, 0.0);
    SnapshotRequest snaps;
    snaps.times = {0.6e-3, 1.2e-3};
    snaps.n_points = 1024;
    const auto rec = evolve_exact(HamiltonianSpec::dirac_chiral(d, space),
                                  build_initial_state(InitialStateSpec::spin_superposition(), space),
                                  sampled(1.2e-3, 24), snaps);
    REQUIRE(rec.snapshots.size() == 2);
    for (const auto& snap : rec.snapshots) {
        const auto peaks = density_peaks(snap);
        REQUIRE(peaks.size() == 2);
        CHECK(peaks[0] == Approx(1.0 * snap.t).epsilon(0.02));   // c(v_s - 1)
        CHECK(peaks[1] == Approx(3.0 * snap.t).epsilon(0.02));   // c(v_s + 1)
    }
    // separation grows at 2c
    const auto p0 = density_peaks(rec.snapshots[0]);
    const auto p1 = density_peaks(rec.snapshots[1]);
    const double rate = ((p1[1] - p1[0]) - (p0[1] - p0[0])) /
                        (rec.snapshots[1].t - rec.snapshots[0].t);
    CHECK(rate == Approx(2.0).epsilon(0.02));
}

TEST_CASE("lightcone fit on synthetic exact lines has vanishing residual") {
    TrajectoryRecord up, down;
    for (int i = 0; i <= 50; ++i) {
        const double t = i * 2e-5;
        up.times.push_back(t);
        up.mean_x_over_c.push_back(3.0 * t);
        down.times.push_back(t);
        down.mean_x_over_c.push_back(1.0 * t - 1e-6);
    }
    const auto fit = fit_lightcone(up, down);
    CHECK(fit.slope_up == Approx(3.0).epsilon(1e-12));
    CHECK(fit.slope_down == Approx(1.0).epsilon(1e-12));
    CHECK(fit.residual_rms < 1e-12);
}

TEST_CASE("lightcone fits recover the massless cone edges") {
    const FockSpace space(192);
    for (double vs : {0.0, 2.0}) {
        const DiracParams d = reference_dirac(vs, 0.0);
        const auto spec = HamiltonianSpec::dirac_chiral(d, space);
        const auto cfg = sampled(1.0e-3, 50);
        const auto up =
            evolve_exact(spec, build_initial_state(InitialStateSpec::spin_up(), space), cfg);
        const auto down =
            evolve_exact(spec, build_initial_state(InitialStateSpec::spin_down(), space), cfg);
        const auto fit = fit_lightcone(up, down);
        CHECK(fit.slope_up == Approx(vs + 1.0).epsilon(0.01));
        CHECK(fit.slope_down == Approx(vs - 1.0).epsilon(0.01));
        CHECK(fit.slope_up - fit.slope_down == Approx(2.0).margin(0.02));
    }
}

TEST_CASE("spectrum of a synthetic sinusoid lands within one bin") {
    TrajectoryRecord rec;
    const int n = 512;
    const double h = 2e-6;
    const double omega = 2 * M_PI * 6.1e3;
    for (int i = 0; i < n; ++i) {
        const double t = i * h;
        rec.times.push_back(t);
        rec.mean_x_over_c.push_back(2.0 * t + 3e-5 * std::cos(omega * t));
    }
    const auto peak = zitterbewegung_spectrum(rec);
    REQUIRE(peak.has_value());
    const double bin = 2 * M_PI / (n * h);
    CHECK(std::abs(peak->omega - omega) < bin);
    CHECK(peak->amplitude == Approx(3e-5).epsilon(0.1));
}

TEST_CASE("massless runs yield no spectral peak") {
    const FockSpace space(160);
    const DiracParams d = reference_dirac(2.0, 0.0);
    const auto rec = evolve_exact(HamiltonianSpec::dirac_chiral(d, space),
                                  build_initial_state(InitialStateSpec::spin_up(), space),
                                  sampled(1.5e-3, 512));
    CHECK(!zitterbewegung_spectrum(rec).has_value());
}

TEST_CASE("massive run oscillates at the momentum-averaged dispersion") {
    const FockSpace space(192);
    const double Delta = -2 * M_PI * 6.1e3;
    const DiracParams d = reference_dirac(2.0, Delta);
    const auto rec = evolve_exact(HamiltonianSpec::dirac_chiral(d, space),
                                  build_initial_state(InitialStateSpec::spin_up(), space),
                                  sampled(1.5e-3, 1024));
    const auto peak = zitterbewegung_spectrum(rec);
    REQUIRE(peak.has_value());

    // oracle: line center from the dispersion averaged over the packet
    const MomentumGrid grid;
    const auto phi = momentum_representation(InitialStateSpec::spin_up(), grid);
    double line = 0.0;
    for (int j = 0; j < grid.n_points; ++j) {
        const double p = grid.point(j);
        const double e = std::hypot(d.kappa() * p, d.mass_energy());
        line += 2.0 * e * std::norm(phi.envelope(j)) * grid.spacing();
    }
    CHECK(peak->omega == Approx(line).epsilon(0.10));
    // and the naive 2mc² sits within 10% as well for the narrow packet
    CHECK(peak->omega == Approx(2.0 * d.mass_energy()).epsilon(0.10));
}

TEST_CASE("oscillation frequency does not depend on the warp velocity") {
    const FockSpace space(192);
    const double Delta = -2 * M_PI * 6.1e3;
    const auto cfg = sampled(1.5e-3, 1024);
    const auto rec0 = evolve_exact(
        HamiltonianSpec::dirac_chiral(reference_dirac(0.0, Delta), space),
        build_initial_state(InitialStateSpec::spin_up(), space), cfg);
    const auto rec2 = evolve_exact(
        HamiltonianSpec::dirac_chiral(reference_dirac(2.0, Delta), space),
        build_initial_state(InitialStateSpec::spin_up(), space), cfg);
    const auto p0 = zitterbewegung_spectrum(rec0);
    const auto p2 = zitterbewegung_spectrum(rec2);
    REQUIRE(p0.has_value());
    REQUIRE(p2.has_value());
    CHECK(p2->omega == Approx(p0->omega).epsilon(0.01));
}

TEST_CASE("variance series: ground width, rigid translation, monotone splitting") {
    const FockSpace space(224);
    const DiracParams d = reference_dirac(2.0, 0.0);
    const auto spec = HamiltonianSpec::dirac_chiral(d, space);
    const auto cfg = sampled(1.2e-3, 48);

    const auto up =
        evolve_exact(spec, build_initial_state(InitialStateSpec::spin_up(), space), cfg);
    const auto vup = variance_series(up);
    CHECK(vup.front().delta_X == Approx(1.0 / std::sqrt(2.0)).margin(1e-10));
    for (const auto& pt : vup) {
        CHECK(pt.delta_X == Approx(1.0 / std::sqrt(2.0)).margin(1e-6));
    }

    const auto super = evolve_exact(
        spec, build_initial_state(InitialStateSpec::spin_superposition(), space), cfg);
    const auto vsuper = variance_series(super);
    for (std::size_t i = 1; i < vsuper.size(); ++i) {
        CHECK(vsuper[i].delta_X >= vsuper[i - 1].delta_X - 1e-9);
    }
    CHECK(vsuper.back().delta_X > 5.0 * vsuper.front().delta_X);
}

TEST_CASE("massive variance is independent of the warp velocity") {
    const FockSpace space(224);
    const double Delta = -2 * M_PI * 6.1e3;
    const auto cfg = sampled(1.5e-3, 60);
    const auto v0 = variance_series(evolve_exact(
        HamiltonianSpec::dirac_chiral(reference_dirac(0.0, Delta), space),
        build_initial_state(InitialStateSpec::spin_up(), space), cfg));
    const auto v2 = variance_series(evolve_exact(
        HamiltonianSpec::dirac_chiral(reference_dirac(2.0, Delta), space),
        build_initial_state(InitialStateSpec::spin_up(), space), cfg));
    for (std::size_t i = 0; i < v0.size(); ++i) {
        CHECK(std::abs(v0[i].delta_X - v2[i].delta_X) < 1e-6);
    }
}

TEST_CASE("massive wavepacket stretches between the two snapshot times") {
    const FockSpace space(256);
    const DiracParams d = reference_dirac(2.0, -2 * M_PI * 6.1e3);
    SnapshotRequest snaps;
    snaps.times = {0.3e-3, 1.5e-3};
    snaps.n_points = 1024;
    const auto rec = evolve_exact(HamiltonianSpec::dirac_chiral(d, space),
                                  build_initial_state(InitialStateSpec::spin_up(), space),
                                  sampled(1.5e-3, 30), snaps);
    REQUIRE(rec.snapshots.size() == 2);
    CHECK(snapshot_integral(rec.snapshots[0]) == Approx(1.0).margin(1e-6));
    CHECK(snapshot_integral(rec.snapshots[1]) == Approx(1.0).margin(1e-6));
    // stretched: smaller peak density, wider support
    const double top0 =
        *std::max_element(rec.snapshots[0].density.begin(), rec.snapshots[0].density.end());
    const double top1 =
        *std::max_element(rec.snapshots[1].density.begin(), rec.snapshots[1].density.end());
    CHECK(top1 < top0);
}
