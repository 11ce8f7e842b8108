// Open-system dynamics engine: the density-matrix propagator and the
// trajectory unraveling against analytic two-level and single-mode
// solutions, jump statistics against the exponential law, and the RNG
// stream contract.
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qrep/constants.hpp"
#include "qrep/hilbert.hpp"
#include "qrep/lindblad.hpp"
#include "qrep/rng.hpp"
#include "qrep/stats.hpp"
#include "qrep/trajectory.hpp"

using namespace qrep;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        t[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return t;
}

SpMat sigma_x(int dim, int a, int b) {
    SpMat m = sp_transition(dim, a, b);
    SpMat n = sp_transition(dim, b, a);
    SpMat out = m + n;
    return out;
}

SpMat projector(int dim, int k) { return sp_transition(dim, k, k); }

Eigen::VectorXcd basis_state(int dim, int k) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    v(k) = 1.0;
    return v;
}

Eigen::MatrixXcd pure_density(const Eigen::VectorXcd& v) {
    return v * v.adjoint();
}

}  // namespace

TEST_CASE("resonant Rabi oscillation without decay") {
    const double omega = 2.0;
    LindbladModel m;
    m.dim = 2;
    m.h0 = sp_zero(2);
    m.drives.push_back({sigma_x(2, 1, 0), [=](double) { return omega / 2.0; }});
    CompiledModel cm(m);

    const auto times = linspace(0.0, 5.0, 51);
    Eigen::MatrixXcd rho = pure_density(basis_state(2, 0));
    const auto exp_master =
        evolve_master(cm, rho, times, {projector(2, 1)});
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double s = std::sin(omega * times[i] / 2.0);
        CHECK(exp_master[0][i] == doctest::Approx(s * s).epsilon(1e-6).scale(1.0));
    }
    CHECK(std::abs(rho.trace().real() - 1.0) < 1e-8);

    // Without collapse operators a trajectory is the Schroedinger evolution
    // and records no jumps.
    Rng rng(3, 0);
    const TrajectoryResult tr =
        run_trajectory(cm, basis_state(2, 0), 0.0, 5.0, rng);
    CHECK(tr.jumps.empty());
    const double pe =
        expectation(projector(2, 1), tr.psi_final).real();
    const double s5 = std::sin(omega * 5.0 / 2.0);
    CHECK(pe == doctest::Approx(s5 * s5).epsilon(1e-6).scale(1.0));
}

TEST_CASE("Gaussian pulse area sets the final inversion") {
    // A resonant pulse of area A leaves P_e = sin^2(A/2); the drive
    // convention is H = Omega(t)/2 (|e><g| + h.c.).
    const double fwhm = 1.0;
    const double area = pi / 2.0;
    GaussianPulse pulse{1.0, 5.0 * fwhm, fwhm};
    pulse.peak = area / (fwhm * std::sqrt(pi / (4.0 * M_LN2)));
    CHECK(pulse.area() == doctest::Approx(area).epsilon(1e-12));

    LindbladModel m;
    m.dim = 2;
    m.h0 = sp_zero(2);
    m.drives.push_back(
        {sigma_x(2, 1, 0), [pulse](double t) { return 0.5 * pulse(t); }});
    CompiledModel cm(m);
    Rng rng(5, 0);
    const TrajectoryResult tr =
        run_trajectory(cm, basis_state(2, 0), 0.0, 10.0 * fwhm, rng);
    const double pe = expectation(projector(2, 1), tr.psi_final).real();
    const double expect = std::sin(area / 2.0) * std::sin(area / 2.0);
    CHECK(pe == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("spontaneous decay follows the exponential law") {
    const double gamma = 1.7;
    LindbladModel m;
    m.dim = 2;
    m.h0 = sp_zero(2);
    m.jumps.push_back({sp_transition(2, 0, 1, std::sqrt(gamma)), "decay"});
    CompiledModel cm(m);

    const auto times = linspace(0.0, 3.0, 31);
    Eigen::MatrixXcd rho = pure_density(basis_state(2, 1));
    const auto pe = evolve_master(cm, rho, times, {projector(2, 1)});
    for (std::size_t i = 0; i < times.size(); ++i)
        CHECK(pe[0][i] ==
              doctest::Approx(std::exp(-gamma * times[i])).epsilon(1e-7).scale(1.0));

    // Trajectory ensemble agrees within three standard errors.
    const EnsembleAverages avg = average_observables(
        cm, basis_state(2, 1), times, {projector(2, 1)}, 2000, 12345);
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double exact = std::exp(-gamma * times[i]);
        const double tol = 3.0 * avg.stderr_[0][i] + 2e-3;
        CHECK(std::abs(avg.mean[0][i] - exact) < tol);
    }
}

TEST_CASE("jump instants are exponentially distributed") {
    const double gamma = 1.0;
    LindbladModel m;
    m.dim = 2;
    m.h0 = sp_zero(2);
    m.jumps.push_back({sp_transition(2, 0, 1, std::sqrt(gamma)), "decay"});
    CompiledModel cm(m);

    std::vector<double> first_jump;
    const std::size_t n = 2000;
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(777, i);
        const TrajectoryResult tr =
            run_trajectory(cm, basis_state(2, 1), 0.0, 30.0, rng);
        REQUIRE(tr.jumps.size() == 1);
        CHECK(tr.jumps[0].channel == 0);
        first_jump.push_back(tr.jumps[0].t);
        // After the jump the state is the ground state.
        CHECK(std::abs(std::abs(tr.psi_final(0)) - 1.0) < 1e-9);
    }
    const KsResult ks = ks_test(
        first_jump, [&](double t) { return 1.0 - std::exp(-gamma * t); });
    CHECK(ks.p > 1e-3);
    CHECK(ks.d < 0.05);
}

TEST_CASE("driven-damped dynamics: trajectories match the master equation") {
    const double omega = 3.0, gamma = 1.0;
    LindbladModel m;
    m.dim = 2;
    m.h0 = sp_zero(2);
    m.drives.push_back({sigma_x(2, 1, 0), [=](double) { return omega / 2.0; }});
    m.jumps.push_back({sp_transition(2, 0, 1, std::sqrt(gamma)), "decay"});
    CompiledModel cm(m);

    const auto times = linspace(0.0, 4.0, 21);
    Eigen::MatrixXcd rho = pure_density(basis_state(2, 0));
    const auto master = evolve_master(cm, rho, times, {projector(2, 1)});

    const EnsembleAverages avg = average_observables(
        cm, basis_state(2, 0), times, {projector(2, 1)}, 1000, 2024);
    CHECK(avg.n_traj == 1000);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double tol = 3.0 * avg.stderr_[0][i] + 4e-3;
        CHECK(std::abs(avg.mean[0][i] - master[0][i]) < tol);
    }
}

TEST_CASE("cavity field decay carries rate 2 kappa") {
    // Collapse sqrt(2 kappa) a: <n>(t) = exp(-2 kappa t) and the emitted
    // flux 2 kappa <n> integrates to one photon.
    const double kappa = 0.8;
    LindbladModel m;
    m.dim = 3;
    m.h0 = sp_zero(3);
    m.jumps.push_back(
        {SpMat(std::sqrt(2.0 * kappa) * sp_destroy(3)), "mirror"});
    CompiledModel cm(m);

    SpMat n_op = sp_destroy(3).adjoint() * sp_destroy(3);
    const auto times = linspace(0.0, 6.0, 301);
    Eigen::MatrixXcd rho = pure_density(basis_state(3, 1));
    const auto n_of_t = evolve_master(cm, rho, times, {n_op});
    for (std::size_t i = 0; i < times.size(); ++i)
        CHECK(n_of_t[0][i] ==
              doctest::Approx(std::exp(-2.0 * kappa * times[i]))
                  .epsilon(1e-7)
                  .scale(1.0));

    double emitted = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i)
        emitted += 0.5 * (2.0 * kappa * n_of_t[0][i - 1] +
                          2.0 * kappa * n_of_t[0][i]) *
                   (times[i] - times[i - 1]);
    CHECK(emitted == doctest::Approx(1.0).epsilon(1e-4));

    // Every trajectory emits exactly one photon through the mirror.
    for (std::size_t i = 0; i < 200; ++i) {
        Rng rng(99, i);
        const TrajectoryResult tr =
            run_trajectory(cm, basis_state(3, 1), 0.0, 20.0, rng);
        REQUIRE(tr.jumps.size() == 1);
        CHECK(cm.jump_label(tr.jumps[0].channel) == "mirror");
    }
}

TEST_CASE("branching ratios of competing decay channels") {
    const double g1 = 2.0, g2 = 0.5;
    LindbladModel m;
    m.dim = 3;  // 0 = target of channel 1, 1 = target of channel 2, 2 = excited
    m.h0 = sp_zero(3);
    m.jumps.push_back({sp_transition(3, 0, 2, std::sqrt(g1)), "to_a"});
    m.jumps.push_back({sp_transition(3, 1, 2, std::sqrt(g2)), "to_b"});
    CHECK(m.jump_index("to_b") == 1);
    CHECK_THROWS(m.jump_index("missing"));
    CompiledModel cm(m);

    // Master equation steady state populates the targets in ratio g1 : g2.
    const auto times = linspace(0.0, 12.0, 13);
    Eigen::MatrixXcd rho = pure_density(basis_state(3, 2));
    const auto pops =
        evolve_master(cm, rho, times, {projector(3, 0), projector(3, 1)});
    CHECK(pops[0].back() == doctest::Approx(g1 / (g1 + g2)).epsilon(1e-6));
    CHECK(pops[1].back() == doctest::Approx(g2 / (g1 + g2)).epsilon(1e-6));

    // Trajectory channel frequencies agree within three binomial sigma.
    const std::size_t n = 3000;
    std::size_t hits_a = 0;
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(4242, i);
        const TrajectoryResult tr =
            run_trajectory(cm, basis_state(3, 2), 0.0, 12.0, rng);
        REQUIRE(tr.jumps.size() == 1);
        if (cm.jump_label(tr.jumps[0].channel) == "to_a") ++hits_a;
    }
    const double f = static_cast<double>(hits_a) / static_cast<double>(n);
    const double expect = g1 / (g1 + g2);
    CHECK(std::abs(f - expect) <
          3.0 * std::sqrt(expect * (1.0 - expect) / static_cast<double>(n)));
    const Interval wilson = wilson_interval(hits_a, n, 3.0);
    CHECK(wilson.contains(expect));
}

TEST_CASE("random number streams") {
    Rng a(42, 7), b(42, 7), c(42, 8);
    for (int i = 0; i < 100; ++i) {
        const double va = a.uniform();
        CHECK(va == b.uniform());  // same stream reproduces
        CHECK(va >= 0.0);
        CHECK(va < 1.0);
    }
    // A different stream index decorrelates.
    Rng a2(42, 7);
    int same = 0;
    for (int i = 0; i < 100; ++i)
        if (a2.uniform() == c.uniform()) ++same;
    CHECK(same < 3);

    CHECK(stream_seed(1, 2) != stream_seed(1, 3));
    CHECK(stream_seed(1, 2) != stream_seed(2, 2));

    Rng r(7, 0);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform_pos();
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) < 4.0 / std::sqrt(12.0 * n));

    double m1 = 0.0, m2 = 0.0;
    const int ng = 10000;
    for (int i = 0; i < ng; ++i) {
        const double g = r.normal();
        m1 += g;
        m2 += g * g;
    }
    m1 /= ng;
    m2 /= ng;
    CHECK(std::abs(m1) < 0.04);
    CHECK(std::abs(m2 - 1.0) < 0.06);

    for (int i = 0; i < 1000; ++i) {
        const auto v = r.below(13);
        CHECK(v < 13);
    }
}
