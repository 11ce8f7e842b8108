// Adaptive Runge-Kutta stepper: accuracy against analytic solutions, the
// convergence order of the embedded pair, dense-output interpolation, and
// the step/limit/restart bookkeeping used by the event locator.
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "qrep/constants.hpp"
#include "qrep/integrator.hpp"

using namespace qrep;

using Vec = Eigen::VectorXcd;
using cplx = std::complex<double>;

TEST_CASE("exponential decay to tight tolerance") {
    auto rhs = [](double, const Vec& y) { return (-y).eval(); };
    Vec y0(1);
    y0 << 1.0;
    IntegratorOptions opt;
    opt.atol = 1e-12;
    opt.rtol = 1e-10;
    const Vec y1 = integrate_to(rhs, 0.0, 1.0, y0, opt);
    CHECK(std::abs(y1(0) - std::exp(-1.0)) < 1e-9);
}

TEST_CASE("oscillator phase and norm") {
    const double w = 3.0;
    auto rhs = [&](double, const Vec& y) { return (cplx(0, w) * y).eval(); };
    Vec y0(1);
    y0 << 1.0;
    IntegratorOptions opt;
    opt.atol = 1e-12;
    opt.rtol = 1e-10;
    const double t1 = 20.0;
    const Vec y1 = integrate_to(rhs, 0.0, t1, y0, opt);
    CHECK(std::abs(std::abs(y1(0)) - 1.0) < 1e-8);
    CHECK(std::abs(y1(0) - std::exp(cplx(0, w * t1))) < 1e-6);
}

TEST_CASE("fifth-order global convergence at fixed step size") {
    // With loose tolerances and h pinned via h_init = h_max, the error of
    // the accepted fifth-order solution must shrink by ~2^5 per halving.
    auto run = [](double h) {
        auto rhs = [](double, const Vec& y) { return (-y).eval(); };
        Vec y0(1);
        y0 << 1.0;
        IntegratorOptions opt;
        opt.atol = 1e3;  // never reject
        opt.rtol = 1e3;
        opt.h_init = h;
        opt.h_max = h;
        const Vec y1 = integrate_to(rhs, 0.0, 2.0, y0, opt);
        return std::abs(y1(0) - std::exp(-2.0));
    };
    const double e1 = run(0.1);
    const double e2 = run(0.05);
    const double ratio = e1 / e2;
    CHECK(ratio > 20.0);
    CHECK(ratio < 45.0);
}

TEST_CASE("dense output interpolates inside accepted steps") {
    // y' = cos(t) y has the exact solution exp(sin t).
    auto rhs = [](double t, const Vec& y) { return (std::cos(t) * y).eval(); };
    Vec y0(1);
    y0 << 1.0;
    Dopri5<Vec, decltype(rhs)&> stepper(rhs);
    stepper.init(0.0, y0);
    int steps = 0;
    while (stepper.step(6.0)) {
        ++steps;
        const double a = stepper.t_prev();
        const double b = stepper.t();
        for (int i = 0; i <= 4; ++i) {
            const double s = a + (b - a) * i / 4.0;
            const Vec yi = stepper.dense(s);
            CHECK(std::abs(yi(0) - std::exp(std::sin(s))) < 1e-5);
        }
        // The interpolant matches both step endpoints.
        CHECK(std::abs(stepper.dense(a)(0) - stepper.y_prev()(0)) < 1e-12);
        CHECK(std::abs(stepper.dense(b)(0) - stepper.y()(0)) < 1e-9);
    }
    CHECK(steps > 3);
    CHECK(stepper.t() == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("step never moves past the limit and reports completion") {
    auto rhs = [](double, const Vec& y) { return (-0.1 * y).eval(); };
    Vec y0(1);
    y0 << 1.0;
    Dopri5<Vec, decltype(rhs)&> stepper(rhs);
    stepper.init(0.0, y0);
    while (stepper.step(0.5)) CHECK(stepper.t() <= 0.5 + 1e-15);
    CHECK(stepper.t() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_FALSE(stepper.step(0.5));  // already there
    // A later limit resumes integration.
    CHECK(stepper.step(1.0));
    while (stepper.step(1.0)) {
    }
    CHECK(stepper.t() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(stepper.y()(0) - std::exp(-0.1)) < 1e-7);
    CHECK(stepper.rhs_evals() > 0);
}

TEST_CASE("oversized initial step is rejected and recovered") {
    auto rhs = [](double, const Vec& y) { return (-50.0 * y).eval(); };
    Vec y0(1);
    y0 << 1.0;
    IntegratorOptions opt;
    opt.h_init = 10.0;  // far beyond the stability range
    opt.atol = 1e-10;
    opt.rtol = 1e-8;
    const Vec y1 = integrate_to(rhs, 0.0, 0.2, y0, opt);
    CHECK(std::abs(y1(0) - std::exp(-10.0)) < 1e-8);
}

TEST_CASE("evaluation budget is enforced") {
    auto rhs = [](double, const Vec& y) { return (-y).eval(); };
    Vec y0(1);
    y0 << 1.0;
    IntegratorOptions opt;
    opt.atol = 1e-14;
    opt.rtol = 1e-14;
    opt.h_max = 1e-7;
    opt.max_rhs_evals = 50;
    CHECK_THROWS_AS(integrate_to(rhs, 0.0, 1.0, y0, opt), std::runtime_error);
}

TEST_CASE("restart after an external state change") {
    auto rhs = [](double, const Vec& y) { return (-y).eval(); };
    Vec y0(1);
    y0 << 1.0;
    Dopri5<Vec, decltype(rhs)&> stepper(rhs);
    stepper.init(0.0, y0);
    while (stepper.step(0.3)) {
    }
    // Emulate a jump: renormalize the state, then continue.
    Vec y = stepper.y();
    y(0) = 1.0;
    stepper.restart(stepper.t(), y);
    CHECK_THROWS_AS(stepper.dense(0.3), std::runtime_error);  // stale interpolant
    while (stepper.step(1.3)) {
    }
    CHECK(std::abs(stepper.y()(0) - std::exp(-1.0)) < 1e-7);
}

TEST_CASE("matrix-valued states integrate like the master equation") {
    // rho' = -i [H, rho] with H = sigma_y/2 rotates the Bloch vector.
    Eigen::MatrixXcd h(2, 2);
    h << 0.0, cplx(0, -0.5), cplx(0, 0.5), 0.0;
    auto rhs = [&](double, const Eigen::MatrixXcd& r) {
        return (cplx(0, -1) * (h * r - r * h)).eval();
    };
    Eigen::MatrixXcd rho(2, 2);
    rho << 1, 0, 0, 0;
    IntegratorOptions opt;
    opt.atol = 1e-12;
    opt.rtol = 1e-10;
    const double t1 = pi;
    const Eigen::MatrixXcd out = integrate_to(rhs, 0.0, t1, rho, opt);
    // A pi rotation about y maps |0><0| to |1><1|.
    CHECK(std::abs(out(1, 1).real() - 1.0) < 1e-7);
    CHECK(std::abs(out(0, 0).real()) < 1e-7);
    CHECK(std::abs(out.trace().real() - 1.0) < 1e-9);
}
