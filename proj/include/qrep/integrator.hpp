#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>

namespace qrep {

struct IntegratorOptions {
  double atol = 1e-9;
  double rtol = 1e-7;
  double h_init = 0.0;  // 0 selects the automatic starting step
  double h_max = std::numeric_limits<double>::infinity();
  std::int64_t max_rhs_evals = 200'000'000;
};

// Dormand-Prince 5(4) with FSAL, step rejection on the embedded 4th-order
// error estimate, and the quartic dense-output interpolant valid across the
// last accepted step.  Y is any Eigen vector/matrix of complex or real
// scalars; Rhs is callable as y' = rhs(t, y).
//
// The stepper exposes single-step advancement plus dense interpolation so a
// caller can locate events (e.g. a squared-norm threshold crossing) inside a
// step without re-integrating.
template <class Y, class Rhs>
class Dopri5 {
 public:
  Dopri5(Rhs rhs, IntegratorOptions opt = IntegratorOptions{})
      : rhs_(std::forward<Rhs>(rhs)), opt_(opt) {}

  void init(double t0, const Y& y0) {
    t_ = t0;
    y_ = y0;
    k1_ = rhs_(t_, y_);
    n_rhs_ = 1;
    h_ = opt_.h_init > 0.0 ? std::min(opt_.h_init, opt_.h_max)
                           : initial_step();
    have_dense_ = false;
  }

  // Take one accepted step, never moving past t_limit.  Returns false when
  // already at (or beyond) t_limit.
  bool step(double t_limit) {
    if (t_ >= t_limit - 1e-18 * std::max(1.0, std::abs(t_limit))) return false;
    for (;;) {
      if (n_rhs_ > opt_.max_rhs_evals) {
        throw std::runtime_error("integrator exceeded max RHS evaluations");
      }
      double h = std::min({h_, opt_.h_max, t_limit - t_});
      if (!(h > 0.0) ||
          t_ + h == t_) {  // step underflow: no representable progress
        throw std::runtime_error("integrator step size underflow");
      }
      double err = try_step(h);
      if (err <= 1.0) {  // accept
        double fac = err == 0.0 ? 5.0
                                : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        t_prev_ = t_;
        y_prev_.swap(y_);
        t_ = t_prev_ + h;
        y_.swap(y_new_);
        k1_.swap(k7_);  // FSAL
        h_last_ = h;
        have_dense_ = true;
        h_ = h * fac;
        return true;
      }
      h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
    }
  }

  double t() const { return t_; }
  double t_prev() const { return t_prev_; }
  const Y& y() const { return y_; }
  const Y& y_prev() const { return y_prev_; }
  std::int64_t rhs_evals() const { return n_rhs_; }

  // Interpolated solution at time s in [t_prev, t] of the last accepted step.
  Y dense(double s) const {
    if (!have_dense_) throw std::runtime_error("no accepted step to interpolate");
    double th = (s - t_prev_) / h_last_;
    double th1 = 1.0 - th;
    return rcont1_ +
           th * (rcont2_ + th1 * (rcont3_ + th * (rcont4_ + th1 * rcont5_)));
  }

  // Re-prime after the caller modified the state (e.g. applied a jump).
  void restart(double t, const Y& y) {
    t_ = t;
    y_ = y;
    k1_ = rhs_(t_, y_);
    ++n_rhs_;
    have_dense_ = false;
    // keep h_: the controller re-adapts within a step or two
  }

 private:
  double try_step(double h) {
    const double t = t_;
    const Y& y = y_;
    k2_ = rhs_(t + c2 * h, y + (h * a21) * k1_);
    k3_ = rhs_(t + c3 * h, y + h * (a31 * k1_ + a32 * k2_));
    k4_ = rhs_(t + c4 * h, y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_));
    k5_ = rhs_(t + c5 * h,
               y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_));
    ytmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    k6_ = rhs_(t + h, ytmp_);
    y_new_ = y + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
    k7_ = rhs_(t + h, y_new_);
    n_rhs_ += 6;

    err_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
    double err = error_norm(err_, y, y_new_);
    if (err <= 1.0) prepare_dense(h);
    return err;
  }

  double error_norm(const Y& e, const Y& y0, const Y& y1) const {
    auto sc =
        opt_.atol + opt_.rtol * y0.array().abs().max(y1.array().abs());
    double s = (e.array().abs() / sc).square().sum();
    return std::sqrt(s / static_cast<double>(e.size()));
  }

  void prepare_dense(double h) {
    rcont1_ = y_;                 // y at step start (y_ still holds it here)
    rcont2_ = y_new_ - y_;        // dy
    rcont3_ = h * k1_ - rcont2_;
    rcont4_ = rcont2_ - h * k7_ - rcont3_;
    rcont5_ = h * (d1 * k1_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ +
                   d7 * k7_);
  }

  double initial_step() {
    auto sc = opt_.atol + opt_.rtol * y_.array().abs();
    double n = static_cast<double>(y_.size());
    double d0 = std::sqrt((y_.array().abs() / sc).square().sum() / n);
    double d1v = std::sqrt((k1_.array().abs() / sc).square().sum() / n);
    double h0 = (d0 < 1e-5 || d1v < 1e-5) ? 1e-6 : 0.01 * d0 / d1v;
    h0 = std::min(h0, opt_.h_max);
    Y y1 = y_ + h0 * k1_;
    Y f1 = rhs_(t_ + h0, y1);
    ++n_rhs_;
    double d2 =
        std::sqrt(((f1 - k1_).array().abs() / sc).square().sum() / n) / h0;
    double dm = std::max(d1v, d2);
    double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                            : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h0, h1, opt_.h_max});
  }

  // Dormand-Prince coefficients (Hairer, Norsett, Wanner: DOPRI5).
  static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                          c5 = 8.0 / 9.0;
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0,
                          a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                          a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                          a65 = -5103.0 / 18656.0;
  static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0,
                          a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                          a76 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                          e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                          e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  static constexpr double d1 = -12715105075.0 / 11282082432.0,
                          d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0,
                          d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0,
                          d7 = 69997945.0 / 29380423.0;

  Rhs rhs_;
  IntegratorOptions opt_;
  double t_ = 0.0, t_prev_ = 0.0, h_ = 0.0, h_last_ = 0.0;
  std::int64_t n_rhs_ = 0;
  bool have_dense_ = false;
  Y y_, y_prev_, y_new_, ytmp_, err_;
  Y k1_, k2_, k3_, k4_, k5_, k6_, k7_;
  Y rcont1_, rcont2_, rcont3_, rcont4_, rcont5_;
};

// Integrate rhs from t0 to t1 and return y(t1).
template <class Y, class Rhs>
Y integrate_to(Rhs&& rhs, double t0, double t1, const Y& y0,
               const IntegratorOptions& opt = IntegratorOptions{}) {
  Dopri5<Y, Rhs&> stepper(rhs, opt);
  stepper.init(t0, y0);
  while (stepper.step(t1)) {
  }
  return stepper.y();
}

}  // namespace qrep
