#pragma once

#include <cmath>

namespace qrep {

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr double c_light = 299792458.0;  // vacuum light speed, m/s

// Angular frequency from a linear frequency quoted in MHz ("2pi x MHz").
inline constexpr double mhz_2pi(double f_mhz) { return two_pi * 1e6 * f_mhz; }

inline constexpr double nm = 1e-9;
inline constexpr double um = 1e-6;
inline constexpr double mm = 1e-3;
inline constexpr double km = 1e3;
inline constexpr double ns = 1e-9;
inline constexpr double us = 1e-6;
inline constexpr double ms = 1e-3;

// Gaussian drive envelope: value(t) = peak * exp(-4 ln2 (t-center)^2 / fwhm^2),
// i.e. fwhm measured on the envelope itself.
struct GaussianPulse {
  double peak = 0.0;
  double center = 0.0;
  double fwhm = 1.0;

  double operator()(double t) const {
    double x = (t - center) / fwhm;
    return peak * std::exp(-4.0 * M_LN2 * x * x);
  }

  // Integral of the envelope over all time: peak * fwhm * sqrt(pi / (4 ln2)).
  double area() const { return peak * fwhm * std::sqrt(pi / (4.0 * M_LN2)); }
};

}  // namespace qrep
