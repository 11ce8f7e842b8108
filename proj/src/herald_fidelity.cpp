#include "qrep/herald_fidelity.hpp"

#include <cmath>
#include <stdexcept>

namespace qrep {

namespace {
bool close_abs(double x, double y) { return std::abs(std::abs(x) - std::abs(y)) < 1e-12; }
}

void TransitionAmplitudes::validate() const {
    if (!close_abs(a, a_p) || !close_abs(b, b_p) || !close_abs(c, c_p))
        throw std::invalid_argument(
            "TransitionAmplitudes: primed magnitudes must match unprimed ones");
    if (a == 0.0 && b == 0.0 && c == 0.0)
        throw std::invalid_argument("TransitionAmplitudes: all amplitudes zero");
}

PostselectedState postselected_state(const TransitionAmplitudes& amps) {
    amps.validate();
    const double a2 = amps.a * amps.a;
    const double b2 = amps.b * amps.b;
    const double c2 = amps.c * amps.c;
    // Weights depend only on squared magnitudes, so every sign branch of the
    // primed amplitudes yields the same postselected populations.
    const double wh = std::sqrt(2.0 * b2 + c2);
    const double wv = std::sqrt(2.0 * a2 + 2.0 * b2 + c2);
    const double norm = std::sqrt(2.0 * a2 + 4.0 * b2 + 2.0 * c2);
    return {wh / norm, wv / norm};
}

double degenerate_mode_fidelity(double a, double b, double c) {
    const double a2 = a * a, b2 = b * b, c2 = c * c;
    if (a2 + b2 + c2 == 0.0)
        throw std::invalid_argument("degenerate_mode_fidelity: all amplitudes zero");
    const double num = std::sqrt((2.0 * a2 + 2.0 * b2 + c2) * (2.0 * b2 + c2));
    return 0.5 + num / (2.0 * (a2 + 2.0 * b2 + c2));
}

double degenerate_mode_fidelity_overlap(const TransitionAmplitudes& amps) {
    const PostselectedState s = postselected_state(amps);
    const double overlap = (s.w_h + s.w_v) / std::sqrt(2.0);
    return overlap * overlap;
}

}  // namespace qrep
