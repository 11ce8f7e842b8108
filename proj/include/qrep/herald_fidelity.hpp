#pragma once

namespace qrep {

// Signed dipole amplitudes of the heralding decay branches.
// a  : pi transition from the upper branch populated by the sigma+ photon
// b  : in-system pi transition kept by the cavity
// c  : strongest out-of-system pi branch
// Primed values belong to the opposite Zeeman branch; their magnitudes must
// match the unprimed ones (the two branches differ at most by signs).
struct TransitionAmplitudes {
    double a = 0.0, a_p = 0.0;
    double b = 0.0, b_p = 0.0;
    double c = 0.0, c_p = 0.0;

    void validate() const;  // throws std::invalid_argument on bad input
};

// Atom-photon amplitudes (on |H>, |V> photon components) of the state kept
// after projecting the degenerate heralding mode onto a polarization-summed
// click, normalized to unit norm.
struct PostselectedState {
    double w_h = 0.0;
    double w_v = 0.0;
};

PostselectedState postselected_state(const TransitionAmplitudes& amps);

// Fidelity of the postselected state with the ideal Bell state when the
// heralding cavity is degenerate in polarization, from the closed form
//   F = 1/2 + sqrt((2a^2 + 2b^2 + c^2)(2b^2 + c^2)) / (2 (a^2 + 2b^2 + c^2)).
double degenerate_mode_fidelity(double a, double b, double c);

// The same fidelity computed as the squared overlap of the postselected
// state with the balanced target, used as an independent cross-check.
double degenerate_mode_fidelity_overlap(const TransitionAmplitudes& amps);

}  // namespace qrep
