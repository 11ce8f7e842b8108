#pragma once

#include <array>

namespace qrep {

// Bell-diagonal two-qubit state, stored as weights over
// (Psi+, Psi-, Phi+, Phi-).  The target (ideal) state of the photonic
// entangling scheme is Psi+, kept in the first slot throughout.
struct BellDiagonalState {
    double psi_plus = 1.0;
    double psi_minus = 0.0;
    double phi_plus = 0.0;
    double phi_minus = 0.0;

    std::array<double, 4> weights() const {
        return {psi_plus, psi_minus, phi_plus, phi_minus};
    }
    void validate() const;  // weights >= 0 and summing to 1 within 1e-12
};

// State of one elementary link after the photonic Bell measurement, with
// two-photon contrast C:  ((1+C)/2, (1-C)/2, 0, 0).
BellDiagonalState state_after_photonic_bsm(double contrast);

// Entanglement swap of two Bell-diagonal pairs through an atom-atom Bell
// measurement of depolarizing weight P: ideal Pauli-label composition,
// then out -> P out + (1-P)/4.
BellDiagonalState entanglement_swap(const BellDiagonalState& a,
                                    const BellDiagonalState& b, double p);

// End-to-end state of n identical links (n a power of two) combined by a
// balanced tree of swaps, each link with contrast C, each swap weight P.
BellDiagonalState chain_state(int n, double contrast, double p);

// Same tree, starting from an arbitrary elementary-link state.
BellDiagonalState chain_from_link(const BellDiagonalState& link, int n,
                                  double p);

struct ErrorRates {
    double ex = 0.0;  // bit error in the X basis
    double ey = 0.0;
    double ez = 0.0;  // bit error in the Z basis (the QBER of the key basis)
};

ErrorRates error_rates(const BellDiagonalState& s);

// Asymptotic BB84-style secret fraction for a Bell-diagonal state,
//   r = 1 - h(ez) - ez h((1 + (ex - ey)/ez)/2)
//         - (1 - ez) h((1 - (ex + ey + ez)/2)/(1 - ez)),
// in bits per distributed pair.  May be negative; callers clamp for
// reporting.
double secret_fraction(const ErrorRates& e);
double secret_fraction(const BellDiagonalState& s);

// Depolarizing weight of an atom-atom Bell measurement of fidelity F:
// P = (4F - 1)/3.
double bsm_weight_from_fidelity(double f);

// Smallest swap fidelity F for which the n-link chain with link contrast C
// reaches secret fraction `target_r`.  Bisection until |r - target| < 1e-6.
// Throws std::runtime_error when the target is unreachable even at F = 1.
double threshold_fidelity(double contrast, int n, double target_r);

struct PurifyResult {
    double success = 0.0;  // coincidence probability
    BellDiagonalState state;
};

// One entanglement-purification round on two Bell-diagonal pairs using
// bilateral CNOTs and a coincidence measurement (no pre-rotations), with a
// two-qubit depolarizing gate error of weight p_gate applied to each input
// pair first.  Labels keep the target state in the Psi+ slot.
PurifyResult dejmps_purify(const BellDiagonalState& a,
                           const BellDiagonalState& b, double p_gate);

// One full purification round including the +-pi/2 single-qubit rotations
// that interleave the phase- and bit-flip components (the map that actually
// concentrates weight onto the Psi+ target).
PurifyResult dejmps_round(const BellDiagonalState& a,
                          const BellDiagonalState& b, double p_gate);

// How a gate error e maps to the depolarizing weight P of the two-qubit
// gate: mixing_weight reads e = 1 - P, state_error reads e = (3/4)(1 - P)
// (the probability that the depolarized state actually differs).
enum class GateErrorConvention { mixing_weight, state_error };

struct PurificationReport {
    double fidelity_raw = 0.0;       // end-to-end fidelity without purification
    double fidelity_purified = 0.0;  // after one round on two chain copies
    double gain = 0.0;
};

// Effect of one purification round applied to two copies of the final
// n-link state, with gate error e on both the swaps and the round.
PurificationReport purification_benefit(double contrast, int n, double e,
                                        GateErrorConvention conv);

// Largest gate error for which the purification round still improves the
// end-to-end fidelity (gain = 0 crossing), for link contrast `contrast`.
double fidelity_gain_threshold(double contrast, int n,
                               GateErrorConvention conv);

// Resource accounting for link-level purification: one purified link
// consumes two raw links, so the attempt rate carries a factor p/2 when
// both inputs come from parallel sources (p/4 when generated sequentially).
enum class PurificationCost { half, quarter };

// Secret-key-rate ratio (purified / raw) for n links with perfect gates,
// and the largest link contrast C* at which purification still pays off.
double keyrate_benefit_ratio(double contrast, int n, PurificationCost cost);
double keyrate_benefit_threshold(int n, PurificationCost cost);

}  // namespace qrep
