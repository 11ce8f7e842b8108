#include "qrep/key_rate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qrep/stats.hpp"

namespace qrep {

namespace {

void require_power_of_two(int n) {
    if (n < 1 || (n & (n - 1)) != 0)
        throw std::invalid_argument("number of links must be a power of two");
}

// Pauli label of each Bell state as (x bit, z bit):
// Psi+ ~ X, Psi- ~ Y, Phi+ ~ I, Phi- ~ Z.
constexpr int kXBit[4] = {1, 1, 0, 0};
constexpr int kZBit[4] = {0, 1, 0, 1};

int label_index(int x, int z) {
    for (int i = 0; i < 4; ++i)
        if (kXBit[i] == x && kZBit[i] == z) return i;
    return -1;
}

BellDiagonalState depolarize(const BellDiagonalState& s, double p) {
    if (!(p >= 0.0) || p > 1.0)
        throw std::invalid_argument("depolarizing weight must be in [0, 1]");
    const double m = (1.0 - p) / 4.0;
    return {p * s.psi_plus + m, p * s.psi_minus + m, p * s.phi_plus + m,
            p * s.phi_minus + m};
}

BellDiagonalState from_weights(const std::array<double, 4>& w) {
    return {w[0], w[1], w[2], w[3]};
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

void BellDiagonalState::validate() const {
    const auto w = weights();
    double sum = 0.0;
    for (double v : w) {
        if (v < -1e-12)
            throw std::invalid_argument("BellDiagonalState: negative weight");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("BellDiagonalState: weights must sum to 1");
}

BellDiagonalState state_after_photonic_bsm(double contrast) {
    if (contrast < 0.0 || contrast > 1.0)
        throw std::invalid_argument("contrast must be in [0, 1]");
    return {0.5 * (1.0 + contrast), 0.5 * (1.0 - contrast), 0.0, 0.0};
}

BellDiagonalState entanglement_swap(const BellDiagonalState& a,
                                    const BellDiagonalState& b, double p) {
    a.validate();
    b.validate();
    const auto wa = a.weights();
    const auto wb = b.weights();
    std::array<double, 4> out{0.0, 0.0, 0.0, 0.0};
    // The measured Bell outcome is corrected assuming the target Psi+ ~ X:
    // the kept label is the composition a.b.X of the two input labels.
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const int x = kXBit[i] ^ kXBit[j] ^ 1;
            const int z = kZBit[i] ^ kZBit[j];
            out[static_cast<std::size_t>(label_index(x, z))] += wa[static_cast<std::size_t>(i)] * wb[static_cast<std::size_t>(j)];
        }
    return depolarize(from_weights(out), p);
}

BellDiagonalState chain_from_link(const BellDiagonalState& link, int n,
                                  double p) {
    require_power_of_two(n);
    if (n == 1) return link;
    const BellDiagonalState half = chain_from_link(link, n / 2, p);
    return entanglement_swap(half, half, p);
}

BellDiagonalState chain_state(int n, double contrast, double p) {
    return chain_from_link(state_after_photonic_bsm(contrast), n, p);
}

ErrorRates error_rates(const BellDiagonalState& s) {
    s.validate();
    ErrorRates e;
    e.ex = s.psi_minus + s.phi_minus;
    e.ey = s.psi_minus + s.phi_plus;
    e.ez = s.phi_plus + s.phi_minus;
    return e;
}

double secret_fraction(const ErrorRates& e) {
    const double ez = e.ez;
    double r = 1.0 - binary_entropy(clamp01(ez));
    if (ez > 0.0)
        r -= ez * binary_entropy(clamp01(0.5 * (1.0 + (e.ex - e.ey) / ez)));
    if (ez < 1.0)
        r -= (1.0 - ez) *
             binary_entropy(
                 clamp01((1.0 - 0.5 * (e.ex + e.ey + ez)) / (1.0 - ez)));
    return r;
}

double secret_fraction(const BellDiagonalState& s) {
    return secret_fraction(error_rates(s));
}

double bsm_weight_from_fidelity(double f) {
    if (f < 0.25 || f > 1.0)
        throw std::invalid_argument("swap fidelity must be in [0.25, 1]");
    return (4.0 * f - 1.0) / 3.0;
}

double threshold_fidelity(double contrast, int n, double target_r) {
    require_power_of_two(n);
    const auto rate_at = [&](double f) {
        return secret_fraction(
            chain_state(n, contrast, bsm_weight_from_fidelity(f)));
    };
    if (rate_at(1.0) < target_r)
        throw std::runtime_error(
            "threshold_fidelity: target rate unreachable at unit fidelity");
    double lo = 0.25, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double r = rate_at(mid);
        if (std::abs(r - target_r) < 1e-6) return mid;
        (r < target_r ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

PurifyResult dejmps_purify(const BellDiagonalState& a,
                           const BellDiagonalState& b, double p_gate) {
    a.validate();
    b.validate();
    const auto wa = depolarize(a, p_gate).weights();
    const auto wb = depolarize(b, p_gate).weights();
    // Bilateral CNOT + coincidence: accepted when the bit-flip classes
    // agree ({Psi+, Psi-} vs {Phi+, Phi-} in this labeling); the kept pair
    // inherits the bit-flip class and the XOR of the phase flips.
    const double p = (wa[0] + wa[1]) * (wb[0] + wb[1]) +
                     (wa[2] + wa[3]) * (wb[2] + wb[3]);
    PurifyResult out;
    out.success = p;
    if (p <= 0.0) throw std::domain_error("dejmps_purify: zero success weight");
    out.state = {(wa[0] * wb[0] + wa[1] * wb[1]) / p,
                 (wa[0] * wb[1] + wa[1] * wb[0]) / p,
                 (wa[2] * wb[2] + wa[3] * wb[3]) / p,
                 (wa[2] * wb[3] + wa[3] * wb[2]) / p};
    return out;
}

PurifyResult dejmps_round(const BellDiagonalState& a,
                          const BellDiagonalState& b, double p_gate) {
    a.validate();
    b.validate();
    const auto wa = depolarize(a, p_gate).weights();
    const auto wb = depolarize(b, p_gate).weights();
    // The +-pi/2 rotations exchange Psi- and Phi- before the CNOTs, so the
    // coincidence classes become {Psi+, Phi-} vs {Psi-, Phi+}.
    const double p = (wa[0] + wa[3]) * (wb[0] + wb[3]) +
                     (wa[1] + wa[2]) * (wb[1] + wb[2]);
    PurifyResult out;
    out.success = p;
    if (p <= 0.0) throw std::domain_error("dejmps_round: zero success weight");
    out.state = {(wa[0] * wb[0] + wa[3] * wb[3]) / p,
                 (wa[0] * wb[3] + wa[3] * wb[0]) / p,
                 (wa[1] * wb[1] + wa[2] * wb[2]) / p,
                 (wa[1] * wb[2] + wa[2] * wb[1]) / p};
    return out;
}

namespace {
double gate_weight(double e, GateErrorConvention conv) {
    const double p =
        conv == GateErrorConvention::mixing_weight ? 1.0 - e : 1.0 - 4.0 * e / 3.0;
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("gate error out of range for convention");
    return p;
}
}  // namespace

PurificationReport purification_benefit(double contrast, int n, double e,
                                        GateErrorConvention conv) {
    const double p_gate = gate_weight(e, conv);
    const BellDiagonalState chain = chain_state(n, contrast, p_gate);
    PurificationReport rep;
    rep.fidelity_raw = chain.psi_plus;
    rep.fidelity_purified = dejmps_round(chain, chain, p_gate).state.psi_plus;
    rep.gain = rep.fidelity_purified - rep.fidelity_raw;
    return rep;
}

double fidelity_gain_threshold(double contrast, int n,
                               GateErrorConvention conv) {
    const auto gain_at = [&](double e) {
        return purification_benefit(contrast, n, e, conv).gain;
    };
    double lo = 0.0, hi = 0.5;
    if (gain_at(lo) <= 0.0) return 0.0;
    while (gain_at(hi) > 0.0 && hi < 0.74) hi = std::min(0.74, hi + 0.1);
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gain_at(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double keyrate_benefit_ratio(double contrast, int n, PurificationCost cost) {
    require_power_of_two(n);
    const BellDiagonalState raw_link = state_after_photonic_bsm(contrast);
    const PurifyResult purified = dejmps_round(raw_link, raw_link, 1.0);
    const double r_raw = secret_fraction(chain_from_link(raw_link, n, 1.0));
    const double r_pur =
        secret_fraction(chain_from_link(purified.state, n, 1.0));
    const double cost_factor = cost == PurificationCost::half ? 0.5 : 0.25;
    if (r_raw <= 0.0) return std::numeric_limits<double>::infinity();
    return cost_factor * purified.success * std::max(0.0, r_pur) / r_raw;
}

double keyrate_benefit_threshold(int n, PurificationCost cost) {
    // The ratio exceeds 1 at small contrast (the raw rate dies faster) and
    // falls below the cost factor as C -> 1; bisect the crossing.
    double lo = 1e-3, hi = 1.0 - 1e-9;
    if (keyrate_benefit_ratio(lo, n, cost) <= 1.0)
        throw std::runtime_error(
            "keyrate_benefit_threshold: purification never pays off");
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (keyrate_benefit_ratio(mid, n, cost) > 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace qrep
