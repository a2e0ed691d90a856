// QD-cavity reflection physics and the heralded block operator: the
// nonlinear element of the analyzer.  All rates are expressed in units of
// the cavity decay rate kappa (kappa = 1 internally).
#pragma once

#include <algorithm>
#include <functional>

#include "hbsa/hilbert.hpp"

namespace hbsa {

// Physical knobs of one QD-cavity block.  Frequencies enter only through the
// detunings omega_c - omega and omega_X - omega; the default operating point
// is triple resonance.
struct CavityParams {
    double g = 1.0;          // QD-cavity coupling strength
    double kappa = 1.0;      // cavity decay rate (reference unit, > 0)
    double kappa_s = 0.0;    // side-leakage rate
    double gamma = 0.0;      // exciton decay rate
    double detuning_c = 0.0; // omega_c - omega
    double detuning_x = 0.0; // omega_X - omega
    double p = 1.0;          // photon-QD interaction amplitude, p^2 is the rate

    // Lossless limit: r_h = 1, r_0 = -1, so d = 1 and f = 0 exactly.
    static CavityParams ideal() { return CavityParams{}; }

    void validate() const {
        if (!(kappa > 0.0)) throw Error("CavityParams: kappa must be > 0");
        if (g < 0.0 || kappa_s < 0.0 || gamma < 0.0)
            throw Error("CavityParams: g, kappa_s, gamma must be >= 0");
        if (p < 0.0 || p > 1.0) throw Error("CavityParams: p must lie in [0, 1]");
    }
};

struct ReflectionPair {
    Complex r_h;
    Complex r_0;
};

// Cold-cavity reflection, g = 0:
//   r_0 = [i(w_c - w) - k/2 + k_s/2] / [i(w_c - w) + k/2 + k_s/2].
inline Complex reflection_cold(const CavityParams& c) {
    c.validate();
    const Complex idet{0.0, c.detuning_c};
    return (idet - c.kappa / 2.0 + c.kappa_s / 2.0) /
           (idet + c.kappa / 2.0 + c.kappa_s / 2.0);
}

// Hot-cavity reflection (coupled QD):
//   r_h = 1 - k [i(w_X - w) + gamma/2] /
//             {[i(w_X - w) + gamma/2][i(w_c - w) + k/2 + k_s/2] + g^2}.
inline Complex reflection_hot(const CavityParams& c) {
    c.validate();
    const Complex zx = Complex{0.0, c.detuning_x} + c.gamma / 2.0;
    const Complex zc = Complex{0.0, c.detuning_c} + c.kappa / 2.0 + c.kappa_s / 2.0;
    const Complex den = zx * zc + c.g * c.g;
    if (std::abs(den) < 1e-300)
        throw SingularParametersError("reflection_hot: vanishing denominator");
    return 1.0 - c.kappa * zx / den;
}

inline ReflectionPair reflections(const CavityParams& c) {
    return {reflection_hot(c), reflection_cold(c)};
}

// d = (p/2)(r_h - r_0): the success-branch amplitude of one block pass.
inline Complex success_amplitude(const CavityParams& c) {
    const auto r = reflections(c);
    return (c.p / 2.0) * (r.r_h - r.r_0);
}

// f = (p/2)(r_h + r_0) + sqrt(1 - p^2): the block routes amplitude -f of each
// selected component into its herald detector, polarization flipped.
inline Complex herald_amplitude(const CavityParams& c) {
    const auto r = reflections(c);
    return (c.p / 2.0) * (r.r_h + r.r_0) + std::sqrt(std::max(0.0, 1.0 - c.p * c.p));
}

// Per-component predicate deciding which photon components enter the block.
using ComponentSelector = std::function<bool(const PhotonLabel&)>;

struct BlockOutcome {
    StateVector state;
    double herald_probability = 0.0;  // weight routed into this block's detector
    double loss = 0.0;                // unmonitored deficit 1 - |d|^2 - |f|^2
};

// One pass of one photon through a QD-cavity block.  Selected components keep
// the photon label, flip the QD spin (|+-> -> |-+>) and pick up d; the herald
// branch (amplitude -f, polarization flipped, spin kept) is traced out
// immediately with its probability recorded.  Unselected components pass
// unchanged.
inline BlockOutcome block_apply(const StateVector& state, int qd_index, Photon photon,
                                const ComponentSelector& selector,
                                const CavityParams& params) {
    if (qd_index < 1 || qd_index > 3)
        throw Error("block_apply: QD index out of range: " + std::to_string(qd_index));
    if (state.stage() != Stage::input)
        throw StageMismatchError("block_apply requires a pre-block4 state");
    const Complex d = success_amplitude(params);
    const Complex f = herald_amplitude(params);
    const double deficit = 1.0 - std::norm(d) - std::norm(f);

    BlockOutcome out;
    out.state = StateVector(Stage::input, state.prune_threshold());
    for (const auto& [basis, amp] : state.amplitudes()) {
        const PhotonLabel& lab = photon == Photon::A ? basis.a : basis.b;
        if (!selector(lab)) {
            out.state.add(basis, amp);
            continue;
        }
        JointBasis flippedb = basis;
        flippedb.spins[qd_index] = flipped(flippedb.spins[qd_index]);
        out.state.add(flippedb, amp * d);
        const double w = std::norm(amp);
        out.herald_probability += w * std::norm(f);
        out.loss += w * deficit;
    }
    return out;
}

}  // namespace hbsa
