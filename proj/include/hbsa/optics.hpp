// Linear optical elements acting on one photon's labels.  Each operator is
// defined by its truth table rather than a generic rotation formula, so sign
// conventions stay pinned to the element definitions.
#pragma once

#include <map>
#include <tuple>

#include "hbsa/emitter.hpp"
#include "hbsa/hilbert.hpp"

namespace hbsa {

// The only three half-wave plate settings used by the analyzer.
enum class HwpAngle : std::uint8_t { deg22_5, deg67_5, deg112_5 };

namespace detail {

// Applies a single-photon label map by linearity.  `fn` receives the photon
// label and an emit callback (label', coeff).
template <typename Fn>
StateVector map_photon(const StateVector& state, Photon photon, Fn&& fn) {
    StateVector out(state.stage(), state.prune_threshold());
    for (const auto& [basis, amp] : state.amplitudes()) {
        const PhotonLabel& lab = photon == Photon::A ? basis.a : basis.b;
        fn(lab, [&](const PhotonLabel& lab2, Complex c) {
            JointBasis b2 = basis;
            (photon == Photon::A ? b2.a : b2.b) = lab2;
            out.add(b2, amp * c);
        });
    }
    return out;
}

}  // namespace detail

// 50:50 beam splitter, a Hadamard on the spatial modes:
//   arm1 -> (arm1 + arm2)/sqrt2,  arm2 -> (arm1 - arm2)/sqrt2.
inline StateVector beam_splitter(const StateVector& state, Photon photon) {
    if (state.stage() != Stage::input)
        throw StageMismatchError("beam_splitter requires input-arm stage");
    const double s2 = 1.0 / std::sqrt(2.0);
    return detail::map_photon(state, photon, [&](const PhotonLabel& lab, auto emit) {
        PhotonLabel one = lab, two = lab;
        one.mode = static_cast<std::uint8_t>(Arm::one);
        two.mode = static_cast<std::uint8_t>(Arm::two);
        emit(one, s2);
        emit(two, lab.arm() == Arm::one ? s2 : -s2);
    });
}

// Routing table for a polarizing beam splitter: (arm, polarization) -> arm.
using PbsRouting = std::map<std::pair<Arm, Polarization>, Arm>;

// The arm-crossing configuration used in steps 2 and 3: R transmits (keeps
// its arm), L is reflected across.
inline PbsRouting pbs_cross_l() {
    return {
        {{Arm::one, Polarization::R}, Arm::one},
        {{Arm::two, Polarization::R}, Arm::two},
        {{Arm::one, Polarization::L}, Arm::two},
        {{Arm::two, Polarization::L}, Arm::one},
    };
}

// Relabels spatial modes per the routing; amplitudes unchanged.  Entries
// absent from the table act as identity.  Two occupied labels colliding on
// the same output (arm, polarization) is a mode-collision error.
inline StateVector pbs_route(const StateVector& state, Photon photon,
                             const PbsRouting& routing) {
    if (state.stage() != Stage::input)
        throw StageMismatchError("pbs_route requires input-arm stage");
    std::map<std::tuple<Arm, Polarization, TimeBin>, std::tuple<Arm, Polarization, TimeBin>> seen;
    for (const auto& [basis, amp] : state.amplitudes()) {
        const PhotonLabel& lab = photon == Photon::A ? basis.a : basis.b;
        auto it = routing.find({lab.arm(), lab.pol});
        const Arm dst = it == routing.end() ? lab.arm() : it->second;
        auto key = std::make_tuple(dst, lab.pol, lab.time);
        auto src = std::make_tuple(lab.arm(), lab.pol, lab.time);
        auto [pos, inserted] = seen.emplace(key, src);
        if (!inserted && pos->second != src)
            throw ModeCollisionError("pbs_route: two occupied modes collide on arm " +
                                     std::to_string(static_cast<int>(dst)));
    }
    return detail::map_photon(state, photon, [&](const PhotonLabel& lab, auto emit) {
        auto it = routing.find({lab.arm(), lab.pol});
        PhotonLabel dst = lab;
        if (it != routing.end()) dst.mode = static_cast<std::uint8_t>(it->second);
        emit(dst, 1.0);
    });
}

// Half-wave plate truth tables:
//   22.5:  R -> (R+L)/sqrt2,   L -> (R-L)/sqrt2
//   67.5:  R -> (-R+L)/sqrt2,  L -> (R+L)/sqrt2
//   112.5: R -> -(R+L)/sqrt2,  L -> (-R+L)/sqrt2
inline StateVector hwp(const StateVector& state, Photon photon, HwpAngle angle) {
    const double s2 = 1.0 / std::sqrt(2.0);
    struct Row {
        double rr, rl;  // image of R on (R, L)
        double lr, ll;  // image of L on (R, L)
    };
    Row row{};
    switch (angle) {
        case HwpAngle::deg22_5: row = {s2, s2, s2, -s2}; break;
        case HwpAngle::deg67_5: row = {-s2, s2, s2, s2}; break;
        case HwpAngle::deg112_5: row = {-s2, -s2, -s2, s2}; break;
    }
    return detail::map_photon(state, photon, [&](const PhotonLabel& lab, auto emit) {
        PhotonLabel r = lab, l = lab;
        r.pol = Polarization::R;
        l.pol = Polarization::L;
        if (lab.pol == Polarization::R) {
            emit(r, row.rr);
            emit(l, row.rl);
        } else {
            emit(r, row.lr);
            emit(l, row.ll);
        }
    });
}

// Pockels cell: R <-> L on exactly the components whose time-bin equals
// `bin`; everything else untouched.
inline StateVector pockels(const StateVector& state, Photon photon, TimeBin bin) {
    if (bin == TimeBin::erased)
        throw StageMismatchError("pockels: bin must be s or l");
    if (state.stage() != Stage::input)
        throw StageMismatchError("pockels requires a non-erased time-bin");
    return detail::map_photon(state, photon, [&](const PhotonLabel& lab, auto emit) {
        PhotonLabel dst = lab;
        if (lab.time == bin) dst.pol = flipped(dst.pol);
        emit(dst, 1.0);
    });
}

struct WfcOutcome {
    StateVector state;
    double loss = 0.0;  // attenuator deficit (1 - |amplitude|^2) * selected weight
};

// Wave-form corrector: multiplies each selected component by a scalar
// (in this scheme d = (p/2)(r_h - r_0)), leaving labels unchanged.
inline WfcOutcome wfc(const StateVector& state, Photon photon,
                      const ComponentSelector& selector, Complex amplitude) {
    WfcOutcome out;
    out.state = StateVector(state.stage(), state.prune_threshold());
    const double deficit = 1.0 - std::norm(amplitude);
    for (const auto& [basis, amp] : state.amplitudes()) {
        const PhotonLabel& lab = photon == Photon::A ? basis.a : basis.b;
        if (selector(lab)) {
            out.state.add(basis, amp * amplitude);
            out.loss += std::norm(amp) * deficit;
        } else {
            out.state.add(basis, amp);
        }
    }
    return out;
}

}  // namespace hbsa
