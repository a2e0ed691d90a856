// Shared generators for the test suites.
#pragma once

#include <random>

#include "hbsa/analyzer.hpp"

namespace hbsa::testing {

inline std::mt19937_64& test_rng() {
    static std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    return rng;
}

inline double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(test_rng()() >> 11) * 0x1.0p-53);
}

// A parameter set in the physically sensible sweep box; gamma kept positive
// so g = 0 never hits the removable 0/0 of the hot-cavity formula.
inline CavityParams random_params(bool with_detunings = true) {
    CavityParams c;
    c.g = uniform(0.2, 4.0);
    c.kappa_s = uniform(0.0, 0.8);
    c.gamma = uniform(0.01, 0.3);
    c.p = uniform(0.3, 1.0);
    if (with_detunings) {
        c.detuning_c = uniform(-0.5, 0.5);
        c.detuning_x = uniform(-0.5, 0.5);
    }
    return c;
}

// Random normalized input-stage state over the full 512-dim basis (sparse).
inline StateVector random_input_state(int terms = 24) {
    StateVector st(Stage::input);
    for (int i = 0; i < terms; ++i) {
        JointBasis b;
        b.a = PhotonLabel::in(test_rng()() & 1 ? Arm::one : Arm::two,
                              test_rng()() & 1 ? Polarization::R : Polarization::L,
                              test_rng()() & 1 ? TimeBin::s : TimeBin::l);
        b.b = PhotonLabel::in(test_rng()() & 1 ? Arm::one : Arm::two,
                              test_rng()() & 1 ? Polarization::R : Polarization::L,
                              test_rng()() & 1 ? TimeBin::s : TimeBin::l);
        b.spins = SpinTriple{test_rng()() & 1 ? SpinVal::plus : SpinVal::minus,
                             test_rng()() & 1 ? SpinVal::plus : SpinVal::minus,
                             test_rng()() & 1 ? SpinVal::plus : SpinVal::minus};
        st.add(b, Complex{uniform(-1.0, 1.0), uniform(-1.0, 1.0)});
    }
    const double n = std::sqrt(st.squared_norm());
    return st.scaled(1.0 / n);
}

inline HyperBellLabel label_of(const char* s, const char* p, const char* t) {
    auto mk = [](const char* v) {
        BellLabel b;
        b.type = v[0] == 'f' ? BellType::phi : BellType::psi;  // "f+" / "s-"
        b.sign = v[1] == '+' ? BellSign::plus : BellSign::minus;
        return b;
    };
    return HyperBellLabel{mk(s), mk(p), mk(t)};
}

}  // namespace hbsa::testing
