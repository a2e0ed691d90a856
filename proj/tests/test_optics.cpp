#include <catch2/catch_amalgamated.hpp>

#include "hbsa/optics.hpp"
#include "helpers.hpp"

using namespace hbsa;
using hbsa::testing::label_of;

namespace {

StateVector single(Arm arm, Polarization pol, TimeBin t) {
    StateVector st(Stage::input);
    JointBasis b;
    b.a = PhotonLabel::in(arm, pol, t);
    b.b = PhotonLabel::in(Arm::one, Polarization::R, TimeBin::l);
    st.add(b, 1.0);
    return st;
}

bool states_equal(const StateVector& a, const StateVector& b, double tol = 1e-12) {
    for (const auto& [basis, amp] : a.amplitudes())
        if (std::abs(amp - b.amplitude(basis)) > tol) return false;
    for (const auto& [basis, amp] : b.amplitudes())
        if (std::abs(amp - a.amplitude(basis)) > tol) return false;
    return true;
}

// Weight of the other photon's labels must be untouched by one-photon elements.
std::map<PhotonLabel, double> photon_b_marginal(const StateVector& st) {
    std::map<PhotonLabel, double> out;
    for (const auto& [basis, amp] : st.amplitudes()) out[basis.b] += std::norm(amp);
    return out;
}

}  // namespace

TEST_CASE("beam splitter acts as the spatial Hadamard") {
    const auto st = single(Arm::one, Polarization::R, TimeBin::l);
    const auto out = beam_splitter(st, Photon::A);
    const double s2 = 1.0 / std::sqrt(2.0);
    JointBasis b1, b2;
    b1.a = PhotonLabel::in(Arm::one, Polarization::R, TimeBin::l);
    b2.a = PhotonLabel::in(Arm::two, Polarization::R, TimeBin::l);
    b1.b = b2.b = PhotonLabel::in(Arm::one, Polarization::R, TimeBin::l);
    REQUIRE(std::abs(out.amplitude(b1) - s2) < 1e-15);
    REQUIRE(std::abs(out.amplitude(b2) - s2) < 1e-15);
}

TEST_CASE("beam splitter squared is the identity") {
    const auto st = testing::random_input_state();
    const auto out = beam_splitter(beam_splitter(st, Photon::A), Photon::A);
    REQUIRE(states_equal(st, out));
}

TEST_CASE("BS on A then B maps psi_S+ to phi_S-") {
    const auto psi = make_hyper_bell(label_of("s+", "f+", "f+"));
    const auto out = beam_splitter(beam_splitter(psi, Photon::A), Photon::B);
    const auto expect = make_hyper_bell(label_of("f-", "f+", "f+"));
    REQUIRE(states_equal(out, expect));
}

TEST_CASE("beam splitter rejects detector-stage states") {
    StateVector st(Stage::detector);
    JointBasis b;
    b.a = PhotonLabel::out(DetectorArm::d11, Polarization::R);
    b.b = PhotonLabel::out(DetectorArm::d11, Polarization::R);
    st.add(b, 1.0);
    REQUIRE_THROWS_AS(beam_splitter(st, Photon::A), StageMismatchError);
}

TEST_CASE("pbs_route with an identity table is a no-op") {
    const auto st = testing::random_input_state();
    REQUIRE(states_equal(st, pbs_route(st, Photon::A, {})));
}

TEST_CASE("the L-crossing PBS flips the polarization sign of phi_S- pairs") {
    // (phiS-, phiP+-) -> (phiS-, phiP-+): the step-2 sign readout
    for (const char* sign : {"f+", "f-"}) {
        const auto in = make_hyper_bell(label_of("f-", sign, "f+"));
        auto out = pbs_route(in, Photon::A, pbs_cross_l());
        out = pbs_route(out, Photon::B, pbs_cross_l());
        const auto flippedp = make_hyper_bell(
            label_of("f-", sign[1] == '+' ? "f-" : "f+", "f+"));
        REQUIRE(states_equal(out, flippedp));
    }
    // (phiS+, phiP+-) is left unchanged
    const auto in = make_hyper_bell(label_of("f+", "f-", "f+"));
    auto out = pbs_route(in, Photon::A, pbs_cross_l());
    out = pbs_route(out, Photon::B, pbs_cross_l());
    REQUIRE(states_equal(out, in));
}

TEST_CASE("pbs_route reports mode collisions") {
    StateVector st(Stage::input);
    JointBasis b1, b2;
    b1.a = PhotonLabel::in(Arm::one, Polarization::R, TimeBin::l);
    b1.b = PhotonLabel::in(Arm::one, Polarization::R, TimeBin::l);
    b2 = b1;
    b2.a.mode = static_cast<std::uint8_t>(Arm::two);
    st.add(b1, 0.7);
    st.add(b2, 0.7);
    PbsRouting merge{{{Arm::one, Polarization::R}, Arm::one},
                     {{Arm::two, Polarization::R}, Arm::one}};
    REQUIRE_THROWS_AS(pbs_route(st, Photon::A, merge), ModeCollisionError);
}

TEST_CASE("half-wave plate truth tables") {
    const double s2 = 1.0 / std::sqrt(2.0);
    const auto r = single(Arm::one, Polarization::R, TimeBin::l);
    JointBasis br, bl;
    br.a = PhotonLabel::in(Arm::one, Polarization::R, TimeBin::l);
    bl.a = PhotonLabel::in(Arm::one, Polarization::L, TimeBin::l);
    br.b = bl.b = PhotonLabel::in(Arm::one, Polarization::R, TimeBin::l);

    auto out = hwp(r, Photon::A, HwpAngle::deg22_5);
    REQUIRE(std::abs(out.amplitude(br) - s2) < 1e-15);
    REQUIRE(std::abs(out.amplitude(bl) - s2) < 1e-15);

    out = hwp(r, Photon::A, HwpAngle::deg67_5);
    REQUIRE(std::abs(out.amplitude(br) + s2) < 1e-15);
    REQUIRE(std::abs(out.amplitude(bl) - s2) < 1e-15);

    out = hwp(r, Photon::A, HwpAngle::deg112_5);
    REQUIRE(std::abs(out.amplitude(br) + s2) < 1e-15);
    REQUIRE(std::abs(out.amplitude(bl) + s2) < 1e-15);
}

TEST_CASE("each HWP angle is an involution") {
    const auto st = testing::random_input_state();
    for (auto angle : {HwpAngle::deg22_5, HwpAngle::deg67_5, HwpAngle::deg112_5}) {
        const auto out = hwp(hwp(st, Photon::B, angle), Photon::B, angle);
        REQUIRE(states_equal(st, out));
    }
}

TEST_CASE("Pockels cell flips polarization only in its bin") {
    const auto in_l = single(Arm::one, Polarization::R, TimeBin::l);
    auto out = pockels(in_l, Photon::A, TimeBin::l);
    JointBasis expect;
    expect.a = PhotonLabel::in(Arm::one, Polarization::L, TimeBin::l);
    expect.b = PhotonLabel::in(Arm::one, Polarization::R, TimeBin::l);
    REQUIRE(std::abs(out.amplitude(expect) - 1.0) < 1e-15);

    const auto in_s = single(Arm::one, Polarization::R, TimeBin::s);
    out = pockels(in_s, Photon::A, TimeBin::l);
    REQUIRE(states_equal(out, in_s));
}

TEST_CASE("PC_s then PC_l flips the polarization globally") {
    const auto st = testing::random_input_state();
    const auto both = pockels(pockels(st, Photon::A, TimeBin::s), Photon::A, TimeBin::l);
    StateVector expect(Stage::input);
    for (const auto& [basis, amp] : st.amplitudes()) {
        JointBasis b = basis;
        b.a.pol = flipped(b.a.pol);
        expect.add(b, amp);
    }
    REQUIRE(states_equal(both, expect));
}

TEST_CASE("Pockels cell rejects erased time-bins") {
    StateVector st(Stage::detector);
    JointBasis b;
    b.a = PhotonLabel::out(DetectorArm::d11, Polarization::R);
    b.b = PhotonLabel::out(DetectorArm::d11, Polarization::R);
    st.add(b, 1.0);
    REQUIRE_THROWS_AS(pockels(st, Photon::A, TimeBin::l), StageMismatchError);
    REQUIRE_THROWS_AS(pockels(st, Photon::A, TimeBin::erased), StageMismatchError);
}

TEST_CASE("wave-form corrector scales selected components") {
    const auto always = [](const PhotonLabel&) { return true; };
    const auto st = testing::random_input_state();
    REQUIRE(states_equal(wfc(st, Photon::A, always, 1.0).state, st));

    // amplitude 10/11 on a weight-0.5 component -> weight 50/121
    StateVector half(Stage::input);
    JointBasis b1, b2;
    b1.a = PhotonLabel::in(Arm::one, Polarization::R, TimeBin::l);
    b1.b = PhotonLabel::in(Arm::one, Polarization::R, TimeBin::l);
    b2 = b1;
    b2.a.mode = static_cast<std::uint8_t>(Arm::two);
    half.add(b1, std::sqrt(0.5));
    half.add(b2, std::sqrt(0.5));
    const auto out = wfc(half, Photon::A,
                         [](const PhotonLabel& l) { return l.arm() == Arm::one; },
                         Complex{10.0 / 11.0, 0.0});
    REQUIRE(std::norm(out.state.amplitude(b1)) == Catch::Approx(50.0 / 121.0).margin(1e-12));
    REQUIRE(std::norm(out.state.amplitude(b2)) == Catch::Approx(0.5).margin(1e-15));
    REQUIRE(out.loss == Catch::Approx(0.5 * (1.0 - 100.0 / 121.0)).margin(1e-12));
}

TEST_CASE("elements are norm-preserving and act on one photon only") {
    for (int i = 0; i < 25; ++i) {
        const auto st = testing::random_input_state();
        const auto before = photon_b_marginal(st);
        for (const auto& out :
             {beam_splitter(st, Photon::A), pbs_route(st, Photon::A, pbs_cross_l()),
              hwp(st, Photon::A, HwpAngle::deg22_5), hwp(st, Photon::A, HwpAngle::deg67_5),
              hwp(st, Photon::A, HwpAngle::deg112_5), pockels(st, Photon::A, TimeBin::s)}) {
            REQUIRE(out.squared_norm() == Catch::Approx(st.squared_norm()).margin(1e-12));
            const auto after = photon_b_marginal(out);
            REQUIRE(after.size() == before.size());
            for (const auto& [lab, w] : before)
                REQUIRE(after.at(lab) == Catch::Approx(w).margin(1e-12));
        }
    }
}

TEST_CASE("HWP at 22.5 conjugates the polarization-parity map into the swap") {
    // hwp . (sign flip on L) . hwp == (R <-> L swap), per photon
    const auto zmap = [](const StateVector& s, Photon ph) {
        return wfc(s, ph, [](const PhotonLabel& l) { return l.pol == Polarization::L; },
                   Complex{-1.0, 0.0})
            .state;
    };
    const auto xmap = [](const StateVector& s, Photon ph) {
        return pockels(pockels(s, ph, TimeBin::s), ph, TimeBin::l);
    };
    for (int i = 0; i < 10; ++i) {
        const auto st = testing::random_input_state();
        const auto lhs = hwp(zmap(hwp(st, Photon::A, HwpAngle::deg22_5), Photon::A),
                             Photon::A, HwpAngle::deg22_5);
        REQUIRE(states_equal(lhs, xmap(st, Photon::A)));
    }
}
