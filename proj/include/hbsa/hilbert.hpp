// Basis labels, sparse state vectors, hyper-Bell state construction and
// Born-rule outcome extraction for the two-photon / three-spin system.
#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace hbsa {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StageMismatchError : Error {
    using Error::Error;
};
struct DegenerateInputError : Error {
    using Error::Error;
};
struct SingularParametersError : Error {
    using Error::Error;
};
struct ModeCollisionError : Error {
    using Error::Error;
};
struct UnclassifiableError : Error {
    using Error::Error;
};
struct ProtocolViolationError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Single-photon and spin labels
// ---------------------------------------------------------------------------

enum class Polarization : std::uint8_t { R, L };

inline Polarization flipped(Polarization p) {
    return p == Polarization::R ? Polarization::L : Polarization::R;
}

// Which photon an element acts on.
enum class Photon : std::uint8_t { A, B };

// Input arms before block4.  Photon A lives in a-modes, photon B in b-modes;
// the Photon tag carried alongside keeps them apart.
enum class Arm : std::uint8_t { one = 1, two = 2 };

inline Arm other(Arm a) { return a == Arm::one ? Arm::two : Arm::one; }

// Detector arms after block4: input arm k fans out to sub-arms k1, k2.
enum class DetectorArm : std::uint8_t { d11, d12, d21, d22 };

inline DetectorArm detector_arm(Arm input, int sub) {
    int k = static_cast<int>(input);
    return static_cast<DetectorArm>((k - 1) * 2 + (sub - 1));
}

enum class TimeBin : std::uint8_t { s, l, erased };

enum class SpinVal : std::uint8_t { plus, minus };

inline SpinVal flipped(SpinVal s) {
    return s == SpinVal::plus ? SpinVal::minus : SpinVal::plus;
}

// Stage of the photonic basis: input arms (before block4) or detector arms.
enum class Stage : std::uint8_t { input, detector };

// One photon's labels.  `mode` indexes Arm (input stage) or DetectorArm
// (detector stage); the owning StateVector's stage disambiguates.  Time is
// `erased` exactly when the photon has passed block4.
struct PhotonLabel {
    std::uint8_t mode = 0;
    Polarization pol = Polarization::R;
    TimeBin time = TimeBin::l;

    auto operator<=>(const PhotonLabel&) const = default;

    Arm arm() const { return static_cast<Arm>(mode); }
    DetectorArm det() const { return static_cast<DetectorArm>(mode); }

    static PhotonLabel in(Arm a, Polarization p, TimeBin t) {
        return {static_cast<std::uint8_t>(a), p, t};
    }
    static PhotonLabel out(DetectorArm d, Polarization p) {
        return {static_cast<std::uint8_t>(d), p, TimeBin::erased};
    }
};

struct SpinTriple {
    SpinVal q1 = SpinVal::plus;
    SpinVal q2 = SpinVal::plus;
    SpinVal q3 = SpinVal::plus;

    auto operator<=>(const SpinTriple&) const = default;

    SpinVal& operator[](int qd_index) {
        switch (qd_index) {
            case 1: return q1;
            case 2: return q2;
            case 3: return q3;
        }
        throw Error("QD index out of range: " + std::to_string(qd_index));
    }
    SpinVal operator[](int qd_index) const {
        return const_cast<SpinTriple&>(*this)[qd_index];
    }
};

// Joint basis label: both photons plus the three QD spins.
struct JointBasis {
    PhotonLabel a;
    PhotonLabel b;
    SpinTriple spins;

    auto operator<=>(const JointBasis&) const = default;
};

// ---------------------------------------------------------------------------
// Hyper-Bell labels
// ---------------------------------------------------------------------------

enum class BellType : std::uint8_t { phi, psi };
enum class BellSign : std::int8_t { plus = 1, minus = -1 };

struct BellLabel {
    BellType type = BellType::phi;
    BellSign sign = BellSign::plus;

    auto operator<=>(const BellLabel&) const = default;
};

// One Bell tag per degree of freedom (spatial, polarization, time-bin).
struct HyperBellLabel {
    BellLabel spatial;
    BellLabel polarization;
    BellLabel timebin;

    auto operator<=>(const HyperBellLabel&) const = default;
};

// All 64 labels in a fixed canonical order (S outermost, T innermost).
inline const std::array<BellLabel, 4>& bell_labels() {
    static const std::array<BellLabel, 4> k = {
        BellLabel{BellType::phi, BellSign::plus},
        BellLabel{BellType::phi, BellSign::minus},
        BellLabel{BellType::psi, BellSign::plus},
        BellLabel{BellType::psi, BellSign::minus},
    };
    return k;
}

inline std::array<HyperBellLabel, 64> all_hyper_bell_labels() {
    std::array<HyperBellLabel, 64> out;
    int i = 0;
    for (const auto& s : bell_labels())
        for (const auto& p : bell_labels())
            for (const auto& t : bell_labels()) out[i++] = {s, p, t};
    return out;
}

// ---------------------------------------------------------------------------
// Sparse state vector
// ---------------------------------------------------------------------------

inline constexpr double kDefaultPruneThreshold = 1e-14;
inline constexpr double kDefaultTolerance = 1e-10;

// Sparse map basis label -> complex amplitude.  Sub-normalized states are
// first class: the pipeline multiplies in attenuation factors instead of
// renormalizing, so efficiency falls out of the final squared norm.
class StateVector {
  public:
    using Map = std::map<JointBasis, Complex>;

    StateVector() = default;
    explicit StateVector(Stage stage, double prune_threshold = kDefaultPruneThreshold)
        : stage_(stage), prune_(prune_threshold) {}

    Stage stage() const { return stage_; }
    double prune_threshold() const { return prune_; }
    const Map& amplitudes() const { return amps_; }
    bool empty() const { return amps_.empty(); }
    std::size_t size() const { return amps_.size(); }

    void add(const JointBasis& basis, Complex amp) {
        auto it = amps_.find(basis);
        if (it == amps_.end()) {
            if (std::abs(amp) > prune_) amps_.emplace(basis, amp);
        } else {
            it->second += amp;
            if (std::abs(it->second) <= prune_) amps_.erase(it);
        }
    }

    Complex amplitude(const JointBasis& basis) const {
        auto it = amps_.find(basis);
        return it == amps_.end() ? Complex{0.0, 0.0} : it->second;
    }

    double squared_norm() const {
        double n = 0.0;
        for (const auto& [basis, amp] : amps_) n += std::norm(amp);
        return n;
    }

    StateVector scaled(Complex c) const {
        StateVector out(stage_, prune_);
        for (const auto& [basis, amp] : amps_) out.add(basis, amp * c);
        return out;
    }

    void prune(double threshold) {
        for (auto it = amps_.begin(); it != amps_.end();) {
            if (std::abs(it->second) <= threshold)
                it = amps_.erase(it);
            else
                ++it;
        }
    }

  private:
    Stage stage_ = Stage::input;
    double prune_ = kDefaultPruneThreshold;
    Map amps_;
};

inline void require_same_stage(const StateVector& a, const StateVector& b) {
    if (a.stage() != b.stage())
        throw StageMismatchError("states live on different basis stages");
}

// Conjugate-linear in the first argument.
inline Complex inner_product(const StateVector& a, const StateVector& b) {
    require_same_stage(a, b);
    Complex ip{0.0, 0.0};
    for (const auto& [basis, amp] : a.amplitudes())
        ip += std::conj(amp) * b.amplitude(basis);
    return ip;
}

// True iff |<a|b>| >= (1-tol)*|a||b|.
inline bool equal_up_to_global_phase(const StateVector& a, const StateVector& b,
                                     double tol = kDefaultTolerance) {
    const double na = a.squared_norm();
    const double nb = b.squared_norm();
    if (na == 0.0 || nb == 0.0)
        throw DegenerateInputError("equal_up_to_global_phase: zero vector");
    return std::abs(inner_product(a, b)) >= (1.0 - tol) * std::sqrt(na * nb);
}

// ---------------------------------------------------------------------------
// Hyper-Bell state construction
// ---------------------------------------------------------------------------

namespace detail {

struct PairTerm {
    std::uint8_t a, b;  // per-photon label value
    double coeff;
};

inline std::array<PairTerm, 2> bell_terms(BellLabel l, std::uint8_t v0, std::uint8_t v1) {
    const double s = l.sign == BellSign::plus ? 1.0 : -1.0;
    if (l.type == BellType::phi) return {PairTerm{v0, v0, 1.0}, PairTerm{v1, v1, s}};
    return {PairTerm{v0, v1, 1.0}, PairTerm{v1, v0, s}};
}

}  // namespace detail

// |Theta_S> x |Gamma_P> x |Xi_T> x |+>1|+>2|+>3, normalized.
// Spatial phi: (a1b1 +- a2b2)/sqrt2, psi: (a1b2 +- a2b1)/sqrt2; polarization
// phi: (RR +- LL)/sqrt2, psi: (RL +- LR)/sqrt2; time phi: (ll +- ss)/sqrt2,
// psi: (sl +- ls)/sqrt2.
inline StateVector make_hyper_bell(const HyperBellLabel& label,
                                   double prune_threshold = kDefaultPruneThreshold) {
    StateVector st(Stage::input, prune_threshold);
    const auto sterms = detail::bell_terms(label.spatial, static_cast<std::uint8_t>(Arm::one),
                                           static_cast<std::uint8_t>(Arm::two));
    const auto pterms = detail::bell_terms(label.polarization,
                                           static_cast<std::uint8_t>(Polarization::R),
                                           static_cast<std::uint8_t>(Polarization::L));
    // Time phi pairs (l,l)/(s,s); psi pairs (s,l)/(l,s).
    const auto tterms = detail::bell_terms(label.timebin, static_cast<std::uint8_t>(
                                           label.timebin.type == BellType::phi ? TimeBin::l : TimeBin::s),
                                           static_cast<std::uint8_t>(
                                           label.timebin.type == BellType::phi ? TimeBin::s : TimeBin::l));
    const double c = 1.0 / (2.0 * std::sqrt(2.0));
    for (const auto& s : sterms)
        for (const auto& p : pterms)
            for (const auto& t : tterms) {
                JointBasis basis;
                basis.a = PhotonLabel{s.a, static_cast<Polarization>(p.a),
                                      static_cast<TimeBin>(t.a)};
                basis.b = PhotonLabel{s.b, static_cast<Polarization>(p.b),
                                      static_cast<TimeBin>(t.b)};
                st.add(basis, c * s.coeff * p.coeff * t.coeff);
            }
    return st;
}

// ---------------------------------------------------------------------------
// Born-rule outcome extraction (detector stage)
// ---------------------------------------------------------------------------

// One two-photon detection signature: detector arm + polarization per photon,
// stored in canonical (A, B) order.
struct DetectorOutcome {
    DetectorArm arm_a;
    Polarization pol_a;
    DetectorArm arm_b;
    Polarization pol_b;

    auto operator<=>(const DetectorOutcome&) const = default;
};

using OutcomeKey = std::pair<DetectorOutcome, SpinTriple>;
using OutcomeDistribution = std::map<OutcomeKey, double>;

// Probability of each (signature, spin triple); sums to the squared norm.
inline OutcomeDistribution outcome_distribution(const StateVector& state) {
    if (state.stage() != Stage::detector)
        throw StageMismatchError("outcome_distribution requires a post-block4 state");
    OutcomeDistribution dist;
    for (const auto& [basis, amp] : state.amplitudes()) {
        DetectorOutcome o{basis.a.det(), basis.a.pol, basis.b.det(), basis.b.pol};
        dist[{o, basis.spins}] += std::norm(amp);
    }
    return dist;
}

// ---------------------------------------------------------------------------
// Printable names (canonical string forms, used by reports and tests)
// ---------------------------------------------------------------------------

inline char pol_char(Polarization p) { return p == Polarization::R ? 'R' : 'L'; }
inline char spin_char(SpinVal s) { return s == SpinVal::plus ? '+' : '-'; }

inline std::string detector_arm_name(DetectorArm d) {
    switch (d) {
        case DetectorArm::d11: return "11";
        case DetectorArm::d12: return "12";
        case DetectorArm::d21: return "21";
        case DetectorArm::d22: return "22";
    }
    return "??";
}

// Canonical signature grammar: a<arm><pol>:b<arm><pol>, e.g. "a12L:b21R".
inline std::string signature_string(const DetectorOutcome& o) {
    return "a" + detector_arm_name(o.arm_a) + pol_char(o.pol_a) + ":b" +
           detector_arm_name(o.arm_b) + pol_char(o.pol_b);
}

inline std::string spins_string(const SpinTriple& s) {
    return std::string{spin_char(s.q1), spin_char(s.q2), spin_char(s.q3)};
}

inline std::string bell_string(const BellLabel& l, char dof) {
    std::string out = l.type == BellType::phi ? "phi" : "psi";
    out += dof;
    out += l.sign == BellSign::plus ? '+' : '-';
    return out;
}

// Canonical label form, e.g. "phiS+,psiP-,phiT+".
inline std::string label_string(const HyperBellLabel& l) {
    return bell_string(l.spatial, 'S') + "," + bell_string(l.polarization, 'P') + "," +
           bell_string(l.timebin, 'T');
}

}  // namespace hbsa
