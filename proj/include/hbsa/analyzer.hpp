// The four-step HBSA pipeline, its equation-level oracle, herald
// bookkeeping and the 64-state classifier.
//
// Element-level routing (validated against the oracle on all 64 basis
// inputs; any routing passing that test is acceptable):
//   step 1: BS, block1 on arm 1, WFC on arm 2, BS          (per photon)
//   step 2: block2 on arm 2, WFC on arm 1, L-crossing PBS  (per photon)
//   step 3: HWP 22.5, L-crossing PBS, block3 on arm 2, WFC on arm 1,
//           L-crossing PBS                                 (per photon)
//   block4: per photon, arm k fans out to detector arms {k1, k2} and the
//           time-bin is erased into polarization/sub-arm parity.
#pragma once

#include <set>
#include <vector>

#include "hbsa/emitter.hpp"
#include "hbsa/hilbert.hpp"
#include "hbsa/optics.hpp"

namespace hbsa {

// Accumulated click probabilities for the three herald detectors plus the
// unmonitored side-leakage/decay bucket.
struct HeraldLedger {
    double p_d1 = 0.0;
    double p_d2 = 0.0;
    double p_d3 = 0.0;
    double p_loss = 0.0;

    double total() const { return p_d1 + p_d2 + p_d3 + p_loss; }
};

struct StepResult {
    StateVector state;
    double herald_contrib = 0.0;
    double loss_contrib = 0.0;
};

namespace detail {

inline bool on_arm_one(const PhotonLabel& l) { return l.arm() == Arm::one; }
inline bool on_arm_two(const PhotonLabel& l) { return l.arm() == Arm::two; }

}  // namespace detail

// Step 1 (heralded by D1): spatial Bell label preserved, QD1 spin flips to
// |-> iff the spatial sign is -, factor d^2 accrued.
inline StepResult step1(const StateVector& input, const CavityParams& params) {
    const Complex d = success_amplitude(params);
    StepResult r{input, 0.0, 0.0};
    for (Photon ph : {Photon::A, Photon::B}) {
        r.state = beam_splitter(r.state, ph);
        auto blk = block_apply(r.state, 1, ph, detail::on_arm_one, params);
        r.herald_contrib += blk.herald_probability;
        r.loss_contrib += blk.loss;
        auto att = wfc(blk.state, ph, detail::on_arm_two, d);
        r.loss_contrib += att.loss;
        r.state = beam_splitter(att.state, ph);
    }
    return r;
}

// Step 2 (heralded by D2): QD2 spin flips iff the spatial label is psi, the
// spatial type toggles iff the polarization label is psi, and the
// polarization sign flips iff QD1 read |->; factor d^2 accrued.
inline StepResult step2(const StateVector& input, const CavityParams& params) {
    const Complex d = success_amplitude(params);
    StepResult r{input, 0.0, 0.0};
    for (Photon ph : {Photon::A, Photon::B}) {
        auto blk = block_apply(r.state, 2, ph, detail::on_arm_two, params);
        r.herald_contrib += blk.herald_probability;
        r.loss_contrib += blk.loss;
        auto att = wfc(blk.state, ph, detail::on_arm_one, d);
        r.loss_contrib += att.loss;
        r.state = pbs_route(att.state, ph, pbs_cross_l());
    }
    return r;
}

// Step 3 (heralded by D3): polarization map phi+ -> phi+, phi- -> psi+,
// psi+ -> phi-, psi- -> psi-; QD3 records the polarization sign (spatial phi)
// or its negation (spatial psi); factor d^2 accrued.
inline StepResult step3(const StateVector& input, const CavityParams& params) {
    const Complex d = success_amplitude(params);
    StepResult r{input, 0.0, 0.0};
    for (Photon ph : {Photon::A, Photon::B}) {
        r.state = hwp(r.state, ph, HwpAngle::deg22_5);
        r.state = pbs_route(r.state, ph, pbs_cross_l());
        auto blk = block_apply(r.state, 3, ph, detail::on_arm_two, params);
        r.herald_contrib += blk.herald_probability;
        r.loss_contrib += blk.loss;
        auto att = wfc(blk.state, ph, detail::on_arm_one, d);
        r.loss_contrib += att.loss;
        r.state = pbs_route(att.state, ph, pbs_cross_l());
    }
    return r;
}

namespace detail {

// Per-photon block4 map (PBSs + PCs net effect), pinned by the first four
// rows of the published block4 table: the symmetric completion that
// factorizes per photon and is real-orthogonal.
//   (k, R, l) -> (k1, R + L)/sqrt2     (k, R, s) -> (k2, R - L)/sqrt2
//   (k, L, l) -> (k2, R + L)/sqrt2     (k, L, s) -> (k1, R - L)/sqrt2
inline void block4_images(const PhotonLabel& lab,
                          const std::function<void(const PhotonLabel&, double)>& emit) {
    const double s2 = 1.0 / std::sqrt(2.0);
    const bool is_r = lab.pol == Polarization::R;
    const bool is_l_bin = lab.time == TimeBin::l;
    const int sub = (is_r == is_l_bin) ? 1 : 2;
    const double l_sign = is_l_bin ? s2 : -s2;
    emit(PhotonLabel::out(detector_arm(lab.arm(), sub), Polarization::R), s2);
    emit(PhotonLabel::out(detector_arm(lab.arm(), sub), Polarization::L), l_sign);
}

}  // namespace detail

// Block4: fans each input arm out to its two detector arms, erasing the
// time-bin into polarization/sub-arm parity.  Lossless and heraldless.
inline StateVector block4(const StateVector& input) {
    if (input.stage() == Stage::detector)
        throw StageMismatchError("block4: state has already passed block4");
    StateVector out(Stage::detector, input.prune_threshold());
    for (const auto& [basis, amp] : input.amplitudes()) {
        detail::block4_images(basis.a, [&](const PhotonLabel& la, double ca) {
            detail::block4_images(basis.b, [&](const PhotonLabel& lb, double cb) {
                JointBasis b2;
                b2.a = la;
                b2.b = lb;
                b2.spins = basis.spins;
                out.add(b2, amp * ca * cb);
            });
        });
    }
    return out;
}

// ---------------------------------------------------------------------------
// Equation-level oracle: the step maps transcribed as tables over the
// 64-element Bell-product basis, bypassing element composition.
// ---------------------------------------------------------------------------

// A Bell-product basis entry with spins; the oracle steps act on this.
struct LabelState {
    HyperBellLabel label;
    SpinTriple spins;
};

inline LabelState oracle_step1_map(const LabelState& in) {
    LabelState out = in;
    out.spins.q1 = in.label.spatial.sign == BellSign::plus ? SpinVal::plus : SpinVal::minus;
    return out;
}

inline LabelState oracle_step2_map(const LabelState& in) {
    LabelState out = in;
    out.spins.q2 = in.label.spatial.type == BellType::phi ? SpinVal::plus : SpinVal::minus;
    if (in.label.polarization.type == BellType::psi)
        out.label.spatial.type =
            in.label.spatial.type == BellType::phi ? BellType::psi : BellType::phi;
    if (in.spins.q1 == SpinVal::minus)
        out.label.polarization.sign =
            in.label.polarization.sign == BellSign::plus ? BellSign::minus : BellSign::plus;
    return out;
}

inline LabelState oracle_step3_map(const LabelState& in) {
    LabelState out = in;
    const BellLabel p = in.label.polarization;
    BellLabel q;
    if (p.type == BellType::phi && p.sign == BellSign::plus) q = {BellType::phi, BellSign::plus};
    else if (p.type == BellType::phi) q = {BellType::psi, BellSign::plus};
    else if (p.sign == BellSign::plus) q = {BellType::phi, BellSign::minus};
    else q = {BellType::psi, BellSign::minus};
    out.label.polarization = q;
    const bool plus = (p.sign == BellSign::plus) == (in.label.spatial.type == BellType::phi);
    out.spins.q3 = plus ? SpinVal::plus : SpinVal::minus;
    return out;
}

// One term of a block4 output pattern: photon A goes to sub-arm `sub_a` with
// polarization `pol_a`, photon B likewise, with a relative sign.
struct Block4Term {
    int sub_a;
    Polarization pol_a;
    int sub_b;
    Polarization pol_b;
    double sign;
};

// The 4-term (P, T)-pattern of the block4 table, one entry per detector
// pair within an arm pair.  Derived as operator images of the Pauli algebra
// pinned by its phi_P+ anchor rows.
inline std::array<Block4Term, 4> oracle_block4_pattern(const BellLabel& pol,
                                                       const BellLabel& time) {
    struct OutLabel {
        int sub;
        Polarization pol;
        double sign;
    };
    using Op = std::function<OutLabel(OutLabel)>;
    const Op ident = [](OutLabel y) { return y; };
    const Op xp = [](OutLabel y) { return OutLabel{y.sub, flipped(y.pol), y.sign}; };
    const Op zp = [](OutLabel y) {
        return OutLabel{y.sub, y.pol, y.pol == Polarization::R ? y.sign : -y.sign};
    };
    const Op xm = [](OutLabel y) { return OutLabel{3 - y.sub, y.pol, y.sign}; };
    const Op zm = [](OutLabel y) { return OutLabel{y.sub, y.pol, y.sub == 1 ? y.sign : -y.sign}; };
    const auto mul = [](Op f, Op g) { return Op([f, g](OutLabel y) { return f(g(y)); }); };

    Op pol_img = ident, time_img = ident;
    if (pol.type == BellType::phi && pol.sign == BellSign::minus) pol_img = mul(zm, xp);
    else if (pol.type == BellType::psi && pol.sign == BellSign::plus) pol_img = xm;
    else if (pol.type == BellType::psi) pol_img = mul(mul(zm, xp), xm);
    if (time.type == BellType::phi && time.sign == BellSign::minus) time_img = xp;
    else if (time.type == BellType::psi && time.sign == BellSign::plus) time_img = mul(xm, zp);
    else if (time.type == BellType::psi) time_img = mul(mul(xm, zp), xp);
    const Op img = mul(pol_img, time_img);

    std::array<Block4Term, 4> out{};
    int i = 0;
    for (int sub : {1, 2})
        for (Polarization p : {Polarization::R, Polarization::L}) {
            const OutLabel y{sub, p, 1.0};
            const OutLabel oy = img(y);
            out[i++] = Block4Term{oy.sub, oy.pol, y.sub, y.pol, oy.sign};
        }
    return out;
}

// Block4 oracle: the corrected table rows extended over the spatial arms.
// Output coefficients are (1/(2*sqrt2)) times the incoming scalar.
inline StateVector oracle_block4_state(const LabelState& in, Complex prefactor,
                                       double prune_threshold = kDefaultPruneThreshold) {
    StateVector out(Stage::detector, prune_threshold);
    const auto pattern = oracle_block4_pattern(in.label.polarization, in.label.timebin);
    struct ArmPair {
        Arm a, b;
        double sign;
    };
    const double ssign = in.label.spatial.sign == BellSign::plus ? 1.0 : -1.0;
    const std::array<ArmPair, 2> arms =
        in.label.spatial.type == BellType::phi
            ? std::array<ArmPair, 2>{ArmPair{Arm::one, Arm::one, 1.0},
                                     ArmPair{Arm::two, Arm::two, ssign}}
            : std::array<ArmPair, 2>{ArmPair{Arm::one, Arm::two, 1.0},
                                     ArmPair{Arm::two, Arm::one, ssign}};
    const double c = 1.0 / (2.0 * std::sqrt(2.0));
    for (const auto& ap : arms)
        for (const auto& t : pattern) {
            JointBasis basis;
            basis.a = PhotonLabel::out(detector_arm(ap.a, t.sub_a), t.pol_a);
            basis.b = PhotonLabel::out(detector_arm(ap.b, t.sub_b), t.pol_b);
            basis.spins = in.spins;
            out.add(basis, prefactor * c * ap.sign * t.sign);
        }
    return out;
}

// Ground-truth state after oracle steps 1..n applied to a freshly prepared
// label (spins +++), with the d^(2n) scalar accrued.  n = 4 includes block4.
inline StateVector oracle_state_after(const HyperBellLabel& label, int n,
                                      const CavityParams& params,
                                      double prune_threshold = kDefaultPruneThreshold) {
    if (n < 1 || n > 4) throw Error("oracle_state_after: n must be 1..4");
    const Complex d = success_amplitude(params);
    LabelState ls{label, {}};
    int steps = std::min(n, 3);
    if (steps >= 1) ls = oracle_step1_map(ls);
    if (steps >= 2) ls = oracle_step2_map(ls);
    if (steps >= 3) ls = oracle_step3_map(ls);
    Complex pref = std::pow(d, 2 * steps);
    if (n == 4) return oracle_block4_state(ls, pref, prune_threshold);
    StateVector st = make_hyper_bell(ls.label, prune_threshold);
    StateVector out(Stage::input, prune_threshold);
    for (const auto& [basis, amp] : st.amplitudes()) {
        JointBasis b2 = basis;
        b2.spins = ls.spins;
        out.add(b2, amp * pref);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

struct ClassificationRecord {
    SpinTriple spins;
    DetectorOutcome signature;
    HyperBellLabel label;
};

using SignatureSet = std::set<DetectorOutcome>;

// Final readout of one label per the oracle: spin triple + 8 signatures.
struct LabelReadout {
    SpinTriple spins;
    SignatureSet signatures;
};

inline LabelReadout oracle_readout(const HyperBellLabel& label) {
    const StateVector st = oracle_state_after(label, 4, CavityParams::ideal());
    LabelReadout out;
    bool first = true;
    for (const auto& [basis, amp] : st.amplitudes()) {
        if (first) {
            out.spins = basis.spins;
            first = false;
        } else if (basis.spins != out.spins) {
            throw ProtocolViolationError("oracle readout: spins not definite for " +
                                         label_string(label));
        }
        out.signatures.insert({basis.a.det(), basis.a.pol, basis.b.det(), basis.b.pol});
    }
    return out;
}

// The full table of 64 records, built once from the oracle.
class Classifier {
  public:
    Classifier() {
        for (const auto& label : all_hyper_bell_labels()) {
            const auto ro = oracle_readout(label);
            for (const auto& sig : ro.signatures) {
                auto [_, inserted] = table_.emplace(std::make_pair(ro.spins, sig), label);
                if (!inserted)
                    throw ProtocolViolationError("classification table is ambiguous at " +
                                                 spins_string(ro.spins) + " " +
                                                 signature_string(sig));
            }
            readouts_.emplace(label, ro);
        }
    }

    static const Classifier& instance() {
        static const Classifier k;
        return k;
    }

    // Unique label for a reachable (spins, signature) pair.
    HyperBellLabel classify(const SpinTriple& spins, const DetectorOutcome& signature) const {
        auto it = table_.find({spins, signature});
        if (it == table_.end())
            throw UnclassifiableError("no label for spins " + spins_string(spins) +
                                      " signature " + signature_string(signature));
        return it->second;
    }

    const LabelReadout& readout(const HyperBellLabel& label) const {
        return readouts_.at(label);
    }

    std::vector<ClassificationRecord> records() const {
        std::vector<ClassificationRecord> out;
        for (const auto& [key, label] : table_)
            out.push_back({key.first, key.second, label});
        return out;
    }

  private:
    std::map<std::pair<SpinTriple, DetectorOutcome>, HyperBellLabel> table_;
    std::map<HyperBellLabel, LabelReadout> readouts_;
};

inline HyperBellLabel classify(const SpinTriple& spins, const DetectorOutcome& signature) {
    return Classifier::instance().classify(spins, signature);
}

// ---------------------------------------------------------------------------
// Full analysis
// ---------------------------------------------------------------------------

struct AnalysisReport {
    HyperBellLabel input;
    HeraldLedger ledger;
    double success_probability = 0.0;
    OutcomeDistribution conditional_outcomes;  // renormalized to sum 1
    HyperBellLabel classified;
    double conditional_fidelity = 0.0;
    SpinTriple spins;  // the definite readout of the three QDs
};

namespace detail {

inline double fidelity_normalized(const StateVector& a, const StateVector& b) {
    const double na = a.squared_norm();
    const double nb = b.squared_norm();
    if (na == 0.0 || nb == 0.0) throw DegenerateInputError("fidelity: zero vector");
    return std::norm(inner_product(a, b)) / (na * nb);
}

}  // namespace detail

// Runs make_hyper_bell -> step1..3 -> block4 -> outcome_distribution, fills
// the ledger, classifies every reachable outcome back to the input label and
// computes the conditional fidelity against the ideal-parameter output.
inline AnalysisReport analyze(const HyperBellLabel& label, const CavityParams& params) {
    params.validate();
    AnalysisReport rep;
    rep.input = label;

    StateVector st = make_hyper_bell(label);
    const auto s1 = step1(st, params);
    const auto s2 = step2(s1.state, params);
    const auto s3 = step3(s2.state, params);
    const StateVector final_state = block4(s3.state);

    rep.ledger.p_d1 = s1.herald_contrib;
    rep.ledger.p_d2 = s2.herald_contrib;
    rep.ledger.p_d3 = s3.herald_contrib;
    rep.ledger.p_loss = s1.loss_contrib + s2.loss_contrib + s3.loss_contrib;
    rep.success_probability = final_state.squared_norm();

    if (rep.success_probability > 0.0) {
        const auto dist = outcome_distribution(final_state);
        bool have_spins = false;
        for (const auto& [key, prob] : dist) {
            rep.conditional_outcomes[key] = prob / rep.success_probability;
            if (!have_spins) {
                rep.spins = key.second;
                have_spins = true;
            }
            const HyperBellLabel got = classify(key.second, key.first);
            if (got != label)
                throw ProtocolViolationError("outcome " + signature_string(key.first) +
                                             " classified as " + label_string(got) +
                                             " but input was " + label_string(label));
        }
        rep.classified = label;
        const StateVector ideal = block4(
            step3(step2(step1(make_hyper_bell(label), CavityParams::ideal()).state,
                        CavityParams::ideal()).state,
                  CavityParams::ideal()).state);
        rep.conditional_fidelity = detail::fidelity_normalized(final_state, ideal);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Table verification
// ---------------------------------------------------------------------------

struct VerificationRow {
    HyperBellLabel label;
    SpinTriple spins;
    SignatureSet signatures;
    double success_probability = 0.0;
    bool verified = false;
    std::string note;
};

struct VerificationReport {
    std::vector<VerificationRow> rows;  // 64, in canonical label order
    int verified_count = 0;
    int ambiguity_count = 0;
    bool degenerate = false;  // |d| = 0: signature checks skipped
    double success_probability = 0.0;

    bool all_verified() const { return !degenerate && verified_count == 64 && ambiguity_count == 0; }
};

// Runs analyze for all 64 labels and checks (i) signature sets of distinct
// labels are disjoint within a spin group, (ii) each matches the oracle
// table, (iii) element-level evolution equals the oracle up to global phase.
inline VerificationReport verify_table(const CavityParams& params) {
    params.validate();
    VerificationReport rep;
    const Complex d = success_amplitude(params);
    if (std::abs(d) == 0.0) {
        rep.degenerate = true;
        for (const auto& label : all_hyper_bell_labels()) {
            VerificationRow row;
            row.label = label;
            row.note = "skipped: degenerate parameters (d = 0)";
            rep.rows.push_back(row);
        }
        return rep;
    }
    std::map<std::pair<SpinTriple, DetectorOutcome>, HyperBellLabel> seen;
    for (const auto& label : all_hyper_bell_labels()) {
        VerificationRow row;
        row.label = label;
        try {
            const auto report = analyze(label, params);
            row.spins = report.spins;
            row.success_probability = report.success_probability;
            for (const auto& [key, prob] : report.conditional_outcomes)
                row.signatures.insert(key.first);
            const auto& expected = Classifier::instance().readout(label);
            if (row.spins != expected.spins || row.signatures != expected.signatures) {
                row.note = "signature set differs from the oracle table";
            } else {
                // element-level state must match the oracle state up to phase
                StateVector elem = block4(
                    step3(step2(step1(make_hyper_bell(label), params).state, params).state,
                          params).state);
                StateVector orac = oracle_state_after(label, 4, params);
                if (!equal_up_to_global_phase(elem, orac, kDefaultTolerance))
                    row.note = "element-level state deviates from the oracle map";
                else
                    row.verified = true;
            }
            for (const auto& sig : row.signatures) {
                auto [it, inserted] = seen.emplace(std::make_pair(row.spins, sig), label);
                if (!inserted) {
                    ++rep.ambiguity_count;
                    row.note = "signature collides with " + label_string(it->second);
                    row.verified = false;
                }
            }
        } catch (const Error& e) {
            row.note = e.what();
        }
        if (row.verified) ++rep.verified_count;
        rep.rows.push_back(row);
    }
    rep.success_probability = rep.rows.front().success_probability;
    return rep;
}

}  // namespace hbsa
