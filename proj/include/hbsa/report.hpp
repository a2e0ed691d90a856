// Report emission: canonical label parsing and the bit-stable CSV/JSON/text
// renderings of analysis, verification, sweep and sample results.
#pragma once

#include <cctype>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hbsa/metrics.hpp"

namespace hbsa {

using Json = nlohmann::ordered_json;

enum class ReportFormat : std::uint8_t { json, csv, text };

struct UsageError : Error {
    using Error::Error;
};

// Floating-point values in reports carry 12 significant digits, trailing
// zeros kept, so emitted files are diffable and byte-stable.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%#.12g", v);
    std::string s(buf);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

// ---------------------------------------------------------------------------
// Label parsing: "phiS+,psiP-,phiT+" (case-insensitive, S/P/T tags required)
// ---------------------------------------------------------------------------

inline HyperBellLabel parse_label(const std::string& text) {
    std::string lowered;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)))
            lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    std::array<bool, 3> have{false, false, false};
    HyperBellLabel label;
    std::stringstream ss(lowered);
    std::string tok;
    int ntok = 0;
    while (std::getline(ss, tok, ',')) {
        ++ntok;
        if (tok.size() != 5 || (tok.substr(0, 3) != "phi" && tok.substr(0, 3) != "psi"))
            throw UsageError("malformed label component '" + tok + "' in '" + text + "'");
        BellLabel bell;
        bell.type = tok.substr(0, 3) == "phi" ? BellType::phi : BellType::psi;
        if (tok[4] == '+') bell.sign = BellSign::plus;
        else if (tok[4] == '-') bell.sign = BellSign::minus;
        else throw UsageError("malformed label sign in '" + text + "'");
        int dof;
        switch (tok[3]) {
            case 's': dof = 0; label.spatial = bell; break;
            case 'p': dof = 1; label.polarization = bell; break;
            case 't': dof = 2; label.timebin = bell; break;
            default: throw UsageError("label component '" + tok + "' lacks an S/P/T tag");
        }
        if (have[dof]) throw UsageError("duplicate " + std::string(1, tok[3]) + " tag in '" + text + "'");
        have[dof] = true;
    }
    if (ntok != 3 || !have[0] || !have[1] || !have[2])
        throw UsageError("label must name all of S, P, T exactly once: '" + text + "'");
    return label;
}

// ---------------------------------------------------------------------------
// Shared parameter block
// ---------------------------------------------------------------------------

inline Json params_json(const CavityParams& c) {
    Json j;
    j["g_over_kappa"] = c.g / c.kappa;
    j["kappa_s_over_kappa"] = c.kappa_s / c.kappa;
    j["gamma_over_kappa"] = c.gamma / c.kappa;
    j["detuning_c_over_kappa"] = c.detuning_c / c.kappa;
    j["detuning_x_over_kappa"] = c.detuning_x / c.kappa;
    j["p"] = c.p;
    return j;
}

inline Json ledger_json(const HeraldLedger& l) {
    Json j;
    j["p_D1"] = l.p_d1;
    j["p_D2"] = l.p_d2;
    j["p_D3"] = l.p_d3;
    j["p_loss"] = l.p_loss;
    return j;
}

// ---------------------------------------------------------------------------
// Analysis report
// ---------------------------------------------------------------------------

inline Json analysis_json(const AnalysisReport& r, const CavityParams& params) {
    Json j;
    j["input"] = label_string(r.input);
    j["params"] = params_json(params);
    j["success_probability"] = r.success_probability;
    j["ledger"] = ledger_json(r.ledger);
    j["spins"] = spins_string(r.spins);
    j["classified"] = label_string(r.classified);
    j["conditional_fidelity"] = r.conditional_fidelity;
    Json outs = Json::object();
    for (const auto& [key, prob] : r.conditional_outcomes)
        outs[signature_string(key.first)] = prob;
    j["conditional_outcomes"] = outs;
    return j;
}

inline std::string analysis_text(const AnalysisReport& r, const CavityParams& params) {
    std::ostringstream os;
    os << "input:                " << label_string(r.input) << "\n"
       << "params:               g/k=" << format_double(params.g / params.kappa)
       << " ks/k=" << format_double(params.kappa_s / params.kappa)
       << " gamma/k=" << format_double(params.gamma / params.kappa)
       << " p=" << format_double(params.p) << "\n"
       << "success_probability:  " << format_double(r.success_probability) << "\n"
       << "p_D1 p_D2 p_D3 loss:  " << format_double(r.ledger.p_d1) << " "
       << format_double(r.ledger.p_d2) << " " << format_double(r.ledger.p_d3) << " "
       << format_double(r.ledger.p_loss) << "\n"
       << "spins:                " << spins_string(r.spins) << "\n"
       << "classified:           " << label_string(r.classified) << "\n"
       << "conditional_fidelity: " << format_double(r.conditional_fidelity) << "\n"
       << "conditional_outcomes:\n";
    for (const auto& [key, prob] : r.conditional_outcomes)
        os << "  " << signature_string(key.first) << "  " << format_double(prob) << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Verification report (mirrors the classification table layout:
// label | spins | signature set)
// ---------------------------------------------------------------------------

inline std::string verification_row_text(const VerificationRow& row) {
    std::ostringstream os;
    os << label_string(row.label) << " | " << spins_string(row.spins) << " |";
    for (const auto& sig : row.signatures) os << " " << signature_string(sig);
    if (!row.verified) os << " | FAILED: " << (row.note.empty() ? "unverified" : row.note);
    return os.str();
}

inline std::string verification_text(const VerificationReport& rep) {
    std::ostringstream os;
    if (rep.degenerate) {
        os << "degenerate parameters (d = 0): signature checks skipped\n";
        return os.str();
    }
    for (const auto& row : rep.rows) os << verification_row_text(row) << "\n";
    os << rep.verified_count << "/64 verified, " << rep.ambiguity_count << " ambiguities\n";
    os << "success_probability: " << format_double(rep.success_probability) << "\n";
    return os.str();
}

inline Json verification_json(const VerificationReport& rep, const CavityParams& params) {
    Json j;
    j["params"] = params_json(params);
    j["degenerate"] = rep.degenerate;
    j["verified_count"] = rep.verified_count;
    j["ambiguity_count"] = rep.ambiguity_count;
    j["success_probability"] = rep.success_probability;
    Json rows = Json::array();
    for (const auto& row : rep.rows) {
        Json r;
        r["label"] = label_string(row.label);
        r["spins"] = spins_string(row.spins);
        Json sigs = Json::array();
        for (const auto& sig : row.signatures) sigs.push_back(signature_string(sig));
        r["signatures"] = sigs;
        r["verified"] = row.verified;
        if (!row.note.empty()) r["note"] = row.note;
        rows.push_back(r);
    }
    j["rows"] = rows;
    return j;
}

// ---------------------------------------------------------------------------
// Sweep output; exact column contract, lexicographic row order
// ---------------------------------------------------------------------------

inline constexpr const char* kSweepCsvHeader =
    "g_over_kappa,kappa_s_over_kappa,gamma_over_kappa,p,eta_formula,eta_sim,"
    "p_D1,p_D2,p_D3,p_loss";

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << kSweepCsvHeader << "\n";
    for (const auto& r : rows) {
        os << format_double(r.params.g / r.params.kappa) << ","
           << format_double(r.params.kappa_s / r.params.kappa) << ","
           << format_double(r.params.gamma / r.params.kappa) << ","
           << format_double(r.params.p) << ","
           << format_double(r.eta_formula) << ","
           << format_double(r.eta_sim) << ","
           << format_double(r.ledger.p_d1) << ","
           << format_double(r.ledger.p_d2) << ","
           << format_double(r.ledger.p_d3) << ","
           << format_double(r.ledger.p_loss) << "\n";
    }
    return os.str();
}

inline Json sweep_json(const std::vector<SweepRow>& rows) {
    Json arr = Json::array();
    for (const auto& r : rows) {
        Json j;
        j["g_over_kappa"] = r.params.g / r.params.kappa;
        j["kappa_s_over_kappa"] = r.params.kappa_s / r.params.kappa;
        j["gamma_over_kappa"] = r.params.gamma / r.params.kappa;
        j["p"] = r.params.p;
        j["eta_formula"] = r.eta_formula;
        j["eta_sim"] = r.eta_sim;
        j["p_D1"] = r.ledger.p_d1;
        j["p_D2"] = r.ledger.p_d2;
        j["p_D3"] = r.ledger.p_d3;
        j["p_loss"] = r.ledger.p_loss;
        arr.push_back(j);
    }
    return arr;
}

// ---------------------------------------------------------------------------
// Sample output
// ---------------------------------------------------------------------------

inline Json sample_json(const SampleResult& r, const HyperBellLabel& label,
                        const CavityParams& params, const std::string& spec_revision) {
    Json meta;
    meta["state"] = label_string(label);
    meta["params"] = params_json(params);
    meta["shots"] = r.shots;
    meta["seed"] = r.seed;
    meta["rng"] = kRngAlgorithm;
    meta["spins"] = spins_string(r.spins);
    meta["spec_revision"] = spec_revision;
    Json counts = Json::object();
    for (const auto& [name, n] : r.counts) counts[name] = n;
    Json j;
    j["metadata"] = meta;
    j["counts"] = counts;
    return j;
}

}  // namespace hbsa
