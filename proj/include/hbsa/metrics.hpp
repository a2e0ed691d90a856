// Fidelity/efficiency definitions, closed-form efficiency, parameter sweeps
// and seeded Monte Carlo sampling.
#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "hbsa/analyzer.hpp"

namespace hbsa {

// F = |<phi_f|phi_i>|^2 over normalized inputs.
inline double fidelity(const StateVector& actual, const StateVector& ideal) {
    require_same_stage(actual, ideal);
    return detail::fidelity_normalized(actual, ideal);
}

// The paper's closed form eta_HBSA = ((p/2)(r_h - r_0))^12, evaluated as
// |d|^12 (the modulus; d may be complex off resonance, and the pipeline's
// reported probabilities only ever see |d|).
inline double efficiency_formula(const CavityParams& params) {
    return std::pow(std::abs(success_amplitude(params)), 12.0);
}

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

enum class SweepParam : std::uint8_t { g, kappa_s, gamma, p };

inline std::string sweep_param_name(SweepParam p) {
    switch (p) {
        case SweepParam::g: return "g";
        case SweepParam::kappa_s: return "kappa_s";
        case SweepParam::gamma: return "gamma";
        case SweepParam::p: return "p";
    }
    return "?";
}

struct SweepAxis {
    SweepParam param;
    double start;
    double stop;
    double step;

    std::vector<double> values() const {
        if (!(step > 0.0)) throw Error("sweep axis: step must be > 0");
        if (start > stop) throw Error("sweep axis: start must be <= stop");
        // integer-indexed grid; clamping keeps accumulated rounding from
        // pushing the last point past stop
        const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
        std::vector<double> out;
        out.reserve(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            out.push_back(std::min(start + step * static_cast<double>(i), stop));
        return out;
    }
};

struct SweepSpec {
    std::vector<SweepAxis> axes;            // ordered; rows are lexicographic in these
    CavityParams base = CavityParams::ideal();
    bool strict = false;                    // true: eta_sim checks all 64 labels
    HyperBellLabel representative{};        // label used in fast mode

    void validate() const {
        if (axes.empty()) throw Error("sweep: at least one axis required");
        std::set<SweepParam> seen;
        for (const auto& ax : axes) {
            if (!seen.insert(ax.param).second)
                throw Error("sweep: duplicate axis " + sweep_param_name(ax.param));
            (void)ax.values();
        }
    }
};

struct SweepRow {
    CavityParams params;
    double eta_formula = 0.0;
    double eta_sim = 0.0;
    HeraldLedger ledger;
};

namespace detail {

inline void set_param(CavityParams& c, SweepParam which, double value) {
    switch (which) {
        case SweepParam::g: c.g = value; return;
        case SweepParam::kappa_s: c.kappa_s = value; return;
        case SweepParam::gamma: c.gamma = value; return;
        case SweepParam::p: c.p = value; return;
    }
}

}  // namespace detail

// Evaluates eta_formula and eta_sim (full pipeline success probability) on
// the grid; rows ordered lexicographically by the axes.
inline std::vector<SweepRow> sweep(const SweepSpec& spec) {
    spec.validate();
    std::vector<std::vector<double>> grids;
    for (const auto& ax : spec.axes) grids.push_back(ax.values());

    std::vector<SweepRow> rows;
    std::vector<std::size_t> idx(spec.axes.size(), 0);
    while (true) {
        CavityParams c = spec.base;
        for (std::size_t i = 0; i < idx.size(); ++i)
            detail::set_param(c, spec.axes[i].param, grids[i][idx[i]]);
        SweepRow row;
        row.params = c;
        row.eta_formula = efficiency_formula(c);
        const auto rep = analyze(spec.representative, c);
        row.eta_sim = rep.success_probability;
        row.ledger = rep.ledger;
        if (spec.strict) {
            for (const auto& label : all_hyper_bell_labels()) {
                const auto r = analyze(label, c);
                if (std::abs(r.success_probability - row.eta_sim) > 1e-10)
                    throw ProtocolViolationError("strict sweep: label-dependent efficiency at " +
                                                 label_string(label));
            }
        }
        rows.push_back(row);

        std::size_t k = idx.size();
        while (k > 0) {
            --k;
            if (++idx[k] < grids[k].size()) break;
            idx[k] = 0;
            if (k == 0) return rows;
        }
    }
}

// ---------------------------------------------------------------------------
// Monte Carlo sampling
// ---------------------------------------------------------------------------

// RNG algorithm identifier recorded in sample metadata; the extraction below
// is fully specified, so identical seeds reproduce identical counts on any
// conforming platform.
inline constexpr const char* kRngAlgorithm = "mt19937_64";

namespace detail {

// Uniform double in [0, 1) from the top 53 bits; std::uniform_real_distribution
// is implementation-defined and would break cross-platform determinism.
inline double uniform53(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Counts keyed by canonical outcome strings: detector signatures
// ("a11R:b22R"), herald clicks ("D1".."D3") and unmonitored loss ("loss").
struct SampleResult {
    std::map<std::string, std::uint64_t> counts;
    SpinTriple spins;        // the definite spin readout on success
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
};

// Draws i.i.d. outcomes (herald events included) from the exact distribution
// of one analysis run.
inline SampleResult sample(const AnalysisReport& report, std::uint64_t shots,
                           std::uint64_t seed) {
    if (shots < 1) throw Error("sample: shots must be >= 1");
    // CDF in a fixed canonical order: D1, D2, D3, loss, then signatures.
    std::vector<std::pair<std::string, double>> cells;
    cells.emplace_back("D1", report.ledger.p_d1);
    cells.emplace_back("D2", report.ledger.p_d2);
    cells.emplace_back("D3", report.ledger.p_d3);
    cells.emplace_back("loss", report.ledger.p_loss);
    for (const auto& [key, prob] : report.conditional_outcomes)
        cells.emplace_back(signature_string(key.first), prob * report.success_probability);

    SampleResult out;
    out.spins = report.spins;
    out.shots = shots;
    out.seed = seed;
    std::mt19937_64 rng(seed);
    for (std::uint64_t i = 0; i < shots; ++i) {
        const double u = detail::uniform53(rng);
        double acc = 0.0;
        const std::string* chosen = &cells.back().first;
        for (const auto& [name, prob] : cells) {
            acc += prob;
            if (u < acc) {
                chosen = &name;
                break;
            }
        }
        ++out.counts[*chosen];
    }
    return out;
}

inline SampleResult sample(const HyperBellLabel& label, const CavityParams& params,
                           std::uint64_t shots, std::uint64_t seed) {
    return sample(analyze(label, params), shots, seed);
}

// Pearson chi-square statistic of observed counts against expected
// probabilities over the same canonical cells (cells with zero expectation
// must carry zero counts).
inline double chi_square_statistic(const std::map<std::string, std::uint64_t>& counts,
                                   const std::map<std::string, double>& expected_probs,
                                   std::uint64_t shots) {
    double stat = 0.0;
    for (const auto& [name, prob] : expected_probs) {
        const double expect = prob * static_cast<double>(shots);
        auto it = counts.find(name);
        const double got = it == counts.end() ? 0.0 : static_cast<double>(it->second);
        if (expect == 0.0) {
            if (got != 0.0) return std::numeric_limits<double>::infinity();
            continue;
        }
        stat += (got - expect) * (got - expect) / expect;
    }
    return stat;
}

}  // namespace hbsa
