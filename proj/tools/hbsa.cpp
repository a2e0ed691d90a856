// hbsa: command-line front end for the hyperentangled-Bell-state analyzer
// simulator.  Subcommands: analyze, verify-table, sweep, sample.
//
// Exit codes: 0 success, 1 verification/protocol failure, 2 usage/config
// error.  All emitted files are deterministic functions of the resolved
// configuration.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "hbsa/report.hpp"

namespace {

constexpr const char* kSpecRevision = "hbsa-sim 1.0.0";

struct CommonOptions {
    std::optional<double> g, kappa_s, gamma, p, detuning_c, detuning_x;
    bool ideal = false;
    std::string config_path;
    std::string output_path;
    std::string format = "json";
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--g", opt.g, "QD-cavity coupling g (units of kappa)");
    cmd->add_option("--kappa-s", opt.kappa_s, "side leakage kappa_s (units of kappa)");
    cmd->add_option("--gamma", opt.gamma, "exciton decay gamma (units of kappa)");
    cmd->add_option("--p", opt.p, "photon-QD interaction amplitude p in [0,1]");
    cmd->add_option("--detuning-c", opt.detuning_c, "cavity detuning (w_c - w)/kappa");
    cmd->add_option("--detuning-x", opt.detuning_x, "trion detuning (w_X - w)/kappa");
    cmd->add_flag("--ideal", opt.ideal, "ideal lossless limit (d = 1, f = 0)");
    cmd->add_option("--config", opt.config_path,
                    "flat JSON config file (flags override; HBSA_CONFIG is the fallback)");
    cmd->add_option("--output", opt.output_path, "write the report here instead of stdout");
    cmd->add_option("--format", opt.format, "output format: json, csv or text-table")
        ->check(CLI::IsMember({"json", "csv", "text-table"}));
}

hbsa::Json load_config(const CommonOptions& opt) {
    std::string path = opt.config_path;
    if (path.empty())
        if (const char* env = std::getenv("HBSA_CONFIG")) path = env;
    if (path.empty()) return hbsa::Json::object();
    std::ifstream in(path);
    if (!in) throw hbsa::UsageError("cannot read config file: " + path);
    try {
        return hbsa::Json::parse(in);
    } catch (const std::exception& e) {
        throw hbsa::UsageError("config parse error in " + path + ": " + e.what());
    }
}

double config_number(const hbsa::Json& cfg, const char* key, double fallback) {
    if (!cfg.contains(key)) return fallback;
    if (!cfg[key].is_number())
        throw hbsa::UsageError(std::string("config key '") + key + "' must be a number");
    return cfg[key].get<double>();
}

// Flags beat config-file values; the file fills in whatever was not given.
void fold_config(const CLI::App* cmd, const hbsa::Json& cfg, CommonOptions& opt) {
    if (!cmd->count("--format") && cfg.contains("format")) {
        opt.format = cfg["format"].get<std::string>();
        if (opt.format != "json" && opt.format != "csv" && opt.format != "text-table")
            throw hbsa::UsageError("config key 'format' must be json, csv or text-table");
    }
    if (!cmd->count("--output") && cfg.contains("output"))
        opt.output_path = cfg["output"].get<std::string>();
}

// Resolution order: built-in ideal defaults < config file < flags.
hbsa::CavityParams resolve_params(const CommonOptions& opt, const hbsa::Json& cfg) {
    hbsa::CavityParams c = hbsa::CavityParams::ideal();
    c.g = config_number(cfg, "g", c.g);
    c.kappa_s = config_number(cfg, "kappa_s", c.kappa_s);
    c.gamma = config_number(cfg, "gamma", c.gamma);
    c.p = config_number(cfg, "p", c.p);
    c.detuning_c = config_number(cfg, "detuning_c", c.detuning_c);
    c.detuning_x = config_number(cfg, "detuning_x", c.detuning_x);
    if (opt.ideal) c = hbsa::CavityParams::ideal();
    if (opt.g) c.g = *opt.g;
    if (opt.kappa_s) c.kappa_s = *opt.kappa_s;
    if (opt.gamma) c.gamma = *opt.gamma;
    if (opt.p) c.p = *opt.p;
    if (opt.detuning_c) c.detuning_c = *opt.detuning_c;
    if (opt.detuning_x) c.detuning_x = *opt.detuning_x;
    try {
        c.validate();
    } catch (const hbsa::Error& e) {
        throw hbsa::UsageError(e.what());
    }
    return c;
}

void emit(const CommonOptions& opt, const std::string& payload) {
    if (opt.output_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(opt.output_path, std::ios::binary);
    if (!out) throw hbsa::UsageError("cannot write output file: " + opt.output_path);
    out << payload;
}

std::string render_json(const hbsa::Json& j) { return j.dump(2) + "\n"; }

int cmd_analyze(const CLI::App* cmd, CommonOptions opt, const std::string& state_arg) {
    const auto cfg = load_config(opt);
    fold_config(cmd, cfg, opt);
    std::string state = state_arg;
    if (state.empty() && cfg.contains("state")) state = cfg["state"].get<std::string>();
    if (state.empty()) throw hbsa::UsageError("analyze requires --state");
    const auto label = hbsa::parse_label(state);
    const auto params = resolve_params(opt, cfg);
    hbsa::AnalysisReport report;
    try {
        report = hbsa::analyze(label, params);
    } catch (const hbsa::ProtocolViolationError& e) {
        std::cerr << "protocol violation: " << e.what() << "\n";
        return 1;
    }
    if (opt.format == "json")
        emit(opt, render_json(hbsa::analysis_json(report, params)));
    else
        emit(opt, hbsa::analysis_text(report, params));
    return 0;
}

int cmd_verify_table(const CLI::App* cmd, CommonOptions opt) {
    const auto cfg = load_config(opt);
    fold_config(cmd, cfg, opt);
    const auto params = resolve_params(opt, cfg);
    const auto rep = hbsa::verify_table(params);
    if (opt.format == "json")
        emit(opt, render_json(hbsa::verification_json(rep, params)));
    else
        emit(opt, hbsa::verification_text(rep));
    if (rep.degenerate) {
        std::cerr << "degenerate parameters (d = 0): verification skipped\n";
        return 0;
    }
    return rep.all_verified() ? 0 : 1;
}

int cmd_sweep(const CLI::App* cmd, CommonOptions opt, const std::vector<std::string>& axes,
              const std::vector<std::string>& ranges, bool strict) {
    const auto cfg = load_config(opt);
    fold_config(cmd, cfg, opt);
    if (axes.empty()) throw hbsa::UsageError("sweep requires at least one --axis/--range pair");
    if (axes.size() != ranges.size())
        throw hbsa::UsageError("each --axis needs a matching --range start:stop:step");
    hbsa::SweepSpec spec;
    spec.base = resolve_params(opt, cfg);
    spec.strict = strict;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        hbsa::SweepAxis ax{};
        if (axes[i] == "g") ax.param = hbsa::SweepParam::g;
        else if (axes[i] == "kappa_s") ax.param = hbsa::SweepParam::kappa_s;
        else if (axes[i] == "gamma") ax.param = hbsa::SweepParam::gamma;
        else if (axes[i] == "p") ax.param = hbsa::SweepParam::p;
        else throw hbsa::UsageError("unknown sweep axis '" + axes[i] +
                                    "' (use g, kappa_s, gamma or p)");
        if (std::sscanf(ranges[i].c_str(), "%lf:%lf:%lf", &ax.start, &ax.stop, &ax.step) != 3)
            throw hbsa::UsageError("range must be start:stop:step, got '" + ranges[i] + "'");
        spec.axes.push_back(ax);
    }
    try {
        spec.validate();
    } catch (const hbsa::Error& e) {
        throw hbsa::UsageError(e.what());
    }
    const auto rows = hbsa::sweep(spec);
    if (opt.format == "csv")
        emit(opt, hbsa::sweep_csv(rows));
    else if (opt.format == "json")
        emit(opt, render_json(hbsa::sweep_json(rows)));
    else
        emit(opt, hbsa::sweep_csv(rows));  // text-table: the CSV is already tabular
    return 0;
}

int cmd_sample(const CLI::App* cmd, CommonOptions opt, const std::string& state_arg,
               std::int64_t shots, std::uint64_t seed) {
    const auto cfg = load_config(opt);
    fold_config(cmd, cfg, opt);
    std::string state = state_arg;
    if (state.empty() && cfg.contains("state")) state = cfg["state"].get<std::string>();
    if (state.empty()) throw hbsa::UsageError("sample requires --state");
    if (cfg.contains("shots") && shots < 0) shots = cfg["shots"].get<std::int64_t>();
    if (shots < 0) shots = 1024;
    if (!cmd->count("--seed") && cfg.contains("seed")) seed = cfg["seed"].get<std::uint64_t>();
    if (shots < 1) throw hbsa::UsageError("sample requires shots >= 1");
    const auto label = hbsa::parse_label(state);
    const auto params = resolve_params(opt, cfg);
    const auto result = hbsa::sample(label, params, static_cast<std::uint64_t>(shots), seed);
    emit(opt, render_json(hbsa::sample_json(result, label, params, kSpecRevision)));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator and verification harness for a three-DOF hyperentangled "
                 "Bell-state analyzer built on QD-cavity blocks"};
    app.require_subcommand(1);

    CommonOptions a_opt, v_opt, w_opt, s_opt;
    std::string a_state, s_state;
    std::vector<std::string> w_axes, w_ranges;
    bool w_strict = false;
    std::int64_t s_shots = -1;
    std::uint64_t s_seed = 20240901;

    auto* analyze = app.add_subcommand("analyze", "run the full pipeline on one hyper-Bell state");
    analyze->add_option("--state", a_state, "input label, e.g. phiS+,psiP-,phiT+");
    add_common_flags(analyze, a_opt);

    auto* verify = app.add_subcommand("verify-table", "certify the 64-state classification table");
    add_common_flags(verify, v_opt);

    auto* sweepc = app.add_subcommand("sweep", "efficiency across cavity parameters");
    sweepc->add_option("--axis", w_axes, "swept parameter (repeatable): g, kappa_s, gamma, p");
    sweepc->add_option("--range", w_ranges, "start:stop:step for the matching --axis");
    sweepc->add_flag("--strict", w_strict, "check all 64 labels per grid point");
    add_common_flags(sweepc, w_opt);

    auto* samplec = app.add_subcommand("sample", "seeded Monte Carlo draws from one analysis run");
    samplec->add_option("--state", s_state, "input label, e.g. phiS+,psiP-,phiT+");
    samplec->add_option("--shots", s_shots, "number of draws (>= 1)");
    samplec->add_option("--seed", s_seed, "RNG seed (default recorded in the report)");
    add_common_flags(samplec, s_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(analyze, a_opt, a_state);
        if (verify->parsed()) return cmd_verify_table(verify, v_opt);
        if (sweepc->parsed()) return cmd_sweep(sweepc, w_opt, w_axes, w_ranges, w_strict);
        if (samplec->parsed()) return cmd_sample(samplec, s_opt, s_state, s_shots, s_seed);
    } catch (const hbsa::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const hbsa::ProtocolViolationError& e) {
        std::cerr << "protocol violation: " << e.what() << "\n";
        return 1;
    } catch (const hbsa::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
