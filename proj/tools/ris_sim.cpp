// SPDX-License-Identifier: Apache-2.0
//
// Batch front end: reproduces the rate-vs-overhead and rate-vs-resolution
// experiments and prints feedback bit accounting.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "risfb/feedback.hpp"
#include "risfb/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace risfb;

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int trials = 500;
    std::vector<std::string> schemes;
    std::vector<int> gt_values;
    std::vector<int> bit_values;
    bool quiet = false;
};

void apply_key(SystemConfig &cfg, CeoParams &ceo, const std::string &key,
               const std::string &value) {
    auto as_int = [&] { return std::stoi(value); };
    auto as_double = [&] { return std::stod(value); };
    auto as_bool = [&] {
        if (value == "true" || value == "1") return true;
        if (value == "false" || value == "0") return false;
        throw std::invalid_argument("expected boolean for " + key);
    };
    if (key == "bs_antennas") cfg.bs_antennas = as_int();
    else if (key == "ris_horizontal") cfg.ris_horizontal = as_int();
    else if (key == "ris_vertical") cfg.ris_vertical = as_int();
    else if (key == "users") cfg.users = as_int();
    else if (key == "bs_ris_paths") cfg.bs_ris_paths = as_int();
    else if (key == "ris_ue_paths") cfg.ris_ue_paths = as_int();
    else if (key == "bs_spacing") cfg.bs_spacing = as_double();
    else if (key == "ris_spacing") cfg.ris_spacing = as_double();
    else if (key == "snr_db") cfg.snr_db = as_double();
    else if (key == "aod_grid") cfg.aod_grid = as_int();
    else if (key == "angle_bits") cfg.angle_bits = as_int();
    else if (key == "codeword_bits") cfg.codeword_bits = as_int();
    else if (key == "coherence_ratio") cfg.coherence_ratio = as_int();
    else if (key == "step1_user_fraction") cfg.step1_user_fraction = as_double();
    else if (key == "include_direct") cfg.include_direct = as_bool();
    else if (key == "on_grid_aod") cfg.on_grid_aod = as_bool();
    else if (key == "rng_seed") cfg.rng_seed = std::stoull(value);
    else if (key == "ceo_population") ceo.population = as_int();
    else if (key == "ceo_elite_fraction") ceo.elite_fraction = as_double();
    else if (key == "ceo_iterations") ceo.iterations = as_int();
    else if (key == "ceo_smoothing") ceo.smoothing = as_double();
    else if (key == "ceo_phase_levels") ceo.phase_levels = as_int();
    else throw std::invalid_argument("unknown config key: " + key);
}

void load_config_file(const std::string &path, SystemConfig &cfg, CeoParams &ceo) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                            ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        apply_key(cfg, ceo, key, value);
    }
}

json config_json(const SystemConfig &cfg, const CeoParams &ceo) {
    return json{{"bs_antennas", cfg.bs_antennas},
                {"ris_horizontal", cfg.ris_horizontal},
                {"ris_vertical", cfg.ris_vertical},
                {"users", cfg.users},
                {"bs_ris_paths", cfg.bs_ris_paths},
                {"ris_ue_paths", cfg.ris_ue_paths},
                {"bs_spacing", cfg.bs_spacing},
                {"ris_spacing", cfg.ris_spacing},
                {"snr_db", cfg.snr_db},
                {"aod_grid", cfg.aod_grid},
                {"angle_bits", cfg.angle_bits},
                {"codeword_bits", cfg.codeword_bits},
                {"coherence_ratio", cfg.coherence_ratio},
                {"step1_user_fraction", cfg.step1_user_fraction},
                {"include_direct", cfg.include_direct},
                {"on_grid_aod", cfg.on_grid_aod},
                {"rng_seed", cfg.rng_seed},
                {"ceo",
                 {{"population", ceo.population},
                  {"elite_fraction", ceo.elite_fraction},
                  {"iterations", ceo.iterations},
                  {"smoothing", ceo.smoothing},
                  {"phase_levels", ceo.phase_levels}}}};
}

void write_manifest(const fs::path &out_dir, const std::string &command,
                    const SweepSpec &spec) {
    json m = config_json(spec.base, spec.ceo);
    m["command"] = command;
    m["trials"] = spec.trials;
    m["axis"] = axis_name(spec.axis);
    m["axis_values"] = spec.values;
    json names = json::array();
    for (Scheme s : spec.schemes)
        names.push_back(scheme_name(s));
    m["schemes"] = names;
    std::ofstream out(out_dir / "manifest.json");
    out << m.dump(2) << "\n";
}

int run_sweep_command(const Options &opt, SweepSpec spec, const std::string &command,
                      const std::string &csv_name) {
    fs::path out_dir(opt.out_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    {
        std::ofstream probe(out_dir / ".write_probe");
        if (!probe) {
            std::cerr << "error: output directory is not writable: " << opt.out_dir << "\n";
            return 1;
        }
    }
    fs::remove(out_dir / ".write_probe", ec);

    if (spec.trials < 50 && !opt.quiet)
        std::cerr << "warning: " << spec.trials
                  << " trials per point gives high-variance estimates\n";

    write_manifest(out_dir, command, spec);
    ResultTable table = sweep(spec);
    std::ofstream csv(out_dir / csv_name);
    write_csv(table, csv);
    if (!opt.quiet) {
        std::cout << "wrote " << (out_dir / csv_name).string() << "\n";
        write_csv(table, std::cout);
    }
    return 0;
}

SweepSpec make_spec(const Options &opt, const SystemConfig &cfg, const CeoParams &ceo) {
    SweepSpec spec;
    spec.base = cfg;
    spec.ceo = ceo;
    spec.trials = opt.trials;
    if (opt.seed_set)
        spec.base.rng_seed = opt.seed;
    return spec;
}

std::vector<Scheme> parse_schemes(const std::vector<std::string> &names,
                                  std::vector<Scheme> fallback) {
    if (names.empty())
        return fallback;
    std::vector<Scheme> out;
    for (const auto &n : names)
        out.push_back(scheme_from_name(n));
    return out;
}

int cmd_overhead(const Options &opt, SystemConfig cfg, const CeoParams & /*ceo*/) {
    if (opt.seed_set)
        cfg.rng_seed = opt.seed;
    std::vector<int> bits = opt.bit_values.empty() ? std::vector<int>{cfg.codeword_bits}
                                                   : opt.bit_values;
    std::printf("%-6s %-10s %-10s %-10s %-12s %s\n", "B", "step1", "step2", "step3",
                "raw_total", "per_user_amortized");
    for (int b : bits) {
        SystemConfig c = cfg;
        c.codeword_bits = b;
        OverheadReport r = overhead(c);
        std::printf("%-6d %-10d %-10d %-10d %-12d %.6g\n", b, r.step1_bits, r.step2_bits,
                    r.step3_bits, r.step1_bits + r.step2_bits + r.step3_bits,
                    r.per_user_amortized_bits);
    }
    return 0;
}

void add_common_flags(CLI::App *cmd, Options &opt) {
    cmd->add_option("--config", opt.config_path, "flat key=value config file");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--seed", opt.seed, "RNG seed override")
        ->each([&](const std::string &) { opt.seed_set = true; });
    cmd->add_option("--trials", opt.trials, "Monte-Carlo trials per point");
    cmd->add_option("--schemes", opt.schemes, "comma-separated scheme list")->delimiter(',');
    cmd->add_option("--gt", opt.gt_values, "AoD grid resolutions")->delimiter(',');
    cmd->add_option("--bits", opt.bit_values, "codeword index bit widths")->delimiter(',');
    cmd->add_flag("--quiet", opt.quiet, "suppress progress output");
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"RIS cascaded-channel feedback simulator"};
    app.require_subcommand(1);

    Options opt;
    auto *fig4 = app.add_subcommand("fig4", "per-user rate vs. feedback overhead sweep");
    auto *fig5 = app.add_subcommand("fig5", "per-user rate vs. AoD grid resolution sweep");
    auto *over = app.add_subcommand("overhead", "feedback bit accounting");
    auto *gen = app.add_subcommand("sweep", "generic sweep");
    std::string axis_opt = "codeword_bits";
    std::vector<int> values_opt;
    gen->add_option("--axis", axis_opt, "codeword_bits or grid_resolution");
    gen->add_option("--values", values_opt, "axis values")->delimiter(',');
    for (auto *cmd : {fig4, fig5, over, gen})
        add_common_flags(cmd, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        SystemConfig cfg;
        CeoParams ceo;
        if (!opt.config_path.empty())
            load_config_file(opt.config_path, cfg, ceo);

        if (over->parsed())
            return cmd_overhead(opt, cfg, ceo);

        SweepSpec spec = make_spec(opt, cfg, ceo);
        if (fig4->parsed()) {
            spec.axis = SweepAxis::codeword_bits;
            spec.base.angle_bits = 7;
            spec.values = opt.bit_values.empty() ? std::vector<int>{1, 4, 7, 10, 13}
                                                 : opt.bit_values;
            spec.schemes = parse_schemes(
                opt.schemes,
                {Scheme::proposed, Scheme::conventional, Scheme::perfect_csit});
            spec.base.validate();
            return run_sweep_command(opt, spec, "fig4", "fig4.csv");
        }
        if (fig5->parsed()) {
            spec.axis = SweepAxis::grid_resolution;
            spec.base.codeword_bits = 10;
            spec.base.angle_bits = 6;
            spec.values = opt.gt_values.empty() ? std::vector<int>{32, 128, 512}
                                                : opt.gt_values;
            spec.schemes = parse_schemes(opt.schemes,
                                         {Scheme::proposed, Scheme::proposed_perfect_aod});
            spec.base.validate();
            return run_sweep_command(opt, spec, "fig5", "fig5.csv");
        }
        // generic sweep
        if (axis_opt == "codeword_bits")
            spec.axis = SweepAxis::codeword_bits;
        else if (axis_opt == "grid_resolution")
            spec.axis = SweepAxis::grid_resolution;
        else
            throw std::invalid_argument("unknown axis: " + axis_opt);
        spec.values = values_opt.empty()
                          ? std::vector<int>{spec.axis == SweepAxis::codeword_bits
                                                 ? spec.base.codeword_bits
                                                 : spec.base.aod_grid}
                          : values_opt;
        spec.schemes = parse_schemes(opt.schemes, {Scheme::proposed, Scheme::perfect_csit});
        spec.base.validate();
        return run_sweep_command(opt, spec, "sweep", "sweep.csv");
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 2;
    }
}
