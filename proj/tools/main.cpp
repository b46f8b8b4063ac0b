// Command-line front end: one-shot transceiver design, Monte Carlo BER
// sweeps and re-verification of saved designs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mimodfe/io.hpp"
#include "mimodfe/sim.hpp"

namespace {

using namespace mimodfe;

struct CommonOptions {
    int users = 2;
    std::vector<int> streams;
    int subcarriers = 32;
    int channel_length = 10;
    std::string modulation = "dmt";
    std::uint64_t seed = 1;
    std::vector<int> order;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--users", opt.users, "number of users")->check(CLI::PositiveNumber);
    cmd->add_option("--streams", opt.streams,
                    "per-user stream counts, e.g. --streams 16,16")
        ->delimiter(',');
    cmd->add_option("--subcarriers", opt.subcarriers, "block size / subcarrier count")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--channel-length", opt.channel_length, "number of channel taps")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--modulation", opt.modulation, "dmt or zeropad")
        ->check(CLI::IsMember({"dmt", "zeropad"}));
    cmd->add_option("--seed", opt.seed, "master seed for channel, bit and noise draws");
    cmd->add_option("--order", opt.order,
                    "design-order permutation of the users (1-based), e.g. --order 2,1")
        ->delimiter(',');
}

std::vector<int> streams_or_even_split(const CommonOptions& opt) {
    if (!opt.streams.empty()) return opt.streams;
    throw ConfigError("--streams is required (e.g. --streams 16,16)");
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

template <typename T>
std::vector<T> parse_list(const std::string& value) {
    std::vector<T> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::stringstream conv(trim(item));
        T v;
        if (!(conv >> v)) throw ConfigError("config: cannot parse list item '" + item + "'");
        out.push_back(v);
    }
    return out;
}

/// Flat key=value config for the sweep subcommand. Keys are the long
/// option names without dashes; values loaded here act as defaults, so
/// explicit command-line flags still win.
void apply_config_file(const std::string& path, CommonOptions& opt, SimConfig& cfg,
                       std::vector<std::string>& receiver_names) {
    std::ifstream file(path);
    if (!file) throw IoError("config: cannot open '" + path + "'");
    std::string line;
    size_t line_no = 0;
    while (std::getline(file, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(line_no) + " is not key=value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));

        if (key == "users") opt.users = std::stoi(value);
        else if (key == "streams") opt.streams = parse_list<int>(value);
        else if (key == "subcarriers") opt.subcarriers = std::stoi(value);
        else if (key == "channel-length") opt.channel_length = std::stoi(value);
        else if (key == "modulation") opt.modulation = value;
        else if (key == "seed") opt.seed = std::stoull(value);
        else if (key == "order") opt.order = parse_list<int>(value);
        else if (key == "info-start") cfg.info_start = std::stod(value);
        else if (key == "info-stop") cfg.info_stop = std::stod(value);
        else if (key == "info-step") cfg.info_step = std::stod(value);
        else if (key == "realizations") cfg.realizations = std::stoi(value);
        else if (key == "min-bits") cfg.min_bits = std::stoll(value);
        else if (key == "max-errors") cfg.max_bit_errors = std::stoll(value);
        else if (key == "receivers") receiver_names = parse_list<std::string>(value);
        else if (key == "threads") cfg.threads = std::stoi(value);
        else if (key == "noiseless") cfg.noiseless = (value == "1" || value == "true");
        else if (key == "out") cfg.out_path = value;
        else throw ConfigError("config: unknown key '" + key + "'");
    }
}

ChannelSet channels_from_options(const CommonOptions& opt, const std::string& channel_file,
                                 std::string* modulation_label) {
    *modulation_label = opt.modulation;
    const Modulation mod = modulation_from_string(opt.modulation);
    if (!channel_file.empty()) {
        const std::vector<CVec> taps = read_channel_taps(channel_file);
        std::vector<IsiChannel> chans;
        for (const CVec& t : taps) {
            chans.push_back(IsiChannel{t, mod, opt.subcarriers});
        }
        return ChannelSet::from_channels(chans);
    }
    return ChannelSet::from_channels(sweep_channels(opt.seed, 0, opt.users, opt.channel_length,
                                                    opt.subcarriers, mod));
}

/// Reorders channels into design order; returns the original user id per
/// design position.
std::vector<int> apply_order(const std::vector<int>& order, std::vector<CMat>& matrices,
                             std::vector<int>& streams) {
    const int users = static_cast<int>(matrices.size());
    std::vector<int> position(users);
    for (int i = 0; i < users; ++i) position[i] = i;
    if (order.empty()) return position;
    if (static_cast<int>(order.size()) != users) {
        throw ConfigError("--order must list every user exactly once");
    }
    std::vector<bool> seen(users, false);
    std::vector<CMat> m2;
    std::vector<int> s2;
    for (int i = 0; i < users; ++i) {
        const int u = order[i] - 1;
        if (u < 0 || u >= users || seen[u]) throw ConfigError("--order is not a permutation");
        seen[u] = true;
        position[i] = u;
        m2.push_back(matrices[u]);
        s2.push_back(streams[u]);
    }
    matrices = std::move(m2);
    streams = std::move(s2);
    return position;
}

int print_design_report(const DesignResult& design, const ChannelSet& channels,
                        const std::vector<int>& position, double tolerance) {
    std::printf("user  streams  active  info_bits      power\n");
    for (size_t i = 0; i < design.users.size(); ++i) {
        const UserDesign& u = design.users[i];
        std::printf("%-4d  %-7d  %-6d  %-12.6f  %-12.6f\n", position[i] + 1, u.streams(),
                    u.active_rank, u.info_bits, u.power);
    }
    double power = 0.0;
    for (const UserDesign& u : design.users) power += u.power;
    std::printf("total: %.6f bits over %d streams, power %.6f, mse bound %.6e\n",
                design.sum_info_bits, design.total_streams, power, design.mse_bound());
    if (!design.dead_streams.empty()) {
        std::printf("warning: dead streams (zero loading):");
        for (const auto& [user, stream] : design.dead_streams) {
            std::printf(" user %d stream %d;", position[user] + 1, stream + 1);
        }
        std::printf("\n");
    }

    const VerificationReport report = verify_design(design, channels, tolerance);
    std::printf("verification (tolerance %.1e):\n%s", tolerance, report.to_string().c_str());
    return report.ok() ? 0 : 1;
}

int run_design(const CommonOptions& opt, const std::string& channel_file,
               const std::string& out_path, double info, double tolerance) {
    std::string modulation_label;
    ChannelSet loaded = channels_from_options(opt, channel_file, &modulation_label);
    std::vector<int> streams = streams_or_even_split(opt);
    if (streams.size() != loaded.channels.size()) {
        throw ConfigError("--streams must name one count per user (" +
                          std::to_string(loaded.channels.size()) + " channels)");
    }

    std::vector<CMat> matrices = loaded.channels;
    const std::vector<int> position = apply_order(opt.order, matrices, streams);
    const ChannelSet channels = ChannelSet::from_matrices(std::move(matrices));

    const DesignResult design = design_transceivers(channels, streams, info);
    const int status = print_design_report(design, channels, position, tolerance);
    if (!out_path.empty()) {
        save_design_json(design, channels, modulation_label, out_path);
        std::printf("design written to %s\n", out_path.c_str());
    }
    return status;
}

int run_sweep_cmd(const CommonOptions& opt, SimConfig cfg) {
    cfg.users = opt.users;
    cfg.streams = streams_or_even_split(opt);
    cfg.subcarriers = opt.subcarriers;
    cfg.channel_length = opt.channel_length;
    cfg.modulation = modulation_from_string(opt.modulation);
    cfg.seed = opt.seed;
    cfg.user_order = opt.order;
    if (cfg.out_path.empty()) throw ConfigError("--out is required for sweep");
    if (!(cfg.info_start > 0.0)) {
        throw ConfigError("--info-start is required (flag or config file)");
    }
    if (!(cfg.info_stop > 0.0)) cfg.info_stop = cfg.info_start;

    const SweepResult result = run_sweep(cfg);
    emit_csv(result.records, cfg.out_path);
    std::printf("%s", result.verification.to_string().c_str());
    std::printf("%zu records written to %s\n", result.records.size(), cfg.out_path.c_str());
    return result.verification.flagged == 0 ? 0 : 1;
}

int run_verify(const std::string& path, double tolerance) {
    const SavedDesign saved = load_design_json(path);
    std::vector<int> position(saved.design.users.size());
    for (size_t i = 0; i < position.size(); ++i) position[i] = static_cast<int>(i);
    return print_design_report(saved.design, saved.channels, position, tolerance);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"joint transceiver design and MMSE-DFE simulation for "
                 "multiple-access ISI MIMO channels"};
    app.require_subcommand(1);

    CommonOptions design_opt;
    std::string design_channel_file, design_out;
    double design_info = 0.0, design_tol = 1e-7;
    CLI::App* design_cmd =
        app.add_subcommand("design", "one-shot design plus verification report");
    add_common(design_cmd, design_opt);
    design_cmd->add_option("--info", design_info, "sum mutual information in bits")
        ->required();
    design_cmd->add_option("--channel-file", design_channel_file,
                           "taps file: one 're im' pair per line, users separated by "
                           "blank lines (overrides --seed)");
    design_cmd->add_option("--out", design_out, "write the design as JSON");
    design_cmd->add_option("--tolerance", design_tol, "verification tolerance");

    CommonOptions sweep_opt;
    SimConfig sweep_cfg;
    std::vector<std::string> receiver_names{"dfe"};
    std::string sweep_config_path;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo BER sweep, CSV output");
    sweep_cmd->add_option("--config", sweep_config_path,
                          "flat key=value file holding any of the sweep options "
                          "(keys are the long names without dashes); explicit flags win");
    add_common(sweep_cmd, sweep_opt);
    sweep_cmd->add_option("--info-start", sweep_cfg.info_start, "first sweep point in bits");
    sweep_cmd->add_option("--info-stop", sweep_cfg.info_stop, "last sweep point in bits");
    sweep_cmd->add_option("--info-step", sweep_cfg.info_step, "sweep step in bits");
    sweep_cmd->add_option("--realizations", sweep_cfg.realizations,
                          "channel realizations per sweep point");
    sweep_cmd->add_option("--min-bits", sweep_cfg.min_bits, "minimum bits per sweep point");
    sweep_cmd->add_option("--max-errors", sweep_cfg.max_bit_errors,
                          "early stop after this many bit errors");
    sweep_cmd->add_option("--receivers", receiver_names,
                          "receivers to simulate: dfe,dfe_genie,linear")
        ->delimiter(',');
    sweep_cmd->add_option("--threads", sweep_cfg.threads, "worker threads");
    sweep_cmd->add_flag("--noiseless", sweep_cfg.noiseless, "disable channel noise");
    sweep_cmd->add_option("--out", sweep_cfg.out_path, "output CSV path")->required();

    std::string verify_path;
    double verify_tol = 1e-7;
    CLI::App* verify_cmd = app.add_subcommand("verify", "re-check a saved design");
    verify_cmd->add_option("design", verify_path, "design JSON written by `design --out`")
        ->required();
    verify_cmd->add_option("--tolerance", verify_tol, "verification tolerance");

    // The config file is applied before parsing so that bound variables
    // carry its values as defaults and explicit flags override them.
    try {
        for (int i = 1; i < argc; ++i) {
            const std::string arg = argv[i];
            if (arg == "--config" && i + 1 < argc) {
                apply_config_file(argv[i + 1], sweep_opt, sweep_cfg, receiver_names);
            } else if (arg.rfind("--config=", 0) == 0) {
                apply_config_file(arg.substr(9), sweep_opt, sweep_cfg, receiver_names);
            }
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (design_cmd->parsed()) {
            return run_design(design_opt, design_channel_file, design_out, design_info,
                              design_tol);
        }
        if (sweep_cmd->parsed()) {
            sweep_cfg.receivers.clear();
            for (const std::string& name : receiver_names) {
                sweep_cfg.receivers.push_back(receiver_from_string(name));
            }
            return run_sweep_cmd(sweep_opt, sweep_cfg);
        }
        if (verify_cmd->parsed()) return run_verify(verify_path, verify_tol);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
