#include "mimodfe/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace mimodfe {

namespace {

constexpr std::uint64_t tag_channel = 0xc4a1;
constexpr std::uint64_t tag_bits = 0xb175;
constexpr std::uint64_t tag_noise = 0x401e;

constexpr double sweep_tolerance = 1e-9;
constexpr double verify_tolerance = 1e-7;

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

/// "user3_information" -> "user_information", so the sweep summary stays
/// compact for any user count.
std::string collapse_residual_name(const std::string& name) {
    if (name.rfind("user", 0) == 0) {
        const auto underscore = name.find('_');
        if (underscore != std::string::npos) return "user" + name.substr(underscore);
    }
    return name;
}

struct CellAccum {
    std::vector<long long> user_errors;
    std::vector<long long> user_bits;
    double soft_error_sum = 0.0;
    long long symbols = 0;
    double predicted_mse = 0.0;
};

struct RealizationOutput {
    std::vector<std::vector<CellAccum>> cells;  // [point][receiver]
    std::vector<double> design_power;           // [point]
    std::map<std::string, double> residual_max;
    long long designs = 0;
    long long flagged = 0;
    std::exception_ptr error;
};

long long count_bit_errors(const std::vector<std::uint8_t>& tx,
                           const std::vector<std::uint8_t>& rx) {
    long long errors = 0;
    for (size_t i = 0; i < tx.size(); ++i) errors += tx[i] != rx[i];
    return errors;
}

RealizationOutput run_realization(const SimConfig& cfg, const std::vector<double>& points,
                                  const std::vector<int>& order, int realization) {
    const int user_count = cfg.users;
    const int receiver_count = static_cast<int>(cfg.receivers.size());

    RealizationOutput out;
    out.cells.assign(points.size(), std::vector<CellAccum>(receiver_count));
    out.design_power.assign(points.size(), 0.0);
    for (auto& per_point : out.cells) {
        for (auto& cell : per_point) {
            cell.user_errors.assign(user_count, 0);
            cell.user_bits.assign(user_count, 0);
        }
    }

    // Channels are drawn once per realization and shared by all sweep
    // points, as in averaging a BER curve over fixed channel draws.
    const std::vector<IsiChannel> drawn = sweep_channels(
        cfg.seed, realization, user_count, cfg.channel_length, cfg.subcarriers, cfg.modulation);
    std::vector<CMat> matrices(user_count);
    for (int u = 0; u < user_count; ++u) matrices[u] = drawn[u].matrix();

    // Design order may be a permutation of the users; records stay keyed by
    // the original user index.
    std::vector<CMat> ordered;
    std::vector<int> ordered_streams;
    for (int i = 0; i < user_count; ++i) {
        ordered.push_back(matrices[order[i]]);
        ordered_streams.push_back(cfg.streams[order[i]]);
    }
    const ChannelSet channels = ChannelSet::from_matrices(std::move(ordered));

    const bool wants_dfe =
        std::any_of(cfg.receivers.begin(), cfg.receivers.end(), [](ReceiverKind r) {
            return r == ReceiverKind::dfe || r == ReceiverKind::dfe_genie;
        });
    const bool wants_linear = std::any_of(cfg.receivers.begin(), cfg.receivers.end(),
                                          [](ReceiverKind r) { return r == ReceiverKind::linear; });

    const long long bits_share =
        (cfg.min_bits + cfg.realizations - 1) / cfg.realizations;
    const long long errors_share =
        (cfg.max_bit_errors + cfg.realizations - 1) / cfg.realizations;
    const int bits_per_symbol = cfg.constellation.bits_per_symbol();

    for (size_t pi = 0; pi < points.size(); ++pi) {
        const double info = points[pi];
        const DesignResult design = design_transceivers(channels, ordered_streams, info);
        if (!design.dead_streams.empty()) {
            std::ostringstream os;
            os << "run_sweep: dead streams at info=" << info << " bits, realization "
               << realization << ":";
            for (const auto& [design_user, stream] : design.dead_streams) {
                os << " user " << (order[design_user] + 1) << " stream " << (stream + 1) << ";";
            }
            os << " raise the information budget or lower the stream counts";
            throw ConfigError(os.str());
        }

        const VerificationReport report = verify_design(design, channels, verify_tolerance);
        ++out.designs;
        if (!report.ok()) ++out.flagged;
        for (const Residual& r : report.residuals) {
            auto& slot = out.residual_max[collapse_residual_name(r.name)];
            slot = std::max(slot, std::abs(r.value));
        }

        double power = 0.0;
        for (const UserDesign& u : design.users) power += u.power;
        out.design_power[pi] = power;

        DfeReceiver dfe_receiver;
        if (wants_dfe) dfe_receiver = build_receiver(design, channels);
        LinearReceiver linear_receiver;
        if (wants_linear) linear_receiver = build_linear_receiver(design, channels);

        for (int ri = 0; ri < receiver_count; ++ri) {
            auto& cell = out.cells[pi][ri];
            switch (cfg.receivers[ri]) {
                case ReceiverKind::dfe:
                case ReceiverKind::dfe_genie:
                    cell.predicted_mse = dfe_receiver.predicted_mse;
                    break;
                case ReceiverKind::linear:
                    cell.predicted_mse = linear_receiver.predicted_mse;
                    break;
            }
        }

        std::vector<CMat> effective(user_count);
        for (int i = 0; i < user_count; ++i) {
            effective[i] = channels.channels[i] * design.users[i].precoder;
        }

        Rng bits_rng = Rng::derive(cfg.seed, {tag_bits, static_cast<std::uint64_t>(realization),
                                              static_cast<std::uint64_t>(pi)});
        Rng noise_rng = Rng::derive(cfg.seed, {tag_noise, static_cast<std::uint64_t>(realization),
                                               static_cast<std::uint64_t>(pi)});

        std::vector<std::vector<std::uint8_t>> tx_bits(user_count);
        std::vector<CVec> tx_symbols(user_count);
        long long counted = 0;

        auto min_cell_errors = [&] {
            long long m = std::numeric_limits<long long>::max();
            for (int ri = 0; ri < receiver_count; ++ri) {
                long long total = 0;
                for (long long e : out.cells[pi][ri].user_errors) total += e;
                m = std::min(m, total);
            }
            return m;
        };

        while (counted < bits_share && min_cell_errors() < errors_share) {
            CVec received = CVec::Zero(channels.rows());
            for (int i = 0; i < user_count; ++i) {
                const int nk = ordered_streams[i];
                tx_bits[i].resize(static_cast<size_t>(nk) * bits_per_symbol);
                for (auto& b : tx_bits[i]) b = bits_rng.bit() ? 1 : 0;
                tx_symbols[i] = CVec(nk);
                for (int j = 0; j < nk; ++j) {
                    tx_symbols[i](j) = cfg.constellation.map(
                        tx_bits[i].data() + static_cast<size_t>(j) * bits_per_symbol);
                }
                received += effective[i] * tx_symbols[i];
            }
            if (!cfg.noiseless) {
                for (Eigen::Index p = 0; p < received.size(); ++p) {
                    received(p) += noise_rng.complex_normal(1.0);
                }
            }

            for (int ri = 0; ri < receiver_count; ++ri) {
                DetectionResult det;
                switch (cfg.receivers[ri]) {
                    case ReceiverKind::dfe:
                        det = detect(dfe_receiver, design, channels, received,
                                     cfg.constellation);
                        break;
                    case ReceiverKind::dfe_genie:
                        det = detect(dfe_receiver, design, channels, received,
                                     cfg.constellation, &tx_symbols);
                        break;
                    case ReceiverKind::linear:
                        det = linear_mmse_detect(linear_receiver, received, cfg.constellation);
                        break;
                }
                auto& cell = out.cells[pi][ri];
                for (int i = 0; i < user_count; ++i) {
                    const int original = order[i];
                    cell.user_errors[original] += count_bit_errors(tx_bits[i], det.bits[i]);
                    cell.user_bits[original] += static_cast<long long>(tx_bits[i].size());
                    cell.soft_error_sum += (det.soft[i] - tx_symbols[i]).squaredNorm();
                    cell.symbols += ordered_streams[i];
                }
            }
            for (int i = 0; i < user_count; ++i) {
                counted += static_cast<long long>(tx_bits[i].size());
            }
        }
    }
    return out;
}

}  // namespace

std::vector<IsiChannel> sweep_channels(std::uint64_t seed, int realization, int users,
                                       int channel_length, int subcarriers,
                                       Modulation modulation) {
    std::vector<IsiChannel> out;
    out.reserve(users);
    for (int u = 0; u < users; ++u) {
        Rng rng = Rng::derive(seed, {tag_channel, static_cast<std::uint64_t>(realization),
                                     static_cast<std::uint64_t>(u)});
        out.push_back(sample_channel(rng, channel_length - 1, subcarriers, modulation));
    }
    return out;
}

std::string to_string(ReceiverKind r) {
    switch (r) {
        case ReceiverKind::dfe: return "dfe";
        case ReceiverKind::dfe_genie: return "dfe_genie";
        case ReceiverKind::linear: return "linear";
    }
    return "?";
}

ReceiverKind receiver_from_string(const std::string& name) {
    if (name == "dfe") return ReceiverKind::dfe;
    if (name == "dfe_genie" || name == "genie") return ReceiverKind::dfe_genie;
    if (name == "linear") return ReceiverKind::linear;
    throw ConfigError("unknown receiver '" + name + "' (expected dfe, dfe_genie or linear)");
}

std::vector<double> SimConfig::sweep_points() const {
    std::vector<double> points;
    if (info_stop < info_start) return points;
    if (info_stop == info_start) return {info_start};
    if (!(info_step > 0.0)) return points;
    for (double v = info_start; v <= info_stop + sweep_tolerance; v += info_step) {
        points.push_back(v);
    }
    return points;
}

std::string VerificationSummary::to_string() const {
    std::ostringstream os;
    os << "verification: " << designs_checked << " designs checked, " << flagged
       << " flagged (tolerance " << tolerance << ")\n";
    for (const auto& [name, value] : max_abs_residual) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3e", value);
        os << "  max |" << name << "| = " << buf << '\n';
    }
    return os.str();
}

SweepResult run_sweep(const SimConfig& cfg) {
    if (cfg.users < 1) throw ConfigError("run_sweep: need at least one user");
    if (static_cast<int>(cfg.streams.size()) != cfg.users) {
        throw ConfigError("run_sweep: stream counts do not match user count");
    }
    for (int n : cfg.streams) {
        if (n < 1) throw ConfigError("run_sweep: streams must be >= 1");
    }
    if (cfg.subcarriers < 1) throw ConfigError("run_sweep: subcarriers must be >= 1");
    if (cfg.channel_length < 1) throw ConfigError("run_sweep: channel length must be >= 1");
    if (cfg.modulation == Modulation::dmt && cfg.channel_length > cfg.subcarriers) {
        throw ConfigError("run_sweep: channel length exceeds subcarriers under DMT");
    }
    if (cfg.realizations < 1) throw ConfigError("run_sweep: realizations must be >= 1");
    if (cfg.min_bits < 1) throw ConfigError("run_sweep: min bits must be >= 1");
    if (cfg.receivers.empty()) throw ConfigError("run_sweep: no receivers configured");
    for (size_t i = 0; i < cfg.receivers.size(); ++i) {
        for (size_t j = i + 1; j < cfg.receivers.size(); ++j) {
            if (cfg.receivers[i] == cfg.receivers[j]) {
                throw ConfigError("run_sweep: duplicate receiver " +
                                  to_string(cfg.receivers[i]));
            }
        }
    }
    const std::vector<double> points = cfg.sweep_points();
    if (points.empty()) throw ConfigError("run_sweep: empty information sweep");

    // 1-based permutation in the config, 0-based internally.
    std::vector<int> order(cfg.users);
    if (cfg.user_order.empty()) {
        for (int i = 0; i < cfg.users; ++i) order[i] = i;
    } else {
        if (static_cast<int>(cfg.user_order.size()) != cfg.users) {
            throw ConfigError("run_sweep: user order must list every user once");
        }
        std::vector<bool> seen(cfg.users, false);
        for (int i = 0; i < cfg.users; ++i) {
            const int u = cfg.user_order[i] - 1;
            if (u < 0 || u >= cfg.users || seen[u]) {
                throw ConfigError("run_sweep: invalid user order");
            }
            seen[u] = true;
            order[i] = u;
        }
    }

    const int realizations = cfg.realizations;
    std::vector<RealizationOutput> outputs(realizations);
    std::atomic<int> next{0};
    auto worker = [&] {
        while (true) {
            const int r = next.fetch_add(1);
            if (r >= realizations) break;
            try {
                outputs[r] = run_realization(cfg, points, order, r);
            } catch (...) {
                outputs[r].error = std::current_exception();
            }
        }
    };

    const int thread_count = std::max(1, std::min(cfg.threads, realizations));
    if (thread_count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(thread_count);
        for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const RealizationOutput& o : outputs) {
        if (o.error) std::rethrow_exception(o.error);
    }

    // Merge in realization order so the result does not depend on how the
    // work was scheduled.
    SweepResult result;
    result.verification.tolerance = verify_tolerance;
    const int receiver_count = static_cast<int>(cfg.receivers.size());

    for (const RealizationOutput& o : outputs) {
        result.verification.designs_checked += o.designs;
        result.verification.flagged += o.flagged;
        for (const auto& [name, value] : o.residual_max) {
            auto& slot = result.verification.max_abs_residual[name];
            slot = std::max(slot, value);
        }
    }

    for (int ri = 0; ri < receiver_count; ++ri) {
        for (size_t pi = 0; pi < points.size(); ++pi) {
            std::vector<long long> user_errors(cfg.users, 0);
            std::vector<long long> user_bits(cfg.users, 0);
            double soft_error_sum = 0.0;
            long long symbols = 0;
            double predicted_sum = 0.0;
            double power_sum = 0.0;
            for (const RealizationOutput& o : outputs) {
                const CellAccum& cell = o.cells[pi][ri];
                for (int u = 0; u < cfg.users; ++u) {
                    user_errors[u] += cell.user_errors[u];
                    user_bits[u] += cell.user_bits[u];
                }
                soft_error_sum += cell.soft_error_sum;
                symbols += cell.symbols;
                predicted_sum += cell.predicted_mse;
                power_sum += o.design_power[pi];
            }
            long long total_errors = 0, total_bits = 0;
            for (int u = 0; u < cfg.users; ++u) {
                total_errors += user_errors[u];
                total_bits += user_bits[u];
            }
            const double aggregate =
                total_bits > 0 ? static_cast<double>(total_errors) / total_bits : 0.0;
            for (int u = 0; u < cfg.users; ++u) {
                BerRecord rec;
                rec.info_bits = points[pi];
                rec.user = u + 1;
                rec.ber = user_bits[u] > 0
                              ? static_cast<double>(user_errors[u]) / user_bits[u]
                              : 0.0;
                rec.ber_aggregate = aggregate;
                rec.mse_predicted = predicted_sum / realizations;
                rec.mse_measured = symbols > 0 ? soft_error_sum / symbols : 0.0;
                rec.power_total = power_sum / realizations;
                rec.receiver = to_string(cfg.receivers[ri]);
                rec.realizations = realizations;
                rec.bits = user_bits[u];
                result.records.push_back(std::move(rec));
            }
        }
    }

    std::sort(result.records.begin(), result.records.end(),
              [](const BerRecord& a, const BerRecord& b) {
                  if (a.receiver != b.receiver) return a.receiver < b.receiver;
                  if (a.info_bits != b.info_bits) return a.info_bits < b.info_bits;
                  return a.user < b.user;
              });
    return result;
}

void emit_csv(const std::vector<BerRecord>& records, const std::string& path) {
    if (records.empty()) throw ConfigError("emit_csv: refusing to write an empty record list");

    std::vector<BerRecord> sorted = records;
    std::sort(sorted.begin(), sorted.end(), [](const BerRecord& a, const BerRecord& b) {
        if (a.receiver != b.receiver) return a.receiver < b.receiver;
        if (a.info_bits != b.info_bits) return a.info_bits < b.info_bits;
        return a.user < b.user;
    });

    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("emit_csv: cannot open '" + path + "' for writing");
    file << "info_bits,user,ber,ber_aggregate,mse_predicted,mse_measured,power_total,"
            "receiver,realizations,bits\n";
    for (const BerRecord& r : sorted) {
        file << format_full(r.info_bits) << ',' << r.user << ',' << format_full(r.ber) << ','
             << format_full(r.ber_aggregate) << ',' << format_full(r.mse_predicted) << ','
             << format_full(r.mse_measured) << ',' << format_full(r.power_total) << ','
             << r.receiver << ',' << r.realizations << ',' << r.bits << '\n';
    }
    if (!file.good()) throw IoError("emit_csv: write to '" + path + "' failed");
}

std::vector<BerRecord> read_ber_csv(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IoError("read_ber_csv: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(file, line)) throw IoError("read_ber_csv: empty file");

    std::vector<BerRecord> records;
    while (std::getline(file, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 10) throw IoError("read_ber_csv: malformed row '" + line + "'");
        BerRecord r;
        r.info_bits = std::stod(fields[0]);
        r.user = std::stoi(fields[1]);
        r.ber = std::stod(fields[2]);
        r.ber_aggregate = std::stod(fields[3]);
        r.mse_predicted = std::stod(fields[4]);
        r.mse_measured = std::stod(fields[5]);
        r.power_total = std::stod(fields[6]);
        r.receiver = fields[7];
        r.realizations = std::stoi(fields[8]);
        r.bits = std::stoll(fields[9]);
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace mimodfe
