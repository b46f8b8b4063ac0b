#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mimodfe/dfe.hpp"

namespace mimodfe {

enum class ReceiverKind { dfe, dfe_genie, linear };

std::string to_string(ReceiverKind r);
ReceiverKind receiver_from_string(const std::string& name);

/// Everything one Monte Carlo sweep needs. Information is swept from
/// info_start to info_stop (inclusive) in steps of info_step bits.
struct SimConfig {
    int users = 2;
    std::vector<int> streams;  ///< N_k per user
    int subcarriers = 32;      ///< block size M
    int channel_length = 10;   ///< number of taps (memory + 1)
    Modulation modulation = Modulation::dmt;
    double info_start = 0.0;
    double info_stop = 0.0;
    double info_step = 1.0;
    int realizations = 100;
    long long min_bits = 1'000'000;   ///< per sweep point, across realizations
    long long max_bit_errors = 1000;  ///< early-stop threshold per sweep point
    Constellation constellation = Constellation::qpsk();
    std::vector<ReceiverKind> receivers{ReceiverKind::dfe};
    std::uint64_t seed = 1;
    std::string out_path;
    int threads = 1;
    bool noiseless = false;
    std::vector<int> user_order;  ///< design-order permutation, empty = natural

    std::vector<double> sweep_points() const;
};

/// One CSV row: a (sweep point, user, receiver) cell of the experiment.
struct BerRecord {
    double info_bits = 0.0;
    int user = 0;  ///< 1-based
    double ber = 0.0;
    double ber_aggregate = 0.0;
    double mse_predicted = 0.0;
    double mse_measured = 0.0;
    double power_total = 0.0;
    std::string receiver;
    int realizations = 0;
    long long bits = 0;  ///< bits counted for this user at this point

    bool operator==(const BerRecord&) const = default;
};

/// Maximum absolute residual seen per verification check, across every
/// design of the sweep.
struct VerificationSummary {
    std::map<std::string, double> max_abs_residual;
    long long designs_checked = 0;
    long long flagged = 0;
    double tolerance = 0.0;

    std::string to_string() const;
};

struct SweepResult {
    std::vector<BerRecord> records;
    VerificationSummary verification;
};

/// Runs the full Monte Carlo sweep: per sweep point and channel
/// realization, designs the transceivers, verifies the optimality
/// conditions, pushes random bits through every configured receiver and
/// accumulates errors. Deterministic for a fixed seed regardless of the
/// thread count. Throws ConfigError if any (streams, info) point produces
/// dead streams.
SweepResult run_sweep(const SimConfig& config);

/// The channel draw run_sweep uses for one realization, exposed so a
/// one-shot design can be made on exactly the channels a sweep would see.
std::vector<IsiChannel> sweep_channels(std::uint64_t seed, int realization, int users,
                                       int channel_length, int subcarriers,
                                       Modulation modulation);

/// Writes records as CSV (header + one row per record), floating point in
/// full-precision scientific notation. Refuses an empty record list.
void emit_csv(const std::vector<BerRecord>& records, const std::string& path);

/// Reads back a CSV produced by emit_csv.
std::vector<BerRecord> read_ber_csv(const std::string& path);

}  // namespace mimodfe
