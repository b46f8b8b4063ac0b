#include <optional>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mimodfe/io.hpp"
#include "mimodfe/sim.hpp"
#include "mimodfe/waterfill.hpp"

namespace py = pybind11;
using namespace mimodfe;

PYBIND11_MODULE(_core, m) {
    m.doc() = "joint transceiver design and MMSE-DFE simulation for "
              "multiple-access ISI MIMO channels";

    auto error = py::register_exception<Error>(m, "Error");
    py::register_exception<DimensionError>(m, "DimensionError", error.ptr());
    py::register_exception<DomainError>(m, "DomainError", error.ptr());
    py::register_exception<FactorizationError>(m, "FactorizationError", error.ptr());
    py::register_exception<RankError>(m, "RankError", error.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
    py::register_exception<IoError>(m, "IoError", error.ptr());

    // ---- decompositions ----------------------------------------------
    py::class_<HermitianEig>(m, "HermitianEig")
        .def_readonly("eigenvalues", &HermitianEig::eigenvalues)
        .def_readonly("eigenvectors", &HermitianEig::eigenvectors);
    m.def("hermitian_eig", &hermitian_eig, py::arg("a"),
          "ordered eigendecomposition of a Hermitian matrix");

    m.def("cholesky_upper", &cholesky_upper, py::arg("a"),
          "upper-triangular C with C^H C = a");
    m.def("hermitian_sqrt", &hermitian_sqrt, py::arg("a"));

    py::class_<QrsFactors>(m, "QrsFactors")
        .def_readonly("q", &QrsFactors::q)
        .def_readonly("r", &QrsFactors::r)
        .def_readonly("s", &QrsFactors::s);
    m.def("qrs_equal_diagonal", &qrs_equal_diagonal, py::arg("a"),
          "equal-diagonal QRS (geometric mean) decomposition: a @ s = q @ r");

    // ---- inverse water-filling ----------------------------------------
    py::class_<InverseWaterfillResult>(m, "InverseWaterfillResult")
        .def_readonly("active_rank", &InverseWaterfillResult::active_rank)
        .def_readonly("loadings", &InverseWaterfillResult::loadings)
        .def_readonly("achieved_info_bits", &InverseWaterfillResult::achieved_info_bits)
        .def("total_power", &InverseWaterfillResult::total_power);
    m.def("inverse_waterfill", &inverse_waterfill, py::arg("eigenvalues"),
          py::arg("info_bits"), py::arg("max_streams"),
          "minimum-power loadings meeting a mutual information target");

    // ---- channels -----------------------------------------------------
    py::enum_<Modulation>(m, "Modulation")
        .value("zero_padded", Modulation::zero_padded)
        .value("dmt", Modulation::dmt);

    py::class_<IsiChannel>(m, "IsiChannel")
        .def_readonly("taps", &IsiChannel::taps)
        .def_readonly("modulation", &IsiChannel::modulation)
        .def_readonly("block_size", &IsiChannel::block_size)
        .def("matrix", &IsiChannel::matrix);

    m.def("toeplitz_matrix", &toeplitz_matrix, py::arg("taps"), py::arg("block_size"));
    m.def("dmt_matrix", &dmt_matrix, py::arg("taps"), py::arg("block_size"));
    m.def("sweep_channels", &sweep_channels, py::arg("seed"), py::arg("realization"),
          py::arg("users"), py::arg("channel_length"), py::arg("subcarriers"),
          py::arg("modulation"),
          "the per-realization channel draw used by run_sweep");

    // ---- designer -----------------------------------------------------
    py::class_<ChannelSet>(m, "ChannelSet")
        .def(py::init([](std::vector<CMat> h) {
                 return ChannelSet::from_matrices(std::move(h));
             }),
             py::arg("channels"))
        .def(py::init([](const std::vector<IsiChannel>& chans) {
                 return ChannelSet::from_channels(chans);
             }),
             py::arg("channels"))
        .def_readonly("channels", &ChannelSet::channels)
        .def_readonly("ranks", &ChannelSet::ranks)
        .def("users", &ChannelSet::users)
        .def("rows", &ChannelSet::rows);

    py::class_<UserDesign>(m, "UserDesign")
        .def_readonly("precoder", &UserDesign::precoder)
        .def_readonly("noise_cov", &UserDesign::noise_cov)
        .def_readonly("info_matrix", &UserDesign::info_matrix)
        .def_readonly("basis", &UserDesign::basis)
        .def_readonly("s_factor", &UserDesign::s_factor)
        .def_readonly("eigenvalues", &UserDesign::eigenvalues)
        .def_readonly("loadings", &UserDesign::loadings)
        .def_readonly("active_rank", &UserDesign::active_rank)
        .def_readonly("info_bits", &UserDesign::info_bits)
        .def_readonly("power", &UserDesign::power)
        .def("streams", &UserDesign::streams);

    py::class_<DesignResult>(m, "DesignResult")
        .def_readonly("users", &DesignResult::users)
        .def_readonly("sum_info_bits", &DesignResult::sum_info_bits)
        .def_readonly("total_streams", &DesignResult::total_streams)
        .def_readonly("dead_streams", &DesignResult::dead_streams)
        .def("mse_bound", &DesignResult::mse_bound);

    m.def("design_transceivers", &design_transceivers, py::arg("channels"),
          py::arg("streams"), py::arg("sum_info_bits"),
          "sequential closed-form multiuser precoder design");

    py::class_<Residual>(m, "Residual")
        .def_readonly("name", &Residual::name)
        .def_readonly("value", &Residual::value)
        .def_readonly("flagged", &Residual::flagged)
        .def("__repr__", [](const Residual& r) {
            return "Residual(" + r.name + "=" + std::to_string(r.value) + ")";
        });

    py::class_<VerificationReport>(m, "VerificationReport")
        .def_readonly("residuals", &VerificationReport::residuals)
        .def_readonly("tolerance", &VerificationReport::tolerance)
        .def("ok", &VerificationReport::ok)
        .def("max_abs", &VerificationReport::max_abs)
        .def("__str__", &VerificationReport::to_string);

    m.def("verify_design", &verify_design, py::arg("design"), py::arg("channels"),
          py::arg("tolerance") = 1e-7);

    // ---- receivers ----------------------------------------------------
    py::class_<Constellation>(m, "Constellation")
        .def_static("qpsk", &Constellation::qpsk)
        .def_static("from_string", &Constellation::from_string)
        .def("bits_per_symbol", &Constellation::bits_per_symbol)
        .def("slice", &Constellation::slice)
        .def("name", &Constellation::name);

    py::class_<UserDfe>(m, "UserDfe")
        .def_readonly("feedforward", &UserDfe::feedforward)
        .def_readonly("feedback", &UserDfe::feedback)
        .def_readonly("r_diag", &UserDfe::r_diag)
        .def_readonly("error_variance", &UserDfe::error_variance);

    py::class_<DfeReceiver>(m, "DfeReceiver")
        .def_readonly("users", &DfeReceiver::users)
        .def_readonly("predicted_mse", &DfeReceiver::predicted_mse);

    m.def("build_receiver", &build_receiver, py::arg("design"), py::arg("channels"));

    py::class_<DetectionResult>(m, "DetectionResult")
        .def_readonly("symbols", &DetectionResult::symbols)
        .def_readonly("bits", &DetectionResult::bits)
        .def_readonly("soft", &DetectionResult::soft);

    m.def(
        "detect",
        [](const DfeReceiver& receiver, const DesignResult& design, const ChannelSet& channels,
           const CVec& received, const Constellation& constellation,
           const std::optional<std::vector<CVec>>& genie) {
            return detect(receiver, design, channels, received, constellation,
                          genie ? &*genie : nullptr);
        },
        py::arg("receiver"), py::arg("design"), py::arg("channels"), py::arg("received"),
        py::arg("constellation"), py::arg("genie") = py::none(),
        "two-level successive-cancellation detection");

    py::class_<LinearReceiver>(m, "LinearReceiver")
        .def_readonly("combiner", &LinearReceiver::combiner)
        .def_readonly("error_variance", &LinearReceiver::error_variance)
        .def_readonly("predicted_mse", &LinearReceiver::predicted_mse);

    m.def("build_linear_receiver", &build_linear_receiver, py::arg("design"),
          py::arg("channels"));
    m.def(
        "linear_mmse_detect",
        [](const LinearReceiver& receiver, const CVec& received,
           const Constellation& constellation) {
            return linear_mmse_detect(receiver, received, constellation);
        },
        py::arg("receiver"), py::arg("received"), py::arg("constellation"));

    // ---- simulation ----------------------------------------------------
    py::enum_<ReceiverKind>(m, "ReceiverKind")
        .value("dfe", ReceiverKind::dfe)
        .value("dfe_genie", ReceiverKind::dfe_genie)
        .value("linear", ReceiverKind::linear);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("users", &SimConfig::users)
        .def_readwrite("streams", &SimConfig::streams)
        .def_readwrite("subcarriers", &SimConfig::subcarriers)
        .def_readwrite("channel_length", &SimConfig::channel_length)
        .def_readwrite("modulation", &SimConfig::modulation)
        .def_readwrite("info_start", &SimConfig::info_start)
        .def_readwrite("info_stop", &SimConfig::info_stop)
        .def_readwrite("info_step", &SimConfig::info_step)
        .def_readwrite("realizations", &SimConfig::realizations)
        .def_readwrite("min_bits", &SimConfig::min_bits)
        .def_readwrite("max_bit_errors", &SimConfig::max_bit_errors)
        .def_readwrite("receivers", &SimConfig::receivers)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("out_path", &SimConfig::out_path)
        .def_readwrite("threads", &SimConfig::threads)
        .def_readwrite("noiseless", &SimConfig::noiseless)
        .def_readwrite("user_order", &SimConfig::user_order)
        .def("sweep_points", &SimConfig::sweep_points);

    py::class_<BerRecord>(m, "BerRecord")
        .def_readonly("info_bits", &BerRecord::info_bits)
        .def_readonly("user", &BerRecord::user)
        .def_readonly("ber", &BerRecord::ber)
        .def_readonly("ber_aggregate", &BerRecord::ber_aggregate)
        .def_readonly("mse_predicted", &BerRecord::mse_predicted)
        .def_readonly("mse_measured", &BerRecord::mse_measured)
        .def_readonly("power_total", &BerRecord::power_total)
        .def_readonly("receiver", &BerRecord::receiver)
        .def_readonly("realizations", &BerRecord::realizations)
        .def_readonly("bits", &BerRecord::bits)
        .def("__eq__", [](const BerRecord& a, const BerRecord& b) { return a == b; })
        .def("__repr__", [](const BerRecord& r) {
            return "BerRecord(info=" + std::to_string(r.info_bits) + ", user=" +
                   std::to_string(r.user) + ", receiver=" + r.receiver +
                   ", ber=" + std::to_string(r.ber) + ")";
        });

    py::class_<VerificationSummary>(m, "VerificationSummary")
        .def_readonly("max_abs_residual", &VerificationSummary::max_abs_residual)
        .def_readonly("designs_checked", &VerificationSummary::designs_checked)
        .def_readonly("flagged", &VerificationSummary::flagged)
        .def_readonly("tolerance", &VerificationSummary::tolerance)
        .def("__str__", &VerificationSummary::to_string);

    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("records", &SweepResult::records)
        .def_readonly("verification", &SweepResult::verification);

    m.def("run_sweep", &run_sweep, py::arg("config"),
          py::call_guard<py::gil_scoped_release>(),
          "full Monte Carlo BER sweep; deterministic for a fixed seed");
    m.def("emit_csv", &emit_csv, py::arg("records"), py::arg("path"));
    m.def("read_ber_csv", &read_ber_csv, py::arg("path"));

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
