#include "mimodfe/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mimodfe {

namespace {

using nlohmann::json;

json matrix_to_json(const CMat& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            re.push_back(m(i, j).real());
            im.push_back(m(i, j).imag());
        }
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

CMat matrix_from_json(const json& j) {
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (static_cast<Eigen::Index>(re.size()) != rows * cols || re.size() != im.size()) {
        throw IoError("design file: matrix payload does not match its dimensions");
    }
    CMat m(rows, cols);
    size_t idx = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j2 = 0; j2 < cols; ++j2, ++idx) {
            m(i, j2) = Complex(re[idx].get<double>(), im[idx].get<double>());
        }
    }
    return m;
}

json vector_to_json(const RVec& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

RVec vector_from_json(const json& j) {
    RVec v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

}  // namespace

void save_design_json(const DesignResult& design, const ChannelSet& channels,
                      const std::string& modulation, const std::string& path) {
    json doc;
    doc["format"] = "mimodfe-design-v1";
    doc["modulation"] = modulation;
    doc["sum_info_bits"] = design.sum_info_bits;
    doc["total_streams"] = design.total_streams;

    doc["channels"] = json::array();
    for (const CMat& h : channels.channels) doc["channels"].push_back(matrix_to_json(h));

    doc["users"] = json::array();
    for (const UserDesign& u : design.users) {
        json user;
        user["streams"] = u.streams();
        user["active_rank"] = u.active_rank;
        user["info_bits"] = u.info_bits;
        user["power"] = u.power;
        user["eigenvalues"] = vector_to_json(u.eigenvalues);
        user["loadings"] = vector_to_json(u.loadings);
        user["precoder"] = matrix_to_json(u.precoder);
        user["basis"] = matrix_to_json(u.basis);
        user["s_factor"] = matrix_to_json(u.s_factor);
        user["noise_cov"] = matrix_to_json(u.noise_cov);
        user["info_matrix"] = matrix_to_json(u.info_matrix);
        doc["users"].push_back(std::move(user));
    }

    doc["dead_streams"] = json::array();
    for (const auto& [user, stream] : design.dead_streams) {
        doc["dead_streams"].push_back(json::array({user, stream}));
    }

    std::ofstream file(path);
    if (!file) throw IoError("save_design_json: cannot open '" + path + "' for writing");
    file << doc.dump(1) << '\n';
    if (!file.good()) throw IoError("save_design_json: write to '" + path + "' failed");
}

SavedDesign load_design_json(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IoError("load_design_json: cannot open '" + path + "'");
    json doc;
    try {
        file >> doc;
    } catch (const json::exception& e) {
        throw IoError("load_design_json: '" + path + "' is not valid JSON: " + e.what());
    }
    if (doc.value("format", "") != "mimodfe-design-v1") {
        throw IoError("load_design_json: '" + path + "' is not a design file");
    }

    SavedDesign out;
    out.modulation = doc.value("modulation", "matrix");

    std::vector<CMat> h;
    for (const json& jm : doc.at("channels")) h.push_back(matrix_from_json(jm));
    out.channels = ChannelSet::from_matrices(std::move(h));

    out.design.sum_info_bits = doc.at("sum_info_bits").get<double>();
    out.design.total_streams = doc.at("total_streams").get<int>();
    for (const json& ju : doc.at("users")) {
        UserDesign u;
        u.active_rank = ju.at("active_rank").get<int>();
        u.info_bits = ju.at("info_bits").get<double>();
        u.power = ju.at("power").get<double>();
        u.eigenvalues = vector_from_json(ju.at("eigenvalues"));
        u.loadings = vector_from_json(ju.at("loadings"));
        u.precoder = matrix_from_json(ju.at("precoder"));
        u.basis = matrix_from_json(ju.at("basis"));
        u.s_factor = matrix_from_json(ju.at("s_factor"));
        u.noise_cov = matrix_from_json(ju.at("noise_cov"));
        u.info_matrix = matrix_from_json(ju.at("info_matrix"));
        out.design.users.push_back(std::move(u));
    }
    for (const json& jd : doc.value("dead_streams", json::array())) {
        out.design.dead_streams.emplace_back(jd.at(0).get<int>(), jd.at(1).get<int>());
    }
    return out;
}

std::vector<CVec> read_channel_taps(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IoError("read_channel_taps: cannot open '" + path + "'");

    std::vector<CVec> users;
    std::vector<Complex> taps;
    auto flush = [&] {
        if (taps.empty()) return;
        CVec v(static_cast<Eigen::Index>(taps.size()));
        for (size_t i = 0; i < taps.size(); ++i) v(static_cast<Eigen::Index>(i)) = taps[i];
        users.push_back(std::move(v));
        taps.clear();
    };

    std::string line;
    size_t line_no = 0;
    while (std::getline(file, line)) {
        ++line_no;
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
        if (trimmed.empty()) {
            flush();
            continue;
        }
        if (trimmed[0] == '#') continue;
        std::istringstream ss(trimmed);
        double re = 0.0, im = 0.0;
        if (!(ss >> re >> im)) {
            throw IoError("read_channel_taps: line " + std::to_string(line_no) +
                          " is not 're im'");
        }
        taps.emplace_back(re, im);
    }
    flush();
    if (users.empty()) throw IoError("read_channel_taps: no taps in '" + path + "'");
    return users;
}

}  // namespace mimodfe
