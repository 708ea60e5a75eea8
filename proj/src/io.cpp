#include "effham/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace effham {

namespace {

Json complex_matrix_to_json(const Eigen::MatrixXcd& m) {
    Json re = Json::array(), im = Json::array();
    for (long i = 0; i < m.rows(); ++i)
        for (long j = 0; j < m.cols(); ++j) {
            re.push_back(m(i, j).real());
            im.push_back(m(i, j).imag());
        }
    return Json{{"re", re}, {"im", im}};
}

Eigen::MatrixXcd complex_matrix_from_json(const Json& j, long rows, long cols) {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (static_cast<long>(re.size()) != rows * cols ||
        static_cast<long>(im.size()) != rows * cols)
        throw std::invalid_argument("matrix json: wrong entry count");
    Eigen::MatrixXcd m(rows, cols);
    for (long i = 0; i < rows; ++i)
        for (long k = 0; k < cols; ++k) {
            const std::size_t flat = static_cast<std::size_t>(i * cols + k);
            m(i, k) = Complex(re[flat].get<double>(), im[flat].get<double>());
        }
    return m;
}

}  // namespace

Json operator_to_json(const Operator& op) {
    Json j = complex_matrix_to_json(op);
    j["dim"] = op.rows();
    return j;
}

Operator operator_from_json(const Json& j) {
    const long d = j.at("dim").get<long>();
    return complex_matrix_from_json(j, d, d);
}

Json superop_to_json(const SuperOperator& l) {
    Json j = complex_matrix_to_json(l.matrix);
    j["dim"] = l.dim;
    j["vectorization"] = "column-stacking";
    return j;
}

SuperOperator superop_from_json(const Json& j) {
    const int d = j.at("dim").get<int>();
    if (j.contains("vectorization") && j["vectorization"] != "column-stacking")
        throw std::invalid_argument("superoperator json: unknown vectorization tag");
    const long dd = static_cast<long>(d) * d;
    return {d, complex_matrix_from_json(j, dd, dd)};
}

Json split_to_json(const GeneratorSplit& s) {
    Json jumps = Json::array();
    for (const auto& jump : s.jumps)
        jumps.push_back(Json{{"rate", jump.rate}, {"op", operator_to_json(jump.op)}});
    return Json{{"k", operator_to_json(s.k)},
                {"kossakowski", complex_matrix_to_json(s.kossakowski)},
                {"jumps", jumps}};
}

Json haar_mc_to_json(const HaarMcEstimate& e) {
    return Json{{"estimate", operator_to_json(e.estimate)},
                {"stderr", e.std_error},
                {"samples", e.samples}};
}

Json bath_to_json(const BathSpec& bath) {
    Json j;
    switch (bath.j.kind) {
        case SpectralDensity::Kind::OhmicExp:
            j["spectral_density"] = {{"kind", "ohmic_exp"},
                                     {"alpha", bath.j.alpha},
                                     {"omega_c", bath.j.omega_c}};
            break;
        case SpectralDensity::Kind::Drude:
            j["spectral_density"] = {{"kind", "drude"},
                                     {"lambda", bath.j.lambda_reorg},
                                     {"gamma", bath.j.gamma_c}};
            break;
        case SpectralDensity::Kind::DiscreteModes: {
            Json modes = Json::array();
            for (const auto& m : bath.j.modes)
                modes.push_back(Json{{"g", m.g}, {"omega", m.omega}});
            j["spectral_density"] = {{"kind", "discrete"}, {"modes", modes}};
            break;
        }
    }
    if (std::isinf(bath.beta))
        j["beta"] = "inf";
    else
        j["beta"] = bath.beta;
    if (!bath.mean.empty()) {
        Json mean = Json::array();
        for (const auto& term : bath.mean)
            mean.push_back(Json{{"amp_cos", term.amp_cos},
                                {"amp_sin", term.amp_sin},
                                {"omega", term.omega}});
        j["mean"] = mean;
    }
    return j;
}

BathSpec bath_from_json(const Json& j) {
    BathSpec bath;
    const auto& sd = j.at("spectral_density");
    const std::string kind = sd.at("kind").get<std::string>();
    if (kind == "ohmic_exp") {
        bath.j = SpectralDensity::ohmic_exp(sd.at("alpha").get<double>(),
                                            sd.at("omega_c").get<double>());
    } else if (kind == "drude") {
        bath.j = SpectralDensity::drude(sd.at("lambda").get<double>(),
                                        sd.at("gamma").get<double>());
    } else if (kind == "discrete") {
        std::vector<Mode> modes;
        for (const auto& m : sd.at("modes"))
            modes.push_back({m.at("g").get<double>(), m.at("omega").get<double>()});
        bath.j = SpectralDensity::discrete_modes(std::move(modes));
    } else {
        throw std::invalid_argument("bath json: unknown spectral density kind " + kind);
    }
    const auto& beta = j.at("beta");
    if (beta.is_string()) {
        if (beta.get<std::string>() != "inf")
            throw std::invalid_argument("bath json: beta must be a number or \"inf\"");
        bath.beta = std::numeric_limits<double>::infinity();
    } else {
        bath.beta = beta.get<double>();
        if (bath.beta <= 0.0) throw std::invalid_argument("bath json: beta must be positive");
    }
    if (j.contains("mean"))
        for (const auto& term : j["mean"])
            bath.mean.push_back({term.at("amp_cos").get<double>(),
                                 term.at("amp_sin").get<double>(),
                                 term.at("omega").get<double>()});
    return bath;
}

Json model_to_json(const SpinModel& model) {
    Json j{{"omega", model.omega}, {"lambda", model.lambda}};
    if ((model.coupling_op - pauli_z()).cwiseAbs().maxCoeff() < 1e-14)
        j["coupling"] = "sigma_z";
    else if ((model.coupling_op - pauli_x()).cwiseAbs().maxCoeff() < 1e-14)
        j["coupling"] = "sigma_x";
    else
        j["coupling"] = operator_to_json(model.coupling_op);
    return j;
}

SpinModel model_from_json(const Json& j) {
    const double omega = j.at("omega").get<double>();
    const double lambda = j.at("lambda").get<double>();
    const auto& coupling = j.at("coupling");
    if (coupling.is_string()) {
        const std::string name = coupling.get<std::string>();
        if (name == "sigma_z") return SpinModel::dephasing(omega, lambda);
        if (name == "sigma_x") return SpinModel::unbiased(omega, lambda);
        throw std::invalid_argument("model json: unknown coupling " + name);
    }
    return SpinModel::with_coupling(omega, lambda, operator_from_json(coupling));
}

Json oracle_report_to_json(const OracleReport& report) {
    Json k_exact = Json::array();
    for (const auto& k : report.k_exact) k_exact.push_back(operator_to_json(k));
    Json residuals;
    for (const auto& [order, values] : report.residuals)
        residuals[std::to_string(order)] = values;
    return Json{{"times", report.times},
                {"lambda", report.lambda},
                {"k_exact", k_exact},
                {"residuals", residuals}};
}

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string kseries_csv(const KSeries& series) {
    std::ostringstream out;
    out << "t,n,re00,im00,re01,im01,re10,im10,re11,im11\n";
    for (const auto& [order, ops] : series.orders)
        for (std::size_t i = 0; i < series.times.size(); ++i) {
            out << format_g17(series.times[i]) << ',' << order;
            const Operator& k = ops[i];
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    out << ',' << format_g17(k(r, c).real()) << ','
                        << format_g17(k(r, c).imag());
            out << '\n';
        }
    return out.str();
}

std::string observables_csv(const std::vector<ObservableRow>& rows) {
    std::ostringstream out;
    out << "t,omega_r,kx,ky,rotation_angle\n";
    for (const auto& r : rows)
        out << format_g17(r.t) << ',' << format_g17(r.omega_r) << ',' << format_g17(r.kx)
            << ',' << format_g17(r.ky) << ',' << format_g17(r.rotation_angle) << '\n';
    return out.str();
}

std::string correlation_csv(const CorrelationTable& table) {
    std::ostringstream out;
    out << "u,re_c,im_c\n";
    for (long j = 0; j < table.points(); ++j) {
        const double u = table.step * static_cast<double>(j);
        out << format_g17(u) << ',' << format_g17(table.c[static_cast<std::size_t>(j)].real())
            << ',' << format_g17(table.c[static_cast<std::size_t>(j)].imag()) << '\n';
    }
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
}

}  // namespace effham
