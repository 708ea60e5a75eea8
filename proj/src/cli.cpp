#include "effham/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace effham {

namespace fs = std::filesystem;

namespace {

std::vector<double> default_outputs(const TimesSpec& times) {
    if (!times.outputs.empty()) return times.outputs;
    std::vector<double> out;
    for (int j = 1; j <= 8; ++j) out.push_back(times.t_max * j / 8.0);
    return out;
}

void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

std::string point_dir_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "point_%03zu", index);
    return buf;
}

void log(const RunConfig& config, const std::string& msg) {
    if (config.verbose) std::cerr << "[effham] " << msg << '\n';
}

}  // namespace

RunConfig parse_run_config(const Json& j) {
    RunConfig config;
    config.command = j.at("command").get<std::string>();
    if (config.command != "split" && config.command != "expand" &&
        config.command != "oracle" && config.command != "sweep")
        throw std::invalid_argument("config: unknown command " + config.command);
    if (j.contains("output")) config.output = j["output"].get<std::string>();
    if (j.contains("model")) config.model = model_from_json(j["model"]);
    if (j.contains("bath")) config.bath = bath_from_json(j["bath"]);
    if (j.contains("times")) {
        const auto& t = j["times"];
        config.times.t_max = t.at("t_max").get<double>();
        config.times.step = t.at("step").get<double>();
        if (t.contains("outputs"))
            config.times.outputs = t["outputs"].get<std::vector<double>>();
        require(config.times.t_max > 0.0 && config.times.step > 0.0,
                "config: times require t_max > 0 and step > 0");
    }
    if (j.contains("orders")) config.orders = j["orders"].get<int>();
    if (j.contains("mc")) {
        McSpec mc;
        mc.samples = j["mc"].at("samples").get<long>();
        mc.seed = j["mc"].at("seed").get<std::uint64_t>();
        config.mc = mc;
    }
    if (j.contains("generator")) {
        const auto& g = j["generator"];
        if (g.contains("superoperator")) {
            config.generator = superop_from_json(g["superoperator"]);
        } else if (g.contains("lindblad")) {
            const auto& lb = g["lindblad"];
            const Operator h = operator_from_json(lb.at("h"));
            std::vector<Jump> jumps;
            if (lb.contains("jumps"))
                for (const auto& jj : lb["jumps"])
                    jumps.push_back(
                        {jj.at("rate").get<double>(), operator_from_json(jj.at("op"))});
            config.generator = lindblad_generator(h, jumps);
        } else {
            throw std::invalid_argument(
                "config: generator needs a superoperator or a lindblad spec");
        }
    }
    if (j.contains("sim")) {
        const auto& s = j["sim"];
        if (s.contains("fock_cutoff")) config.sim.fock_cutoff = s["fock_cutoff"].get<int>();
        if (s.contains("fd_step")) config.sim.fd_step = s["fd_step"].get<double>();
        if (s.contains("check_truncation"))
            config.sim.check_truncation = s["check_truncation"].get<bool>();
        if (s.contains("displacement"))
            for (const auto& d : s["displacement"])
                config.sim.displacement.emplace_back(d.at("re").get<double>(),
                                                     d.at("im").get<double>());
    }
    if (j.contains("sweep")) {
        SweepSpec sweep;
        sweep.axis = j["sweep"].at("axis").get<std::string>();
        if (j["sweep"].contains("values"))
            sweep.values = j["sweep"]["values"].get<std::vector<double>>();
        config.sweep = sweep;
    }
    return config;
}

Json run_config_to_json(const RunConfig& config) {
    Json j{{"command", config.command}, {"output", config.output}};
    if (config.model) j["model"] = model_to_json(*config.model);
    if (config.bath) j["bath"] = bath_to_json(*config.bath);
    if (config.times.t_max > 0.0) {
        j["times"] = {{"t_max", config.times.t_max}, {"step", config.times.step}};
        if (!config.times.outputs.empty()) j["times"]["outputs"] = config.times.outputs;
    }
    j["orders"] = config.orders;
    if (config.mc)
        j["mc"] = {{"samples", config.mc->samples}, {"seed", config.mc->seed}};
    if (config.generator) j["generator"] = {{"superoperator", superop_to_json(*config.generator)}};
    if (config.sweep) j["sweep"] = {{"axis", config.sweep->axis}, {"values", config.sweep->values}};
    return j;
}

void cmd_split(const RunConfig& config) {
    require(config.generator.has_value(), "split: config must supply a generator");
    fs::create_directories(config.output);
    const GeneratorSplit result = split(*config.generator);
    write_file((fs::path(config.output) / "split.json").string(),
               split_to_json(result).dump(2) + "\n");
    log(config, "wrote split.json");
    if (config.mc) {
        const HaarMcEstimate mc = haar_mc_effective_hamiltonian(
            *config.generator, config.mc->samples, config.mc->seed);
        write_file((fs::path(config.output) / "mc_check.json").string(),
                   haar_mc_to_json(mc).dump(2) + "\n");
        log(config, "wrote mc_check.json");
    }
}

void cmd_expand(const RunConfig& config) {
    require(config.model.has_value() && config.bath.has_value(),
            "expand: config must supply model and bath");
    require(config.times.t_max > 0.0, "expand: config must supply times");
    fs::create_directories(config.output);
    const std::vector<double> outputs = default_outputs(config.times);
    const KSeries series = k_series(*config.model, *config.bath, config.orders, outputs,
                                    {config.times.step});
    write_file((fs::path(config.output) / "kseries.csv").string(), kseries_csv(series));
    write_file((fs::path(config.output) / "observables.csv").string(),
               observables_csv(report_observables(series)));
    write_file((fs::path(config.output) / "correlation.csv").string(),
               correlation_csv(build_correlation_table(*config.bath, config.times.t_max,
                                                       config.times.step)));
    log(config, "wrote kseries.csv, observables.csv, correlation.csv");
}

void cmd_oracle(const RunConfig& config) {
    require(config.model.has_value() && config.bath.has_value(),
            "oracle: config must supply model and bath");
    require(config.bath->j.kind == SpectralDensity::Kind::DiscreteModes,
            "oracle: requires a discrete-mode bath");
    require(config.times.t_max > 0.0, "oracle: config must supply times");
    fs::create_directories(config.output);

    DiscreteBathSim sim;
    sim.modes = config.bath->j.modes;
    sim.beta = config.bath->beta;
    sim.fock_cutoff = config.sim.fock_cutoff;
    sim.displacement = config.sim.displacement;

    const std::vector<double> outputs = default_outputs(config.times);
    if (config.sim.check_truncation) {
        const std::vector<double> probe{outputs.front(), outputs.back()};
        const double change = truncation_change(sim, *config.model, probe);
        log(config, "truncation change " + format_g17(change));
        if (change > 1e-8)
            throw std::runtime_error("oracle: truncation inadequate, doubling the cutoff "
                                     "changes the map by " + format_g17(change));
    }

    // The series bath is derived from the simulator so mean terms stay
    // consistent with the displaced initial state.
    const BathSpec bath = sim.bath_spec();
    const KSeries series = k_series(*config.model, bath, config.orders, outputs,
                                    {config.times.step});
    const DynamicalMapSeries maps =
        simulate_with_generators(sim, *config.model, outputs, config.sim.fd_step);
    const OracleReport report = oracle_compare(maps, series);

    SpinModel half = *config.model;
    half.lambda *= 0.5;
    DiscreteBathSim half_sim = sim;
    const DynamicalMapSeries half_maps =
        simulate_with_generators(half_sim, half, outputs, config.sim.fd_step);
    const OracleReport half_report =
        oracle_compare(half_maps, with_lambda(series, half.lambda));

    Json j = oracle_report_to_json(report);
    Json scaling;
    std::ostringstream summary;
    summary << "order,t,residual,residual_half_lambda,exponent\n";
    for (const auto& [order, values] : report.residuals) {
        const std::vector<double> exponents = scaling_exponents(report, half_report, order);
        scaling[std::to_string(order)] = exponents;
        for (std::size_t i = 0; i < values.size(); ++i)
            summary << order << ',' << format_g17(report.times[i]) << ','
                    << format_g17(values[i]) << ','
                    << format_g17(half_report.residuals.at(order)[i]) << ','
                    << format_g17(exponents[i]) << '\n';
    }
    j["scaling_exponents"] = scaling;
    j["lambda_half"] = half.lambda;
    write_file((fs::path(config.output) / "oracle_report.json").string(), j.dump(2) + "\n");
    write_file((fs::path(config.output) / "scaling_summary.csv").string(), summary.str());
    log(config, "wrote oracle_report.json, scaling_summary.csv");
}

void cmd_sweep(const RunConfig& config) {
    require(config.sweep.has_value(), "sweep: config must supply a sweep axis");
    require(!config.sweep->values.empty(), "sweep: empty parameter axis");
    require(config.model.has_value() && config.bath.has_value(),
            "sweep: config must supply model and bath");
    const std::string& axis = config.sweep->axis;
    require(axis == "lambda" || axis == "beta" || axis == "omega_c",
            "sweep: axis must be lambda, beta or omega_c");
    fs::create_directories(config.output);

    std::ostringstream summary;
    summary << axis << ",t,omega_r,kx,ky,rotation_angle\n";
    for (std::size_t i = 0; i < config.sweep->values.size(); ++i) {
        const double value = config.sweep->values[i];
        RunConfig point = config;
        point.command = "expand";
        point.sweep.reset();
        point.output = (fs::path(config.output) / point_dir_name(i)).string();
        if (axis == "lambda") {
            point.model->lambda = value;
        } else if (axis == "beta") {
            point.bath->beta = value;
        } else {
            require(point.bath->j.kind == SpectralDensity::Kind::OhmicExp,
                    "sweep: omega_c axis requires an ohmic_exp bath");
            point.bath->j.omega_c = value;
        }
        cmd_expand(point);

        // final row of the point's observables
        std::ifstream obs(fs::path(point.output) / "observables.csv");
        std::string line, last_line;
        while (std::getline(obs, line))
            if (!line.empty()) last_line = line;
        summary << format_g17(value) << ',' << last_line << '\n';
    }
    write_file((fs::path(config.output) / "sweep_summary.csv").string(), summary.str());
    log(config, "wrote sweep_summary.csv");
}

int run_cli(const std::string& config_path, const std::string& output_override,
            bool verbose, const std::string& expected_command) {
    RunConfig config;
    try {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "effham: cannot open config " << config_path << '\n';
            return kExitConfig;
        }
        Json j = Json::parse(in);
        config = parse_run_config(j);
        if (!expected_command.empty() && config.command != expected_command)
            throw std::invalid_argument("config command '" + config.command +
                                        "' does not match subcommand '" + expected_command +
                                        "'");
        if (!output_override.empty()) config.output = output_override;
        config.verbose = config.verbose || verbose;
    } catch (const std::exception& e) {
        std::cerr << "effham: config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (config.command == "split")
            cmd_split(config);
        else if (config.command == "expand")
            cmd_expand(config);
        else if (config.command == "oracle")
            cmd_oracle(config);
        else
            cmd_sweep(config);
        return kExitOk;
    } catch (const NotHtpError& e) {
        std::cerr << "effham: invalid generator: " << e.what() << '\n';
        return kExitInvalidGenerator;
    } catch (const std::invalid_argument& e) {
        std::cerr << "effham: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "effham: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace effham
