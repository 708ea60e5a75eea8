#ifndef EFFHAM_CLI_HPP
#define EFFHAM_CLI_HPP

#include <optional>
#include <string>
#include <vector>

#include "effham/io.hpp"

namespace effham {

// Exit codes: 0 success, 1 usage/config error, 2 invalid generator,
// 3 numerical failure.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitInvalidGenerator = 2,
    kExitNumerical = 3,
};

struct TimesSpec {
    double t_max = 0.0;
    double step = 0.0;
    std::vector<double> outputs;  // defaults to 8 points ending at t_max
};

struct McSpec {
    long samples = 100000;
    std::uint64_t seed = 1;
};

struct SimSpec {
    int fock_cutoff = 8;
    double fd_step = 0.01;
    bool check_truncation = false;
    std::vector<Complex> displacement;
};

struct SweepSpec {
    std::string axis;  // lambda | beta | omega_c
    std::vector<double> values;
};

struct RunConfig {
    std::string command;
    std::string output = ".";
    bool verbose = false;
    std::optional<SpinModel> model;
    std::optional<BathSpec> bath;
    TimesSpec times;
    int orders = 2;
    std::optional<McSpec> mc;
    std::optional<SuperOperator> generator;  // split input
    SimSpec sim;
    std::optional<SweepSpec> sweep;
};

RunConfig parse_run_config(const Json& j);
Json run_config_to_json(const RunConfig& config);

void cmd_split(const RunConfig& config);
void cmd_expand(const RunConfig& config);
void cmd_oracle(const RunConfig& config);
void cmd_sweep(const RunConfig& config);

// Loads the config, dispatches on config.command and maps exceptions to exit
// codes. output_override replaces the config's output directory when set; a
// non-empty expected_command must match the config.
int run_cli(const std::string& config_path, const std::string& output_override,
            bool verbose, const std::string& expected_command = "");

}  // namespace effham

#endif
