#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <optional>
#include <string>
#include <vector>

#include "gbh/procedure.hpp"
#include "gbh/simgen.hpp"

namespace gbh::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitIncompatible = 4;

/// Column order of the simulation result CSV.
const std::vector<std::string>& result_columns();

/// One parameter point of a sweep.
struct SweepPoint {
    SimConfig config;
};

/// Parsed `simulate` configuration document.
struct RunConfig {
    SimConfig base;
    std::vector<SweepPoint> points;
    std::vector<ProcedureSpec> procedures;
    double alpha = 0.05;
    double lambda = 0.5;
    std::size_t reps = 200;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    std::optional<std::string> output;
};

/// Raised for invalid configuration documents; `field` names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message);
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Parses JSON text into a RunConfig. Throws ConfigError.
RunConfig parse_run_config(const std::string& json_text);

/// Parses a procedure name with an optional variant for a layout kind.
ProcedureSpec parse_procedure(const std::string& name, const std::optional<std::string>& variant,
                              LayoutKind kind, double lambda);

/// Writes the result CSV (header plus one row per summary).
void write_results(std::ostream& out, const std::vector<SimSummary>& summaries,
                   const std::vector<ProcedureSpec>& procs_per_row);

int cmd_simulate(const std::string& config_path, const std::optional<std::string>& out_path,
                 std::ostream& log, std::ostream& err);

struct AnalyzeArgs {
    std::string in_path;
    std::string out_path;
    std::string procedure = "adaptive_gbh";
    std::optional<std::string> variant;
    double alpha = 0.05;
    double lambda = 0.5;
    bool one_way = false;
};

int cmd_analyze(const AnalyzeArgs& args, std::ostream& log, std::ostream& err);

int cmd_report(const std::string& in_path, const std::string& out_path,
               const std::vector<std::string>& group_by, std::ostream& err);

/// Entry point for the `gbh` executable.
int run(int argc, char** argv);

}  // namespace gbh::cli
