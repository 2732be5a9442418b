#pragma once

// Command-line front end: argument/config parsing, sweep evaluation and
// deterministic CSV / JSON emission.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "klein/device_sim.hpp"
#include "klein/step_scattering.hpp"

namespace klein::cli {

inline constexpr std::string_view tool_name = "klein";
inline constexpr std::string_view tool_version = "1.0.0";

enum class Command { step_rt, step_compare, spinor_check, graphene_angle, barrier, iv_curve, angular_current };
enum class OutputFormat { csv, json };

std::string_view to_string(Command command);

/// Exit codes of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_numerical = 1, exit_usage = 2 };

class usage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A single value `x` or an inclusive linear sweep `min:max:count`
/// (count >= 2, min < max).
struct Range {
    double min{};
    double max{};
    std::size_t count{1};

    static Range single(double value) { return {value, value, 1}; }
    static Range parse(std::string_view text);

    std::vector<double> values() const;
};

/// Comma-separated list of numbers, e.g. "0.1,0.2,0.3".
std::vector<double> parse_list(std::string_view text);

/// Line-oriented `key = value` file with '#' comments.
std::map<std::string, std::string> read_config(const std::string& path);

struct SweepRequest {
    Command command{};
    OutputFormat format{OutputFormat::csv};
    std::string output_path; // empty: standard output
    bool no_manifest{false};
    bool allow_singular{false};

    Range energy = Range::single(0.0);
    Range mass = Range::single(0.0);
    Range height = Range::single(0.0);
    Range width = Range::single(0.0);
    Range theta_deg = Range::single(0.0);
    std::optional<double> fermi_wavelength; // nm, graphene commands
    Convention convention{Convention::paper_kappa};
    GrapheneMaterial<double> material;

    DeviceParams device;
    std::vector<double> back_gates;
    Range bias = Range::single(0.0);

    // resolved option values in declaration order, for the run manifest
    std::vector<std::pair<std::string, std::string>> parameters;
};

/// Parses argv into a request. Throws usage_error for unknown flags, malformed
/// ranges and missing parameters. Returns nullopt after printing help.
std::optional<SweepRequest> parse_args(int argc, const char* const* argv, std::ostream& out);

using Cell = std::variant<double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Evaluates the sweep. Throws singularity_error unless allow_singular is set,
/// in which case singular cells hold inf / nan.
Table compute(const SweepRequest& request);

/// `%.9g` formatting used for every floating-point cell.
std::string format_number(double value);

void write_csv(const SweepRequest& request, const Table& table, std::ostream& os,
               std::string_view timestamp);
void write_json(const SweepRequest& request, const Table& table, std::ostream& os,
                std::string_view timestamp);

/// Writes the table to the requested destination; returns an exit code.
int emit(const SweepRequest& request, const Table& table, std::ostream& out, std::ostream& err);

/// Full pipeline: parse, compute, emit. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace klein::cli
