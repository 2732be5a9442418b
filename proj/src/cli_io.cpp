#include "klein/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "klein/dirac_core.hpp"
#include "klein/graphene_junction.hpp"

namespace klein::cli {

namespace {

constexpr double deg = std::numbers::pi / 180.0;

struct CommandInfo {
    Command command;
    std::string_view name;
    std::string_view description;
};

constexpr CommandInfo commands[] = {
    {Command::step_rt, "step-rt", "Dirac step: R and T by boundary matching"},
    {Command::step_compare, "step-compare", "Dirac step: kappa versus kappa' closed forms over the Klein interval"},
    {Command::spinor_check, "spinor-check", "eigen-residuals and currents of the plane-wave spinors"},
    {Command::graphene_angle, "graphene-angle", "graphene step transmission versus incidence angle, both conventions"},
    {Command::barrier, "barrier", "graphene finite-width barrier transmission"},
    {Command::iv_curve, "iv-curve", "ohmic I-V family of the gated device"},
    {Command::angular_current, "angular-current", "normalized angular current through the gate step"},
};

struct OptionSpec {
    std::string name;
    std::string help;
    std::string default_value; // empty: required or optional without default
    bool flag = false;
};

std::vector<OptionSpec> option_specs(Command command)
{
    const OptionSpec E{"E", "incident energy (range)", ""};
    const OptionSpec m{"m", "rest mass (range)", ""};
    const OptionSpec V0{"V0", "step / barrier height (range)", ""};
    const OptionSpec convention{"convention", "paper | common", "paper"};
    const OptionSpec energy_eV{"E", "carrier energy in eV (alternative to --lambdaF)", ""};
    const OptionSpec lambda{"lambdaF", "Fermi wavelength in nm", ""};
    const OptionSpec V0_eV{"V0", "step / barrier height in eV", ""};
    const OptionSpec theta{"theta", "incidence angles in degrees (range; overrides theta-min/max/n)", ""};
    const OptionSpec theta_min{"theta-min", "smallest angle in degrees (default -theta-max)", ""};
    const OptionSpec theta_max{"theta-max", "largest angle in degrees", "85"};
    const OptionSpec n_theta{"n", "number of angles", "171"};
    const OptionSpec hbar_vf{"hbar-vf", "hbar*v_F in eV nm (default hbar*c/300)", ""};

    switch (command) {
    case Command::step_rt: return {E, m, V0, convention};
    case Command::step_compare: return {E, m, V0};
    case Command::spinor_check: return {E, m};
    case Command::graphene_angle: return {energy_eV, lambda, V0_eV, theta, theta_min, theta_max, n_theta, hbar_vf};
    case Command::barrier:
        return {energy_eV, lambda, V0_eV, {"D", "barrier width in nm (range)", ""}, theta, theta_min, theta_max,
                n_theta, convention, hbar_vf};
    case Command::iv_curve:
        return {{"Vb", "comma-separated back-gate voltages in V", ""},
                {"V-min", "smallest bias in V", "0"},
                {"V-max", "largest bias in V", ""},
                {"n", "number of bias points", "101"},
                {"mobility", "carrier mobility in cm^2/(V s)", "15000"},
                {"alpha", "gate coefficient in cm^-2/V", "7.3e10"},
                {"aspect-ratio", "W/L", "1"}};
    case Command::angular_current: return {energy_eV, lambda, V0_eV, theta, theta_min, theta_max, n_theta, hbar_vf};
    }
    return {};
}

const std::vector<OptionSpec>& common_specs()
{
    static const std::vector<OptionSpec> specs{
        {"format", "csv | json", "csv"},
        {"output", "output file (default: standard output)", ""},
        {"no-manifest", "omit the run manifest", "false", true},
        {"allow-singular", "emit inf/nan for singular points instead of failing", "false", true},
    };
    return specs;
}

double parse_double(std::string_view text, std::string_view what)
{
    const std::string s(text);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(s, &used);
    } catch (const std::exception&) {
        throw usage_error("malformed number for " + std::string(what) + ": '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(value))
        throw usage_error("malformed number for " + std::string(what) + ": '" + s + "'");
    return value;
}

std::size_t parse_count(std::string_view text, std::string_view what)
{
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw usage_error("malformed count for " + std::string(what) + ": '" + std::string(text) + "'");
    return value;
}

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Holds the CLI11 application and the string storage its options bind to.
class Parser {
public:
    Parser()
    {
        app_.description("Dirac step / graphene junction transport calculator");
        app_.require_subcommand(1);
        for (const auto& info : commands) {
            auto* sub = app_.add_subcommand(std::string(info.name), std::string(info.description));
            auto& store = values_[info.command];
            auto& flags = flags_[info.command];
            for (const auto& spec : option_specs(info.command)) {
                store[spec.name] = spec.default_value;
                sub->add_option("--" + spec.name, store[spec.name], spec.help);
            }
            for (const auto& spec : common_specs()) {
                if (spec.flag) {
                    flags[spec.name] = false;
                    sub->add_flag("--" + spec.name, flags[spec.name], spec.help);
                } else {
                    store[spec.name] = spec.default_value;
                    const std::string names = spec.name == "output" ? "-o,--output" : "--" + spec.name;
                    sub->add_option(names, store[spec.name], spec.help);
                }
            }
            sub->add_option("--config", config_path_, "key = value defaults file");
            subcommands_[info.command] = sub;
        }
    }

    std::optional<Command> preview_command(int argc, const char* const* argv) const
    {
        for (int i = 1; i < argc; ++i)
            for (const auto& info : commands)
                if (argv[i] == info.name)
                    return info.command;
        return std::nullopt;
    }

    static std::optional<std::string> preview_config(int argc, const char* const* argv)
    {
        for (int i = 1; i < argc; ++i) {
            const std::string_view arg = argv[i];
            if (arg == "--config" && i + 1 < argc)
                return std::string(argv[i + 1]);
            if (arg.starts_with("--config="))
                return std::string(arg.substr(9));
        }
        return std::nullopt;
    }

    void apply_config(Command command, const std::map<std::string, std::string>& config)
    {
        auto& store = values_[command];
        auto& flags = flags_[command];
        for (const auto& [key, value] : config) {
            if (auto it = store.find(key); it != store.end()) {
                it->second = value;
            } else if (auto fit = flags.find(key); fit != flags.end()) {
                if (value == "true" || value == "1")
                    fit->second = true;
                else if (value == "false" || value == "0")
                    fit->second = false;
                else
                    throw usage_error("config: flag '" + key + "' expects true or false");
            } else {
                throw usage_error("config: unknown key '" + key + "' for command " +
                                  std::string(to_string(command)));
            }
        }
    }

    CLI::App& app() { return app_; }

    Command selected() const
    {
        for (const auto& [command, sub] : subcommands_)
            if (sub->parsed())
                return command;
        throw usage_error("no command given");
    }

    const std::string& value(Command command, const std::string& name) { return values_[command][name]; }
    bool flag(Command command, const std::string& name) { return flags_[command][name]; }

private:
    CLI::App app_{"klein"};
    std::map<Command, std::map<std::string, std::string>> values_;
    std::map<Command, std::map<std::string, bool>> flags_;
    std::map<Command, CLI::App*> subcommands_;
    std::string config_path_;
};

Range theta_grid(Parser& parser, Command command)
{
    const std::string& theta = parser.value(command, "theta");
    if (!theta.empty())
        return Range::parse(theta);
    const double max = parse_double(parser.value(command, "theta-max"), "--theta-max");
    const std::string& min_text = parser.value(command, "theta-min");
    const double min = min_text.empty() ? -max : parse_double(min_text, "--theta-min");
    const std::size_t n = parse_count(parser.value(command, "n"), "--n");
    if (n == 1 && min == max)
        return Range::single(min);
    if (n < 2 || !(min < max))
        throw usage_error("angle grid needs n >= 2 and theta-min < theta-max");
    return {min, max, n};
}

Range required_range(Parser& parser, Command command, const std::string& name)
{
    const std::string& text = parser.value(command, name);
    if (text.empty())
        throw usage_error("missing required parameter --" + name);
    return Range::parse(text);
}

double required_double(Parser& parser, Command command, const std::string& name)
{
    const std::string& text = parser.value(command, name);
    if (text.empty())
        throw usage_error("missing required parameter --" + name);
    return parse_double(text, "--" + name);
}

Convention parse_convention(std::string_view text)
{
    if (text == "paper")
        return Convention::paper_kappa;
    if (text == "common")
        return Convention::common_kappa_prime;
    throw usage_error("--convention must be 'paper' or 'common'");
}

void graphene_energy(Parser& parser, Command command, SweepRequest& request)
{
    if (const std::string& hv = parser.value(command, "hbar-vf"); !hv.empty()) {
        request.material.hbar_vf = parse_double(hv, "--hbar-vf");
        if (!(request.material.hbar_vf > 0.0))
            throw usage_error("--hbar-vf must be positive");
    }
    const std::string& e = parser.value(command, "E");
    const std::string& lambda = parser.value(command, "lambdaF");
    if (!e.empty() && !lambda.empty())
        throw usage_error("give either --E or --lambdaF, not both");
    if (!lambda.empty()) {
        const double l = parse_double(lambda, "--lambdaF");
        if (!(l > 0.0))
            throw usage_error("--lambdaF must be positive");
        request.fermi_wavelength = l;
        request.energy = Range::single(energy_from_wavelength(l, request.material));
    } else if (!e.empty()) {
        request.energy = Range::single(parse_double(e, "--E"));
    } else {
        throw usage_error("missing required parameter --E or --lambdaF");
    }
    request.height = Range::single(required_double(parser, command, "V0"));
}

SweepRequest build_request(Parser& parser)
{
    SweepRequest request;
    const Command command = parser.selected();
    request.command = command;

    const std::string& format = parser.value(command, "format");
    if (format == "csv")
        request.format = OutputFormat::csv;
    else if (format == "json")
        request.format = OutputFormat::json;
    else
        throw usage_error("--format must be 'csv' or 'json'");
    request.output_path = parser.value(command, "output");
    request.no_manifest = parser.flag(command, "no-manifest");
    request.allow_singular = parser.flag(command, "allow-singular");

    switch (command) {
    case Command::step_rt:
        request.convention = parse_convention(parser.value(command, "convention"));
        [[fallthrough]];
    case Command::step_compare:
        request.energy = required_range(parser, command, "E");
        request.mass = required_range(parser, command, "m");
        request.height = required_range(parser, command, "V0");
        break;
    case Command::spinor_check:
        request.energy = required_range(parser, command, "E");
        request.mass = required_range(parser, command, "m");
        break;
    case Command::barrier:
        request.convention = parse_convention(parser.value(command, "convention"));
        request.width = required_range(parser, command, "D");
        [[fallthrough]];
    case Command::graphene_angle:
    case Command::angular_current:
        graphene_energy(parser, command, request);
        request.theta_deg = theta_grid(parser, command);
        break;
    case Command::iv_curve: {
        const std::string& vb = parser.value(command, "Vb");
        if (vb.empty())
            throw usage_error("missing required parameter --Vb");
        request.back_gates = parse_list(vb);
        const double vmin = parse_double(parser.value(command, "V-min"), "--V-min");
        const double vmax = required_double(parser, command, "V-max");
        const std::size_t n = parse_count(parser.value(command, "n"), "--n");
        if (n < 2 || !(vmin < vmax))
            throw usage_error("bias grid needs --n >= 2 and V-min < V-max");
        request.bias = {vmin, vmax, n};
        request.device.mobility = parse_double(parser.value(command, "mobility"), "--mobility");
        request.device.gate_coefficient = parse_double(parser.value(command, "alpha"), "--alpha");
        request.device.aspect_ratio = parse_double(parser.value(command, "aspect-ratio"), "--aspect-ratio");
        try {
            request.device.validate();
        } catch (const std::invalid_argument& e) {
            throw usage_error(e.what());
        }
        break;
    }
    }

    for (const auto& spec : option_specs(command))
        request.parameters.emplace_back(spec.name, parser.value(command, spec.name));
    request.parameters.emplace_back("format", format);
    request.parameters.emplace_back("allow-singular", request.allow_singular ? "true" : "false");
    return request;
}

// ---------------------------------------------------------------------------
// sweep evaluation

const double nan_value = std::numeric_limits<double>::quiet_NaN();
const double inf_value = std::numeric_limits<double>::infinity();

template <typename F>
double guarded(const SweepRequest& request, double fallback, F&& f)
{
    try {
        return f();
    } catch (const singularity_error&) {
        if (!request.allow_singular)
            throw;
        return fallback;
    }
}

Table step_rt_table(const SweepRequest& req)
{
    Table t{{"E", "m", "V0", "convention", "regime", "status", "R", "T", "r_re", "r_im", "t_re", "t_im"}, {}};
    for (double e : req.energy.values())
        for (double m : req.mass.values())
            for (double v : req.height.values()) {
                const StepProblem<double> problem{e, m, v};
                const Regime regime = classify_regime(problem);
                try {
                    const auto s = solve_step_numeric(problem, req.convention);
                    t.rows.push_back({e, m, v, std::string(to_string(req.convention)),
                                      std::string(to_string(regime)),
                                      std::string(s.status == SolveStatus::ok ? "ok" : "threshold"), s.R, s.T,
                                      s.r.real(), s.r.imag(), s.t.real(), s.t.imag()});
                } catch (const singularity_error&) {
                    if (!req.allow_singular)
                        throw;
                    t.rows.push_back({e, m, v, std::string(to_string(req.convention)),
                                      std::string(to_string(regime)), std::string("singular"), inf_value,
                                      -inf_value, nan_value, nan_value, nan_value, nan_value});
                }
            }
    return t;
}

Table step_compare_table(const SweepRequest& req)
{
    Table t{{"E", "m", "V0", "kappa", "R_paper", "T_paper", "kappa_prime", "R_common", "T_common", "regime"}, {}};
    for (double e : req.energy.values())
        for (double m : req.mass.values())
            for (double v : req.height.values()) {
                const StepProblem<double> problem{e, m, v};
                if (classify_regime(problem) != Regime::klein)
                    continue;
                const double k = kappa(problem);
                const double kp = kappa_prime(problem);
                const auto paper = rt_from_kappa(k);
                const double r_common = guarded(req, inf_value, [&] { return rt_from_kappa(kp).R; });
                const double t_common = guarded(req, -inf_value, [&] { return rt_from_kappa(kp).T; });
                t.rows.push_back({e, m, v, k, paper.R, paper.T, kp, r_common, t_common,
                                  std::string(to_string(Regime::klein))});
            }
    return t;
}

Table spinor_check_table(const SweepRequest& req)
{
    Table t{{"E", "m", "k", "residual2_plus", "residual2_minus", "residual4_max", "current_plus", "current_minus"},
            {}};
    for (double e : req.energy.values())
        for (double m : req.mass.values()) {
            const double k = momentum(e, m);
            const auto plus = make_spinor2(e, k, m);
            const auto minus = make_spinor2(e, -k, m);
            const Momentum3<double> p(0.0, 0.0, k);
            double r4 = 0.0;
            for (Branch b : {Branch::positive, Branch::negative})
                for (Spin s : {Spin::up, Spin::down}) {
                    try {
                        r4 = std::max(r4, hamiltonian_residual(make_spinor4(e, p, m, b, s), e, p, m));
                    } catch (const std::domain_error&) {
                        // column vanishes at rest
                    }
                }
            t.rows.push_back({e, m, k, hamiltonian_residual(plus, e, k, m), hamiltonian_residual(minus, e, -k, m),
                              r4, current_density(plus), current_density(minus)});
        }
    return t;
}

Table graphene_angle_table(const SweepRequest& req)
{
    Table t{{"theta_deg", "theta2_deg", "T_paper", "T_common", "abs_t_paper", "abs_t_common"}, {}};
    const double e = req.energy.min;
    const double v = req.height.min;
    for (double th : req.theta_deg.values()) {
        const auto ak = angle_kinematics(e, v, th * deg, req.material);
        if (!ak.propagating) {
            t.rows.push_back({th, nan_value, 0.0, 0.0, nan_value, nan_value});
            continue;
        }
        const auto tp = t_paper(ak);
        const double abs_tc = guarded(req, inf_value, [&] { return std::abs(t_common(ak)); });
        const double tc_prob = guarded(req, inf_value, [&] { return transmission_probability(t_common(ak), ak); });
        t.rows.push_back({th, ak.theta_region2 / deg, transmission_probability(tp, ak), tc_prob, std::abs(tp), abs_tc});
    }
    return t;
}

Table barrier_table(const SweepRequest& req)
{
    Table t{{"theta_deg", "D", "T", "R"}, {}};
    const double e = req.energy.min;
    const double v = req.height.min;
    for (double th : req.theta_deg.values())
        for (double d : req.width.values()) {
            try {
                const auto b = barrier_transmission(e, v, d, th * deg, req.convention, req.material);
                t.rows.push_back({th, d, b.T, b.R});
            } catch (const std::domain_error& ex) {
                if (!req.allow_singular)
                    throw singularity_error(ex.what());
                t.rows.push_back({th, d, nan_value, nan_value});
            } catch (const singularity_error&) {
                if (!req.allow_singular)
                    throw;
                t.rows.push_back({th, d, nan_value, nan_value});
            }
        }
    return t;
}

Table iv_table(const SweepRequest& req)
{
    Table t{{"Vb", "V", "I"}, {}};
    const auto bias = req.bias.values();
    for (double vb : req.back_gates) {
        DeviceParams params = req.device;
        params.back_gate = vb;
        for (const auto& point : iv_curve(params, bias))
            t.rows.push_back({vb, point.bias, point.current});
    }
    return t;
}

Table angular_table(const SweepRequest& req)
{
    Table t{{"theta_deg", "T", "relative_current"}, {}};
    std::vector<double> thetas = req.theta_deg.values();
    for (double& th : thetas)
        th *= deg;
    for (const auto& point : angular_current_profile(req.energy.min, req.height.min, thetas, req.material))
        t.rows.push_back({point.theta / deg, point.transmission, point.relative_current});
    return t;
}

// ---------------------------------------------------------------------------
// emission

std::string csv_field(const Cell& cell)
{
    if (const double* d = std::get_if<double>(&cell))
        return format_number(*d);
    const std::string& s = std::get<std::string>(cell);
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"')
            quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

} // namespace

std::string_view to_string(Command command)
{
    for (const auto& info : commands)
        if (info.command == command)
            return info.name;
    return "unknown";
}

Range Range::parse(std::string_view text)
{
    const std::string s = trim(text);
    if (s.empty())
        throw usage_error("empty range");
    const auto first = s.find(':');
    if (first == std::string::npos)
        return single(parse_double(s, "range"));
    const auto second = s.find(':', first + 1);
    if (second == std::string::npos || s.find(':', second + 1) != std::string::npos)
        throw usage_error("malformed range '" + s + "', expected min:max:count");
    Range r;
    r.min = parse_double(s.substr(0, first), "range min");
    r.max = parse_double(s.substr(first + 1, second - first - 1), "range max");
    r.count = parse_count(s.substr(second + 1), "range count");
    if (r.count < 2)
        throw usage_error("malformed range '" + s + "': count must be >= 2");
    if (!(r.min < r.max))
        throw usage_error("malformed range '" + s + "': min must be below max");
    return r;
}

std::vector<double> Range::values() const
{
    if (count <= 1)
        return {min};
    std::vector<double> out(count);
    const double step = (max - min) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = min + step * static_cast<double>(i);
    out.back() = max;
    return out;
}

std::vector<double> parse_list(std::string_view text)
{
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        out.push_back(parse_double(trim(piece), "list element"));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

std::map<std::string, std::string> read_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw usage_error("cannot read config file '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string content = trim(line);
        if (content.empty())
            continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos)
            throw usage_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(std::string_view(content).substr(0, eq));
        if (key.starts_with("--"))
            key.erase(0, 2);
        if (key.empty())
            throw usage_error(path + ":" + std::to_string(lineno) + ": empty key");
        out[key] = trim(std::string_view(content).substr(eq + 1));
    }
    return out;
}

std::optional<SweepRequest> parse_args(int argc, const char* const* argv, std::ostream& out)
{
    Parser parser;
    if (const auto config = Parser::preview_config(argc, argv)) {
        const auto command = parser.preview_command(argc, argv);
        if (!command)
            throw usage_error("--config needs a command");
        parser.apply_config(*command, read_config(*config));
    }
    try {
        parser.app().parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        // CLI11 renders the selected subcommand's help when one was parsed
        out << parser.app().help();
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw usage_error(std::string(e.what()) + "\n\n" + parser.app().help());
    }
    return build_request(parser);
}

Table compute(const SweepRequest& request)
{
    try {
        switch (request.command) {
        case Command::step_rt: return step_rt_table(request);
        case Command::step_compare: return step_compare_table(request);
        case Command::spinor_check: return spinor_check_table(request);
        case Command::graphene_angle: return graphene_angle_table(request);
        case Command::barrier: return barrier_table(request);
        case Command::iv_curve: return iv_table(request);
        case Command::angular_current: return angular_table(request);
        }
    } catch (const std::invalid_argument& e) {
        throw usage_error(e.what());
    }
    return {};
}

std::string format_number(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

void write_csv(const SweepRequest& request, const Table& table, std::ostream& os, std::string_view timestamp)
{
    if (!request.no_manifest) {
        os << "# tool: " << tool_name << ' ' << tool_version << '\n';
        os << "# command: " << to_string(request.command) << '\n';
        for (const auto& [key, value] : request.parameters)
            os << "# " << key << " = " << value << '\n';
        os << "# timestamp: " << timestamp << '\n';
    }
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        os << (i ? "," : "") << table.columns[i];
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << csv_field(row[i]);
        os << '\n';
    }
}

void write_json(const SweepRequest& request, const Table& table, std::ostream& os, std::string_view timestamp)
{
    using nlohmann::ordered_json;
    ordered_json doc = ordered_json::object();
    if (!request.no_manifest) {
        ordered_json params = ordered_json::object();
        for (const auto& [key, value] : request.parameters)
            params[key] = value;
        doc["manifest"] = {{"tool", tool_name},
                           {"version", tool_version},
                           {"command", to_string(request.command)},
                           {"parameters", params},
                           {"timestamp", timestamp}};
    }
    ordered_json rows = ordered_json::array();
    for (const auto& row : table.rows) {
        ordered_json obj = ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (const double* d = std::get_if<double>(&row[i])) {
                // round through the 9-digit text form so CSV and JSON agree
                if (std::isfinite(*d))
                    obj[table.columns[i]] = std::stod(format_number(*d));
                else
                    obj[table.columns[i]] = format_number(*d);
            } else {
                obj[table.columns[i]] = std::get<std::string>(row[i]);
            }
        }
        rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    os << doc.dump(2) << '\n';
}

int emit(const SweepRequest& request, const Table& table, std::ostream& out, std::ostream& err)
{
    std::ostringstream buffer;
    const std::string timestamp = request.no_manifest ? std::string() : utc_timestamp();
    if (request.format == OutputFormat::json)
        write_json(request, table, buffer, timestamp);
    else
        write_csv(request, table, buffer, timestamp);

    if (request.output_path.empty()) {
        out << buffer.str();
        out.flush();
        return exit_ok;
    }
    std::ofstream file(request.output_path, std::ios::binary | std::ios::trunc);
    if (!file) {
        err << "klein: cannot write output file '" << request.output_path << "'\n";
        return exit_usage;
    }
    file << buffer.str();
    file.close();
    if (!file) {
        err << "klein: failed writing output file '" << request.output_path << "'\n";
        return exit_usage;
    }
    return exit_ok;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    try {
        const auto request = parse_args(argc, argv, out);
        if (!request)
            return exit_ok;
        const Table table = compute(*request);
        return emit(*request, table, out, err);
    } catch (const usage_error& e) {
        err << "klein: " << e.what() << '\n';
        return exit_usage;
    } catch (const singularity_error& e) {
        err << "klein: singular point: " << e.what() << " (use --allow-singular to emit it)\n";
        return exit_numerical;
    } catch (const std::domain_error& e) {
        err << "klein: numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::exception& e) {
        err << "klein: " << e.what() << '\n';
        return exit_numerical;
    }
}

} // namespace klein::cli
