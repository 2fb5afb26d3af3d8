#pragma once

/**
 * @file cli.hpp
 * @brief Command implementations behind the `abphase` executable.
 *
 * Every command is a pure function of a RunManifest: the manifest carries
 * the command name, output format, timestamp and the complete parameter
 * set, and is embedded in the output (first line `# {json}` for CSV, the
 * "manifest" member for JSON). Executing the same manifest again yields
 * byte-identical output, which is what `abphase replay` relies on.
 *
 * Exit codes: 0 pass, 1 numerical-tolerance failure, 2 usage error.
 */

#include "abphase/analytic.hpp"
#include "abphase/errors.hpp"
#include "abphase/fredholm.hpp"
#include "abphase/free_phase.hpp"
#include "abphase/o21.hpp"
#include "abphase/parallel.hpp"
#include "abphase/radial.hpp"
#include "abphase/scattering.hpp"
#include "abphase/version.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace abphase::cli {

using Json = nlohmann::ordered_json;

inline constexpr int exit_pass = 0;
inline constexpr int exit_tolerance = 1;
inline constexpr int exit_usage = 2;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunManifest {
    std::string command;
    std::string format = "csv";  ///< csv | json
    std::string timestamp;
    Json parameters = Json::object();

    Json to_json() const {
        Json j;
        j["tool"] = "abphase";
        j["version"] = std::string(version);
        j["command"] = command;
        j["format"] = format;
        j["timestamp"] = timestamp;
        j["parameters"] = parameters;
        return j;
    }

    static RunManifest from_json(const Json& j) {
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.format = j.value("format", std::string("csv"));
        m.timestamp = j.value("timestamp", std::string());
        m.parameters = j.value("parameters", Json::object());
        return m;
    }
};

struct Output {
    std::string text;
    int exit_code = exit_pass;
};

// ---------------------------------------------------------------------------
// tables

using Cell = std::variant<std::monostate, long, double, std::string, bool>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

inline std::string csv_field(const Cell& cell) {
    struct Visitor {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(long v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string q = "\"";
            for (char c : s) {
                if (c == '"') q += '"';
                q += c;
            }
            return q + "\"";
        }
    };
    return std::visit(Visitor{}, cell);
}

inline Json json_value(const Cell& cell) {
    struct Visitor {
        Json operator()(std::monostate) const { return nullptr; }
        Json operator()(long v) const { return v; }
        Json operator()(double v) const { return std::isfinite(v) ? Json(v) : Json(format_double(v)); }
        Json operator()(bool v) const { return v; }
        Json operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, cell);
}

inline std::string render(const RunManifest& manifest, const Table& table) {
    if (manifest.format == "json") {
        Json doc;
        doc["manifest"] = manifest.to_json();
        doc["columns"] = table.columns;
        Json rows = Json::array();
        for (const auto& row : table.rows) {
            Json r = Json::array();
            for (const auto& c : row) r.push_back(json_value(c));
            rows.push_back(std::move(r));
        }
        doc["rows"] = std::move(rows);
        return doc.dump(2) + "\n";
    }
    std::ostringstream out;
    out << "# " << manifest.to_json().dump() << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// parameter access

namespace detail {

template <typename T>
T param(const Json& p, const char* key) {
    if (!p.contains(key)) throw UsageError(std::string("missing parameter: ") + key);
    try {
        return p.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw UsageError(std::string("bad value for parameter: ") + key);
    }
}

inline std::vector<fredholm::OmegaStep> omega_schedule(const Json& p) {
    const auto omegas = param<std::vector<double>>(p, "omega_schedule");
    const double ratio = param<double>(p, "epsilon_ratio");
    std::vector<fredholm::OmegaStep> schedule;
    for (double w : omegas) schedule.push_back({w, ratio * w});
    return schedule;
}

inline radial::RadialGrid grid_from(const Json& p) {
    return radial::RadialGrid(param<double>(p, "rho_max"), param<std::size_t>(p, "points"),
                              radial::scheme_from_string(param<std::string>(p, "scheme")));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// commands

inline Json phase_shift_defaults() {
    return {{"alpha", 0.5},      {"m_min", -2},          {"m_max", 2},
            {"methods", {"analytic"}}, {"energy", 1.0}, {"omega_schedule", {0.01, 0.005, 0.0025}},
            {"epsilon_ratio", 10.0}, {"n_max", fredholm::default_n_max}, {"k", 1.0},
            {"r_max", 400.0}};
}

inline Output cmd_phase_shifts(const RunManifest& manifest) {
    const Json& p = manifest.parameters;
    const double alpha = detail::param<double>(p, "alpha");
    const long m_min = detail::param<long>(p, "m_min");
    const long m_max = detail::param<long>(p, "m_max");
    if (m_min > m_max) throw UsageError("phase-shifts: empty m range");
    std::vector<PhaseMethod> methods;
    for (const auto& name : detail::param<std::vector<std::string>>(p, "methods")) {
        if (name == "analytic") methods.push_back(PhaseMethod::analytic);
        else if (name == "fredholm") methods.push_back(PhaseMethod::fredholm);
        else if (name == "ode") methods.push_back(PhaseMethod::ode);
        else throw UsageError("phase-shifts: unknown method " + name);
    }
    if (methods.empty()) throw UsageError("phase-shifts: no method selected");
    const double energy = detail::param<double>(p, "energy");
    const auto schedule = detail::omega_schedule(p);
    const long n_max = detail::param<long>(p, "n_max");
    const double k = detail::param<double>(p, "k");
    const double r_max = detail::param<double>(p, "r_max");

    struct Item {
        long m;
        PhaseMethod method;
    };
    std::vector<Item> items;
    for (long m = m_min; m <= m_max; ++m) {
        for (auto method : methods) items.push_back({m, method});
    }

    struct RowResult {
        double value = std::nan("");
        double uncertainty = std::nan("");
        std::string status = "ok";
        bool failed = false;
    };
    const auto results = parallel_map<RowResult>(items.size(), [&](std::size_t i) {
        const FluxChannel channel(items[i].m, alpha);
        RowResult r;
        try {
            PhaseShiftRecord rec = phase_shift_analytic(channel);
            if (items[i].method == PhaseMethod::fredholm) {
                rec = fredholm::extrapolate_omega(channel, energy, schedule, n_max).record;
            } else if (items[i].method == PhaseMethod::ode) {
                rec = radial::free_phase_numeric(channel, k, r_max);
            }
            r.value = rec.value;
            r.uncertainty = rec.uncertainty;
        } catch (const std::exception& e) {
            r.status = std::string("error: ") + e.what();
            r.failed = true;
        }
        return r;
    });

    Table table{{"m", "method", "value", "uncertainty", "analytic", "deviation", "status"}, {}};
    std::size_t failures = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const double exact = phase_shift_analytic(FluxChannel(items[i].m, alpha)).value;
        const auto& r = results[i];
        Cell deviation;
        if (!r.failed) {
            deviation = items[i].method == PhaseMethod::ode ? difference_mod_pi(r.value, exact) : r.value - exact;
        }
        failures += r.failed ? 1 : 0;
        table.rows.push_back({items[i].m, std::string(to_string(items[i].method)), r.failed ? Cell{} : Cell{r.value},
                              r.failed ? Cell{} : Cell{r.uncertainty}, exact, deviation, r.status});
    }
    return {render(manifest, table), failures == items.size() ? exit_tolerance : exit_pass};
}

inline Json spectrum_defaults() {
    return {{"m", 0},          {"alpha", 0.5}, {"omega", 1.0},
            {"n", 3},          {"numeric", false}, {"rho_max", radial::default_rho_max},
            {"points", radial::default_num_points}, {"scheme", "squared_radius"}};
}

inline constexpr double spectrum_tolerance = 1e-4;

inline Output cmd_spectrum(const RunManifest& manifest) {
    const Json& p = manifest.parameters;
    const FluxChannel channel(detail::param<long>(p, "m"), detail::param<double>(p, "alpha"));
    const double omega = detail::param<double>(p, "omega");
    const long n = detail::param<long>(p, "n");
    const bool numeric = detail::param<bool>(p, "numeric");
    if (!(omega > 0.0)) throw UsageError("spectrum: omega must be positive");
    if (n < 0) throw UsageError("spectrum: n must be non-negative");

    const auto analytic = spectrum_analytic(channel, omega, n);
    std::vector<double> numeric_levels;
    if (numeric) {
        numeric_levels = radial::richardson_energies(channel, detail::grid_from(p), static_cast<std::size_t>(n + 1));
    }
    Table table{{"n", "analytic", "numeric", "deviation"}, {}};
    int code = exit_pass;
    for (const auto& level : analytic.levels) {
        if (numeric) {
            const double value = omega * numeric_levels[static_cast<std::size_t>(level.n)];
            const double dev = value - level.energy;
            if (!(std::abs(dev) <= spectrum_tolerance * omega)) code = exit_tolerance;
            table.rows.push_back({level.n, level.energy, value, dev});
        } else {
            table.rows.push_back({level.n, level.energy, Cell{}, Cell{}});
        }
    }
    return {render(manifest, table), code};
}

inline Json algebra_defaults() { return {{"m", 0}, {"alpha", 0.5}, {"N", 64}, {"e0_override", nullptr}}; }

inline constexpr double algebra_tolerance = 1e-10;

inline Output cmd_algebra_check(const RunManifest& manifest) {
    const Json& p = manifest.parameters;
    const FluxChannel channel(detail::param<long>(p, "m"), detail::param<double>(p, "alpha"));
    const auto dimension = detail::param<std::size_t>(p, "N");
    const bool overridden = p.contains("e0_override") && !p.at("e0_override").is_null();
    const double e0 = overridden ? detail::param<double>(p, "e0_override") : e0_select(channel);

    Json doc;
    doc["manifest"] = manifest.to_json();
    doc["channel"] = {{"m", channel.m()}, {"alpha", channel.alpha()}, {"nu", channel.nu()}};
    doc["e0"] = e0;
    doc["double_root"] = is_double_root(channel);
    doc["casimir_expected"] = casimir_value(channel);
    doc["casimir_from_e0"] = e0 * (e0 - 1.0);

    const auto admissible = o21::admissibility_check(e0);
    doc["admissible"] = admissible.admissible;
    doc["admissibility_reason"] = admissible.reason;

    bool pass = admissible.admissible;
    if (admissible.admissible) {
        try {
            const auto report = o21::algebra_residuals(o21::build_discrete_series(e0, dimension));
            doc["report"] = {{"commutator_j3k1", report.commutator_j3k1},
                             {"commutator_j3k2", report.commutator_j3k2},
                             {"commutator_k1k2", report.commutator_k1k2},
                             {"casimir_deviation", report.casimir_deviation},
                             {"interior_size", report.interior_size}};
            pass = report.max_residual() <= algebra_tolerance;
        } catch (const std::invalid_argument& e) {
            doc["report"] = nullptr;
            doc["error"] = e.what();
            pass = false;
        }
    } else {
        doc["report"] = nullptr;
    }
    doc["pass"] = pass;
    return {doc.dump(2) + "\n", pass ? exit_pass : exit_tolerance};
}

inline Json hellmann_defaults() {
    return {{"m", 0},       {"alpha", 0.5}, {"level", 0}, {"dnu2", 1e-3}, {"rho_max", radial::default_rho_max},
            {"points", radial::default_num_points}, {"scheme", "squared_radius"}};
}

inline constexpr double hellmann_tolerance = 1e-4;

inline Output cmd_hellmann(const RunManifest& manifest) {
    const Json& p = manifest.parameters;
    const FluxChannel channel(detail::param<long>(p, "m"), detail::param<double>(p, "alpha"));
    const long level = detail::param<long>(p, "level");
    if (level < 0) throw UsageError("hellmann: level must be non-negative");
    const auto grid = detail::grid_from(p);
    const auto result = radial::hellmann_check(channel, static_cast<std::size_t>(level), grid, detail::param<double>(p, "dnu2"));
    const double diff = result.lhs - result.rhs;
    const bool pass = result.lhs > 0.0 && result.rhs > 0.0 && std::abs(diff) <= hellmann_tolerance;
    Table table{{"m", "alpha", "nu", "level", "lhs", "rhs", "difference", "pass"},
                {{channel.m(), channel.alpha(), channel.nu(), level, result.lhs, result.rhs, diff, pass}}};
    return {render(manifest, table), pass ? exit_pass : exit_tolerance};
}

inline Json fredholm_defaults() {
    return {{"m", 0},
            {"alpha", 0.5},
            {"energy", 1.0},
            {"omega_schedule", {0.01, 0.005, 0.0025}},
            {"epsilon_ratio", 10.0},
            {"n_max", fredholm::default_n_max}};
}

inline constexpr double fredholm_tolerance = 0.01;

inline Output cmd_fredholm(const RunManifest& manifest) {
    const Json& p = manifest.parameters;
    const FluxChannel channel(detail::param<long>(p, "m"), detail::param<double>(p, "alpha"));
    const auto fit = fredholm::extrapolate_omega(channel, detail::param<double>(p, "energy"), detail::omega_schedule(p),
                                                 detail::param<long>(p, "n_max"));
    const double exact = phase_shift_analytic(channel).value;
    Table table{{"kind", "omega", "epsilon", "n_max", "re_log_det", "im_log_det", "phase", "uncertainty", "deviation"}, {}};
    for (const auto& run : fit.runs) {
        table.rows.push_back({std::string("run"), run.omega, run.epsilon, run.n_max, run.log_det.real(), run.log_det.imag(),
                              run.phase, run.tail_contribution, run.phase - exact});
    }
    const double dev = fit.record.value - exact;
    table.rows.push_back({std::string("extrapolated"), 0.0, 0.0, Cell{}, Cell{}, Cell{}, fit.record.value,
                          fit.record.uncertainty, dev});
    return {render(manifest, table), std::abs(dev) <= fredholm_tolerance ? exit_pass : exit_tolerance};
}

inline Json cross_section_defaults() {
    return {{"alpha", 0.5},
            {"k", 1.0},
            {"angles_per_side", 19},
            {"m_cut", scattering::default_m_cut},
            {"abel_eta", scattering::default_abel_eta}};
}

inline Output cmd_cross_section(const RunManifest& manifest) {
    const Json& p = manifest.parameters;
    const double alpha = detail::param<double>(p, "alpha");
    const double k = detail::param<double>(p, "k");
    const auto grid = scattering::symmetric_angle_grid(detail::param<std::size_t>(p, "angles_per_side"));
    const long m_cut = detail::param<long>(p, "m_cut");
    const double eta = detail::param<double>(p, "abel_eta");
    if (!(k > 0.0)) throw UsageError("cross-section: k must be positive");

    // validate once up front so usage errors are not reported per angle
    (void)scattering::amplitude_partial_wave(alpha, k, {}, m_cut, eta);
    const auto samples = parallel_map<scattering::AmplitudeSample>(grid.size(), [&](std::size_t i) {
        return scattering::amplitude_partial_wave(alpha, k, {grid[i]}, m_cut, eta).front();
    });

    Table table{{"angle", "re_amplitude", "im_amplitude", "dcs", "dcs_uncertainty", "converged"}, {}};
    bool converged = true;
    for (const auto& s : samples) {
        converged = converged && s.converged;
        table.rows.push_back({s.angle, s.amplitude.real(), s.amplitude.imag(), s.dcs, s.dcs_uncertainty, s.converged});
    }
    return {render(manifest, table), converged ? exit_pass : exit_tolerance};
}

// ---------------------------------------------------------------------------
// dispatch

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"phase-shifts", "spectrum", "algebra-check", "hellmann", "fredholm", "cross-section"};
    return names;
}

inline Json default_parameters(std::string_view command) {
    if (command == "phase-shifts") return phase_shift_defaults();
    if (command == "spectrum") return spectrum_defaults();
    if (command == "algebra-check") return algebra_defaults();
    if (command == "hellmann") return hellmann_defaults();
    if (command == "fredholm") return fredholm_defaults();
    if (command == "cross-section") return cross_section_defaults();
    throw UsageError("unknown command: " + std::string(command));
}

/// Runs a manifest. Usage errors propagate as UsageError; numerical
/// failures of a whole command become exit code 1 with the message on the
/// output.
inline Output execute(const RunManifest& requested) {
    if (requested.format != "csv" && requested.format != "json") throw UsageError("format must be csv or json");
    RunManifest manifest = requested;
    if (manifest.command == "algebra-check") manifest.format = "json";  // the report has no tabular form
    try {
        if (manifest.command == "phase-shifts") return cmd_phase_shifts(manifest);
        if (manifest.command == "spectrum") return cmd_spectrum(manifest);
        if (manifest.command == "algebra-check") return cmd_algebra_check(manifest);
        if (manifest.command == "hellmann") return cmd_hellmann(manifest);
        if (manifest.command == "fredholm") return cmd_fredholm(manifest);
        if (manifest.command == "cross-section") return cmd_cross_section(manifest);
    } catch (const UsageError&) {
        throw;
    } catch (const NumericalError& e) {
        return {"# " + manifest.to_json().dump() + "\n# numerical failure: " + e.what() + "\n", exit_tolerance};
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    throw UsageError("unknown command: " + manifest.command);
}

/// Recovers the manifest embedded in a previous output.
inline RunManifest manifest_from_output(std::string_view text) {
    if (text.rfind("# ", 0) == 0) {
        const auto eol = text.find('\n');
        return RunManifest::from_json(Json::parse(text.substr(2, eol == std::string_view::npos ? eol : eol - 2)));
    }
    const auto doc = Json::parse(text);
    if (!doc.contains("manifest")) throw UsageError("replay: no manifest found");
    return RunManifest::from_json(doc.at("manifest"));
}

}  // namespace abphase::cli
