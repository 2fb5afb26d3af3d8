// abphase: command-line front end for the Aharonov-Bohm phase-shift routes.

#include "abphase/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using abphase::cli::Json;

std::string iso_timestamp(std::time_t t) {
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string default_timestamp() {
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        return iso_timestamp(static_cast<std::time_t>(std::stoll(epoch)));
    }
    return iso_timestamp(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now()));
}

// "a..b" or a single integer.
std::pair<long, long> parse_m_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        const long m = std::stol(text);
        return {m, m};
    }
    return {std::stol(text.substr(0, dots)), std::stol(text.substr(dots + 2))};
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const auto& item : items) {
        std::stringstream ss(item);
        std::string part;
        while (std::getline(ss, part, ',')) {
            if (part == "all") {
                out.insert(out.end(), {"analytic", "fredholm", "ode"});
            } else if (!part.empty()) {
                out.push_back(part);
            }
        }
    }
    return out;
}

int emit(const abphase::cli::Output& out, const std::string& path) {
    if (path.empty()) {
        std::cout << out.text;
    } else {
        std::ofstream file(path, std::ios::binary);
        if (!file) {
            std::cerr << "abphase: cannot write " << path << "\n";
            return abphase::cli::exit_usage;
        }
        file << out.text;
    }
    return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    namespace cli = abphase::cli;
    CLI::App app{"Aharonov-Bohm phase shifts: o(2,1) algebra, confined spectra, Fredholm and ODE routes"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(abphase::version));

    bool json = false;
    std::string timestamp;
    std::string output;
    auto common = [&](CLI::App* sub) {
        sub->add_flag("--json", json, "emit a single JSON document instead of CSV");
        sub->add_option("--timestamp", timestamp, "manifest timestamp (default: SOURCE_DATE_EPOCH or now)");
        sub->add_option("-o,--output", output, "write to a file instead of stdout");
    };

    // phase-shifts
    auto* phase = app.add_subcommand("phase-shifts", "per-channel phase shifts by analytic, fredholm and ode routes");
    Json phase_params = cli::phase_shift_defaults();
    double ps_alpha = phase_params["alpha"];
    std::string ps_m = "-2..2";
    std::vector<std::string> ps_methods{"analytic"};
    double ps_energy = phase_params["energy"];
    std::vector<double> ps_schedule = phase_params["omega_schedule"];
    double ps_ratio = phase_params["epsilon_ratio"];
    long ps_nmax = phase_params["n_max"];
    double ps_k = phase_params["k"];
    double ps_rmax = phase_params["r_max"];
    phase->add_option("--alpha", ps_alpha, "flux parameter")->capture_default_str();
    phase->add_option("--m", ps_m, "angular momentum range a..b")->capture_default_str();
    phase->add_option("--method", ps_methods, "analytic, fredholm, ode or all (repeatable, comma separated)")->capture_default_str();
    phase->add_option("--energy", ps_energy, "energy for the fredholm route")->capture_default_str();
    phase->add_option("--omega-schedule", ps_schedule, "decreasing oscillator frequencies")->delimiter(',')->capture_default_str();
    phase->add_option("--epsilon-ratio", ps_ratio, "epsilon / omega")->capture_default_str();
    phase->add_option("--n-max", ps_nmax, "level-sum truncation")->capture_default_str();
    phase->add_option("--k", ps_k, "wave number for the ode route")->capture_default_str();
    phase->add_option("--r-max", ps_rmax, "integration range for the ode route")->capture_default_str();
    common(phase);

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "confined spectrum, analytic and optionally numeric");
    long sp_m = 0;
    double sp_alpha = 0.5, sp_omega = 1.0, sp_rho = abphase::radial::default_rho_max;
    long sp_n = 3;
    std::size_t sp_points = abphase::radial::default_num_points;
    bool sp_numeric = false;
    std::string sp_scheme = "squared_radius";
    spectrum->add_option("--m", sp_m)->capture_default_str();
    spectrum->add_option("--alpha", sp_alpha)->capture_default_str();
    spectrum->add_option("--omega", sp_omega, "oscillator frequency")->capture_default_str();
    spectrum->add_option("--n", sp_n, "highest level index")->capture_default_str();
    spectrum->add_flag("--numeric", sp_numeric, "add the Richardson-extrapolated radial eigenvalues");
    spectrum->add_option("--rho-max", sp_rho)->capture_default_str();
    spectrum->add_option("--points", sp_points)->capture_default_str();
    spectrum->add_option("--scheme", sp_scheme)->check(CLI::IsMember({"squared_radius", "liouville"}))->capture_default_str();
    common(spectrum);

    // algebra-check
    auto* algebra = app.add_subcommand("algebra-check", "o(2,1) commutator and Casimir residuals");
    long al_m = 0;
    double al_alpha = 0.5;
    std::size_t al_n = 64;
    double al_override = 0.0;
    algebra->add_option("--m", al_m)->capture_default_str();
    algebra->add_option("--alpha", al_alpha)->capture_default_str();
    algebra->add_option("--N", al_n, "truncation dimension")->capture_default_str();
    auto* override_opt = algebra->add_option("--e0-override", al_override, "use this lowest weight instead of the selected one");
    common(algebra);

    // hellmann
    auto* hellmann = app.add_subcommand("hellmann", "Feynman-Hellmann check of d m0 / d (m+alpha)^2 against <Q^-2>/4");
    long he_m = 0, he_level = 0;
    double he_alpha = 0.5, he_dnu2 = 1e-3, he_rho = abphase::radial::default_rho_max;
    std::size_t he_points = abphase::radial::default_num_points;
    std::string he_scheme = "squared_radius";
    hellmann->add_option("--m", he_m)->capture_default_str();
    hellmann->add_option("--alpha", he_alpha)->capture_default_str();
    hellmann->add_option("--level", he_level)->capture_default_str();
    hellmann->add_option("--dnu2", he_dnu2, "central-difference step in (m+alpha)^2")->capture_default_str();
    hellmann->add_option("--rho-max", he_rho)->capture_default_str();
    hellmann->add_option("--points", he_points)->capture_default_str();
    hellmann->add_option("--scheme", he_scheme)->check(CLI::IsMember({"squared_radius", "liouville"}))->capture_default_str();
    common(hellmann);

    // fredholm
    auto* fred = app.add_subcommand("fredholm", "regularized log Fredholm determinant and omega -> 0 extrapolation");
    long fr_m = 0;
    double fr_alpha = 0.5, fr_energy = 1.0, fr_ratio = 10.0;
    std::vector<double> fr_schedule{0.01, 0.005, 0.0025};
    long fr_nmax = abphase::fredholm::default_n_max;
    fred->add_option("--m", fr_m)->capture_default_str();
    fred->add_option("--alpha", fr_alpha)->capture_default_str();
    fred->add_option("--energy", fr_energy)->capture_default_str();
    fred->add_option("--omega-schedule", fr_schedule)->delimiter(',')->capture_default_str();
    fred->add_option("--epsilon-ratio", fr_ratio)->capture_default_str();
    fred->add_option("--n-max", fr_nmax)->capture_default_str();
    common(fred);

    // cross-section
    auto* cross = app.add_subcommand("cross-section", "Abel-regularized partial-wave amplitude and cross section");
    double cs_alpha = 0.5, cs_k = 1.0, cs_eta = abphase::scattering::default_abel_eta;
    std::size_t cs_angles = 19;
    long cs_mcut = abphase::scattering::default_m_cut;
    cross->add_option("--alpha", cs_alpha)->capture_default_str();
    cross->add_option("--k", cs_k)->capture_default_str();
    cross->add_option("--angles", cs_angles, "angles per side of the forward direction")->capture_default_str();
    cross->add_option("--m-cut", cs_mcut)->capture_default_str();
    cross->add_option("--abel-eta", cs_eta)->capture_default_str();
    common(cross);

    // replay
    auto* replay = app.add_subcommand("replay", "re-run the manifest embedded in a previous output");
    std::string replay_path;
    bool replay_check = false;
    replay->add_option("file", replay_path, "output file produced by abphase")->required();
    replay->add_flag("--check", replay_check, "compare with the file instead of printing; exit 1 on mismatch");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::exit_usage;
    }

    try {
        if (replay->parsed()) {
            std::ifstream in(replay_path, std::ios::binary);
            if (!in) throw cli::UsageError("replay: cannot read " + replay_path);
            std::stringstream buffer;
            buffer << in.rdbuf();
            const std::string original = buffer.str();
            const auto out = cli::execute(cli::manifest_from_output(original));
            if (replay_check) {
                if (out.text != original) {
                    std::cerr << "abphase: replay output differs from " << replay_path << "\n";
                    return cli::exit_tolerance;
                }
                return out.exit_code;
            }
            std::cout << out.text;
            return out.exit_code;
        }

        cli::RunManifest manifest;
        manifest.format = json ? "json" : "csv";
        manifest.timestamp = timestamp.empty() ? default_timestamp() : timestamp;

        if (phase->parsed()) {
            const auto [lo, hi] = parse_m_range(ps_m);
            manifest.command = "phase-shifts";
            manifest.parameters = {{"alpha", ps_alpha},   {"m_min", lo},           {"m_max", hi},
                                   {"methods", split_list(ps_methods)}, {"energy", ps_energy},
                                   {"omega_schedule", ps_schedule}, {"epsilon_ratio", ps_ratio},
                                   {"n_max", ps_nmax},    {"k", ps_k},             {"r_max", ps_rmax}};
        } else if (spectrum->parsed()) {
            manifest.command = "spectrum";
            manifest.parameters = {{"m", sp_m},           {"alpha", sp_alpha},       {"omega", sp_omega},
                                   {"n", sp_n},           {"numeric", sp_numeric},   {"rho_max", sp_rho},
                                   {"points", sp_points}, {"scheme", sp_scheme}};
        } else if (algebra->parsed()) {
            manifest.command = "algebra-check";
            manifest.parameters = {{"m", al_m}, {"alpha", al_alpha}, {"N", al_n},
                                   {"e0_override", override_opt->count() ? Json(al_override) : Json(nullptr)}};
        } else if (hellmann->parsed()) {
            manifest.command = "hellmann";
            manifest.parameters = {{"m", he_m},         {"alpha", he_alpha},   {"level", he_level}, {"dnu2", he_dnu2},
                                   {"rho_max", he_rho}, {"points", he_points}, {"scheme", he_scheme}};
        } else if (fred->parsed()) {
            manifest.command = "fredholm";
            manifest.parameters = {{"m", fr_m},        {"alpha", fr_alpha},         {"energy", fr_energy},
                                   {"omega_schedule", fr_schedule}, {"epsilon_ratio", fr_ratio}, {"n_max", fr_nmax}};
        } else if (cross->parsed()) {
            manifest.command = "cross-section";
            manifest.parameters = {{"alpha", cs_alpha}, {"k", cs_k}, {"angles_per_side", cs_angles},
                                   {"m_cut", cs_mcut}, {"abel_eta", cs_eta}};
        }
        return emit(cli::execute(manifest), output);
    } catch (const cli::UsageError& e) {
        std::cerr << "abphase: " << e.what() << "\n";
        return cli::exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "abphase: " << e.what() << "\n";
        return cli::exit_usage;
    }
}
