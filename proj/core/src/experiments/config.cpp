#include "saltda/experiments/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "saltda/errors.hpp"

namespace saltda::experiments {
namespace {

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    std::istringstream in(text);
    T value{};
    in >> value;
    if (!in || !(in >> std::ws).eof()) {
        throw ParameterError(fmt::format("config key '{}': cannot parse '{}'", key, text));
    }
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ParameterError(fmt::format("config key '{}': expected true/false, got '{}'", key, text));
}

std::vector<fields::Point> parse_points(const std::string& key, const std::string& text) {
    // "x1 y1; x2 y2; ..."
    std::vector<fields::Point> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        std::istringstream pair(item);
        fields::Point p{};
        if (!(pair >> p.x >> p.y) || !(pair >> std::ws).eof()) {
            throw ParameterError(fmt::format("config key '{}': expected 'x y; x y; ...', got '{}'", key, text));
        }
        out.push_back(p);
    }
    return out;
}

template <class T>
Setter number(T ExperimentConfig::*member) {
    return [member](ExperimentConfig& c, const std::string& v) { c.*member = parse_number<T>("", v); };
}

const std::map<std::string, std::map<std::string, Setter>>& setters() {
    using C = ExperimentConfig;
    static const std::map<std::string, std::map<std::string, Setter>> table{
        {"model",
         {{"a", number(&C::a)},
          {"b", number(&C::b)},
          {"r", number(&C::r)},
          {"cfl_limit", number(&C::cfl_limit)},
          {"abort_on_cfl", [](C& c, const std::string& v) { c.abort_on_cfl = parse_bool("abort_on_cfl", v); }}}},
        {"grid",
         {{"fine_n", number(&C::fine_n)},
          {"coarse_n", number(&C::coarse_n)},
          {"dt_fine", number(&C::dt_fine)},
          {"dt_coarse", number(&C::dt_coarse)}}},
        {"filter",
         {{"ensemble_size", [](C& c, const std::string& v) { c.filter.ensemble_size = parse_number<int>("ensemble_size", v); }},
          {"ess_threshold",
           [](C& c, const std::string& v) { c.filter.ess_threshold_fraction = parse_number<double>("ess_threshold", v); }},
          {"rho", [](C& c, const std::string& v) { c.filter.rho = parse_number<double>("rho", v); }},
          {"mcmc_steps", [](C& c, const std::string& v) { c.filter.mcmc_steps = parse_number<int>("mcmc_steps", v); }},
          {"max_temperatures",
           [](C& c, const std::string& v) { c.filter.max_temperatures = parse_number<int>("max_temperatures", v); }},
          {"bisection_iters",
           [](C& c, const std::string& v) { c.filter.bisection_iters = parse_number<int>("bisection_iters", v); }},
          {"final_resample_always",
           [](C& c, const std::string& v) { c.filter.final_resample_always = parse_bool("final_resample_always", v); }},
          {"cache_states", [](C& c, const std::string& v) { c.filter.cache_states = parse_bool("cache_states", v); }}}},
        {"observations",
         {{"stations_s", number(&C::stations_s)},
          {"lambda", number(&C::lambda)},
          {"sigma_floor", number(&C::sigma_floor)},
          {"probes", [](C& c, const std::string& v) { c.probes = parse_points("probes", v); }}}},
        {"experiment",
         {{"scenario", [](C& c, const std::string& v) { c.scenario = parse_scenario(v); }},
          {"assimilation_interval", number(&C::assimilation_interval)},
          {"total_windows", number(&C::total_windows)},
          {"seed", number(&C::seed)},
          {"spinup_time", number(&C::spinup_time)},
          {"pool_size", number(&C::pool_size)},
          {"pool_interval", number(&C::pool_interval)},
          {"calibration_snapshots", number(&C::calibration_snapshots)},
          {"eof_fraction", number(&C::eof_fraction)},
          {"noise_scale", number(&C::noise_scale)},
          {"deformation_epsilon", number(&C::deformation_epsilon)},
          {"deformation_steps", number(&C::deformation_steps)},
          {"forecast_horizon", number(&C::forecast_horizon)},
          {"checkpoint_every", number(&C::checkpoint_every)},
          {"trajectory_members", number(&C::trajectory_members)}}},
    };
    return table;
}

}  // namespace

std::string to_string(Scenario s) { return s == Scenario::Perfect ? "perfect" : "imperfect"; }

Scenario parse_scenario(const std::string& text) {
    if (text == "perfect") return Scenario::Perfect;
    if (text == "imperfect") return Scenario::Imperfect;
    throw ParameterError("scenario must be 'perfect' or 'imperfect', got '" + text + "'");
}

std::vector<fields::Point> ExperimentConfig::default_probes() {
    std::vector<fields::Point> out;
    for (double y : {0.25, 0.5, 0.75})
        for (double x : {0.25, 0.5, 0.75}) out.push_back({x, y});
    return out;
}

dynamics::ModelParams ExperimentConfig::fine_params() const {
    return {.a = a, .b = b, .r = r, .dt = dt_fine, .cfl_limit = cfl_limit, .abort_on_cfl = abort_on_cfl};
}

dynamics::ModelParams ExperimentConfig::coarse_params() const {
    return {.a = a, .b = b, .r = r, .dt = dt_coarse, .cfl_limit = cfl_limit, .abort_on_cfl = abort_on_cfl};
}

int ExperimentConfig::fine_steps_per_coarse() const {
    const double ratio = dt_coarse / dt_fine;
    const double rounded = std::round(ratio);
    require_parameter(rounded >= 1.0 && std::abs(ratio - rounded) <= 1e-9 * ratio,
                      "dt_coarse must be a whole multiple of dt_fine");
    return static_cast<int>(rounded);
}

void ExperimentConfig::validate() const {
    fine_params().validate();
    coarse_params().validate();
    require_parameter(fine_n >= 4 && coarse_n >= 4, "grid sizes must be >= 4");
    require_parameter(fine_n % coarse_n == 0, "fine_n must be divisible by coarse_n");
    (void)fine_steps_per_coarse();
    filter.validate();
    require_parameter(stations_s >= 2, "stations_s must be >= 2");
    require_parameter(lambda > 0.0, "lambda must be > 0");
    require_parameter(sigma_floor > 0.0, "sigma_floor must be > 0");
    for (const auto& p : probes) {
        require_parameter(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0, "probe outside the unit square");
    }
    require_parameter(assimilation_interval >= 1, "assimilation_interval must be >= 1");
    require_parameter(total_windows >= 0, "total_windows must be >= 0");
    require_parameter(spinup_time >= 0.0, "spinup_time must be >= 0");
    require_parameter(pool_size >= 1 && pool_interval >= 1, "pool_size and pool_interval must be >= 1");
    require_parameter(calibration_snapshots >= 3, "calibration_snapshots must be >= 3");
    require_parameter(eof_fraction > 0.0 && eof_fraction <= 1.0, "eof_fraction must lie in (0,1]");
    require_parameter(noise_scale >= 0.0, "noise_scale must be >= 0");
    require_parameter(deformation_epsilon > 0.0, "deformation_epsilon must be > 0");
    require_parameter(deformation_steps >= 0, "deformation_steps must be >= 0");
    require_parameter(forecast_horizon >= 0, "forecast_horizon must be >= 0");
    require_parameter(checkpoint_every >= 0, "checkpoint_every must be >= 0");
    require_parameter(trajectory_members >= 0, "trajectory_members must be >= 0");
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ParameterError(fmt::format("{}: {}", source, e.message()));
    }
    ExperimentConfig cfg;
    const auto& table = setters();
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ParameterError(fmt::format("{}: key '{}' outside a section", source, section));
        }
        const auto sec = table.find(section);
        if (sec == table.end()) {
            throw ParameterError(fmt::format("{}: unknown section [{}] or key outside a section", source, section));
        }
        for (const auto& [key, value] : body) {
            const auto setter = sec->second.find(key);
            if (setter == sec->second.end()) {
                throw ParameterError(fmt::format("{}: unknown key '{}' in [{}]", source, key, section));
            }
            try {
                setter->second(cfg, value.data());
            } catch (const ParameterError& e) {
                throw ParameterError(fmt::format("{}: [{}] {} = {}: {}", source, section, key, value.data(), e.what()));
            }
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open config file " + path.string());
    return parse_config(in, path.string());
}

std::string format_config(const ExperimentConfig& c) {
    std::string probes;
    for (std::size_t k = 0; k < c.probes.size(); ++k) {
        probes += fmt::format("{}{} {}", k == 0 ? "" : "; ", c.probes[k].x, c.probes[k].y);
    }
    const auto& f = c.filter;
    return fmt::format(
        "[model]\na = {}\nb = {}\nr = {}\ncfl_limit = {}\nabort_on_cfl = {}\n\n"
        "[grid]\nfine_n = {}\ncoarse_n = {}\ndt_fine = {}\ndt_coarse = {}\n\n"
        "[filter]\nensemble_size = {}\ness_threshold = {}\nrho = {}\nmcmc_steps = {}\nmax_temperatures = {}\n"
        "bisection_iters = {}\nfinal_resample_always = {}\ncache_states = {}\n\n"
        "[observations]\nstations_s = {}\nlambda = {}\nsigma_floor = {}\nprobes = {}\n\n"
        "[experiment]\nscenario = {}\nassimilation_interval = {}\ntotal_windows = {}\nseed = {}\nspinup_time = {}\n"
        "pool_size = {}\npool_interval = {}\ncalibration_snapshots = {}\neof_fraction = {}\nnoise_scale = {}\n"
        "deformation_epsilon = {}\ndeformation_steps = {}\nforecast_horizon = {}\ncheckpoint_every = {}\n"
        "trajectory_members = {}\n",
        c.a, c.b, c.r, c.cfl_limit, c.abort_on_cfl, c.fine_n, c.coarse_n, c.dt_fine, c.dt_coarse, f.ensemble_size,
        f.ess_threshold_fraction, f.rho, f.mcmc_steps, f.max_temperatures, f.bisection_iters, f.final_resample_always,
        f.cache_states, c.stations_s, c.lambda, c.sigma_floor, probes, to_string(c.scenario), c.assimilation_interval,
        c.total_windows, c.seed, c.spinup_time, c.pool_size, c.pool_interval, c.calibration_snapshots, c.eof_fraction,
        c.noise_scale, c.deformation_epsilon, c.deformation_steps, c.forecast_horizon, c.checkpoint_every,
        c.trajectory_members);
}

}  // namespace saltda::experiments
