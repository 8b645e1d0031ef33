#include "saltda/experiments/csv.hpp"

#include <fmt/format.h>

#include <sstream>

#include "saltda/errors.hpp"

namespace saltda::experiments {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    return out;
}

double to_double(const std::string& s, const std::filesystem::path& path) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw FormatError(path.string() + ": cannot parse number '" + s + "'");
}

long to_long(const std::string& s, const std::filesystem::path& path) {
    try {
        std::size_t used = 0;
        const long v = std::stol(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw FormatError(path.string() + ": cannot parse integer '" + s + "'");
}

std::ifstream open_csv(const std::filesystem::path& path, const std::string& header) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw FormatError(path.string() + ": expected header '" + header + "'");
    }
    return in;
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& header, bool append) {
    const bool fresh = !append || !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    out_.open(path, append ? std::ios::app : std::ios::trunc);
    if (!out_) throw FormatError("cannot open " + path.string() + " for writing");
    if (fresh) row(header);
}

void CsvWriter::row(const std::string& line) {
    out_ << line << '\n';
    out_.flush();
    if (!out_) throw FormatError("CSV write failed");
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

std::string energy_row(const dynamics::EnergySample& s) {
    return fmt::format("{},{},{},{}", s.step, s.time, s.energy, s.enstrophy);
}

std::string diagnostics_row(const diagnostics::DiagnosticsRecord& r) {
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}", r.step, r.time, r.rmse_posterior, r.rmse_forecast,
                       r.rmse_forecast_vs_noisyobs, r.rmse_prior, r.spread_posterior, r.spread_forecast,
                       r.spread_prior, r.ess, r.n_temperatures, r.propagator_evals);
}

std::string step_diagnostics_row(long step, double time, const filtering::StepDiagnostics& d) {
    std::string phis;
    for (std::size_t k = 0; k < d.temperatures.size(); ++k) {
        if (k > 0) phis += ';';
        phis += fmt::format("{}", d.temperatures[k]);
    }
    return fmt::format("{},{},{},{},{},{},{},{}", step, time, d.n_temperatures(), phis, d.ess_final(),
                       d.resampled_duplicates, d.jitter_accept_rate(), d.propagator_evals);
}

std::string forecast_row(const diagnostics::ForecastPoint& p) { return fmt::format("{},{},{}", p.j, p.rmse, p.spread); }

void write_energy_csv(const std::filesystem::path& path, const std::vector<dynamics::EnergySample>& series) {
    CsvWriter out(path, kEnergyHeader);
    for (const auto& s : series) out.row(energy_row(s));
}

std::vector<diagnostics::DiagnosticsRecord> read_diagnostics_csv(const std::filesystem::path& path) {
    std::ifstream in = open_csv(path, kDiagnosticsHeader);
    std::vector<diagnostics::DiagnosticsRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c = split(line, ',');
        if (c.size() != 12) throw FormatError(path.string() + ": expected 12 columns");
        diagnostics::DiagnosticsRecord r;
        r.step = to_long(c[0], path);
        r.time = to_double(c[1], path);
        r.rmse_posterior = to_double(c[2], path);
        r.rmse_forecast = to_double(c[3], path);
        r.rmse_forecast_vs_noisyobs = to_double(c[4], path);
        r.rmse_prior = to_double(c[5], path);
        r.spread_posterior = to_double(c[6], path);
        r.spread_forecast = to_double(c[7], path);
        r.spread_prior = to_double(c[8], path);
        r.ess = to_double(c[9], path);
        r.n_temperatures = static_cast<int>(to_long(c[10], path));
        r.propagator_evals = to_long(c[11], path);
        out.push_back(r);
    }
    return out;
}

std::vector<std::pair<long, int>> read_ranks_csv(const std::filesystem::path& path) {
    std::ifstream in = open_csv(path, kRanksHeader);
    std::vector<std::pair<long, int>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c = split(line, ',');
        if (c.size() != 2) throw FormatError(path.string() + ": expected 2 columns");
        out.emplace_back(to_long(c[0], path), static_cast<int>(to_long(c[1], path)));
    }
    return out;
}

void truncate_csv_after_step(const std::filesystem::path& path, long last_step) {
    if (!std::filesystem::exists(path)) return;
    std::vector<std::string> kept;
    {
        std::ifstream in(path);
        std::string line;
        bool header = true;
        while (std::getline(in, line)) {
            if (header || line.empty() || line[0] == '#') {
                kept.push_back(line);
                header = false;
                continue;
            }
            const auto comma = line.find(',');
            if (to_long(line.substr(0, comma), path) <= last_step) kept.push_back(line);
        }
    }
    std::ofstream out(path, std::ios::trunc);
    for (const auto& line : kept) out << line << '\n';
}

std::string probe_tag(double x, double y) { return fmt::format("{}_{}", x, y); }

}  // namespace saltda::experiments
