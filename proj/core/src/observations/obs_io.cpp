#include "saltda/observations/obs_io.hpp"

#include <fmt/format.h>

#include <cstdio>
#include <sstream>
#include <string>

#include "saltda/errors.hpp"

namespace saltda::observations {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw FormatError("");
        return v;
    } catch (const std::exception&) {
        throw FormatError(path.string() + ": cannot parse number '" + s + "'");
    }
}

}  // namespace

void save_obs_noise(const std::filesystem::path& path, const ObsNoise& noise) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out << fmt::format("# lambda={:.17g}, sigma_floor={:.17g}\n", noise.lambda, noise.sigma_floor);
    out << "station_index,sigma_ux,sigma_uy\n";
    for (std::size_t s = 0; 2 * s < noise.sigmas.size(); ++s) {
        out << fmt::format("{},{:.17g},{:.17g}\n", s, noise.sigmas[2 * s], noise.sigmas[2 * s + 1]);
    }
}

ObsNoise load_obs_noise(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    ObsNoise noise;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# lambda=", 0) != 0) {
        throw FormatError(path.string() + ": missing '# lambda=..., sigma_floor=...' header comment");
    }
    if (std::sscanf(line.c_str(), "# lambda=%lf, sigma_floor=%lf", &noise.lambda, &noise.sigma_floor) != 2) {
        throw FormatError(path.string() + ": malformed header comment");
    }
    if (!std::getline(in, line) || line != "station_index,sigma_ux,sigma_uy") {
        throw FormatError(path.string() + ": unexpected column header");
    }
    std::size_t expected = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 3 || std::stoul(cells[0]) != expected) throw FormatError(path.string() + ": bad row");
        noise.sigmas.push_back(parse_double(cells[1], path));
        noise.sigmas.push_back(parse_double(cells[2], path));
        ++expected;
    }
    return noise;
}

ObservationLogWriter::ObservationLogWriter(const std::filesystem::path& path, const StationSet& stations)
    : out_(path, std::ios::trunc), stations_(&stations) {
    if (!out_) throw FormatError("cannot open " + path.string() + " for writing");
    out_ << "step,time,station_index,station_x,station_y,obs_ux,obs_uy,true_ux,true_uy\n";
}

void ObservationLogWriter::write(const Observation& y, std::span<const double> clean_values) {
    require_input(y.values.size() == stations_->observation_size() && clean_values.size() == y.values.size(),
                  "observation log: dimension mismatch");
    const auto coords = stations_->coords();
    for (std::size_t s = 0; s < stations_->size(); ++s) {
        out_ << fmt::format("{},{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", y.step, y.time, s,
                            coords[s].x, coords[s].y, y.values[2 * s], y.values[2 * s + 1], clean_values[2 * s],
                            clean_values[2 * s + 1]);
    }
    out_.flush();
}

std::vector<LoggedObservation> load_observation_log(const std::filesystem::path& path, const StationSet& stations) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "step,time,station_index,station_x,station_y,obs_ux,obs_uy,true_ux,true_uy") {
        throw FormatError(path.string() + ": unexpected observation log header");
    }
    std::vector<LoggedObservation> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c = split_csv(line);
        if (c.size() != 9) throw FormatError(path.string() + ": expected 9 columns");
        const long step = std::stol(c[0]);
        const std::size_t station = std::stoul(c[2]);
        if (station == 0) {
            LoggedObservation rec;
            rec.observation.step = step;
            rec.observation.time = parse_double(c[1], path);
            rec.observation.values.reserve(stations.observation_size());
            out.push_back(std::move(rec));
        }
        if (out.empty() || out.back().observation.step != step || station != out.back().observation.values.size() / 2) {
            throw FormatError(path.string() + ": rows out of order at step " + c[0]);
        }
        auto& rec = out.back();
        rec.observation.values.push_back(parse_double(c[5], path));
        rec.observation.values.push_back(parse_double(c[6], path));
        rec.clean_values.push_back(parse_double(c[7], path));
        rec.clean_values.push_back(parse_double(c[8], path));
    }
    for (const auto& rec : out) {
        if (rec.observation.values.size() != stations.observation_size()) {
            throw FormatError(path.string() + ": incomplete station block at step " +
                              std::to_string(rec.observation.step));
        }
    }
    return out;
}

}  // namespace saltda::observations
