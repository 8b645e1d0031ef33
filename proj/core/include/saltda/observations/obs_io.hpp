#pragma once

#include <filesystem>
#include <fstream>
#include <vector>

#include "saltda/observations/stations.hpp"

namespace saltda::observations {

/// `station_index,sigma_ux,sigma_uy` with a leading `# lambda=..., sigma_floor=...` comment.
void save_obs_noise(const std::filesystem::path& path, const ObsNoise& noise);
ObsNoise load_obs_noise(const std::filesystem::path& path);

/// Observation log rows: step,time,station_index,station_x,station_y,obs_ux,obs_uy,true_ux,true_uy
class ObservationLogWriter {
public:
    ObservationLogWriter(const std::filesystem::path& path, const StationSet& stations);
    void write(const Observation& y, std::span<const double> clean_values);

private:
    std::ofstream out_;
    const StationSet* stations_;
};

struct LoggedObservation {
    Observation observation;
    std::vector<double> clean_values;
};

/// Groups log rows by step, in file order.
std::vector<LoggedObservation> load_observation_log(const std::filesystem::path& path, const StationSet& stations);

}  // namespace saltda::observations
