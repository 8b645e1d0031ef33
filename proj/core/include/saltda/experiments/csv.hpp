#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "saltda/diagnostics/statistics.hpp"
#include "saltda/dynamics/euler.hpp"
#include "saltda/filtering/particle_filter.hpp"

namespace saltda::experiments {

/// Line-oriented CSV writer that flushes after every row, so a crashed run
/// leaves complete rows behind. In append mode the header is only written to
/// empty files.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& header, bool append = false);
    void row(const std::string& line);

private:
    std::ofstream out_;
};

/// Shortest representation that reads back to the same double.
std::string fmt_double(double v);

inline constexpr const char* kEnergyHeader = "step,time,energy,enstrophy";
inline constexpr const char* kDiagnosticsHeader =
    "step,time,rmse_posterior,rmse_forecast,rmse_forecast_vs_noisyobs,rmse_prior,spread_posterior,"
    "spread_forecast,spread_prior,ess,n_temperatures,propagator_evals";
inline constexpr const char* kStepDiagnosticsHeader =
    "step,time,n_temperatures,phi_list,ess_final,n_resampled_duplicates,jitter_accept_rate,propagator_evals";
inline constexpr const char* kForecastHeader = "j,rmse,spread";
inline constexpr const char* kRanksHeader = "step,rank";

std::string energy_row(const dynamics::EnergySample& s);
std::string diagnostics_row(const diagnostics::DiagnosticsRecord& r);
std::string step_diagnostics_row(long step, double time, const filtering::StepDiagnostics& d);
std::string forecast_row(const diagnostics::ForecastPoint& p);

void write_energy_csv(const std::filesystem::path& path, const std::vector<dynamics::EnergySample>& series);
std::vector<diagnostics::DiagnosticsRecord> read_diagnostics_csv(const std::filesystem::path& path);

/// (step, rank) pairs of a ranks_<x>_<y>.csv file.
std::vector<std::pair<long, int>> read_ranks_csv(const std::filesystem::path& path);

/// Drops data rows whose leading step column exceeds `last_step`; used when
/// resuming from a checkpoint.
void truncate_csv_after_step(const std::filesystem::path& path, long last_step);

/// Probe file stem such as `0.25_0.75`.
std::string probe_tag(double x, double y);

}  // namespace saltda::experiments
