#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "saltda/ensembles/deformation.hpp"
#include "saltda/stochastic/brownian.hpp"

namespace saltda::ensembles {

inline constexpr std::string_view kPathMagic = "SALTPTH1";

/// `member_0000.sfld`-style file name.
std::string member_file_name(std::string_view prefix, std::size_t member, std::string_view extension);

/// Writes member_XXXX.sfld files and manifest.csv (`member,beta,pool_index,n_steps,seed`).
void save_ensemble(const std::filesystem::path& dir, const InitialEnsemble& ensemble);
/// Reads a directory written by save_ensemble, validating the manifest
/// against the member files.
InitialEnsemble load_ensemble(const std::filesystem::path& dir);

void write_path(std::ostream& out, const stochastic::PathIncrements& path);
stochastic::PathIncrements read_path(std::istream& in);
void save_path(const std::filesystem::path& file, const stochastic::PathIncrements& path);
stochastic::PathIncrements load_path(const std::filesystem::path& file);

/// Plain fields written as `<prefix>_XXXX.sfld`, loaded back in index order.
void save_fields(const std::filesystem::path& dir, std::string_view prefix, const std::vector<ScalarField>& fields);
std::vector<ScalarField> load_fields(const std::filesystem::path& dir, std::string_view prefix, std::size_t count);

}  // namespace saltda::ensembles
