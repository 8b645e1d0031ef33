#pragma once

#include <filesystem>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "saltda/fields/grid.hpp"

namespace saltda::stochastic {

using fields::Grid;
using fields::ScalarField;

/// The m time-constant noise stream functions ζ_i (ξ_i = ∇⊥ζ_i) on the coarse
/// grid, amplitudes absorbed into the fields, plus the explained-variance
/// spectrum they came from.
class NoiseBasis {
public:
    NoiseBasis(Grid grid, std::vector<ScalarField> zetas, std::vector<double> spectrum);

    [[nodiscard]] const Grid& grid() const { return grid_; }
    [[nodiscard]] int modes() const { return static_cast<int>(zetas_.size()); }
    [[nodiscard]] const std::vector<ScalarField>& zetas() const { return zetas_; }
    [[nodiscard]] const std::vector<double>& spectrum() const { return spectrum_; }

    /// Σ_i ζ_i c_i for one column of increments already divided by dt.
    [[nodiscard]] ScalarField combine(std::span<const double> coefficients) const;

    /// Same modes with every ζ_i multiplied by s.
    [[nodiscard]] NoiseBasis scaled(double s) const;

private:
    Grid grid_;
    std::vector<ScalarField> zetas_;
    std::vector<double> spectrum_;
};

inline constexpr std::string_view kNoiseBasisMagic = "SALTEOF1";
inline constexpr std::uint32_t kNoiseBasisVersion = 1;

void write_noise_basis(std::ostream& out, const NoiseBasis& basis);
NoiseBasis read_noise_basis(std::istream& in);
void save_noise_basis(const std::filesystem::path& path, const NoiseBasis& basis);
NoiseBasis load_noise_basis(const std::filesystem::path& path);

}  // namespace saltda::stochastic
