#include "saltda/stochastic/noise_basis.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "saltda/errors.hpp"
#include "saltda/fields/field_io.hpp"

namespace saltda::stochastic {

namespace binary = fields::binary;

NoiseBasis::NoiseBasis(Grid grid, std::vector<ScalarField> zetas, std::vector<double> spectrum)
    : grid_(grid), zetas_(std::move(zetas)), spectrum_(std::move(spectrum)) {
    require_input(!zetas_.empty(), "noise basis needs at least one mode");
    require_input(spectrum_.size() == zetas_.size(), "noise basis: spectrum length differs from mode count");
    for (const ScalarField& z : zetas_) {
        fields::require_same_grid(grid_, z.grid(), "noise basis mode");
        require_input(z.bc() == fields::BoundaryCondition::DirichletZero, "noise modes must be DirichletZero");
        z.validate();
    }
    for (double s : spectrum_) require_input(std::isfinite(s) && s >= 0.0, "noise spectrum must be nonnegative");
}

ScalarField NoiseBasis::combine(std::span<const double> coefficients) const {
    require_input(coefficients.size() == zetas_.size(), "noise coefficient count differs from mode count");
    ScalarField out(grid_, fields::BoundaryCondition::DirichletZero);
    for (std::size_t i = 0; i < zetas_.size(); ++i) {
        if (coefficients[i] != 0.0) out.axpy(coefficients[i], zetas_[i]);
    }
    return out;
}

NoiseBasis NoiseBasis::scaled(double s) const {
    std::vector<ScalarField> z = zetas_;
    for (ScalarField& f : z) f *= s;
    return NoiseBasis(grid_, std::move(z), spectrum_);
}

void write_noise_basis(std::ostream& out, const NoiseBasis& basis) {
    binary::write_magic(out, kNoiseBasisMagic);
    binary::write_u32(out, kNoiseBasisVersion);
    binary::write_u64(out, static_cast<std::uint64_t>(basis.grid().cells()));
    binary::write_u64(out, static_cast<std::uint64_t>(basis.modes()));
    for (double s : basis.spectrum()) binary::write_f64(out, s);
    for (const ScalarField& z : basis.zetas()) binary::write_body(out, z);
}

NoiseBasis read_noise_basis(std::istream& in) {
    binary::expect_magic(in, kNoiseBasisMagic);
    const std::uint32_t version = binary::read_u32(in);
    if (version != kNoiseBasisVersion) throw FormatError("unsupported noise basis version " + std::to_string(version));
    const std::uint64_t n = binary::read_u64(in);
    const std::uint64_t m = binary::read_u64(in);
    if (n < 4 || n > (1u << 16) || m == 0 || m > (1u << 20)) throw FormatError("implausible noise basis header");
    const Grid grid(static_cast<int>(n));
    std::vector<double> spectrum(m);
    for (double& s : spectrum) s = binary::read_f64(in);
    std::vector<ScalarField> zetas;
    zetas.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i)
        zetas.push_back(binary::read_body(in, grid, fields::BoundaryCondition::DirichletZero));
    return NoiseBasis(grid, std::move(zetas), std::move(spectrum));
}

void save_noise_basis(const std::filesystem::path& path, const NoiseBasis& basis) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    write_noise_basis(out, basis);
}

NoiseBasis load_noise_basis(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    NoiseBasis basis = read_noise_basis(in);
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError(path.string() + ": trailing bytes");
    return basis;
}

}  // namespace saltda::stochastic
