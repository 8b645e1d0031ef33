#include "saltda/ensembles/checkpoint.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

#include "saltda/errors.hpp"
#include "saltda/fields/field_io.hpp"

namespace saltda::ensembles {
namespace {

constexpr std::string_view kManifestHeader = "member,beta,pool_index,n_steps,seed";

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + file.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw FormatError("cannot open " + file.string());
    return in;
}

}  // namespace

std::string member_file_name(std::string_view prefix, std::size_t member, std::string_view extension) {
    return fmt::format("{}_{:04d}.{}", prefix, member, extension);
}

void save_ensemble(const std::filesystem::path& dir, const InitialEnsemble& ensemble) {
    require_input(ensemble.members.size() == ensemble.draws.size(), "save_ensemble: members and draws differ in size");
    std::filesystem::create_directories(dir);
    save_fields(dir, "member", ensemble.members);
    std::ofstream manifest = open_out(dir / "manifest.csv");
    manifest << kManifestHeader << '\n';
    for (const MemberDraw& d : ensemble.draws) {
        manifest << fmt::format("{},{:.17g},{},{},{}\n", d.member, d.beta, d.pool_index, d.n_steps, d.seed);
    }
    if (!manifest) throw FormatError("failed writing manifest in " + dir.string());
}

InitialEnsemble load_ensemble(const std::filesystem::path& dir) {
    std::ifstream manifest = open_in(dir / "manifest.csv");
    std::string line;
    if (!std::getline(manifest, line) || line != kManifestHeader) {
        throw FormatError((dir / "manifest.csv").string() + ": unexpected header");
    }
    InitialEnsemble out;
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        MemberDraw d;
        char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
        ss >> d.member >> c1 >> d.beta >> c2 >> d.pool_index >> c3 >> d.n_steps >> c4 >> d.seed;
        if (!ss || c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' ||
            d.member != static_cast<int>(out.draws.size())) {
            throw FormatError((dir / "manifest.csv").string() + ": malformed row '" + line + "'");
        }
        out.draws.push_back(d);
    }
    out.members = load_fields(dir, "member", out.draws.size());
    return out;
}

void write_path(std::ostream& out, const stochastic::PathIncrements& path) {
    fields::binary::write_magic(out, kPathMagic);
    fields::binary::write_u64(out, static_cast<std::uint64_t>(path.m));
    fields::binary::write_u64(out, static_cast<std::uint64_t>(path.n_sub));
    for (double v : path.dW) fields::binary::write_f64(out, v);
}

stochastic::PathIncrements read_path(std::istream& in) {
    fields::binary::expect_magic(in, kPathMagic);
    const std::uint64_t m = fields::binary::read_u64(in);
    const std::uint64_t n_sub = fields::binary::read_u64(in);
    if (m > (1u << 20) || n_sub > (1u << 20)) throw FormatError("path file: implausible dimensions");
    stochastic::PathIncrements path(static_cast<int>(m), static_cast<int>(n_sub));
    for (double& v : path.dW) {
        v = fields::binary::read_f64(in);
        if (!std::isfinite(v)) throw FormatError("path file: non-finite increment");
    }
    return path;
}

void save_path(const std::filesystem::path& file, const stochastic::PathIncrements& path) {
    std::ofstream out = open_out(file);
    write_path(out, path);
}

stochastic::PathIncrements load_path(const std::filesystem::path& file) {
    std::ifstream in = open_in(file);
    stochastic::PathIncrements path = read_path(in);
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError(file.string() + ": trailing bytes");
    return path;
}

void save_fields(const std::filesystem::path& dir, std::string_view prefix, const std::vector<ScalarField>& fields) {
    std::filesystem::create_directories(dir);
    for (std::size_t k = 0; k < fields.size(); ++k) {
        fields::save_scalar_field(dir / member_file_name(prefix, k, "sfld"), fields[k]);
    }
}

std::vector<ScalarField> load_fields(const std::filesystem::path& dir, std::string_view prefix, std::size_t count) {
    std::vector<ScalarField> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(fields::load_scalar_field(dir / member_file_name(prefix, k, "sfld")));
    }
    return out;
}

}  // namespace saltda::ensembles
