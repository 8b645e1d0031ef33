#include "saltda/fields/field_io.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "saltda/errors.hpp"

namespace saltda::fields {
namespace binary {
namespace {

template <class UInt>
void write_le(std::ostream& out, UInt v) {
    std::array<char, sizeof(UInt)> bytes{};
    for (std::size_t k = 0; k < sizeof(UInt); ++k) bytes[k] = static_cast<char>((v >> (8 * k)) & 0xff);
    out.write(bytes.data(), bytes.size());
    if (!out) throw FormatError("write failed");
}

template <class UInt>
UInt read_le(std::istream& in) {
    std::array<unsigned char, sizeof(UInt)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) throw FormatError("unexpected end of file");
    UInt v = 0;
    for (std::size_t k = 0; k < sizeof(UInt); ++k) v |= static_cast<UInt>(bytes[k]) << (8 * k);
    return v;
}

}  // namespace

void write_magic(std::ostream& out, std::string_view magic) {
    out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

void expect_magic(std::istream& in, std::string_view magic) {
    std::string got(magic.size(), '\0');
    in.read(got.data(), static_cast<std::streamsize>(got.size()));
    if (in.gcount() != static_cast<std::streamsize>(magic.size()) || got != magic) {
        throw FormatError("bad magic: expected " + std::string(magic));
    }
}

void write_u32(std::ostream& out, std::uint32_t v) { write_le(out, v); }
void write_u64(std::ostream& out, std::uint64_t v) { write_le(out, v); }
void write_f64(std::ostream& out, double v) { write_le(out, std::bit_cast<std::uint64_t>(v)); }
std::uint32_t read_u32(std::istream& in) { return read_le<std::uint32_t>(in); }
std::uint64_t read_u64(std::istream& in) { return read_le<std::uint64_t>(in); }
double read_f64(std::istream& in) { return std::bit_cast<double>(read_le<std::uint64_t>(in)); }

void write_body(std::ostream& out, const ScalarField& f) {
    for (double v : f.values()) write_f64(out, v);
}

ScalarField read_body(std::istream& in, const Grid& grid, BoundaryCondition bc) {
    std::vector<double> values(grid.node_count());
    for (double& v : values) v = read_f64(in);
    try {
        return ScalarField(grid, bc, std::move(values));
    } catch (const InputError& e) {
        throw FormatError(std::string("invalid field payload: ") + e.what());
    }
}

}  // namespace binary

namespace {

struct Header {
    BoundaryCondition bc;
    Grid grid;
};

void write_header(std::ostream& out, std::string_view magic, const ScalarField& f) {
    binary::write_magic(out, magic);
    binary::write_u32(out, kFieldFormatVersion);
    binary::write_u32(out, static_cast<std::uint32_t>(f.bc()));
    binary::write_u64(out, static_cast<std::uint64_t>(f.grid().cells()));
}

Header read_header(std::istream& in, std::string_view magic) {
    binary::expect_magic(in, magic);
    const std::uint32_t version = binary::read_u32(in);
    if (version != kFieldFormatVersion) throw FormatError("unsupported field format version " + std::to_string(version));
    const std::uint32_t tag = binary::read_u32(in);
    if (tag > 1) throw FormatError("unknown boundary-condition tag " + std::to_string(tag));
    const std::uint64_t n = binary::read_u64(in);
    if (n < 4 || n > (1u << 16)) throw FormatError("implausible grid size " + std::to_string(n));
    return {static_cast<BoundaryCondition>(tag), Grid(static_cast<int>(n))};
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    return in;
}

void expect_eof(std::istream& in, const std::filesystem::path& path) {
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError(path.string() + ": trailing bytes");
}

}  // namespace

void write_scalar_field(std::ostream& out, const ScalarField& f) {
    write_header(out, kScalarMagic, f);
    binary::write_body(out, f);
}

ScalarField read_scalar_field(std::istream& in) {
    const Header h = read_header(in, kScalarMagic);
    return binary::read_body(in, h.grid, h.bc);
}

void write_vector_field(std::ostream& out, const VectorField& f) {
    write_header(out, kVectorMagic, f.x);
    binary::write_body(out, f.x);
    binary::write_body(out, f.y);
}

VectorField read_vector_field(std::istream& in) {
    const Header h = read_header(in, kVectorMagic);
    ScalarField x = binary::read_body(in, h.grid, h.bc);
    ScalarField y = binary::read_body(in, h.grid, h.bc);
    return {std::move(x), std::move(y)};
}

void save_scalar_field(const std::filesystem::path& path, const ScalarField& f) {
    auto out = open_out(path);
    write_scalar_field(out, f);
}

ScalarField load_scalar_field(const std::filesystem::path& path) {
    auto in = open_in(path);
    ScalarField f = read_scalar_field(in);
    expect_eof(in, path);
    return f;
}

void save_vector_field(const std::filesystem::path& path, const VectorField& f) {
    auto out = open_out(path);
    write_vector_field(out, f);
}

VectorField load_vector_field(const std::filesystem::path& path) {
    auto in = open_in(path);
    VectorField f = read_vector_field(in);
    expect_eof(in, path);
    return f;
}

}  // namespace saltda::fields
