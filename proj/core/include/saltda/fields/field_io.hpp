#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "saltda/fields/grid.hpp"

namespace saltda::fields {

inline constexpr std::string_view kScalarMagic = "SALTFLD1";
inline constexpr std::string_view kVectorMagic = "SALTVEC1";
inline constexpr std::uint32_t kFieldFormatVersion = 1;

// Little-endian primitives shared by every binary format in the project.
namespace binary {
void write_magic(std::ostream& out, std::string_view magic);
void expect_magic(std::istream& in, std::string_view magic);
void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_f64(std::ostream& out, double v);
std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);
/// Writes (n+1)² values, row-major with y outer.
void write_body(std::ostream& out, const ScalarField& f);
ScalarField read_body(std::istream& in, const Grid& grid, BoundaryCondition bc);
}  // namespace binary

void write_scalar_field(std::ostream& out, const ScalarField& f);
ScalarField read_scalar_field(std::istream& in);
void write_vector_field(std::ostream& out, const VectorField& f);
VectorField read_vector_field(std::istream& in);

void save_scalar_field(const std::filesystem::path& path, const ScalarField& f);
ScalarField load_scalar_field(const std::filesystem::path& path);
void save_vector_field(const std::filesystem::path& path, const VectorField& f);
VectorField load_vector_field(const std::filesystem::path& path);

}  // namespace saltda::fields
