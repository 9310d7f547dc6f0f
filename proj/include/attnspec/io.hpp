#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "attnspec/types.hpp"

namespace attnspec {

// Doubles are printed with "%.17g" everywhere so that identical values give
// identical bytes across runs.
std::string format_double(double x);

// CSV layout: one comment header "# rows cols seed", then one row per line.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      std::uint64_t seed);

// Binary layout: magic "ATSPMAT1", then rows, cols, seed as little-endian
// u64, then rows*cols doubles in row-major order.
void write_matrix_binary(const std::filesystem::path& path, const Matrix& m,
                         std::uint64_t seed);
Matrix read_matrix_binary(const std::filesystem::path& path, std::uint64_t* seed_out = nullptr);

}  // namespace attnspec
