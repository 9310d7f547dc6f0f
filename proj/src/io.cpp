#include "attnspec/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace attnspec {

namespace {

constexpr char kMagic[8] = {'A', 'T', 'S', 'P', 'M', 'A', 'T', '1'};

void put_u64(std::ofstream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::ifstream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

}  // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m, std::uint64_t seed) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_matrix_csv: cannot open " + path.string());
    out << "# " << m.rows() << " " << m.cols() << " " << seed << "\n";
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ",";
            out << format_double(m(i, j));
        }
        out << "\n";
    }
}

void write_matrix_binary(const std::filesystem::path& path, const Matrix& m, std::uint64_t seed) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_matrix_binary: cannot open " + path.string());
    out.write(kMagic, 8);
    put_u64(out, static_cast<std::uint64_t>(m.rows()));
    put_u64(out, static_cast<std::uint64_t>(m.cols()));
    put_u64(out, seed);
    // row-major storage, written contiguously
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
}

Matrix read_matrix_binary(const std::filesystem::path& path, std::uint64_t* seed_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_matrix_binary: cannot open " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("read_matrix_binary: bad magic in " + path.string());
    const auto rows = static_cast<Index>(get_u64(in));
    const auto cols = static_cast<Index>(get_u64(in));
    const std::uint64_t seed = get_u64(in);
    if (rows < 1 || cols < 1 || rows > (1 << 20) || cols > (1 << 20))
        throw std::runtime_error("read_matrix_binary: implausible shape in " + path.string());
    Matrix m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
    if (!in) throw std::runtime_error("read_matrix_binary: truncated file " + path.string());
    if (seed_out) *seed_out = seed;
    return m;
}

}  // namespace attnspec
