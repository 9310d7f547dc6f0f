#include "attnspec/ensembles.hpp"

#include <stdexcept>

#include "attnspec/gaussian.hpp"

namespace attnspec {

namespace {

// splitmix64 finalizer (Steele, Lea, Flood 2014), a bijection on u64.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

MasterSeed derive_seed(MasterSeed master, StreamId stream) {
    std::uint64_t h = mix64(master.value);
    h = mix64(h ^ (0xA24BAED4963EE407ull + stream.sample_index));
    h = mix64(h ^ (0x9FB21C651E98DF25ull + static_cast<std::uint64_t>(stream.role)));
    return MasterSeed{h};
}

GaussianStream::GaussianStream(MasterSeed seed) : engine_(seed.value) {}

double GaussianStream::uniform() {
    // 53 bits, then centered half-steps: values lie strictly inside (0, 1).
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianStream::normal() { return normal_quantile(uniform()); }

Matrix sample_gaussian_matrix(Index rows, Index cols, MasterSeed seed) {
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("sample_gaussian_matrix: dimensions must be >= 1");
    GaussianStream stream(seed);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = stream.normal();
    return m;
}

}  // namespace attnspec
