#pragma once

#include <cstdint>
#include <random>

#include "attnspec/types.hpp"

namespace attnspec {

struct MasterSeed {
    std::uint64_t value = 0;
};

// Which independent matrix of a sample a stream feeds.
enum class MatrixRole : std::uint32_t { Query = 0, Key = 1, Noise = 2 };

struct StreamId {
    std::uint64_t sample_index = 0;
    MatrixRole role = MatrixRole::Query;
};

// Derives the per-stream seed from (master, sample_index, role) by chained
// splitmix64 finalizer mixing. Deterministic, and injective in practice
// (distinct streams collide only with ~2^-64 probability).
MasterSeed derive_seed(MasterSeed master, StreamId stream);

// Deterministic i.i.d. N(0,1) stream. The generation method is fixed so that
// sampled values are bit-identical across platforms and runs:
//   engine   std::mt19937_64 seeded with the stream seed (output sequence is
//            pinned by the C++ standard),
//   uniform  u = ((x >> 11) + 0.5) * 2^-53, strictly inside (0, 1),
//   normal   normal_quantile(u)  (AS 241 inverse CDF).
class GaussianStream {
   public:
    explicit GaussianStream(MasterSeed seed);

    double uniform();
    double normal();

   private:
    std::mt19937_64 engine_;
};

// rows x cols matrix of i.i.d. N(0,1) entries drawn from the stream seeded by
// `seed`, filled in row-major order. Throws std::invalid_argument if either
// dimension is < 1.
Matrix sample_gaussian_matrix(Index rows, Index cols, MasterSeed seed);

}  // namespace attnspec
