#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>

#include "fwkit/core.hpp"

namespace fwkit {

/// Execution policy for the sampling kernels.  Both policies visit exactly the
/// same samples, so their results agree bit for bit.
enum class Exec { serial, parallel };

enum class Reduce { min, max };

/// Samples are processed in fixed-size chunks; chunk c draws from its own
/// generator seeded by (seed, c).  Sample i is therefore a function of
/// (seed, i) and of the samples preceding it in its chunk only, which makes
/// sample sets for growing counts nested.
inline constexpr std::size_t kSampleChunk = 64;

std::mt19937_64 chunk_generator(std::uint64_t seed, std::size_t chunk);

struct SampleStats {
  /// min or max over accepted samples; nullopt when every sample was skipped
  std::optional<double> value;
  std::size_t accepted = 0;
  std::size_t skipped = 0;
};

/// A sample returns nullopt to be skipped.  Must be safe to call concurrently.
using SampleFn = std::function<std::optional<double>(std::mt19937_64& rng, std::size_t index)>;

SampleStats reduce_samples_serial(std::size_t count, std::uint64_t seed, Reduce op,
                                  const SampleFn& sample);
SampleStats reduce_samples_parallel(std::size_t count, std::uint64_t seed, Reduce op,
                                    const SampleFn& sample);
SampleStats reduce_samples(std::size_t count, std::uint64_t seed, Reduce op,
                           const SampleFn& sample, Exec exec);

/// Runs independent tasks, each with its own generator seeded by (seed, task).
/// Tasks write their results into caller-owned slots.
using TaskFn = std::function<void(std::mt19937_64& rng, std::size_t task)>;
void run_tasks(std::size_t count, std::uint64_t seed, const TaskFn& task, Exec exec);

/// Random point of the polytope: a Dirichlet(1) combination of between one and
/// min(|V|, n + 1) distinct vertices.
Vector sample_point(const VPolytope& poly, std::mt19937_64& rng);

/// Uniform draw in [0, 1).
double uniform01(std::mt19937_64& rng);

}  // namespace fwkit
