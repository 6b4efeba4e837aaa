#include "fwkit/kernels.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <numeric>
#include <vector>

namespace fwkit {

namespace {

struct Partial {
  double value;
  std::size_t accepted = 0;
  std::size_t skipped = 0;
};

double identity(Reduce op) {
  return op == Reduce::min ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
}

double combine(Reduce op, double a, double b) {
  return op == Reduce::min ? std::min(a, b) : std::max(a, b);
}

std::size_t chunk_count(std::size_t count) { return (count + kSampleChunk - 1) / kSampleChunk; }

Partial run_chunk(std::size_t chunk, std::size_t count, std::uint64_t seed, Reduce op,
                  const SampleFn& sample) {
  Partial p{identity(op)};
  auto rng = chunk_generator(seed, chunk);
  const std::size_t first = chunk * kSampleChunk;
  const std::size_t last = std::min(count, first + kSampleChunk);
  for (std::size_t i = first; i < last; ++i) {
    if (const auto v = sample(rng, i)) {
      p.value = combine(op, p.value, *v);
      ++p.accepted;
    } else {
      ++p.skipped;
    }
  }
  return p;
}

SampleStats finish(const Partial& p) {
  SampleStats s;
  s.accepted = p.accepted;
  s.skipped = p.skipped;
  if (p.accepted > 0) s.value = p.value;
  return s;
}

}  // namespace

std::mt19937_64 chunk_generator(std::uint64_t seed, std::size_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

SampleStats reduce_samples_serial(std::size_t count, std::uint64_t seed, Reduce op,
                                  const SampleFn& sample) {
  Partial total{identity(op)};
  for (std::size_t c = 0; c < chunk_count(count); ++c) {
    const Partial p = run_chunk(c, count, seed, op, sample);
    total.value = combine(op, total.value, p.value);
    total.accepted += p.accepted;
    total.skipped += p.skipped;
  }
  return finish(total);
}

SampleStats reduce_samples_parallel(std::size_t count, std::uint64_t seed, Reduce op,
                                    const SampleFn& sample) {
  const auto chunks = static_cast<std::int64_t>(chunk_count(count));
  std::vector<Partial> partials(static_cast<std::size_t>(chunks), Partial{identity(op)});
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < chunks; ++c) {
    try {
      partials[static_cast<std::size_t>(c)] =
          run_chunk(static_cast<std::size_t>(c), count, seed, op, sample);
    } catch (...) {
#pragma omp critical(fwkit_sample_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  Partial total{identity(op)};
  for (const auto& p : partials) {
    total.value = combine(op, total.value, p.value);
    total.accepted += p.accepted;
    total.skipped += p.skipped;
  }
  return finish(total);
}

SampleStats reduce_samples(std::size_t count, std::uint64_t seed, Reduce op,
                           const SampleFn& sample, Exec exec) {
  return exec == Exec::parallel ? reduce_samples_parallel(count, seed, op, sample)
                                : reduce_samples_serial(count, seed, op, sample);
}

void run_tasks(std::size_t count, std::uint64_t seed, const TaskFn& task, Exec exec) {
  if (exec == Exec::serial) {
    for (std::size_t t = 0; t < count; ++t) {
      auto rng = chunk_generator(seed, t);
      task(rng, t);
    }
    return;
  }
  std::exception_ptr error;
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < n; ++t) {
    try {
      auto rng = chunk_generator(seed, static_cast<std::size_t>(t));
      task(rng, static_cast<std::size_t>(t));
    } catch (...) {
#pragma omp critical(fwkit_task_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

double uniform01(std::mt19937_64& rng) {
  return std::generate_canonical<double, std::numeric_limits<double>::digits>(rng);
}

Vector sample_point(const VPolytope& poly, std::mt19937_64& rng) {
  const std::size_t m = poly.size();
  const std::size_t cap = std::min<std::size_t>(m, static_cast<std::size_t>(poly.dimension()) + 1);
  std::uniform_int_distribution<std::size_t> size_dist(1, cap);
  const std::size_t k = size_dist(rng);
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, m - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& wi : w) {
    wi = expo(rng);
    total += wi;
  }
  Vector x = Vector::Zero(poly.dimension());
  for (std::size_t i = 0; i < k; ++i) x += (w[i] / total) * poly.vertex(idx[i]);
  return x;
}

}  // namespace fwkit
