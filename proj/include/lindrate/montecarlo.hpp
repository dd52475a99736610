#pragma once

// Seeded random streams, a worker pool for independent trajectories and
// order-stable sample statistics.

#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "lindrate/blockalg.hpp"

namespace lindrate {

// Stream for trajectory `index` of a run with master seed `seed`. The sequence
// depends only on the pair, never on scheduling or worker count.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t index);

  double normal() { return normal_(rng_); }
  double uniform() { return uniform_(rng_); }
  bool bernoulli(double p) { return uniform() < p; }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

struct McOptions {
  double dt = 1e-3;
  std::size_t ntraj = 1000;
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0: one per hardware thread
};

unsigned resolve_workers(unsigned requested, std::size_t tasks);

// Evaluates fn(i) for i in [0, count) on a pool of threads and returns the
// results ordered by i. The first exception (lowest index) is rethrown.
template <class Fn>
auto run_indexed(std::size_t count, unsigned workers, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<Result> results(count);
  std::vector<std::exception_ptr> errors(count);
  const unsigned nw = resolve_workers(workers, count);
  std::size_t next = 0;
  std::mutex lock;
  auto body = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> g(lock);
        if (next >= count) return;
        i = next++;
      }
      try {
        results[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (nw <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (unsigned w = 0; w < nw; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

// Mean and unbiased variance per component, with pairwise summation in index
// order so the result does not depend on how samples were produced.
struct SampleStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
  std::size_t count = 0;

  Eigen::VectorXd standard_error() const;
};

SampleStats sample_stats(const std::vector<Eigen::VectorXd>& samples);

// Real packing of a BlockDensity: (re, im) of each entry, blocks in order,
// column-major inside each block.
Eigen::VectorXd pack(const BlockDensity& x);
BlockDensity unpack(const Eigen::VectorXd& v, Eigen::Index offset, int n, int d);
inline Eigen::Index packed_size(int n, int d) { return 2 * static_cast<Eigen::Index>(n) * d * d; }

struct BlockEstimate {
  BlockDensity mean;
  // sqrt((Var Re + Var Im) / N) per entry of each block.
  std::vector<RealMatrix> entry_se;
  // sqrt(d) times the Frobenius norm of entry_se: the scale of the trace-norm
  // error of block i.
  std::vector<double> sigma;
  // Sum over all entries of Var Re + Var Im of a single sample.
  double aggregate_variance = 0.0;
  std::size_t count = 0;

  // Same scale for the whole estimate (all blocks).
  double total_sigma() const;
};

BlockEstimate block_estimate(const SampleStats& stats, Eigen::Index offset, int n, int d);

}  // namespace lindrate
