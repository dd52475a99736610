#include "lindrate/montecarlo.hpp"

#include <algorithm>
#include <cmath>

namespace lindrate {

namespace {

Eigen::VectorXd pairwise_sum(const std::vector<Eigen::VectorXd>& xs, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return xs[lo];
  if (hi - lo == 2) return xs[lo] + xs[lo + 1];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(xs, lo, mid) + pairwise_sum(xs, mid, hi);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x6c72u};
  rng_.seed(seq);
}

unsigned resolve_workers(unsigned requested, std::size_t tasks) {
  unsigned w = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  if (tasks < w) w = static_cast<unsigned>(std::max<std::size_t>(tasks, 1));
  return w;
}

Eigen::VectorXd SampleStats::standard_error() const {
  if (count == 0) return Eigen::VectorXd::Zero(mean.size());
  return (variance / static_cast<double>(count)).cwiseSqrt();
}

SampleStats sample_stats(const std::vector<Eigen::VectorXd>& samples) {
  SampleStats s;
  s.count = samples.size();
  if (samples.empty()) return s;
  const double N = static_cast<double>(samples.size());
  s.mean = pairwise_sum(samples, 0, samples.size()) / N;
  std::vector<Eigen::VectorXd> sq;
  sq.reserve(samples.size());
  for (const auto& x : samples) sq.push_back((x - s.mean).array().square().matrix());
  s.variance = samples.size() > 1 ? Eigen::VectorXd(pairwise_sum(sq, 0, sq.size()) / (N - 1.0))
                                  : Eigen::VectorXd::Zero(s.mean.size());
  return s;
}

Eigen::VectorXd pack(const BlockDensity& x) {
  Eigen::VectorXd v(packed_size(x.n(), x.d()));
  Eigen::Index k = 0;
  for (int j = 0; j < x.n(); ++j)
    for (Eigen::Index e = 0; e < x[j].size(); ++e) {
      v[k++] = x[j].data()[e].real();
      v[k++] = x[j].data()[e].imag();
    }
  return v;
}

BlockDensity unpack(const Eigen::VectorXd& v, Eigen::Index offset, int n, int d) {
  if (offset + packed_size(n, d) > v.size()) throw DimensionError("unpack: vector too short");
  BlockDensity x(n, d);
  Eigen::Index k = offset;
  for (int j = 0; j < n; ++j)
    for (Eigen::Index e = 0; e < x[j].size(); ++e) {
      x[j].data()[e] = cplx(v[k], v[k + 1]);
      k += 2;
    }
  return x;
}

double BlockEstimate::total_sigma() const {
  double s = 0.0;
  for (const auto& se : entry_se) s += se.squaredNorm();
  return std::sqrt(static_cast<double>(mean.d()) * s);
}

BlockEstimate block_estimate(const SampleStats& stats, Eigen::Index offset, int n, int d) {
  BlockEstimate e;
  e.count = stats.count;
  e.mean = unpack(stats.mean, offset, n, d);
  const Eigen::VectorXd var = stats.variance;
  const double N = static_cast<double>(std::max<std::size_t>(stats.count, 1));
  Eigen::Index k = offset;
  for (int j = 0; j < n; ++j) {
    RealMatrix se(d, d);
    for (Eigen::Index idx = 0; idx < se.size(); ++idx) {
      const double v = var[k] + var[k + 1];
      e.aggregate_variance += v;
      se.data()[idx] = std::sqrt(v / N);
      k += 2;
    }
    e.sigma.push_back(std::sqrt(static_cast<double>(d)) * se.norm());
    e.entry_se.push_back(std::move(se));
  }
  return e;
}

}  // namespace lindrate
