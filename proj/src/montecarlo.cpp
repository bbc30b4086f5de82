#include "qslimit/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <variant>

#include "qslimit/errors.hpp"
#include "qslimit/parallel.hpp"
#include "qslimit/toll.hpp"

namespace qsl {

namespace {

double toll_of_uniform(double u) {
  const double w = 1.0 - u;
  return 2.0 * u * std::log(u) + 2.0 * w * std::log(w) + 1.0;
}

double zn_recursive(int depth, const StartLaw& start, SplitMix64& rng) {
  if (depth == 0) return sample_start(start, rng);
  if (depth == 1 && start.is_point_mass()) return toll_of_uniform(rng.uniform());
  const double u = rng.uniform();
  const double a = zn_recursive(depth - 1, start, rng);
  const double b = zn_recursive(depth - 1, start, rng);
  return u * a + (1.0 - u) * b + toll_of_uniform(u);
}

std::size_t chunk_size(SampleKind kind, std::int64_t parameter) {
  // Zn draws cost 2^depth; keep chunks around 2^22 operator steps.
  if (kind == SampleKind::Zn) return std::max<std::size_t>(1, kChunkSize >> std::clamp<std::int64_t>(parameter - 10, 0, 12));
  return kChunkSize;
}

}  // namespace

std::int64_t quicksort_cost(std::int64_t n, SplitMix64& rng) {
  if (n < 0) throw DomainError("quicksort_cost: n must be nonnegative");
  std::int64_t cost = 0;
  thread_local std::vector<std::int64_t> stack;
  stack.clear();
  stack.push_back(n);
  while (!stack.empty()) {
    const std::int64_t m = stack.back();
    stack.pop_back();
    if (m <= 1) continue;
    cost += m - 1;
    if (m == 2) continue;
    const auto pivot = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(m))) + 1;
    stack.push_back(pivot - 1);
    stack.push_back(m - pivot);
  }
  return cost;
}

double sample_Yn(std::int64_t n, SplitMix64& rng) {
  if (n < 1) throw DomainError("sample_Yn: n must be >= 1");
  const long double x = static_cast<long double>(quicksort_cost(n, rng));
  return static_cast<double>((x - mu(n)) / static_cast<long double>(n));
}

double sample_start(const StartLaw& start, SplitMix64& rng) {
  const auto& law = start.variant();
  if (std::holds_alternative<PointMassZero>(law)) return 0.0;
  if (const auto* nl = std::get_if<NormalLaw>(&law)) return std::sqrt(nl->variance) * rng.normal();
  if (const auto* ul = std::get_if<UniformLaw>(&law)) return ul->lo + (ul->hi - ul->lo) * rng.uniform();
  const RealGrid& f = std::get<GridLaw>(law).density;
  const RealGrid c = density_to_cdf(f);
  const double u = rng.uniform() * c[c.size() - 1];
  const auto& cv = c.values();
  const auto it = std::lower_bound(cv.data(), cv.data() + cv.size(), u);
  const Eigen::Index k = std::max<Eigen::Index>(1, it - cv.data());
  const double span = cv[k] - cv[k - 1];
  const double frac = span > 0.0 ? (u - cv[k - 1]) / span : 0.0;
  return c.x(k - 1) + frac * c.spacing();
}

double sample_Zn(int depth, const StartLaw& start, SplitMix64& rng) {
  if (depth < 0) throw DomainError("sample_Zn: depth must be nonnegative");
  if (depth > kMaxZnDepth)
    throw ResourceError("sample_Zn: depth " + std::to_string(depth) + " exceeds the cap " +
                        std::to_string(kMaxZnDepth) + " (a draw costs 2^depth operator steps)");
  return zn_recursive(depth, start, rng);
}

std::string to_string(SampleKind k) {
  switch (k) {
    case SampleKind::Xn: return "xn";
    case SampleKind::Yn: return "yn";
    case SampleKind::Zn: return "zn";
  }
  return "xn";
}

SampleKind sample_kind_from_string(std::string_view name) {
  if (name == "xn" || name == "Xn") return SampleKind::Xn;
  if (name == "yn" || name == "Yn") return SampleKind::Yn;
  if (name == "zn" || name == "Zn") return SampleKind::Zn;
  throw ContractViolation("unknown sample kind '" + std::string(name) + "' (expected xn, yn or zn)");
}

SampleBatch generate_batch(SampleKind kind, std::int64_t parameter, const StartLaw& start,
                           std::size_t count, std::uint64_t seed, const BatchOptions& options) {
  if (kind == SampleKind::Zn && (parameter < 0 || parameter > kMaxZnDepth))
    throw ResourceError("generate_batch: depth " + std::to_string(parameter) + " outside [0, " +
                        std::to_string(kMaxZnDepth) + "]");
  if (kind != SampleKind::Zn && parameter < (kind == SampleKind::Yn ? 1 : 0))
    throw DomainError("generate_batch: n out of range");

  const std::size_t chunk = chunk_size(kind, parameter);
  const std::size_t chunks = (count + chunk - 1) / chunk;
  std::vector<std::vector<double>> parts(chunks);
  std::vector<char> done(chunks, 0);
  const auto started = std::chrono::steady_clock::now();
  std::atomic<bool> expired{false};

  parallel_for(chunks, [&](std::size_t c) {
    if (options.time_budget) {
      if (expired.load() || std::chrono::steady_clock::now() - started > *options.time_budget) {
        expired = true;
        return;
      }
    }
    SplitMix64 rng = SplitMix64::substream(seed, c);
    const std::size_t begin = c * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    auto& out = parts[c];
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      switch (kind) {
        case SampleKind::Xn: out.push_back(static_cast<double>(quicksort_cost(parameter, rng))); break;
        case SampleKind::Yn: out.push_back(sample_Yn(parameter, rng)); break;
        case SampleKind::Zn: out.push_back(sample_Zn(static_cast<int>(parameter), start, rng)); break;
      }
    }
    done[c] = 1;
  });

  SampleBatch batch{kind, parameter, kind == SampleKind::Zn ? start.describe() : std::string(), seed, {}};
  batch.values.reserve(count);
  // Keep the completed prefix so a time-boxed batch is still a deterministic function of the seed.
  for (std::size_t c = 0; c < chunks && done[c]; ++c)
    batch.values.insert(batch.values.end(), parts[c].begin(), parts[c].end());
  std::sort(batch.values.begin(), batch.values.end());
  return batch;
}

BatchSummary summarize(const std::vector<double>& values) {
  BatchSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : values) {
    const double d = v - s.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  if (values.size() > 1) {
    s.variance = m2 / (n - 1.0);
    s.mean_se = std::sqrt(s.variance / n);
    const double mu2 = m2 / n;
    const double mu4 = m4 / n;
    s.variance_se = std::sqrt(std::max(mu4 - mu2 * mu2, 0.0) / n);
  }
  return s;
}

MomentEstimate empirical_moment(const std::vector<double>& values, int order) {
  if (values.empty()) throw DomainError("empirical_moment: empty sample");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  double sum2 = 0.0;
  for (double v : values) {
    const double p = std::pow(v, order);
    sum += p;
    sum2 += p * p;
  }
  const double mean = sum / n;
  const double var = values.size() > 1 ? std::max(sum2 / n - mean * mean, 0.0) * n / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

RealGrid empirical_cdf(const SampleBatch& batch, const GridSpec& spec) {
  if (batch.values.empty()) throw DomainError("empirical_cdf: empty batch");
  std::vector<double> sorted = batch.values;
  if (!std::is_sorted(sorted.begin(), sorted.end())) std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  Eigen::ArrayXd c(spec.points);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < spec.points; ++i) {
    const double x = i + 1 == spec.points ? spec.hi : spec.x(i);
    while (k < sorted.size() && sorted[k] <= x) ++k;
    c[i] = static_cast<double>(k) / n;
  }
  const double tol = std::max(c[0], 1.0 - c[spec.points - 1]);
  return RealGrid(spec.lo, spec.hi, std::move(c), GridKind::cdf, tol, 0.0);
}

}  // namespace qsl
