#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qslimit/grid_function.hpp"
#include "qslimit/rng.hpp"
#include "qslimit/start_law.hpp"

namespace qsl {

/// One draw of the comparison count X_n of randomized Quicksort, by the size
/// recursion cost(n) = n - 1 + cost(I - 1) + cost(n - I) with I uniform on
/// {1..n}, evaluated with an explicit stack.
std::int64_t quicksort_cost(std::int64_t n, SplitMix64& rng);

/// (X_n - mu_n) / n; requires n >= 1.
double sample_Yn(std::int64_t n, SplitMix64& rng);

/// Largest depth accepted by sample_Zn: a draw costs 2^depth operator steps.
inline constexpr int kMaxZnDepth = 24;

/// Exact draw of Z_depth: depth 0 samples the start law, depth d combines two
/// independent depth d-1 draws as U Z + (1-U) Z* + g(U). Throws ResourceError
/// above kMaxZnDepth.
double sample_Zn(int depth, const StartLaw& start, SplitMix64& rng);

/// One draw from a start law.
double sample_start(const StartLaw& start, SplitMix64& rng);

enum class SampleKind { Xn, Yn, Zn };
std::string to_string(SampleKind k);
SampleKind sample_kind_from_string(std::string_view name);

struct SampleBatch {
  SampleKind kind = SampleKind::Xn;
  /// n for Xn/Yn, depth for Zn.
  std::int64_t parameter = 0;
  /// Start law descriptor (Zn only).
  std::string start = "delta0";
  std::uint64_t seed = 0;
  /// Sorted ascending.
  std::vector<double> values;
};

/// Draws per substream; the batch is the concatenation of substreams
/// 0, 1, ... each seeded from (seed, chunk index), then sorted.
inline constexpr std::size_t kChunkSize = 4096;

struct BatchOptions {
  /// Stop after this wall time; completed chunks are kept.
  std::optional<std::chrono::duration<double>> time_budget;
};

SampleBatch generate_batch(SampleKind kind, std::int64_t parameter, const StartLaw& start,
                           std::size_t count, std::uint64_t seed, const BatchOptions& options = {});

struct BatchSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  /// Standard error of the mean and of the sample variance.
  double mean_se = 0.0;
  double variance_se = 0.0;
};

BatchSummary summarize(const std::vector<double>& values);

/// Raw empirical moment sum x^j / N with its standard error.
struct MomentEstimate {
  double value;
  double se;
};
MomentEstimate empirical_moment(const std::vector<double>& values, int order);

/// Right-continuous empirical CDF sampled on a grid.
RealGrid empirical_cdf(const SampleBatch& batch, const GridSpec& spec);

}  // namespace qsl
