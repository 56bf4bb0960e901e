#include "hdlock/attack.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hdlock/error.hpp"
#include "hdlock/parallel.hpp"

namespace hdlock {

namespace {

QuantizedSample constant_sample(std::size_t n, std::uint32_t level) { return QuantizedSample(n, level); }

Accumulator sum_of(std::span<const Hypervector> hvs) {
  const Hypervector ones = Hypervector::ones(hvs.front().dim());
  std::vector<const Hypervector*> lhs(hvs.size(), &ones);
  std::vector<const Hypervector*> rhs(hvs.size());
  for (std::size_t i = 0; i < hvs.size(); ++i) rhs[i] = &hvs[i];
  return accumulate_products(lhs, rhs);
}

// Sum of cand * level for every candidate.
Accumulator bound_sum(std::span<const Hypervector> cands, const Hypervector& level) {
  std::vector<const Hypervector*> lhs(cands.size(), &level);
  std::vector<const Hypervector*> rhs(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) rhs[i] = &cands[i];
  return accumulate_products(lhs, rhs);
}

// +1 where bit set, else -1; read straight from packed words.
inline int bit_sign(std::span<const std::uint64_t> words, std::size_t i) {
  return ((words[i / kWordBits] >> (i % kWordBits)) & 1ULL) ? 1 : -1;
}

double cosine_from_sums(std::int64_t ab, std::int64_t aa, std::int64_t bb) {
  return (aa == 0 || bb == 0) ? 0.0 : cosine_from_dots(ab, aa, bb);
}

[[noreturn]] void ambiguous(const std::string& what, std::span<const std::size_t> tied) {
  std::ostringstream msg;
  msg << what << "; tied candidates:";
  for (auto t : tied) msg << ' ' << t;
  detail::fail(ErrorCode::kAmbiguity, msg.str());
}

void check_pools(const UnindexedPools& pools, const EncodeOracle& oracle) {
  if (pools.features.empty() || pools.values.size() < 2) {
    detail::fail(ErrorCode::kInvalidArgument, "attack needs a non-empty feature pool and >= 2 values");
  }
  if (pools.features.size() != oracle.n_features() || pools.values.size() != oracle.n_levels()) {
    detail::fail(ErrorCode::kDimensionMismatch, "pool sizes do not match the oracle's N and M");
  }
  const std::size_t dim = pools.values.front().dim();
  for (const auto& hv : pools.features) {
    if (hv.dim() != dim) detail::fail(ErrorCode::kDimensionMismatch, "pool dimensions differ");
  }
  for (const auto& hv : pools.values) {
    if (hv.dim() != dim) detail::fail(ErrorCode::kDimensionMismatch, "pool dimensions differ");
  }
}

// Predicted binary encodings of "one feature at level M-1, the rest at level
// 0" for each candidate, scored against the observed encoding. With
// S = sum_c c*v0 and d = positions where v0 != vM, candidate c predicts
// S + 2*c*vM on d and S elsewhere, so everything is word-parallel masks.
class BinaryFeatureScan {
 public:
  BinaryFeatureScan(std::span<const Hypervector> cands, const Hypervector& v0,
                    const Hypervector& vm, const Rng& attacker)
      : dim_(v0.dim()), vm_(vm), ties_(attacker.fork("feature-scan")) {
    const Accumulator s = bound_sum(cands, v0);
    const std::size_t words = word_count(dim_);
    differ_.assign(words, 0);
    base_.assign(words, 0);
    pivot_.assign(words, 0);
    plus2_.assign(words, 0);
    minus2_.assign(words, 0);
    other_.assign(words, 0);
    auto e = s.elements();
    for (std::size_t w = 0; w < words; ++w) {
      differ_[w] = (v0.words()[w] ^ vm.words()[w]);
      const std::size_t first = w * kWordBits;
      const std::size_t count = std::min(kWordBits, dim_ - first);
      std::uint64_t pos = 0, zero = 0, small = 0, p2 = 0, m2 = 0;
      for (std::size_t b = 0; b < count; ++b) {
        const std::int32_t v = e[first + b];
        const std::uint64_t bit = 1ULL << b;
        if (v > 0) pos |= bit;
        if (v == 0) zero |= bit;
        if (v >= -1 && v <= 1) small |= bit;
        if (v == 2) p2 |= bit;
        if (v == -2) m2 |= bit;
      }
      const std::uint64_t valid = w + 1 == words ? tail_mask(dim_) : ~0ULL;
      const std::uint64_t tie = ties_.word(w);
      base_[w] = pos | (zero & tie);
      pivot_[w] = differ_[w] & small;
      plus2_[w] = differ_[w] & p2;
      minus2_[w] = differ_[w] & m2;
      other_[w] = differ_[w] & ~(small | p2 | m2) & valid;
      informative_ += static_cast<std::size_t>(std::popcount(pivot_[w]));
    }
  }

  [[nodiscard]] std::size_t informative() const noexcept { return informative_; }

  ScoredCandidate score(std::size_t index, const Hypervector& cand,
                        const Hypervector& observed) const {
    const auto c = cand.words();
    const auto m = vm_.words();
    const auto h = observed.words();
    std::size_t full = 0;
    std::size_t pivot_mismatch = 0;
    for (std::size_t w = 0; w < differ_.size(); ++w) {
      const std::uint64_t t = ~(c[w] ^ m[w]);  // sign of c*vM
      const std::uint64_t tie = ties_.word(w);
      const std::uint64_t on_d = (pivot_[w] & t) | (plus2_[w] & (t | tie)) |
                                 (minus2_[w] & t & tie) | (other_[w] & base_[w]);
      const std::uint64_t guess = (base_[w] & ~differ_[w]) | on_d;
      const std::uint64_t valid = w + 1 == differ_.size() ? tail_mask(dim_) : ~0ULL;
      full += static_cast<std::size_t>(std::popcount((guess ^ h[w]) & valid));
      pivot_mismatch += static_cast<std::size_t>(std::popcount(pivot_[w] & (t ^ h[w])));
    }
    ScoredCandidate out;
    out.candidate = index;
    out.full_distance = static_cast<double>(full) / static_cast<double>(dim_);
    out.score = informative_ == 0 ? out.full_distance
                                  : static_cast<double>(pivot_mismatch) /
                                        static_cast<double>(informative_);
    return out;
  }

 private:
  std::size_t dim_;
  const Hypervector& vm_;
  TieBreaker ties_;
  std::vector<std::uint64_t> differ_, base_, pivot_, plus2_, minus2_, other_;
  std::size_t informative_ = 0;
};

// Exact cosine between the observed accumulator O and S + c*(vM - v0).
class NonBinaryFeatureScan {
 public:
  NonBinaryFeatureScan(std::span<const Hypervector> cands, const Hypervector& v0,
                       const Hypervector& vm)
      : s_(bound_sum(cands, v0)) {
    const auto se = s_.elements();
    ss_ = dot(s_, s_);
    for (std::size_t j = 0; j < v0.dim(); ++j) {
      const int diff = vm[j] - v0[j];
      if (diff == 0) continue;
      index_.push_back(j);
      diff_.push_back(diff);
      es_.push_back(static_cast<std::int64_t>(diff) * se[j]);
      ee_ += static_cast<std::int64_t>(diff) * diff;
    }
  }

  void observe(const Accumulator& observed) {
    const auto oe = observed.elements();
    so_ = dot(s_, observed);
    oo_ = dot(observed, observed);
    eo_.resize(index_.size());
    for (std::size_t k = 0; k < index_.size(); ++k) {
      eo_[k] = static_cast<std::int64_t>(diff_[k]) * oe[index_[k]];
    }
  }

  [[nodiscard]] ScoredCandidate score(std::size_t index, const Hypervector& cand) const {
    const auto c = cand.words();
    std::int64_t se = 0;
    std::int64_t oe = 0;
    for (std::size_t k = 0; k < index_.size(); ++k) {
      const int sign = bit_sign(c, index_[k]);
      se += sign * es_[k];
      oe += sign * eo_[k];
    }
    ScoredCandidate out;
    out.candidate = index;
    out.score = cosine_from_sums(so_ + oe, ss_ + 2 * se + ee_, oo_);
    return out;
  }

 private:
  Accumulator s_;
  std::int64_t ss_ = 0, ee_ = 0, so_ = 0, oo_ = 0;
  std::vector<std::size_t> index_;
  std::vector<int> diff_;
  std::vector<std::int64_t> es_, eo_;
};

std::size_t argbest(const std::vector<ScoredCandidate>& scored, bool lower_is_better) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < scored.size(); ++k) {
    const bool better = lower_is_better ? scored[k].score < scored[best].score
                                        : scored[k].score > scored[best].score;
    if (better) best = k;
  }
  return best;
}

// Shared per-position machinery for both modes.
class FeatureScanner {
 public:
  FeatureScanner(const UnindexedPools& pools, std::span<const std::size_t> level_to_pool,
                 EncodeOracle& oracle, const AttackOptions& options)
      : pools_(pools), oracle_(oracle), options_(options) {
    check_pools(pools, oracle);
    const std::size_t m = pools.values.size();
    if (level_to_pool.size() != m) {
      detail::fail(ErrorCode::kInvalidArgument, "value mapping length differs from value pool size");
    }
    v0_ = &pools.values[level_to_pool.front()];
    vm_ = &pools.values[level_to_pool.back()];
    if (oracle.mode() == EncodeMode::kBinary) {
      binary_.emplace(pools.features, *v0_, *vm_, Rng(options.seed, "attacker"));
    } else {
      non_binary_.emplace(pools.features, *v0_, *vm_);
    }
  }

  [[nodiscard]] bool lower_is_better() const { return binary_.has_value(); }

  DecisionTrace scan(std::size_t position, std::span<const std::size_t> candidates) {
    const std::size_t n = pools_.features.size();
    QuantizedSample sample = constant_sample(n, 0);
    sample[position] = static_cast<std::uint32_t>(pools_.values.size() - 1);
    DecisionTrace trace;
    trace.position = position;
    trace.candidates.resize(candidates.size());
    if (binary_) {
      const Hypervector observed = oracle_.query_binary(sample);
      trace.informative = binary_->informative();
      parallel_for(candidates.size(), options_.threads,
                   [&](std::size_t begin, std::size_t end, std::size_t) {
                     for (std::size_t k = begin; k < end; ++k) {
                       trace.candidates[k] = binary_->score(
                           candidates[k], pools_.features[candidates[k]], observed);
                     }
                   });
    } else {
      non_binary_->observe(oracle_.query_non_binary(sample));
      parallel_for(candidates.size(), options_.threads,
                   [&](std::size_t begin, std::size_t end, std::size_t) {
                     for (std::size_t k = begin; k < end; ++k) {
                       trace.candidates[k] =
                           non_binary_->score(candidates[k], pools_.features[candidates[k]]);
                     }
                   });
    }
    trace.chosen = trace.candidates[argbest(trace.candidates, lower_is_better())].candidate;
    return trace;
  }

 private:
  const UnindexedPools& pools_;
  EncodeOracle& oracle_;
  const AttackOptions& options_;
  const Hypervector* v0_ = nullptr;
  const Hypervector* vm_ = nullptr;
  std::optional<BinaryFeatureScan> binary_;
  std::optional<NonBinaryFeatureScan> non_binary_;
};

}  // namespace

EncodeOracle EncodeOracle::binary(std::size_t n_features, std::size_t n_levels, BinaryFn fn) {
  EncodeOracle o;
  o.mode_ = EncodeMode::kBinary;
  o.n_features_ = n_features;
  o.n_levels_ = n_levels;
  o.binary_ = std::move(fn);
  return o;
}

EncodeOracle EncodeOracle::non_binary(std::size_t n_features, std::size_t n_levels,
                                      NonBinaryFn fn) {
  EncodeOracle o;
  o.mode_ = EncodeMode::kNonBinary;
  o.n_features_ = n_features;
  o.n_levels_ = n_levels;
  o.non_binary_ = std::move(fn);
  return o;
}

Hypervector EncodeOracle::query_binary(const QuantizedSample& sample) {
  if (mode_ != EncodeMode::kBinary) {
    detail::fail(ErrorCode::kInvalidArgument, "oracle returns accumulators, not hypervectors");
  }
  ++calls_;
  return binary_(sample);
}

Accumulator EncodeOracle::query_non_binary(const QuantizedSample& sample) {
  if (mode_ != EncodeMode::kNonBinary) {
    detail::fail(ErrorCode::kInvalidArgument, "oracle returns binary hypervectors, not accumulators");
  }
  ++calls_;
  return non_binary_(sample);
}

EncodeOracle make_victim_oracle(std::shared_ptr<const Encoder> victim, EncodeMode mode,
                                const Rng& rng) {
  if (!victim) detail::fail(ErrorCode::kInvalidArgument, "victim encoder is null");
  const std::size_t n = victim->n_features();
  const std::size_t m = victim->n_levels();
  if (mode == EncodeMode::kNonBinary) {
    return EncodeOracle::non_binary(n, m, [victim](const QuantizedSample& s) { return victim->encode(s); });
  }
  auto counter = std::make_shared<std::uint64_t>(0);
  return EncodeOracle::binary(n, m, [victim, rng, counter](const QuantizedSample& s) {
    return victim->encode_binary(s, rng.fork((*counter)++));
  });
}

UnindexedPools separate_pools(const std::vector<Hypervector>& mixed) {
  if (mixed.size() < 3) detail::fail(ErrorCode::kInvalidArgument, "separate_pools: need >= 3 vectors");
  const std::size_t dim = mixed.front().dim();
  // Six sigma below the orthogonal mean.
  const double threshold = 0.5 - 6.0 * 0.5 / std::sqrt(static_cast<double>(dim));
  std::vector<bool> correlated(mixed.size(), false);
  for (std::size_t a = 0; a < mixed.size(); ++a) {
    for (std::size_t b = a + 1; b < mixed.size(); ++b) {
      if (hamming(mixed[a], mixed[b]) < threshold) correlated[a] = correlated[b] = true;
    }
  }
  UnindexedPools out;
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    (correlated[i] ? out.values : out.features).push_back(mixed[i]);
  }
  if (out.values.size() < 3) {
    detail::fail(ErrorCode::kAmbiguity, "separate_pools: no correlated level family found");
  }
  return out;
}

ValueExtraction extract_value_mapping(const UnindexedPools& pools, EncodeOracle& oracle,
                                      const AttackOptions& options) {
  check_pools(pools, oracle);
  const std::size_t m = pools.values.size();
  const std::size_t calls_before = oracle.calls();

  // Endpoints: the farthest pair.
  std::vector<double> dist(m * m, 0.0);
  std::size_t a = 0, b = 1;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      dist[i * m + j] = dist[j * m + i] = hamming(pools.values[i], pools.values[j]);
      if (dist[i * m + j] > dist[a * m + b]) {
        a = i;
        b = j;
      }
    }
  }
  const double far = dist[a * m + b];
  const double tolerance = 0.25 / static_cast<double>(m - 1);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if ((i != a || j != b) && dist[i * m + j] >= far - tolerance) {
        const std::size_t tied[] = {a, b, i, j};
        ambiguous("value endpoints: several pairs are near the maximum distance", tied);
      }
    }
  }

  // Level-0 estimate from the all-minimum query: the encoding factors as
  // v0 * sum(fea), so it does not depend on the unknown feature order.
  const std::size_t n = pools.features.size();
  const Accumulator fea_sum = sum_of(pools.features);
  const Rng attacker(options.seed, "attacker");
  Hypervector estimate(pools.values.front().dim());
  if (oracle.mode() == EncodeMode::kBinary) {
    const Hypervector observed = oracle.query_binary(constant_sample(n, 0));
    estimate = multiply(observed, binarize(fea_sum, attacker.fork("value-scan")));
  } else {
    const Accumulator observed = oracle.query_non_binary(constant_sample(n, 0));
    std::vector<std::int32_t> signs(observed.dim());
    for (std::size_t i = 0; i < signs.size(); ++i) {
      const std::int64_t p = static_cast<std::int64_t>(observed[i]) * fea_sum[i];
      signs[i] = p > 0 ? 1 : (p < 0 ? -1 : 0);
    }
    estimate = binarize(Accumulator(std::move(signs), 1), attacker.fork("value-scan"));
  }

  ValueExtraction out;
  const double da = hamming(estimate, pools.values[a]);
  const double db = hamming(estimate, pools.values[b]);
  if (da == db) {
    const std::size_t tied[] = {a, b};
    ambiguous("value endpoints: estimate is equidistant from both", tied);
  }
  const std::size_t low = da < db ? a : b;
  const std::size_t high = da < db ? b : a;
  out.estimate_distance_low = std::min(da, db);
  out.estimate_distance_high = std::max(da, db);

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return dist[low * m + x] < dist[low * m + y];
  });
  for (std::size_t k = 1; k < m; ++k) {
    if (dist[low * m + order[k]] == dist[low * m + order[k - 1]]) {
      const std::size_t tied[] = {order[k - 1], order[k]};
      ambiguous("value levels: two levels are equidistant from level 0", tied);
    }
  }
  if (order.front() != low || order.back() != high) {
    const std::size_t tied[] = {low, high};
    ambiguous("value levels: distances from level 0 are not monotone", tied);
  }
  out.level_to_pool = std::move(order);
  out.oracle_calls = oracle.calls() - calls_before;
  return out;
}

DecisionTrace scan_feature_position(const UnindexedPools& pools,
                                    std::span<const std::size_t> level_to_pool,
                                    EncodeOracle& oracle, std::size_t position,
                                    const AttackOptions& options) {
  FeatureScanner scanner(pools, level_to_pool, oracle, options);
  if (position >= pools.features.size()) {
    detail::fail(ErrorCode::kOutOfRange, "feature position out of range");
  }
  std::vector<std::size_t> all(pools.features.size());
  std::iota(all.begin(), all.end(), 0);
  return scanner.scan(position, all);
}

FeatureExtraction extract_feature_mapping(const UnindexedPools& pools,
                                          std::span<const std::size_t> level_to_pool,
                                          EncodeOracle& oracle, const AttackOptions& options) {
  FeatureScanner scanner(pools, level_to_pool, oracle, options);
  const std::size_t n = pools.features.size();
  const std::size_t calls_before = oracle.calls();
  std::vector<std::size_t> remaining(n);
  std::iota(remaining.begin(), remaining.end(), 0);

  FeatureExtraction out;
  out.feature_to_pool.resize(n);
  for (std::size_t position = 0; position < n; ++position) {
    DecisionTrace trace = scanner.scan(position, remaining);
    out.guesses += remaining.size();
    if (remaining.size() > 1) {
      auto sorted = trace.candidates;
      const bool lower = scanner.lower_is_better();
      std::sort(sorted.begin(), sorted.end(), [&](const auto& x, const auto& y) {
        return lower ? x.score < y.score : x.score > y.score;
      });
      if (std::abs(sorted[1].score - sorted[0].score) <= options.ambiguity_tolerance) {
        std::vector<std::size_t> tied;
        for (const auto& s : sorted) {
          if (std::abs(s.score - sorted[0].score) <= options.ambiguity_tolerance) tied.push_back(s.candidate);
        }
        ambiguous("feature " + std::to_string(position) + ": best candidate is not unique", tied);
      }
    }
    out.feature_to_pool[position] = trace.chosen;
    remaining.erase(std::find(remaining.begin(), remaining.end(), trace.chosen));
    if (options.keep_traces) out.traces.push_back(std::move(trace));
  }
  out.oracle_calls = oracle.calls() - calls_before;
  return out;
}

NonBinaryExtraction extract_nonbinary(const UnindexedPools& pools, EncodeOracle& oracle,
                                      const AttackOptions& options) {
  if (oracle.mode() != EncodeMode::kNonBinary) {
    detail::fail(ErrorCode::kInvalidArgument, "extract_nonbinary needs an accumulator oracle");
  }
  NonBinaryExtraction out;
  out.values = extract_value_mapping(pools, oracle, options);
  out.features = extract_feature_mapping(pools, out.values.level_to_pool, oracle, options);
  return out;
}

const char* to_string(ReconstructionMode mode) noexcept {
  return mode == ReconstructionMode::kRebind ? "rebind" : "retrain";
}

AttackReport run_reasoning_attack(const UnindexedPools& pools, EncodeOracle& oracle,
                                  const AttackOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  AttackReport report;
  report.scenario = "baseline-reasoning";
  report.mode = oracle.mode();
  report.n_features = pools.features.size();
  report.n_levels = pools.values.size();
  report.dim = pools.values.empty() ? 0 : pools.values.front().dim();
  const std::size_t calls_before = oracle.calls();
  auto values = extract_value_mapping(pools, oracle, options);
  auto features = extract_feature_mapping(pools, values.level_to_pool, oracle, options);
  report.value_mapping = std::move(values.level_to_pool);
  report.feature_mapping = std::move(features.feature_to_pool);
  report.guesses_used = features.guesses;
  report.guess_bound = report.n_features * (report.n_features + 1) / 2;
  report.oracle_calls = oracle.calls() - calls_before;
  report.traces = std::move(features.traces);
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Encoder recovered_encoder(const UnindexedPools& pools, std::span<const std::size_t> value_mapping,
                          std::span<const std::size_t> feature_mapping) {
  if (value_mapping.size() != pools.values.size() || feature_mapping.size() != pools.features.size()) {
    detail::fail(ErrorCode::kInvalidArgument, "mapping sizes do not match pool sizes");
  }
  std::vector<Hypervector> features, values;
  features.reserve(feature_mapping.size());
  values.reserve(value_mapping.size());
  for (auto idx : feature_mapping) features.push_back(pools.features.at(idx));
  for (auto idx : value_mapping) values.push_back(pools.values.at(idx));
  return Encoder(std::move(features), std::move(values));
}

Reconstruction reconstruct_model(const UnindexedPools& pools, const AttackReport& report,
                                 const ReconstructionRequest& request, const LabeledSet& held_out,
                                 const Rng& eval_rng) {
  auto encoder = std::make_shared<const Encoder>(
      recovered_encoder(pools, report.value_mapping, report.feature_mapping));
  Reconstruction out;
  if (request.mode == ReconstructionMode::kRebind) {
    if (!request.stolen) detail::fail(ErrorCode::kInvalidArgument, "rebind needs the victim's class vectors");
    const auto& stolen = *request.stolen;
    const bool have = request.encode_mode == EncodeMode::kBinary ? !stolen.hvs.empty() : !stolen.sums.empty();
    if (!have) detail::fail(ErrorCode::kInvalidArgument, "rebind: class vectors for this mode are missing");
    out.model.mode = request.encode_mode;
    out.model.encoder = encoder;
    out.model.class_sums = stolen.sums;
    out.model.class_hvs = stolen.hvs;
    if (request.encode_mode == EncodeMode::kBinary) out.model.class_sums.clear();
    else out.model.class_hvs.clear();
  } else {
    if (request.attacker_data == nullptr) {
      detail::fail(ErrorCode::kInvalidArgument, "retrain needs attacker-held training data");
    }
    out.model = train(*request.attacker_data, encoder, request.encode_mode,
                      Rng(request.train_seed, "retrain"), request.threads);
  }
  out.recovered_accuracy = evaluate(held_out, out.model, eval_rng, request.threads);
  return out;
}

// ---------------------------------------------------------------------------
// HDLock validation

namespace {

// Scores a guessed feature hypervector G against the two crafted responses.
class LockScorer {
 public:
  LockScorer(EncodeOracle& oracle, std::span<const Hypervector> values, std::size_t feature)
      : mode_(oracle.mode()), v1_(values.front()), vm_(values.back()) {
    const std::size_t n = oracle.n_features();
    QuantizedSample low = constant_sample(n, 0);
    QuantizedSample high = low;
    high[feature] = static_cast<std::uint32_t>(values.size() - 1);
    const std::size_t dim = v1_.dim();
    if (mode_ == EncodeMode::kBinary) {
      h1_ = oracle.query_binary(low);
      const Hypervector hm = oracle.query_binary(high);
      const auto a = h1_->words();
      const auto b = hm.words();
      informative_mask_.resize(a.size());
      same_level_.resize(a.size());
      for (std::size_t w = 0; w < a.size(); ++w) {
        informative_mask_[w] = a[w] ^ b[w];
        const std::uint64_t valid = w + 1 == a.size() ? tail_mask(dim) : ~0ULL;
        same_level_[w] = ~(v1_.words()[w] ^ vm_.words()[w]) & valid;
        informative_ += static_cast<std::size_t>(std::popcount(informative_mask_[w]));
      }
    } else {
      const Accumulator a1 = oracle.query_non_binary(low);
      const Accumulator am = oracle.query_non_binary(high);
      for (std::size_t i = 0; i < dim; ++i) {
        const std::int64_t delta = static_cast<std::int64_t>(a1[i]) - am[i];
        if (delta == 0) continue;
        const int level_diff = v1_[i] - vm_[i];
        index_.push_back(i);
        weight_.push_back(delta * level_diff);
        delta_sq_ += delta * delta;
        guess_sq_ += static_cast<std::int64_t>(level_diff) * level_diff;
      }
      informative_ = index_.size();
    }
    if (informative_ == 0) {
      detail::fail(ErrorCode::kDegenerate,
                   "lock validation: the two crafted encodings are identical (empty index set)");
    }
  }

  [[nodiscard]] std::size_t informative() const noexcept { return informative_; }
  [[nodiscard]] bool lower_is_better() const noexcept { return mode_ == EncodeMode::kBinary; }

  [[nodiscard]] double score(const Hypervector& guess) const {
    const auto g = guess.words();
    if (mode_ == EncodeMode::kBinary) {
      const auto h = h1_->words();
      const auto v = v1_.words();
      std::size_t mismatch = 0;
      for (std::size_t w = 0; w < g.size(); ++w) {
        const std::uint64_t attack = ~(v[w] ^ g[w]);  // sign((v1 - vM) * G) where v1 != vM
        mismatch += static_cast<std::size_t>(
            std::popcount(informative_mask_[w] & (same_level_[w] | (h[w] ^ attack))));
      }
      return static_cast<double>(mismatch) / static_cast<double>(informative_);
    }
    std::int64_t ab = 0;
    for (std::size_t k = 0; k < index_.size(); ++k) ab += weight_[k] * bit_sign(g, index_[k]);
    return cosine_from_sums(ab, delta_sq_, guess_sq_);
  }

 private:
  EncodeMode mode_;
  const Hypervector& v1_;
  const Hypervector& vm_;
  std::size_t informative_ = 0;
  // binary
  std::optional<Hypervector> h1_;
  std::vector<std::uint64_t> informative_mask_, same_level_;
  // non-binary
  std::vector<std::size_t> index_;
  std::vector<std::int64_t> weight_;
  std::int64_t delta_sq_ = 0, guess_sq_ = 0;
};

void check_lock_inputs(const EncodeOracle& oracle, const BasePool& pool,
                       std::span<const Hypervector> values, std::size_t feature) {
  if (values.size() < 2 || values.size() != oracle.n_levels()) {
    detail::fail(ErrorCode::kInvalidArgument, "lock validation needs the oracle's M >= 2 value hypervectors");
  }
  if (feature >= oracle.n_features()) detail::fail(ErrorCode::kOutOfRange, "target feature out of range");
  if (pool.size() == 0 || pool.dim != values.front().dim()) {
    detail::fail(ErrorCode::kDimensionMismatch, "base pool does not match value hypervectors");
  }
}

}  // namespace

std::string parameter_name(std::size_t feature, const SweptParameter& swept) {
  const std::string sub = "{" + std::to_string(feature + 1) + "," + std::to_string(swept.layer + 1) + "}";
  return swept.kind == LockParameterKind::kRotation ? "k_" + sub : "index(B_" + sub + ")";
}

GuessTrace lock_validation_attack(EncodeOracle& locked_oracle, const BasePool& pool,
                                  std::span<const Hypervector> values, const LockKey& true_key,
                                  std::size_t feature, const SweptParameter& swept) {
  check_lock_inputs(locked_oracle, pool, values, feature);
  require_valid_key(true_key, pool);
  if (true_key.n_features() != locked_oracle.n_features()) {
    detail::fail(ErrorCode::kDimensionMismatch, "key feature count differs from the oracle's N");
  }
  if (swept.layer >= true_key.layers()) detail::fail(ErrorCode::kOutOfRange, "swept layer out of range");

  const std::size_t calls_before = locked_oracle.calls();
  const LockScorer scorer(locked_oracle, values, feature);
  const auto sub = true_key.sub_key(feature);

  // Product of the layers held at their true values.
  Hypervector fixed = Hypervector::ones(pool.dim);
  for (std::size_t l = 0; l < sub.size(); ++l) {
    if (l != swept.layer) fixed = multiply(fixed, rotate(pool.bases[sub[l].base], sub[l].rotation));
  }

  GuessTrace trace;
  trace.swept = swept;
  trace.feature = feature;
  trace.mode = locked_oracle.mode();
  trace.informative = scorer.informative();
  const KeyEntry truth = sub[swept.layer];
  const bool rotation = swept.kind == LockParameterKind::kRotation;
  const std::size_t count = rotation ? pool.dim : pool.size();
  trace.correct_position = rotation ? truth.rotation : truth.base;
  trace.scores.resize(count);
  for (std::size_t v = 0; v < count; ++v) {
    const std::size_t base = rotation ? truth.base : v;
    const std::size_t rot = rotation ? v : truth.rotation;
    trace.scores[v] = scorer.score(multiply(fixed, rotate(pool.bases[base], rot)));
  }

  const bool lower = scorer.lower_is_better();
  std::size_t best = 0;
  for (std::size_t v = 1; v < count; ++v) {
    if (lower ? trace.scores[v] < trace.scores[best] : trace.scores[v] > trace.scores[best]) best = v;
  }
  trace.best_position = best;
  trace.strict_optimum =
      best == trace.correct_position &&
      std::count(trace.scores.begin(), trace.scores.end(), trace.scores[best]) == 1;
  trace.oracle_calls = locked_oracle.calls() - calls_before;
  return trace;
}

ExhaustiveResult lock_exhaustive_attack(EncodeOracle& locked_oracle, const BasePool& pool,
                                        std::span<const Hypervector> values, std::size_t layers,
                                        std::size_t feature, std::uint64_t guess_budget) {
  check_lock_inputs(locked_oracle, pool, values, feature);
  if (layers == 0) detail::fail(ErrorCode::kInvalidArgument, "layers must be >= 1");
  const BigInt needed = per_feature_guesses(pool.dim, pool.size(), layers);
  if (needed > guess_budget) {
    detail::fail(ErrorCode::kBudgetExceeded, "exhaustive lock search needs " + needed.str() +
                                                 " guesses, budget is " + std::to_string(guess_budget));
  }
  const std::size_t calls_before = locked_oracle.calls();
  const LockScorer scorer(locked_oracle, values, feature);
  const std::size_t choices = pool.dim * pool.size();

  std::vector<Hypervector> rotated;
  rotated.reserve(choices);
  for (std::size_t b = 0; b < pool.size(); ++b) {
    for (std::size_t r = 0; r < pool.dim; ++r) rotated.push_back(rotate(pool.bases[b], r));
  }

  ExhaustiveResult out;
  const bool lower = scorer.lower_is_better();
  out.best_score = lower ? 2.0 : -2.0;
  std::vector<std::size_t> digits(layers, 0);
  for (;;) {
    Hypervector guess = rotated[digits[0]];
    for (std::size_t l = 1; l < layers; ++l) guess = multiply(guess, rotated[digits[l]]);
    const double s = scorer.score(guess);
    ++out.guesses;
    std::vector<KeyEntry> sub_key(layers);
    for (std::size_t l = 0; l < layers; ++l) {
      sub_key[l] = {static_cast<std::uint32_t>(digits[l] / pool.dim),
                    static_cast<std::uint32_t>(digits[l] % pool.dim)};
    }
    if (lower ? s < out.best_score : s > out.best_score) {
      out.best_score = s;
      out.optimal_sub_keys.clear();
    }
    if (s == out.best_score) out.optimal_sub_keys.push_back(std::move(sub_key));

    std::size_t l = 0;
    while (l < layers && ++digits[l] == choices) digits[l++] = 0;
    if (l == layers) break;
  }
  out.oracle_calls = locked_oracle.calls() - calls_before;
  return out;
}

}  // namespace hdlock
