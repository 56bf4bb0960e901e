#pragma once

// Reasoning attacks on HDC encoders.
//
// The attacker sees two unindexed pools (feature and value hypervectors in
// unknown order) and an encode oracle that maps crafted samples to encoder
// outputs. It recovers the value order from the pool geometry plus one
// all-minimum query, then the feature order one position at a time by
// predicting the encoding of "feature i at maximum, rest at minimum" for every
// remaining candidate.
//
// For HDLock the same crafted-input idea is used to score guesses of a single
// key parameter while the others are held at their true values.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdlock/encoder.hpp"
#include "hdlock/hypervector.hpp"
#include "hdlock/item_memory.hpp"
#include "hdlock/keylock.hpp"
#include "hdlock/model.hpp"
#include "hdlock/rng.hpp"

namespace hdlock {

// The attacker's only handle on the victim encoder. Counts every query.
class EncodeOracle {
 public:
  using BinaryFn = std::function<Hypervector(const QuantizedSample&)>;
  using NonBinaryFn = std::function<Accumulator(const QuantizedSample&)>;

  static EncodeOracle binary(std::size_t n_features, std::size_t n_levels, BinaryFn fn);
  static EncodeOracle non_binary(std::size_t n_features, std::size_t n_levels, NonBinaryFn fn);

  [[nodiscard]] EncodeMode mode() const noexcept { return mode_; }
  [[nodiscard]] std::size_t n_features() const noexcept { return n_features_; }
  [[nodiscard]] std::size_t n_levels() const noexcept { return n_levels_; }
  [[nodiscard]] std::size_t calls() const noexcept { return calls_; }

  Hypervector query_binary(const QuantizedSample& sample);
  Accumulator query_non_binary(const QuantizedSample& sample);

 private:
  EncodeOracle() = default;

  EncodeMode mode_ = EncodeMode::kBinary;
  std::size_t n_features_ = 0;
  std::size_t n_levels_ = 0;
  std::size_t calls_ = 0;
  BinaryFn binary_;
  NonBinaryFn non_binary_;
};

// Wraps a victim encoder. Binary query number q binarizes with rng.fork(q).
EncodeOracle make_victim_oracle(std::shared_ptr<const Encoder> victim, EncodeMode mode,
                                const Rng& rng);

struct UnindexedPools {
  std::vector<Hypervector> features;
  std::vector<Hypervector> values;
};

// Splits a mixed dump into features and values: value hypervectors have
// neighbours well below 0.5 normalized Hamming distance, features do not.
// Needs at least 3 levels (two levels are mutually orthogonal).
UnindexedPools separate_pools(const std::vector<Hypervector>& mixed);

struct ScoredCandidate {
  std::size_t candidate = 0;
  // Decision score: normalized Hamming on the sensitive index set (binary,
  // lower is better) or cosine (non-binary, higher is better).
  double score = 0.0;
  // Binary only: normalized Hamming distance over all D elements.
  double full_distance = 0.0;
};

struct DecisionTrace {
  std::size_t position = 0;
  std::size_t chosen = 0;
  // Sensitive-set size for binary scans.
  std::size_t informative = 0;
  std::vector<ScoredCandidate> candidates;
};

struct AttackOptions {
  std::uint64_t seed = 0;
  // Feature decisions tie when best and runner-up scores differ by <= this.
  double ambiguity_tolerance = 0.0;
  bool keep_traces = true;
  std::size_t threads = 0;
};

struct ValueExtraction {
  // level_to_pool[level] is the value-pool index recovered for that level.
  std::vector<std::size_t> level_to_pool;
  // Distances from the level-0 estimate to the two endpoint candidates.
  double estimate_distance_low = 0.0;
  double estimate_distance_high = 0.0;
  std::size_t oracle_calls = 0;
};

struct FeatureExtraction {
  // feature_to_pool[i] is the feature-pool index recovered for feature i.
  std::vector<std::size_t> feature_to_pool;
  std::size_t guesses = 0;
  std::size_t oracle_calls = 0;
  std::vector<DecisionTrace> traces;
};

// Endpoints are the farthest value pair; the all-minimum query tells which
// endpoint is level 0; the rest are ordered by distance from level 0.
ValueExtraction extract_value_mapping(const UnindexedPools& pools, EncodeOracle& oracle,
                                      const AttackOptions& options = {});

// One oracle query per feature position; scores every unassigned candidate
// and assigns the best. Works for both oracle modes.
FeatureExtraction extract_feature_mapping(const UnindexedPools& pools,
                                          std::span<const std::size_t> level_to_pool,
                                          EncodeOracle& oracle, const AttackOptions& options = {});

// Scores candidates for a single feature position without assigning
// anything (used for separation studies). Costs one oracle query.
DecisionTrace scan_feature_position(const UnindexedPools& pools,
                                    std::span<const std::size_t> level_to_pool,
                                    EncodeOracle& oracle, std::size_t position,
                                    const AttackOptions& options = {});

struct NonBinaryExtraction {
  ValueExtraction values;
  FeatureExtraction features;
};

// Both steps against an oracle that returns accumulators.
NonBinaryExtraction extract_nonbinary(const UnindexedPools& pools, EncodeOracle& oracle,
                                      const AttackOptions& options = {});

enum class ReconstructionMode { kRebind, kRetrain };
const char* to_string(ReconstructionMode mode) noexcept;

struct AttackReport {
  std::string scenario;
  EncodeMode mode = EncodeMode::kBinary;
  std::size_t n_features = 0;
  std::size_t n_levels = 0;
  std::size_t dim = 0;
  std::vector<std::size_t> value_mapping;
  std::vector<std::size_t> feature_mapping;
  std::size_t guesses_used = 0;
  std::size_t guess_bound = 0;  // N(N+1)/2
  std::size_t oracle_calls = 0;
  std::vector<DecisionTrace> traces;
  double elapsed_seconds = 0.0;
  std::optional<ReconstructionMode> reconstruction_mode;
  std::optional<double> original_accuracy;
  std::optional<double> recovered_accuracy;
};

// Value then feature extraction, dispatching on the oracle mode.
AttackReport run_reasoning_attack(const UnindexedPools& pools, EncodeOracle& oracle,
                                  const AttackOptions& options = {});

// Item memory with pool vectors placed at their recovered indices.
Encoder recovered_encoder(const UnindexedPools& pools, std::span<const std::size_t> value_mapping,
                          std::span<const std::size_t> feature_mapping);

struct StolenClasses {
  std::vector<Accumulator> sums;  // non-binary victim
  std::vector<Hypervector> hvs;   // binary victim
};

struct ReconstructionRequest {
  ReconstructionMode mode = ReconstructionMode::kRebind;
  EncodeMode encode_mode = EncodeMode::kBinary;
  std::optional<StolenClasses> stolen;         // rebind
  const LabeledSet* attacker_data = nullptr;   // retrain
  std::uint64_t train_seed = 0;
  std::size_t threads = 0;
};

struct Reconstruction {
  TrainedModel model;
  double recovered_accuracy = 0.0;
};

// Builds a model from recovered mappings and evaluates it on held_out with
// eval_rng (the same stream the victim was evaluated with).
Reconstruction reconstruct_model(const UnindexedPools& pools, const AttackReport& report,
                                 const ReconstructionRequest& request, const LabeledSet& held_out,
                                 const Rng& eval_rng);

// ---------------------------------------------------------------------------
// HDLock validation

enum class LockParameterKind { kRotation, kBaseIndex };

struct SweptParameter {
  std::size_t layer = 0;
  LockParameterKind kind = LockParameterKind::kRotation;
};

// "k_{1,2}" / "index(B_{1,2})" style name (1-based feature and layer).
std::string parameter_name(std::size_t feature, const SweptParameter& swept);

struct GuessTrace {
  SweptParameter swept;
  std::size_t feature = 0;
  EncodeMode mode = EncodeMode::kBinary;
  // scores[v] is the score for candidate value v (rotation or base index).
  // Binary: mismatch fraction on the informative set (lower is better).
  // Non-binary: cosine on the informative set (higher is better).
  std::vector<double> scores;
  std::size_t correct_position = 0;
  std::size_t best_position = 0;
  std::size_t informative = 0;
  std::size_t oracle_calls = 0;
  // True value is the unique optimum.
  bool strict_optimum = false;
};

// Sweeps one key parameter of `feature`, holding the others at the true key.
// Queries: all-minimum sample, then the same with `feature` at maximum.
// `values` are level-ordered value hypervectors (known to the attacker).
GuessTrace lock_validation_attack(EncodeOracle& locked_oracle, const BasePool& pool,
                                  std::span<const Hypervector> values, const LockKey& true_key,
                                  std::size_t feature, const SweptParameter& swept);

struct ExhaustiveResult {
  std::vector<std::vector<KeyEntry>> optimal_sub_keys;
  double best_score = 0.0;
  std::size_t guesses = 0;
  std::size_t oracle_calls = 0;
};

// Tries every L-tuple of (base, rotation) for one feature: (D*P)^L guesses.
// Throws kBudgetExceeded before any work when that exceeds guess_budget.
ExhaustiveResult lock_exhaustive_attack(EncodeOracle& locked_oracle, const BasePool& pool,
                                        std::span<const Hypervector> values, std::size_t layers,
                                        std::size_t feature, std::uint64_t guess_budget);

}  // namespace hdlock
