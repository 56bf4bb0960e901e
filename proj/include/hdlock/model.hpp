#pragma once

// Single-pass HDC classifier. Non-binary models keep integer class sums and
// score with cosine; binary models sum binarized encodings, binarize each
// class, and score with Hamming distance. Ties go to the lowest class index.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "hdlock/encoder.hpp"
#include "hdlock/hypervector.hpp"
#include "hdlock/item_memory.hpp"
#include "hdlock/rng.hpp"

namespace hdlock {

struct LabeledSet {
  std::vector<QuantizedSample> samples;
  std::vector<std::uint32_t> labels;

  [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
};

struct TrainedModel {
  EncodeMode mode = EncodeMode::kNonBinary;
  std::shared_ptr<const Encoder> encoder;
  std::vector<Accumulator> class_sums;   // non-binary
  std::vector<Hypervector> class_hvs;    // binary

  [[nodiscard]] std::size_t class_count() const noexcept {
    return mode == EncodeMode::kBinary ? class_hvs.size() : class_sums.size();
  }
};

// Tie-break streams: sample j uses rng.fork("sample").fork(j), class c uses
// rng.fork("class").fork(c). threads == 0 uses all hardware threads.
TrainedModel train(const LabeledSet& data, std::shared_ptr<const Encoder> encoder, EncodeMode mode,
                   const Rng& rng, std::size_t threads = 0);

// Binary queries binarize with `rng` directly.
std::uint32_t infer(const QuantizedSample& query, const TrainedModel& model, const Rng& rng);

// Query q uses rng.fork(q).
std::vector<std::uint32_t> predict(const std::vector<QuantizedSample>& queries,
                                   const TrainedModel& model, const Rng& rng,
                                   std::size_t threads = 0);

double evaluate(const LabeledSet& data, const TrainedModel& model, const Rng& rng,
                std::size_t threads = 0);

// Class count implied by dense labels; throws naming the first empty class.
std::size_t dense_class_count(const std::vector<std::uint32_t>& labels);

}  // namespace hdlock
