#pragma once

// Bit-exact model file ("HDLM"). Layout, all little-endian:
//   magic "HDLM", version u16, mode u8, flags u8 (bit 0 locked, bit 1 stripped)
//   D N M C P L as u32 (P = L = 0 when unlocked), seed u64
//   M value vectors, then N feature vectors (or P base vectors when locked)
//   C class vectors (i32 elements non-binary, packed words binary)
//   CRC-32C of everything above
// The lock key is never part of this file.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hdlock/encoder.hpp"
#include "hdlock/hypervector.hpp"
#include "hdlock/keylock.hpp"
#include "hdlock/model.hpp"

namespace hdlock {

inline constexpr std::uint16_t kModelFileVersion = 1;

struct ModelFile {
  EncodeMode mode = EncodeMode::kNonBinary;
  bool locked = false;
  // Value and feature vectors were shuffled; indices are withheld.
  bool stripped = false;
  std::uint32_t dim = 0;
  std::uint32_t n_features = 0;
  std::uint32_t n_levels = 0;
  std::uint32_t n_classes = 0;
  std::uint32_t pool_size = 0;
  std::uint32_t layers = 0;
  std::uint64_t seed = 0;
  std::vector<Hypervector> values;
  // Feature vectors when unlocked, base pool when locked.
  std::vector<Hypervector> features;
  std::vector<Accumulator> class_sums;
  std::vector<Hypervector> class_hvs;
};

std::vector<std::uint8_t> serialize_model(const ModelFile& model);
ModelFile deserialize_model(std::span<const std::uint8_t> bytes);

// Captures a trained model. Locked encoders store their base pool and record
// P and L; the key itself stays out.
ModelFile to_model_file(const TrainedModel& model, std::uint64_t seed);

// Rebuilds a usable model. A locked file needs the key; a stripped one is
// refused because its indices are gone.
TrainedModel from_model_file(const ModelFile& file, const LockKey* key = nullptr);

struct StrippedModel {
  ModelFile model;
  // Ground truth for scoring only: stored value vector value_mapping[l] is
  // level l, stored feature vector feature_mapping[i] is feature i.
  std::vector<std::size_t> value_mapping;
  std::vector<std::size_t> feature_mapping;
  std::uint64_t shuffle_seed = 0;
};

// Shuffles value and feature order with Rng(shuffle_seed, "strip").
StrippedModel strip_model(const ModelFile& model, std::uint64_t shuffle_seed);

}  // namespace hdlock
