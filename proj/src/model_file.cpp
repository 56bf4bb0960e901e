#include "hdlock/model_file.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include "hdlock/binary_io.hpp"
#include "hdlock/error.hpp"

namespace hdlock {

namespace {

constexpr std::uint8_t kFlagLocked = 1U << 0;
constexpr std::uint8_t kFlagStripped = 1U << 1;

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.uniform(i)]);
  return idx;
}

void check_counts(const ModelFile& m) {
  const std::size_t region = m.locked ? m.pool_size : m.n_features;
  const std::size_t classes =
      m.mode == EncodeMode::kBinary ? m.class_hvs.size() : m.class_sums.size();
  if (m.values.size() != m.n_levels || m.features.size() != region || classes != m.n_classes) {
    detail::fail(ErrorCode::kFormat, "model file: vector counts disagree with header");
  }
  if (m.locked != (m.layers != 0)) detail::fail(ErrorCode::kFormat, "model file: lock fields inconsistent");
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const ModelFile& m) {
  check_counts(m);
  io::ByteWriter w;
  w.bytes("HDLM");
  w.u16(kModelFileVersion);
  w.u8(static_cast<std::uint8_t>(m.mode));
  w.u8(static_cast<std::uint8_t>((m.locked ? kFlagLocked : 0) | (m.stripped ? kFlagStripped : 0)));
  for (auto v : {m.dim, m.n_features, m.n_levels, m.n_classes, m.pool_size, m.layers}) w.u32(v);
  w.u64(m.seed);
  for (const auto& hv : m.values) w.hypervector(hv);
  for (const auto& hv : m.features) w.hypervector(hv);
  if (m.mode == EncodeMode::kBinary) {
    for (const auto& hv : m.class_hvs) w.hypervector(hv);
  } else {
    for (const auto& acc : m.class_sums) {
      if (acc.dim() != m.dim) detail::fail(ErrorCode::kDimensionMismatch, "class accumulator dimension");
      for (auto e : acc.elements()) w.i32(e);
    }
  }
  w.crc_trailer();
  return w.release();
}

ModelFile deserialize_model(std::span<const std::uint8_t> bytes) {
  const auto payload = io::verify_crc_trailer(bytes, "model file");
  io::ByteReader r(payload, "model file");
  if (r.bytes(4) != "HDLM") detail::fail(ErrorCode::kFormat, "model file: bad magic (expected HDLM)");
  const auto version = r.u16();
  if (version != kModelFileVersion) {
    detail::fail(ErrorCode::kFormat, "model file: unsupported version " + std::to_string(version));
  }
  ModelFile m;
  const auto mode = r.u8();
  if (mode > 1) detail::fail(ErrorCode::kFormat, "model file: unknown mode byte");
  m.mode = static_cast<EncodeMode>(mode);
  const auto flags = r.u8();
  if ((flags & ~(kFlagLocked | kFlagStripped)) != 0) detail::fail(ErrorCode::kFormat, "model file: unknown flags");
  m.locked = (flags & kFlagLocked) != 0;
  m.stripped = (flags & kFlagStripped) != 0;
  m.dim = r.u32();
  m.n_features = r.u32();
  m.n_levels = r.u32();
  m.n_classes = r.u32();
  m.pool_size = r.u32();
  m.layers = r.u32();
  m.seed = r.u64();
  if (m.dim == 0 || m.n_levels == 0 || m.n_features == 0) {
    detail::fail(ErrorCode::kFormat, "model file: zero D, N or M");
  }
  if (m.locked != (m.layers != 0) || (!m.locked && m.pool_size != 0)) {
    detail::fail(ErrorCode::kFormat, "model file: lock fields inconsistent with flags");
  }
  // Reject absurd headers before allocating.
  const std::size_t words = word_count(m.dim) * 8;
  const std::size_t region = m.locked ? m.pool_size : m.n_features;
  const std::size_t class_bytes = m.mode == EncodeMode::kBinary ? words : std::size_t{m.dim} * 4;
  if ((std::size_t{m.n_levels} + region) * words + std::size_t{m.n_classes} * class_bytes != r.remaining()) {
    detail::fail(ErrorCode::kFormat, "model file: payload size does not match header");
  }
  for (std::uint32_t i = 0; i < m.n_levels; ++i) m.values.push_back(r.hypervector(m.dim));
  for (std::size_t i = 0; i < region; ++i) m.features.push_back(r.hypervector(m.dim));
  for (std::uint32_t c = 0; c < m.n_classes; ++c) {
    if (m.mode == EncodeMode::kBinary) {
      m.class_hvs.push_back(r.hypervector(m.dim));
    } else {
      std::vector<std::int32_t> e(m.dim);
      std::size_t bound = 0;
      for (auto& x : e) {
        x = r.i32();
        bound = std::max<std::size_t>(bound, static_cast<std::size_t>(std::abs(static_cast<long long>(x))));
      }
      m.class_sums.emplace_back(std::move(e), bound);
    }
  }
  r.expect_end();
  return m;
}

ModelFile to_model_file(const TrainedModel& model, std::uint64_t seed) {
  if (!model.encoder) detail::fail(ErrorCode::kInvalidArgument, "model has no encoder");
  const Encoder& enc = *model.encoder;
  ModelFile m;
  m.mode = model.mode;
  m.dim = static_cast<std::uint32_t>(enc.dim());
  m.n_features = static_cast<std::uint32_t>(enc.n_features());
  m.n_levels = static_cast<std::uint32_t>(enc.n_levels());
  m.n_classes = static_cast<std::uint32_t>(model.class_count());
  m.seed = seed;
  m.values.assign(enc.values().begin(), enc.values().end());
  if (enc.is_locked()) {
    const auto& lock = *enc.lock();
    m.locked = true;
    m.pool_size = static_cast<std::uint32_t>(lock.pool.size());
    m.layers = static_cast<std::uint32_t>(lock.key.layers());
    m.features = lock.pool.bases;
  } else {
    m.features.assign(enc.features().begin(), enc.features().end());
  }
  m.class_sums = model.mode == EncodeMode::kBinary ? std::vector<Accumulator>{} : model.class_sums;
  m.class_hvs = model.mode == EncodeMode::kBinary ? model.class_hvs : std::vector<Hypervector>{};
  return m;
}

TrainedModel from_model_file(const ModelFile& file, const LockKey* key) {
  if (file.stripped) {
    detail::fail(ErrorCode::kInvalidArgument, "stripped model files carry no index order; cannot rebuild");
  }
  TrainedModel model;
  model.mode = file.mode;
  if (file.locked) {
    if (key == nullptr) detail::fail(ErrorCode::kKeyValidation, "locked model needs its key");
    if (key->layers() != file.layers || key->n_features() != file.n_features) {
      detail::fail(ErrorCode::kKeyValidation, "key shape (N, L) does not match the model file");
    }
    BasePool pool{file.dim, file.seed, file.features};
    model.encoder = std::make_shared<const Encoder>(Encoder::locked(std::move(pool), *key, file.values));
  } else {
    model.encoder = std::make_shared<const Encoder>(file.features, file.values);
  }
  model.class_sums = file.class_sums;
  model.class_hvs = file.class_hvs;
  return model;
}

StrippedModel strip_model(const ModelFile& model, std::uint64_t shuffle_seed) {
  if (model.locked) detail::fail(ErrorCode::kInvalidArgument, "strip applies to unlocked models only");
  if (model.stripped) detail::fail(ErrorCode::kInvalidArgument, "model is already stripped");
  const Rng rng(shuffle_seed, "strip");
  Rng val_rng = rng.fork("val");
  Rng fea_rng = rng.fork("fea");
  // stored[k] = original[order[k]]
  const auto val_order = shuffled_indices(model.values.size(), val_rng);
  const auto fea_order = shuffled_indices(model.features.size(), fea_rng);

  StrippedModel out;
  out.model = model;
  out.model.stripped = true;
  out.shuffle_seed = shuffle_seed;
  out.value_mapping.resize(val_order.size());
  out.feature_mapping.resize(fea_order.size());
  for (std::size_t k = 0; k < val_order.size(); ++k) {
    out.model.values[k] = model.values[val_order[k]];
    out.value_mapping[val_order[k]] = k;
  }
  for (std::size_t k = 0; k < fea_order.size(); ++k) {
    out.model.features[k] = model.features[fea_order[k]];
    out.feature_mapping[fea_order[k]] = k;
  }
  return out;
}

}  // namespace hdlock
