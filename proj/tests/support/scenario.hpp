#pragma once

// Seeded victim setups shared by the unit and acceptance tests.

#include <cstddef>
#include <cstdint>
#include <memory>

#include "hdlock/attack.hpp"
#include "hdlock/dataset.hpp"
#include "hdlock/item_memory.hpp"
#include "hdlock/model.hpp"
#include "hdlock/model_file.hpp"

namespace hdlock::testing {

struct VictimConfig {
  std::size_t n_features = 128;
  std::size_t dim = 4096;
  std::size_t levels = 8;
  std::size_t classes = 4;
  std::size_t train_per_class = 200;
  std::size_t test_per_class = 50;
  double noise = 0.2;
  EncodeMode mode = EncodeMode::kBinary;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
};

struct Victim {
  VictimConfig config;
  SyntheticDataset synthetic;
  LabeledSet train;
  LabeledSet test;
  // Same distribution, independent draws; held by the attacker for retraining.
  LabeledSet attacker;
  ItemMemory memory;
  std::shared_ptr<const Encoder> encoder;
  TrainedModel model;
  double accuracy = 0.0;
  // What the attacker sees: the stripped model file's pools.
  StrippedModel stripped;
  UnindexedPools pools;
};

inline Rng eval_rng(const VictimConfig& cfg) { return Rng(cfg.seed, "eval"); }

inline Victim make_victim(const VictimConfig& cfg) {
  Victim v;
  v.config = cfg;
  const Rng root(cfg.seed, "scenario");
  Rng data_rng = root.fork("data");
  v.synthetic = generate_synthetic(cfg.n_features, cfg.classes, cfg.train_per_class, cfg.noise,
                                   cfg.levels, data_rng);
  Rng test_rng = root.fork("test");
  Rng attacker_rng = root.fork("attacker");
  const Dataset test = sample_prototypes(v.synthetic.prototypes, cfg.test_per_class, cfg.noise,
                                         cfg.levels, test_rng);
  const Dataset attacker = sample_prototypes(v.synthetic.prototypes, cfg.train_per_class, cfg.noise,
                                             cfg.levels, attacker_rng);
  const auto& d = v.synthetic.data;
  v.train = quantize_dataset(d, cfg.levels);
  v.test = quantize_dataset(test, cfg.levels, d.v_min, d.v_max);
  v.attacker = quantize_dataset(attacker, cfg.levels, d.v_min, d.v_max);

  v.memory = ItemMemory::generate(cfg.n_features, cfg.levels, cfg.dim, cfg.seed);
  v.encoder = std::make_shared<const Encoder>(v.memory);
  v.model = train(v.train, v.encoder, cfg.mode, root.fork("train"), cfg.threads);
  v.accuracy = evaluate(v.test, v.model, eval_rng(cfg), cfg.threads);

  const ModelFile file = deserialize_model(serialize_model(to_model_file(v.model, cfg.seed)));
  v.stripped = strip_model(file, cfg.seed ^ 0x5EEDULL);
  v.pools.features = v.stripped.model.features;
  v.pools.values = v.stripped.model.values;
  return v;
}

inline EncodeOracle victim_oracle(const Victim& v) {
  return make_victim_oracle(v.encoder, v.config.mode, Rng(v.config.seed, "oracle"));
}

inline StolenClasses stolen_classes(const Victim& v) {
  return StolenClasses{v.stripped.model.class_sums, v.stripped.model.class_hvs};
}

}  // namespace hdlock::testing
