// hdlock command-line tool.
//
// Every command reads one config file plus overrides, writes its outputs
// atomically, and embeds provenance (seed, config hash, versions). Failures
// print an error JSON on stderr and exit with:
//   2 config, 3 data, 4 ambiguity, 5 budget exceeded, 1 anything else.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "hdlock/attack.hpp"
#include "hdlock/binary_io.hpp"
#include "hdlock/dataset.hpp"
#include "hdlock/encoder.hpp"
#include "hdlock/error.hpp"
#include "hdlock/item_memory.hpp"
#include "hdlock/keylock.hpp"
#include "hdlock/model.hpp"
#include "hdlock/model_file.hpp"
#include "hdlock/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace hdlock::cli {
namespace {

struct Context {
  Config config;
  RunConfig run;
  std::string command;
};

json provenance(const Context& ctx) {
  return json{{"schema_version", kSchemaVersion},
              {"command", ctx.command},
              {"seed", ctx.run.seed},
              {"config_hash", ctx.config.hash()},
              {"versions",
               {{"hdlock", kVersion}, {"model_file", kModelFileVersion}, {"key_file", kKeyFileVersion}}}};
}

void write_json(const fs::path& path, const json& doc) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  io::write_file_atomic(path, doc.dump(2) + "\n");
}

fs::path sidecar(const fs::path& path, const std::string& suffix) {
  return fs::path(path.string() + suffix);
}

// "images,labels" selects the IDX loader; anything else is CSV.
Dataset load_data(const std::string& source, const RunConfig& run) {
  const auto comma = source.find(',');
  if (comma != std::string::npos) return load_idx(source.substr(0, comma), source.substr(comma + 1));
  return load_csv(source, CsvOptions{run.label_column, run.header});
}

struct ModelMeta {
  double v_min = 0.0;
  double v_max = 1.0;
  std::vector<std::string> label_names;
};

ModelMeta read_meta(const fs::path& model_path) {
  const fs::path path = sidecar(model_path, ".json");
  if (!fs::exists(path)) {
    detail::fail(ErrorCode::kData, "missing model sidecar " + path.string() + " (quantization range)");
  }
  const auto bytes = io::read_file(path);
  const json doc = json::parse(bytes.begin(), bytes.end());
  ModelMeta m;
  m.v_min = doc.at("v_min").get<double>();
  m.v_max = doc.at("v_max").get<double>();
  m.label_names = doc.at("label_names").get<std::vector<std::string>>();
  return m;
}

void write_meta(const fs::path& model_path, const Context& ctx, const ModelFile& file, const ModelMeta& meta,
                const json& extra = json::object()) {
  json doc = provenance(ctx);
  doc["mode"] = to_string(file.mode);
  doc["locked"] = file.locked;
  doc["stripped"] = file.stripped;
  doc["dim"] = file.dim;
  doc["n_features"] = file.n_features;
  doc["levels"] = file.n_levels;
  doc["classes"] = file.n_classes;
  doc["v_min"] = meta.v_min;
  doc["v_max"] = meta.v_max;
  doc["label_names"] = meta.label_names;
  for (const auto& [k, v] : extra.items()) doc[k] = v;
  write_json(sidecar(model_path, ".json"), doc);
}

ModelFile read_model(const fs::path& path) { return deserialize_model(io::read_file(path)); }

LockKey read_key(const fs::path& path) { return deserialize_key(io::read_file(path)); }

// ----------------------------------------------------------------------------

void cmd_gen_data(Context& ctx, const fs::path& out_dir) {
  const RunConfig& r = ctx.run;
  const Rng root(r.seed, "gen-data");
  Rng train_rng = root.fork("train");
  const SyntheticDataset synth =
      generate_synthetic(r.n_features, r.classes, r.samples_per_class, r.noise, r.levels, train_rng);
  Rng test_rng = root.fork("test");
  Rng attacker_rng = root.fork("attacker");
  const Dataset test = sample_prototypes(synth.prototypes, r.test_per_class, r.noise, r.levels, test_rng);
  const Dataset attacker =
      sample_prototypes(synth.prototypes, r.samples_per_class, r.noise, r.levels, attacker_rng);
  fs::create_directories(out_dir);
  io::write_file_atomic(out_dir / "train.csv", to_csv(synth.data));
  io::write_file_atomic(out_dir / "test.csv", to_csv(test));
  io::write_file_atomic(out_dir / "attacker.csv", to_csv(attacker));
  json doc = provenance(ctx);
  doc["name"] = synth.data.name;
  doc["n_features"] = r.n_features;
  doc["classes"] = r.classes;
  doc["grid_levels"] = synth.grid_levels;
  doc["noise"] = synth.noise;
  doc["v_min"] = synth.data.v_min;
  doc["v_max"] = synth.data.v_max;
  doc["counts"] = {{"train", synth.data.size()}, {"test", test.size()}, {"attacker", attacker.size()}};
  doc["separation"] = prototype_separation(synth.prototypes, synth.grid_levels, r.levels);
  doc["prototypes"] = synth.prototypes;
  write_json(out_dir / "dataset.json", doc);
  std::cout << "wrote " << (out_dir / "train.csv").string() << ", test.csv, attacker.csv, dataset.json\n";
}

void cmd_train(Context& ctx, const std::string& data_spec, const std::string& test_spec,
               const std::string& key_path, const fs::path& out) {
  const RunConfig& r = ctx.run;
  const Dataset data = load_data(data_spec, r);
  const LabeledSet train_set = quantize_dataset(data, r.levels);
  const ItemMemory memory = ItemMemory::generate(data.n_features, r.levels, r.dim, r.seed);
  std::shared_ptr<const Encoder> encoder;
  if (r.locked()) {
    if (key_path.empty()) detail::fail(ErrorCode::kConfig, "locked config (lock.layers > 0) needs --key");
    const LockKey key = read_key(key_path);
    if (key.n_features() != data.n_features || key.layers() != r.layers || key.pool_size() != r.pool_size ||
        key.dim() != r.dim) {
      detail::fail(ErrorCode::kConfig, "key shape (N, L, P, D) does not match the data and config");
    }
    encoder = std::make_shared<const Encoder>(
        Encoder::locked(BasePool::generate(r.pool_size, r.dim, r.seed), key, memory.val));
  } else {
    if (!key_path.empty()) detail::fail(ErrorCode::kConfig, "--key given but config is unlocked (lock.layers = 0)");
    encoder = std::make_shared<const Encoder>(memory);
  }
  const TrainedModel model = train(train_set, encoder, r.mode, Rng(r.seed, "train"), r.threads);
  const ModelFile file = to_model_file(model, r.seed);
  io::write_file_atomic(out, serialize_model(file));
  write_meta(out, ctx, file, ModelMeta{data.v_min, data.v_max, data.label_names});

  json metrics = provenance(ctx);
  metrics["train_samples"] = data.size();
  metrics["train_accuracy"] = evaluate(train_set, model, Rng(r.seed, "eval"), r.threads);
  if (!test_spec.empty()) {
    const Dataset test = load_data(test_spec, r);
    const LabeledSet test_set = quantize_dataset(test, r.levels, data.v_min, data.v_max);
    metrics["test_samples"] = test.size();
    metrics["test_accuracy"] = evaluate(test_set, model, Rng(r.seed, "eval"), r.threads);
  }
  write_json(sidecar(out, ".metrics.json"), metrics);
  std::cout << metrics.dump(2) << "\n";
}

void cmd_infer(Context& ctx, const fs::path& model_path, const std::string& data_spec,
               const std::string& key_path, const fs::path& out) {
  const RunConfig& r = ctx.run;
  const ModelFile file = read_model(model_path);
  const ModelMeta meta = read_meta(model_path);
  std::optional<LockKey> key;
  if (file.locked) {
    if (key_path.empty()) detail::fail(ErrorCode::kConfig, "locked model needs --key");
    key = read_key(key_path);
  }
  const TrainedModel model = from_model_file(file, key ? &*key : nullptr);
  const Dataset data = load_data(data_spec, r);
  const LabeledSet queries = quantize_dataset(data, file.n_levels, meta.v_min, meta.v_max);
  const auto predicted = predict(queries.samples, model, Rng(r.seed, "infer"), r.threads);
  json doc = provenance(ctx);
  doc["model"] = model_path.filename().string();
  doc["predictions"] = predicted;
  std::vector<std::string> names;
  for (auto p : predicted) names.push_back(p < meta.label_names.size() ? meta.label_names[p] : std::to_string(p));
  doc["predicted_labels"] = names;
  // Query labels are re-indexed per file; compare by original label text.
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) correct += names[i] == data.label_names[data.labels[i]];
  doc["accuracy"] = predicted.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(predicted.size());
  write_json(out, doc);
  std::cout << "accuracy " << doc["accuracy"].get<double>() << " on " << predicted.size() << " queries\n";
}

void cmd_strip(Context& ctx, const fs::path& model_path, const fs::path& out, const fs::path& truth_path,
               std::uint64_t shuffle_seed) {
  const ModelFile file = read_model(model_path);
  const ModelMeta meta = read_meta(model_path);
  const StrippedModel stripped = strip_model(file, shuffle_seed);
  io::write_file_atomic(out, serialize_model(stripped.model));
  write_meta(out, ctx, stripped.model, meta);
  json truth = provenance(ctx);
  truth["shuffle_seed"] = shuffle_seed;
  truth["value_mapping"] = stripped.value_mapping;
  truth["feature_mapping"] = stripped.feature_mapping;
  write_json(truth_path, truth);
  std::cout << "wrote " << out.string() << " and " << truth_path.string() << "\n";
}

json traces_json(const std::vector<DecisionTrace>& traces, EncodeMode mode, std::size_t cap, bool& elided) {
  std::size_t total = 0;
  for (const auto& t : traces) total += t.candidates.size();
  elided = total > cap;
  json out = json::array();
  if (elided) return out;
  for (const auto& t : traces) {
    json cands = json::array();
    for (const auto& c : t.candidates) {
      if (mode == EncodeMode::kBinary) {
        cands.push_back({c.candidate, c.score, c.full_distance});
      } else {
        cands.push_back({c.candidate, c.score});
      }
    }
    out.push_back({{"position", t.position}, {"chosen", t.chosen}, {"informative", t.informative},
                   {"candidates", std::move(cands)}});
  }
  return out;
}

void cmd_attack(Context& ctx, const fs::path& victim_path, const std::string& victim_key, const fs::path& model_path,
                const fs::path& out, const fs::path& truth_path, const std::string& reconstruct,
                const std::string& test_spec, const std::string& attacker_spec) {
  const RunConfig& r = ctx.run;
  // Attacker view: the stripped file only.
  const ModelFile view = read_model(model_path);
  if (!view.stripped) {
    detail::fail(ErrorCode::kConfig, model_path.string() + " still carries index order; run `strip` first");
  }
  UnindexedPools pools{view.features, view.values};

  // Oracle side: the victim's encoder, reachable only through queries.
  const ModelFile victim_file = read_model(victim_path);
  std::optional<LockKey> key;
  if (victim_file.locked) {
    if (victim_key.empty()) detail::fail(ErrorCode::kConfig, "locked victim needs --victim-key for its oracle");
    key = read_key(victim_key);
  }
  const TrainedModel victim = from_model_file(victim_file, key ? &*key : nullptr);
  EncodeOracle oracle = make_victim_oracle(victim.encoder, victim.mode, Rng(r.seed, "oracle"));

  AttackOptions opts;
  opts.seed = r.seed;
  opts.ambiguity_tolerance = r.ambiguity_tolerance;
  opts.threads = r.threads;
  AttackReport report = run_reasoning_attack(pools, oracle, opts);

  json doc = provenance(ctx);
  doc["scenario"] = report.scenario;
  doc["parameters"] = {{"mode", to_string(report.mode)}, {"N", report.n_features}, {"M", report.n_levels},
                       {"D", report.dim}};
  doc["value_mapping"] = report.value_mapping;
  doc["feature_mapping"] = report.feature_mapping;
  doc["guesses_used"] = report.guesses_used;
  doc["guess_bound"] = report.guess_bound;
  doc["oracle_calls"] = report.oracle_calls;

  if (!reconstruct.empty()) {
    if (test_spec.empty()) detail::fail(ErrorCode::kConfig, "--reconstruct needs --test");
    const ModelMeta meta = read_meta(model_path);
    const Dataset test = load_data(test_spec, r);
    const LabeledSet test_set = quantize_dataset(test, view.n_levels, meta.v_min, meta.v_max);
    const Rng eval(r.seed, "eval");
    report.original_accuracy = evaluate(test_set, victim, eval, r.threads);
    ReconstructionRequest req;
    req.encode_mode = view.mode;
    req.threads = r.threads;
    LabeledSet attacker_set;
    if (reconstruct == "rebind") {
      req.mode = ReconstructionMode::kRebind;
      req.stolen = StolenClasses{view.class_sums, view.class_hvs};
    } else if (reconstruct == "retrain") {
      if (attacker_spec.empty()) detail::fail(ErrorCode::kConfig, "retrain needs --attacker-data");
      req.mode = ReconstructionMode::kRetrain;
      attacker_set = quantize_dataset(load_data(attacker_spec, r), view.n_levels, meta.v_min, meta.v_max);
      req.attacker_data = &attacker_set;
      req.train_seed = r.seed;
    } else {
      detail::fail(ErrorCode::kConfig, "--reconstruct must be rebind or retrain");
    }
    report.reconstruction_mode = req.mode;
    report.recovered_accuracy = reconstruct_model(pools, report, req, test_set, eval).recovered_accuracy;
    doc["reconstruction_mode"] = to_string(req.mode);
    doc["original_accuracy"] = *report.original_accuracy;
    doc["recovered_accuracy"] = *report.recovered_accuracy;
  }
  if (!truth_path.empty()) {
    const auto bytes = io::read_file(truth_path);
    const json truth = json::parse(bytes.begin(), bytes.end());
    const auto tv = truth.at("value_mapping").get<std::vector<std::size_t>>();
    const auto tf = truth.at("feature_mapping").get<std::vector<std::size_t>>();
    std::size_t correct = 0;
    for (std::size_t i = 0; i < tf.size() && i < report.feature_mapping.size(); ++i) {
      correct += tf[i] == report.feature_mapping[i];
    }
    doc["score"] = {{"value_mapping_exact", tv == report.value_mapping},
                    {"feature_mapping_exact", tf == report.feature_mapping},
                    {"features_correct", correct}};
  }
  bool elided = false;
  doc["traces"] = traces_json(report.traces, report.mode, r.trace_cap, elided);
  doc["traces_elided"] = elided;
  write_json(out, doc);
  write_json(sidecar(out, ".timing.json"), json{{"elapsed_seconds", report.elapsed_seconds}});

  json summary = doc;
  summary.erase("traces");
  std::cout << summary.dump(2) << "\n";
}

void cmd_lock_keygen(Context& ctx, const fs::path& out) {
  const RunConfig& r = ctx.run;
  if (!r.locked()) detail::fail(ErrorCode::kConfig, "lock-keygen needs lock.layers and lock.pool_size > 0");
  Rng rng(r.seed, "lock-key");
  const LockKey key = generate_key(r.n_features, r.layers, r.pool_size, r.dim, rng);
  io::write_file_atomic(out, serialize_key(key));
  json doc = provenance(ctx);
  doc["n_features"] = r.n_features;
  doc["layers"] = r.layers;
  doc["pool_size"] = r.pool_size;
  doc["dim"] = r.dim;
  write_json(sidecar(out, ".json"), doc);
  std::cout << "wrote " << out.string() << "\n";
}

std::string file_stem(const std::string& parameter) {
  std::string out;
  for (char c : parameter) {
    if (std::isalnum(static_cast<unsigned char>(c))) out += c;
    else if (!out.empty() && out.back() != '_') out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

void cmd_lock_validate(Context& ctx, const fs::path& model_path, const fs::path& key_path, const fs::path& out_dir,
                       std::size_t feature, bool exhaustive) {
  const RunConfig& r = ctx.run;
  const ModelFile file = read_model(model_path);
  if (!file.locked) detail::fail(ErrorCode::kConfig, model_path.string() + " is not a locked model");
  const LockKey key = read_key(key_path);
  const TrainedModel model = from_model_file(file, &key);
  const BasePool pool{file.dim, file.seed, file.features};
  fs::create_directories(out_dir);

  if (exhaustive) {
    EncodeOracle oracle = make_victim_oracle(model.encoder, file.mode, Rng(r.seed, "oracle"));
    const auto result = lock_exhaustive_attack(oracle, pool, file.values, key.layers(), feature, r.exhaustive_budget);
    json doc = provenance(ctx);
    doc["feature"] = feature;
    doc["guesses"] = result.guesses;
    doc["oracle_calls"] = result.oracle_calls;
    doc["best_score"] = result.best_score;
    json subs = json::array();
    for (const auto& sub : result.optimal_sub_keys) {
      json entries = json::array();
      for (const auto& e : sub) entries.push_back({{"base", e.base}, {"rotation", e.rotation}});
      subs.push_back(entries);
    }
    doc["optimal_sub_keys"] = subs;
    write_json(out_dir / "exhaustive.json", doc);
    std::cout << "exhaustive: " << result.optimal_sub_keys.size() << " optimal sub-key(s)\n";
    return;
  }

  std::string csv = "parameter,candidate,score,correct\n";
  json summary = provenance(ctx);
  summary["feature"] = feature;
  json sweeps = json::array();
  std::uint64_t stream = 0;
  for (std::size_t layer = 0; layer < key.layers(); ++layer) {
    for (LockParameterKind kind : {LockParameterKind::kRotation, LockParameterKind::kBaseIndex}) {
      const SweptParameter swept{layer, kind};
      EncodeOracle oracle = make_victim_oracle(model.encoder, file.mode, Rng(r.seed, "oracle").fork(stream++));
      const GuessTrace trace = lock_validation_attack(oracle, pool, file.values, key, feature, swept);
      const std::string name = parameter_name(feature, swept);
      json doc = provenance(ctx);
      doc["swept_parameter"] = name;
      doc["feature"] = feature;
      doc["layer"] = layer;
      doc["mode"] = to_string(trace.mode);
      doc["metric"] = trace.mode == EncodeMode::kBinary ? "mismatch_fraction" : "cosine";
      doc["correct_position"] = trace.correct_position;
      doc["best_position"] = trace.best_position;
      doc["strict_optimum"] = trace.strict_optimum;
      doc["informative"] = trace.informative;
      doc["oracle_calls"] = trace.oracle_calls;
      doc["scores"] = trace.scores;
      write_json(out_dir / (file_stem(name) + ".json"), doc);
      for (std::size_t c = 0; c < trace.scores.size(); ++c) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", trace.scores[c]);
        csv += name + "," + std::to_string(c) + "," + buf + "," + (c == trace.correct_position ? "1" : "0") + "\n";
      }
      sweeps.push_back({{"parameter", name}, {"strict_optimum", trace.strict_optimum},
                        {"correct_position", trace.correct_position}, {"best_position", trace.best_position}});
    }
  }
  summary["sweeps"] = sweeps;
  io::write_file_atomic(out_dir / "sweeps.csv", csv);
  write_json(out_dir / "summary.json", summary);
  std::cout << summary.dump(2) << "\n";
}

void cmd_complexity(Context& ctx, std::uint64_t n, std::uint64_t d, std::uint64_t p, std::uint64_t l,
                    const std::string& out) {
  if (n == 0 || d == 0 || p == 0 || l == 0) detail::fail(ErrorCode::kConfig, "complexity needs N, D, P, L >= 1");
  json doc = provenance(ctx);
  doc["N"] = n;
  doc["D"] = d;
  doc["P"] = p;
  doc["L"] = l;
  const BigInt base = baseline_complexity(n);
  doc["baseline"] = {{"exact", base.str()}, {"approx", to_scientific(base, 3)}};
  json rows = json::array();
  std::printf("%-3s %-28s %-10s %s\n", "L", "locked N*(DP)^L", "approx", "vs baseline");
  std::printf("%-3s %-28s %-10s\n", "-", base.str().c_str(), to_scientific(base, 3).c_str());
  for (std::uint64_t k = 1; k <= l; ++k) {
    const BigInt locked = attack_complexity(n, d, p, k);
    const BigInt ratio = locked / base;
    rows.push_back({{"L", k}, {"per_feature_guesses", per_feature_guesses(d, p, k).str()},
                    {"exact", locked.str()}, {"approx", to_scientific(locked, 3)},
                    {"ratio_to_baseline", to_scientific(ratio, 3)}});
    std::printf("%-3llu %-28s %-10s %s\n", static_cast<unsigned long long>(k), locked.str().c_str(),
                to_scientific(locked, 3).c_str(), to_scientific(ratio, 3).c_str());
  }
  doc["locked"] = rows;
  if (!out.empty()) write_json(out, doc);
}

void cmd_bench_encode(Context& ctx, const std::vector<std::size_t>& layers, const EncodeBenchOptions& opts,
                      const std::string& out) {
  const auto rows = benchmark_encoding(layers, opts);
  json doc = provenance(ctx);
  doc["N"] = opts.n_features;
  doc["D"] = opts.dim;
  doc["samples"] = opts.samples;
  doc["repeats"] = opts.repeats;
  json table = json::array();
  std::printf("%-3s %-8s %-9s %s\n", "L", "modeled", "measured", "ms/sample");
  for (const auto& row : rows) {
    table.push_back({{"L", row.layers}, {"modeled", row.modeled}, {"measured_ratio", row.measured_ratio}});
    std::printf("%-3zu %-8.3f %-9.3f %.3f\n", row.layers, row.modeled, row.measured_ratio,
                1e3 * row.seconds_per_sample);
  }
  doc["rows"] = table;
  // Wall-clock numbers vary run to run, so they stay out of the main document.
  if (!out.empty()) {
    write_json(out, doc);
    json timing = json::array();
    for (const auto& row : rows) timing.push_back({{"L", row.layers}, {"seconds_per_sample", row.seconds_per_sample}});
    write_json(sidecar(out, ".timing.json"), json{{"rows", timing}});
  }
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kKeyValidation:
      return 2;
    case ErrorCode::kData:
    case ErrorCode::kFormat:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kOutOfRange:
      return 3;
    case ErrorCode::kAmbiguity:
      return 4;
    case ErrorCode::kBudgetExceeded:
      return 5;
    case ErrorCode::kDegenerate:
      return 1;
  }
  return 1;
}

int report_error(const std::string& code, const std::string& message, int status) {
  std::cerr << json{{"error", {{"code", code}, {"message", message}}}, {"exit_code", status}}.dump() << "\n";
  return status;
}

}  // namespace
}  // namespace hdlock::cli

int main(int argc, char** argv) {
  using namespace hdlock;
  using namespace hdlock::cli;

  CLI::App app{"Hyperdimensional computing models, reasoning attacks and HDLock key protection"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  app.add_option("--config", config_path, "Config file (key=value with [sections])");
  app.add_option("--set", sets, "Override a config key: section.key=value")->take_all();
  app.add_option("--seed", seed, "Override run.seed");
  app.add_option("--threads", threads, "Override run.threads (0 = all cores, 1 = serial)");

  std::string out, out_dir, data, test, key, model, victim, victim_key, truth, reconstruct, attacker;
  std::uint64_t shuffle_seed = 0;
  std::size_t feature = 0;
  bool exhaustive = false;
  std::uint64_t cn = 0, cd = 0, cp = 0, cl = 0;
  std::vector<std::size_t> layers = {1, 2, 3, 4};
  EncodeBenchOptions bench;

  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset (train/test/attacker CSV + JSON sidecar)");
  gen->add_option("--out-dir", out_dir, "Output directory")->required();

  auto* trn = app.add_subcommand("train", "Train a model; writes the model file, sidecar and metrics");
  trn->add_option("--data", data, "Training data: file.csv or images.idx,labels.idx")->required();
  trn->add_option("--test", test, "Held-out data for test accuracy");
  trn->add_option("--key", key, "Lock key file (locked configs)");
  trn->add_option("--out", out, "Model file path")->required();

  auto* inf = app.add_subcommand("infer", "Predict labels for a query file");
  inf->add_option("--model", model, "Model file")->required();
  inf->add_option("--data", data, "Query data")->required();
  inf->add_option("--key", key, "Lock key file (locked models)");
  inf->add_option("--out", out, "Predictions JSON")->required();

  auto* strip = app.add_subcommand("strip", "Export a model with shuffled, unindexed hypervector pools");
  strip->add_option("--model", model, "Model file")->required();
  strip->add_option("--out", out, "Stripped model path")->required();
  strip->add_option("--truth", truth, "Ground-truth mapping JSON (scoring only)")->required();
  auto* shuffle_opt = strip->add_option("--shuffle-seed", shuffle_seed, "Shuffle seed (default run.seed)");

  auto* atk = app.add_subcommand("attack", "Reasoning attack on a stripped model through an encode oracle");
  atk->add_option("--model", model, "Stripped model (attacker view)")->required();
  atk->add_option("--victim", victim, "Victim model file backing the oracle")->required();
  atk->add_option("--victim-key", victim_key, "Key for a locked victim");
  atk->add_option("--out", out, "Report JSON")->required();
  atk->add_option("--truth", truth, "Ground-truth JSON from strip, for scoring");
  atk->add_option("--reconstruct", reconstruct, "rebind or retrain");
  atk->add_option("--test", test, "Held-out data for accuracy");
  atk->add_option("--attacker-data", attacker, "Attacker-held training data (retrain)");

  auto* keygen = app.add_subcommand("lock-keygen", "Generate an HDLock key from the config");
  keygen->add_option("--out", out, "Key file path")->required();

  auto* validate = app.add_subcommand("lock-validate", "Single-parameter sweeps against a locked model");
  validate->add_option("--model", model, "Locked model file")->required();
  validate->add_option("--key", key, "True key")->required();
  validate->add_option("--out-dir", out_dir, "Output directory")->required();
  validate->add_option("--feature", feature, "Target feature (0-based)");
  validate->add_flag("--exhaustive", exhaustive, "Search every L-tuple (capped by attack.exhaustive_budget)");

  auto* cx = app.add_subcommand("complexity", "Guess counts: baseline N^2 and locked N*(DP)^L");
  cx->add_option("N", cn)->required();
  cx->add_option("D", cd)->required();
  cx->add_option("P", cp)->required();
  cx->add_option("L", cl)->required();
  cx->add_option("--out", out, "Also write the table as JSON");

  auto* be = app.add_subcommand("bench-encode", "Relative encoding cost of locked encoders");
  be->add_option("--layers", layers, "Layer counts")->delimiter(',');
  be->add_option("--n", bench.n_features, "Features N");
  be->add_option("--dim", bench.dim, "Dimension D");
  be->add_option("--samples", bench.samples, "Samples per timing run");
  be->add_option("--repeats", bench.repeats, "Timing repeats");
  be->add_option("--out", out, "Write the table as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("config", e.what(), 2);
  }

  Context ctx;
  try {
    if (!config_path.empty()) ctx.config.merge_file(config_path);
    for (const auto& s : sets) ctx.config.set(s);
    if (seed) ctx.config.set("run.seed=" + std::to_string(*seed));
    if (threads) ctx.config.set("run.threads=" + std::to_string(*threads));
    ctx.run = resolve(ctx.config);
    ctx.command = app.get_subcommands().front()->get_name();
    bench.seed = ctx.run.seed;

    if (*gen) cmd_gen_data(ctx, out_dir);
    else if (*trn) cmd_train(ctx, data, test, key, out);
    else if (*inf) cmd_infer(ctx, model, data, key, out);
    else if (*strip) cmd_strip(ctx, model, out, truth, shuffle_opt->count() ? shuffle_seed : ctx.run.seed);
    else if (*atk) cmd_attack(ctx, victim, victim_key, model, out, truth, reconstruct, test, attacker);
    else if (*keygen) cmd_lock_keygen(ctx, out);
    else if (*validate) cmd_lock_validate(ctx, model, key, out_dir, feature, exhaustive);
    else if (*cx) cmd_complexity(ctx, cn, cd, cp, cl, out);
    else if (*be) cmd_bench_encode(ctx, layers, bench, out);
  } catch (const Error& e) {
    return report_error(to_string(e.code()), e.what(), exit_code(e.code()));
  } catch (const nlohmann::json::exception& e) {
    return report_error("data", e.what(), 3);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), 1);
  }
  return 0;
}
