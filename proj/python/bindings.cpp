#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include "hdlock/attack.hpp"
#include "hdlock/dataset.hpp"
#include "hdlock/error.hpp"
#include "hdlock/keylock.hpp"
#include "hdlock/model.hpp"
#include "hdlock/model_file.hpp"
#include "hdlock/version.hpp"

namespace py = pybind11;
using namespace hdlock;

namespace {

py::object big(const BigInt& v) { return py::module_::import("builtins").attr("int")(v.str()); }

py::bytes to_bytes(const std::vector<std::uint8_t>& b) {
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

std::vector<std::uint8_t> from_bytes(const py::bytes& b) {
  const std::string s = b;
  return {s.begin(), s.end()};
}

py::dict trace_dict(const DecisionTrace& t) {
  py::list cands;
  for (const auto& c : t.candidates) cands.append(py::make_tuple(c.candidate, c.score));
  py::dict d;
  d["position"] = t.position;
  d["chosen"] = t.chosen;
  d["informative"] = t.informative;
  d["candidates"] = cands;
  return d;
}

}  // namespace

PYBIND11_MODULE(_hdlock, m) {
  m.doc() = "Hyperdimensional classifiers, the reasoning attack and HDLock key locking";
  m.attr("__version__") = kVersion;

  static py::exception<Error> error(m, "HdlockError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::handle(error.ptr())(py::str(e.what()));
      inst.attr("code") = to_string(e.code());
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  py::enum_<EncodeMode>(m, "EncodeMode")
      .value("BINARY", EncodeMode::kBinary)
      .value("NON_BINARY", EncodeMode::kNonBinary);
  m.def("parse_mode", &parse_mode);

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t, std::string_view>(), py::arg("seed"), py::arg("label"))
      .def("fork", py::overload_cast<std::string_view>(&Rng::fork, py::const_))
      .def("at", &Rng::at)
      .def("next", &Rng::next)
      .def("uniform", &Rng::uniform)
      .def("unit", &Rng::unit)
      .def_property_readonly("seed", &Rng::seed)
      .def_property_readonly("label", &Rng::label);

  py::class_<Hypervector>(m, "Hypervector")
      .def_static("from_bipolar", [](const std::vector<int>& v) { return Hypervector::from_bipolar(v); })
      .def_static("ones", &Hypervector::ones)
      .def_static("random", [](std::size_t dim, Rng& rng) { return random_hypervector(dim, rng); })
      .def_property_readonly("dim", &Hypervector::dim)
      .def("to_bipolar", &Hypervector::to_bipolar)
      .def("words", [](const Hypervector& h) { return std::vector<std::uint64_t>(h.words().begin(), h.words().end()); })
      .def("__len__", &Hypervector::dim)
      .def("__getitem__", [](const Hypervector& h, std::size_t i) {
        if (i >= h.dim()) throw py::index_error();
        return h[i];
      })
      .def(py::self == py::self)
      .def("__mul__", [](const Hypervector& a, const Hypervector& b) { return multiply(a, b); })
      .def("__neg__", [](const Hypervector& a) { return negate(a); });

  py::class_<Accumulator>(m, "Accumulator")
      .def(py::init([](const std::vector<std::int32_t>& e, std::size_t terms) { return Accumulator(e, terms); }),
           py::arg("elements"), py::arg("term_count") = 0)
      .def_property_readonly("dim", &Accumulator::dim)
      .def_property_readonly("term_count", &Accumulator::term_count)
      .def("to_list", [](const Accumulator& a) {
        return std::vector<std::int32_t>(a.elements().begin(), a.elements().end());
      })
      .def("__len__", &Accumulator::dim)
      .def(py::self == py::self);

  m.def("multiply", py::overload_cast<const Hypervector&, const Hypervector&>(&multiply));
  m.def("rotate", &rotate);
  m.def("hamming", &hamming);
  m.def("hamming_count", &hamming_count);
  m.def("bundle", [](const std::vector<Hypervector>& hvs) {
    if (hvs.empty()) detail::fail(ErrorCode::kInvalidArgument, "bundle needs at least one hypervector");
    Accumulator acc = to_accumulator(hvs.front());
    for (std::size_t i = 1; i < hvs.size(); ++i) add_into(acc, hvs[i]);
    return acc;
  });
  m.def("binarize", &binarize);
  m.def("dot", &dot);
  m.def("cosine", &cosine);

  m.def("generate_feature_hvs", &generate_feature_hvs);
  m.def("generate_value_hvs", &generate_value_hvs);
  m.def("quantize", &quantize);
  py::class_<ItemMemory>(m, "ItemMemory")
      .def_static("generate", &ItemMemory::generate, py::arg("n_features"), py::arg("n_levels"), py::arg("dim"),
                  py::arg("seed"))
      .def_readonly("fea", &ItemMemory::fea)
      .def_readonly("val", &ItemMemory::val)
      .def_readonly("seed", &ItemMemory::seed);

  py::class_<BasePool>(m, "BasePool")
      .def_static("generate", &BasePool::generate, py::arg("p"), py::arg("dim"), py::arg("seed"))
      .def_readonly("bases", &BasePool::bases)
      .def_readonly("dim", &BasePool::dim)
      .def("__len__", &BasePool::size);

  py::class_<LockKey>(m, "LockKey")
      .def(py::init([](std::size_t n, std::size_t l, std::size_t p, std::size_t d,
                       const std::vector<std::pair<std::uint32_t, std::uint32_t>>& entries) {
             std::vector<KeyEntry> e;
             for (const auto& [b, r] : entries) e.push_back({b, r});
             return LockKey(n, l, p, d, std::move(e));
           }),
           py::arg("n_features"), py::arg("layers"), py::arg("pool_size"), py::arg("dim"), py::arg("entries"))
      .def_static("identity", &LockKey::identity)
      .def_property_readonly("n_features", &LockKey::n_features)
      .def_property_readonly("layers", &LockKey::layers)
      .def_property_readonly("pool_size", &LockKey::pool_size)
      .def_property_readonly("dim", &LockKey::dim)
      .def("entries", [](const LockKey& k) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
        for (const auto& e : k.entries()) out.emplace_back(e.base, e.rotation);
        return out;
      })
      .def("to_bytes", [](const LockKey& k) { return to_bytes(serialize_key(k)); })
      .def_static("from_bytes", [](const py::bytes& b) { return deserialize_key(from_bytes(b)); })
      .def(py::self == py::self);
  m.def("generate_key", &generate_key, py::arg("n"), py::arg("layers"), py::arg("p"), py::arg("dim"), py::arg("rng"));
  m.def("validate_key", [](const LockKey& key, const BasePool& pool) {
    std::vector<std::tuple<std::size_t, std::size_t, std::string>> out;
    for (const auto& v : validate_key(key, pool)) out.emplace_back(v.feature, v.layer, v.reason);
    return out;
  });
  m.def("derive_locked_feature_hvs", &derive_locked_feature_hvs);
  m.def("attack_complexity", [](std::uint64_t n, std::uint64_t d, std::uint64_t p, std::uint64_t l) {
    return big(attack_complexity(n, d, p, l));
  });
  m.def("baseline_complexity", [](std::uint64_t n) { return big(baseline_complexity(n)); });
  m.def("to_scientific", [](const py::int_& v, unsigned digits) {
    return to_scientific(BigInt(py::str(v).cast<std::string>()), digits);
  }, py::arg("value"), py::arg("digits") = 3);

  py::class_<Encoder, std::shared_ptr<Encoder>>(m, "Encoder")
      .def(py::init<std::vector<Hypervector>, std::vector<Hypervector>>(), py::arg("features"), py::arg("values"))
      .def(py::init<const ItemMemory&>())
      .def_static("locked", [](BasePool pool, LockKey key, std::vector<Hypervector> values) {
        return std::make_shared<Encoder>(Encoder::locked(std::move(pool), std::move(key), std::move(values)));
      })
      .def_property_readonly("n_features", &Encoder::n_features)
      .def_property_readonly("n_levels", &Encoder::n_levels)
      .def_property_readonly("dim", &Encoder::dim)
      .def_property_readonly("is_locked", &Encoder::is_locked)
      .def("encode", &Encoder::encode)
      .def("encode_binary", &Encoder::encode_binary);

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("n_features", &Dataset::n_features)
      .def_readonly("n_classes", &Dataset::n_classes)
      .def_readonly("values", &Dataset::values)
      .def_readonly("labels", &Dataset::labels)
      .def_readonly("v_min", &Dataset::v_min)
      .def_readonly("v_max", &Dataset::v_max)
      .def_readonly("label_names", &Dataset::label_names)
      .def("__len__", &Dataset::size)
      .def("to_csv", [](const Dataset& d) { return to_csv(d); });
  py::class_<SyntheticDataset>(m, "SyntheticDataset")
      .def_readonly("data", &SyntheticDataset::data)
      .def_readonly("prototypes", &SyntheticDataset::prototypes);
  m.def("generate_synthetic", &generate_synthetic, py::arg("n_features"), py::arg("n_classes"),
        py::arg("samples_per_class"), py::arg("noise"), py::arg("grid_levels"), py::arg("rng"));
  m.def("load_csv", [](const std::string& path, long label_column, bool header) {
    return load_csv(path, CsvOptions{label_column, header});
  }, py::arg("path"), py::arg("label_column") = -1, py::arg("header") = false);
  m.def("load_idx", [](const std::string& images, const std::string& labels) { return load_idx(images, labels); });

  py::class_<LabeledSet>(m, "LabeledSet")
      .def(py::init([](std::vector<QuantizedSample> s, std::vector<std::uint32_t> l) {
        return LabeledSet{std::move(s), std::move(l)};
      }), py::arg("samples"), py::arg("labels"))
      .def_readonly("samples", &LabeledSet::samples)
      .def_readonly("labels", &LabeledSet::labels)
      .def("__len__", &LabeledSet::size);
  m.def("quantize_dataset", py::overload_cast<const Dataset&, std::size_t>(&quantize_dataset));
  m.def("quantize_dataset", py::overload_cast<const Dataset&, std::size_t, double, double>(&quantize_dataset));

  py::class_<TrainedModel>(m, "TrainedModel")
      .def_readonly("mode", &TrainedModel::mode)
      .def_readonly("class_sums", &TrainedModel::class_sums)
      .def_readonly("class_hvs", &TrainedModel::class_hvs)
      .def_property_readonly("class_count", &TrainedModel::class_count);
  m.def("train", [](const LabeledSet& data, std::shared_ptr<Encoder> enc, EncodeMode mode, const Rng& rng,
                    std::size_t threads) {
    py::gil_scoped_release release;
    return train(data, std::move(enc), mode, rng, threads);
  }, py::arg("data"), py::arg("encoder"), py::arg("mode"), py::arg("rng"), py::arg("threads") = 0);
  m.def("infer", &infer);
  m.def("predict", &predict, py::arg("queries"), py::arg("model"), py::arg("rng"), py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("evaluate", &evaluate, py::arg("data"), py::arg("model"), py::arg("rng"), py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());

  py::class_<ModelFile>(m, "ModelFile")
      .def_readonly("mode", &ModelFile::mode)
      .def_readonly("locked", &ModelFile::locked)
      .def_readonly("stripped", &ModelFile::stripped)
      .def_readonly("dim", &ModelFile::dim)
      .def_readonly("n_features", &ModelFile::n_features)
      .def_readonly("n_levels", &ModelFile::n_levels)
      .def_readonly("n_classes", &ModelFile::n_classes)
      .def_readonly("seed", &ModelFile::seed)
      .def_readonly("values", &ModelFile::values)
      .def_readonly("features", &ModelFile::features)
      .def("to_bytes", [](const ModelFile& f) { return to_bytes(serialize_model(f)); })
      .def_static("from_bytes", [](const py::bytes& b) { return deserialize_model(from_bytes(b)); });
  m.def("to_model_file", &to_model_file);
  m.def("from_model_file", [](const ModelFile& f, const LockKey* key) { return from_model_file(f, key); },
        py::arg("file"), py::arg("key") = nullptr);
  py::class_<StrippedModel>(m, "StrippedModel")
      .def_readonly("model", &StrippedModel::model)
      .def_readonly("value_mapping", &StrippedModel::value_mapping)
      .def_readonly("feature_mapping", &StrippedModel::feature_mapping);
  m.def("strip_model", &strip_model);

  m.def("reasoning_attack", [](const ModelFile& stripped, const TrainedModel& victim, std::uint64_t seed) {
    if (!stripped.stripped) detail::fail(ErrorCode::kInvalidArgument, "reasoning_attack expects a stripped model");
    const UnindexedPools pools{stripped.features, stripped.values};
    EncodeOracle oracle = make_victim_oracle(victim.encoder, victim.mode, Rng(seed, "oracle"));
    AttackOptions opts;
    opts.seed = seed;
    AttackReport r;
    {
      py::gil_scoped_release release;
      r = run_reasoning_attack(pools, oracle, opts);
    }
    py::list traces;
    for (const auto& t : r.traces) traces.append(trace_dict(t));
    py::dict d;
    d["scenario"] = r.scenario;
    d["value_mapping"] = r.value_mapping;
    d["feature_mapping"] = r.feature_mapping;
    d["guesses_used"] = r.guesses_used;
    d["guess_bound"] = r.guess_bound;
    d["oracle_calls"] = r.oracle_calls;
    d["traces"] = traces;
    return d;
  }, py::arg("stripped"), py::arg("victim"), py::arg("seed") = 0);

  m.def("lock_validation", [](const TrainedModel& victim, const BasePool& pool, const LockKey& key,
                              std::size_t feature, std::size_t layer, const std::string& kind, std::uint64_t seed) {
    if (kind != "rotation" && kind != "base") {
      detail::fail(ErrorCode::kInvalidArgument, "kind must be 'rotation' or 'base'");
    }
    const SweptParameter swept{layer, kind == "rotation" ? LockParameterKind::kRotation : LockParameterKind::kBaseIndex};
    EncodeOracle oracle = make_victim_oracle(victim.encoder, victim.mode, Rng(seed, "oracle"));
    const auto values = victim.encoder->values();
    const GuessTrace t = lock_validation_attack(oracle, pool, values, key, feature, swept);
    py::dict d;
    d["parameter"] = parameter_name(feature, swept);
    d["scores"] = t.scores;
    d["correct_position"] = t.correct_position;
    d["best_position"] = t.best_position;
    d["strict_optimum"] = t.strict_optimum;
    d["oracle_calls"] = t.oracle_calls;
    return d;
  }, py::arg("victim"), py::arg("pool"), py::arg("key"), py::arg("feature"), py::arg("layer"), py::arg("kind"),
        py::arg("seed") = 0);
}
