#include "hdlock/model.hpp"

#include <algorithm>
#include <string>

#include "hdlock/error.hpp"
#include "hdlock/parallel.hpp"

namespace hdlock {

std::size_t dense_class_count(const std::vector<std::uint32_t>& labels) {
  if (labels.empty()) detail::fail(ErrorCode::kData, "dataset has no labels");
  const std::size_t classes = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::size_t> counts(classes, 0);
  for (auto l : labels) ++counts[l];
  for (std::size_t c = 0; c < classes; ++c) {
    if (counts[c] == 0) {
      detail::fail(ErrorCode::kData, "class " + std::to_string(c) + " has no training samples");
    }
  }
  return classes;
}

TrainedModel train(const LabeledSet& data, std::shared_ptr<const Encoder> encoder, EncodeMode mode,
                   const Rng& rng, std::size_t threads) {
  if (!encoder) detail::fail(ErrorCode::kInvalidArgument, "train: encoder is null");
  if (data.samples.size() != data.labels.size()) {
    detail::fail(ErrorCode::kData, "train: sample and label counts differ");
  }
  const std::size_t classes = dense_class_count(data.labels);
  const std::size_t dim = encoder->dim();
  const Rng sample_rng = rng.fork("sample");

  const std::size_t workers = std::min(resolve_threads(threads), std::max<std::size_t>(data.size(), 1));
  std::vector<std::vector<Accumulator>> partial(workers,
                                                std::vector<Accumulator>(classes, Accumulator(dim)));
  parallel_for(data.size(), workers, [&](std::size_t begin, std::size_t end, std::size_t worker) {
    auto& sums = partial[worker];
    for (std::size_t j = begin; j < end; ++j) {
      auto& target = sums[data.labels[j]];
      if (mode == EncodeMode::kBinary) {
        add_into(target, encoder->encode_binary(data.samples[j], sample_rng.fork(j)));
      } else {
        add_into(target, encoder->encode(data.samples[j]));
      }
    }
  });

  TrainedModel model;
  model.mode = mode;
  model.encoder = std::move(encoder);
  model.class_sums = std::move(partial.front());
  for (std::size_t w = 1; w < partial.size(); ++w) {
    for (std::size_t c = 0; c < classes; ++c) add_into(model.class_sums[c], partial[w][c]);
  }
  if (mode == EncodeMode::kBinary) {
    const Rng class_rng = rng.fork("class");
    for (std::size_t c = 0; c < classes; ++c) {
      model.class_hvs.push_back(binarize(model.class_sums[c], class_rng.fork(c)));
    }
    model.class_sums.clear();
  }
  return model;
}

std::uint32_t infer(const QuantizedSample& query, const TrainedModel& model, const Rng& rng) {
  if (!model.encoder || model.class_count() == 0) {
    detail::fail(ErrorCode::kInvalidArgument, "infer: model is not trained");
  }
  std::uint32_t best = 0;
  if (model.mode == EncodeMode::kBinary) {
    const Hypervector q = model.encoder->encode_binary(query, rng);
    std::size_t best_dist = hamming_count(q, model.class_hvs[0]);
    for (std::size_t c = 1; c < model.class_hvs.size(); ++c) {
      const std::size_t d = hamming_count(q, model.class_hvs[c]);
      if (d < best_dist) {
        best_dist = d;
        best = static_cast<std::uint32_t>(c);
      }
    }
    return best;
  }
  const Accumulator q = model.encoder->encode(query);
  // An all-zero query or class has no direction; it scores below any real match.
  auto score = [&](const Accumulator& cls) {
    if (dot(q, q) == 0 || dot(cls, cls) == 0) return -2.0;
    return cosine(q, cls);
  };
  double best_score = score(model.class_sums[0]);
  for (std::size_t c = 1; c < model.class_sums.size(); ++c) {
    const double s = score(model.class_sums[c]);
    if (s > best_score) {
      best_score = s;
      best = static_cast<std::uint32_t>(c);
    }
  }
  return best;
}

std::vector<std::uint32_t> predict(const std::vector<QuantizedSample>& queries,
                                   const TrainedModel& model, const Rng& rng, std::size_t threads) {
  std::vector<std::uint32_t> out(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t q = begin; q < end; ++q) out[q] = infer(queries[q], model, rng.fork(q));
  });
  return out;
}

double evaluate(const LabeledSet& data, const TrainedModel& model, const Rng& rng,
                std::size_t threads) {
  if (data.size() == 0) detail::fail(ErrorCode::kData, "evaluate: empty dataset");
  if (data.samples.size() != data.labels.size()) {
    detail::fail(ErrorCode::kData, "evaluate: sample and label counts differ");
  }
  const auto predicted = predict(data.samples, model, rng, threads);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == data.labels[i];
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace hdlock
