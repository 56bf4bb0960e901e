#include <doctest.h>

#include <set>

#include "hdlock/binary_io.hpp"
#include "hdlock/error.hpp"
#include "hdlock/model_file.hpp"

using namespace hdlock;

namespace {

Hypervector hv(std::initializer_list<int> e) {
  const std::vector<int> v(e);
  return Hypervector::from_bipolar(v);
}

std::uint32_t read_u32(const std::vector<std::uint8_t>& b, std::size_t at) {
  return b[at] | (b[at + 1] << 8) | (b[at + 2] << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

TrainedModel small_model(EncodeMode mode, std::uint64_t seed) {
  const auto enc = std::make_shared<const Encoder>(ItemMemory::generate(6, 3, 130, seed));
  LabeledSet data{{{0, 1, 2, 0, 1, 2}, {2, 2, 2, 1, 1, 1}, {0, 0, 0, 0, 0, 0}}, {0, 1, 2}};
  return train(data, enc, mode, Rng(seed, "t"));
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected hdlock::Error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("model file layout is bit exact") {
  ModelFile m;
  m.mode = EncodeMode::kBinary;
  m.dim = 4;
  m.n_features = 1;
  m.n_levels = 2;
  m.n_classes = 1;
  m.seed = 0x0102030405060708ULL;
  m.values = {hv({1, -1, -1, -1}), hv({-1, 1, -1, -1})};
  m.features = {hv({1, 1, 1, 1})};
  m.class_hvs = {hv({-1, -1, 1, -1})};
  std::vector<std::uint8_t> expect{'H', 'D', 'L', 'M', 1, 0, 1, 0};
  for (std::uint32_t v : {4u, 1u, 2u, 1u, 0u, 0u}) {
    for (int k = 0; k < 4; ++k) expect.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  for (int k = 0; k < 8; ++k) expect.push_back(static_cast<std::uint8_t>(m.seed >> (8 * k)));
  for (std::uint64_t word : {0x1ULL, 0x2ULL, 0xFULL, 0x4ULL}) {
    for (int k = 0; k < 8; ++k) expect.push_back(static_cast<std::uint8_t>(word >> (8 * k)));
  }
  const std::uint32_t crc = io::crc32c(expect);
  for (int k = 0; k < 4; ++k) expect.push_back(static_cast<std::uint8_t>(crc >> (8 * k)));
  CHECK(serialize_model(m) == expect);
}

TEST_CASE("non-binary class vectors are i32 little endian") {
  ModelFile m;
  m.mode = EncodeMode::kNonBinary;
  m.dim = 2;
  m.n_features = 1;
  m.n_levels = 2;
  m.n_classes = 1;
  m.values = {hv({1, -1}), hv({-1, -1})};
  m.features = {hv({1, 1})};
  m.class_sums = {Accumulator({-3, 5}, 5)};
  const auto bytes = serialize_model(m);
  const std::size_t body = 8 + 24 + 8 + 3 * 8;
  CHECK(bytes[6] == 0);
  CHECK(static_cast<std::int32_t>(read_u32(bytes, body)) == -3);
  CHECK(read_u32(bytes, body + 4) == 5);
  CHECK(bytes.size() == body + 8 + 4);
  CHECK(deserialize_model(bytes).class_sums == m.class_sums);
}

TEST_CASE("model file round trip") {
  for (auto mode : {EncodeMode::kBinary, EncodeMode::kNonBinary}) {
    const auto model = small_model(mode, 3);
    const auto file = to_model_file(model, 3);
    const auto bytes = serialize_model(file);
    const auto back = deserialize_model(bytes);
    CHECK(serialize_model(back) == bytes);
    const auto rebuilt = from_model_file(back);
    CHECK(rebuilt.class_sums == model.class_sums);
    CHECK(rebuilt.class_hvs == model.class_hvs);
    const QuantizedSample q{1, 1, 0, 2, 2, 0};
    CHECK(infer(q, rebuilt, Rng(1, "q")) == infer(q, model, Rng(1, "q")));
  }
}

TEST_CASE("locked model files keep the pool and never the key") {
  const std::size_t n = 5, d = 200, p = 4;
  const auto pool = BasePool::generate(p, d, 11);
  Rng key_rng(11, "key");
  const auto key = generate_key(n, 2, p, d, key_rng);
  const auto val = ItemMemory::generate(n, 3, d, 11).val;
  const auto enc = std::make_shared<const Encoder>(Encoder::locked(pool, key, val));
  LabeledSet data{{QuantizedSample(n, 0), QuantizedSample(n, 2)}, {0, 1}};
  const auto model = train(data, enc, EncodeMode::kNonBinary, Rng(11, "t"));
  const auto file = to_model_file(model, 11);
  CHECK(file.locked);
  CHECK(file.pool_size == p);
  CHECK(file.layers == 2);
  CHECK(file.features == pool.bases);
  const auto bytes = serialize_model(file);
  CHECK((bytes[7] & 1) == 1);
  CHECK(read_u32(bytes, 8 + 16) == p);
  CHECK(read_u32(bytes, 8 + 20) == 2);
  const auto key_bytes = serialize_key(key);
  const std::vector<std::uint8_t> records(key_bytes.begin() + 22, key_bytes.end() - 4);
  CHECK(std::search(bytes.begin(), bytes.end(), records.begin(), records.end()) == bytes.end());

  const auto back = deserialize_model(bytes);
  CHECK(code_of([&] { (void)from_model_file(back); }) == ErrorCode::kKeyValidation);
  const LockKey wrong_shape = LockKey::identity(n, d);
  CHECK(code_of([&] { (void)from_model_file(back, &wrong_shape); }) == ErrorCode::kKeyValidation);
  const auto rebuilt = from_model_file(back, &key);
  CHECK(rebuilt.encoder->encode(QuantizedSample(n, 1)) == enc->encode(QuantizedSample(n, 1)));
}

TEST_CASE("corrupted model files are rejected") {
  const auto bytes = serialize_model(to_model_file(small_model(EncodeMode::kBinary, 4), 4));
  for (std::size_t pos : {std::size_t{0}, std::size_t{4}, std::size_t{9}, bytes.size() / 2, bytes.size() - 1}) {
    auto bad = bytes;
    bad[pos] ^= 0x01;
    CHECK(code_of([&] { (void)deserialize_model(bad); }) == ErrorCode::kFormat);
  }
  auto cut = bytes;
  cut.resize(cut.size() - 12);
  CHECK(code_of([&] { (void)deserialize_model(cut); }) == ErrorCode::kFormat);
  CHECK(code_of([&] { (void)deserialize_model(std::vector<std::uint8_t>{1, 2}); }) == ErrorCode::kFormat);
}

TEST_CASE("strip_model") {
  const auto model = small_model(EncodeMode::kBinary, 5);
  const auto file = to_model_file(model, 5);
  const auto stripped = strip_model(file, 99);
  CHECK(stripped.model.stripped);
  CHECK(stripped.shuffle_seed == 99);
  SUBCASE("mappings are permutations that point at the original vectors") {
    CHECK(std::set<std::size_t>(stripped.value_mapping.begin(), stripped.value_mapping.end()).size() == 3);
    CHECK(std::set<std::size_t>(stripped.feature_mapping.begin(), stripped.feature_mapping.end()).size() == 6);
    for (std::size_t l = 0; l < 3; ++l) CHECK(stripped.model.values[stripped.value_mapping[l]] == file.values[l]);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(stripped.model.features[stripped.feature_mapping[i]] == file.features[i]);
    }
  }
  SUBCASE("the stripped flag survives serialization and blocks rebuilding") {
    const auto back = deserialize_model(serialize_model(stripped.model));
    CHECK(back.stripped);
    CHECK(code_of([&] { (void)from_model_file(back); }) == ErrorCode::kInvalidArgument);
  }
  SUBCASE("same seed, same shuffle") {
    CHECK(serialize_model(strip_model(file, 99).model) == serialize_model(stripped.model));
    CHECK(strip_model(file, 98).feature_mapping != stripped.feature_mapping);
  }
  SUBCASE("already stripped input is refused") {
    CHECK_THROWS_AS((void)strip_model(stripped.model, 1), Error);
  }
}
