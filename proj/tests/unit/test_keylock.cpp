#include <doctest.h>

#include <set>

#include "hdlock/binary_io.hpp"
#include "hdlock/error.hpp"
#include "hdlock/keylock.hpp"

using namespace hdlock;

namespace {

// Bitwise CRC-32C, independent of the table-driven library version.
std::uint32_t crc32c_bitwise(const std::vector<std::uint8_t>& bytes) {
  std::uint32_t crc = 0xFFFFFFFFu;
  for (auto b : bytes) {
    crc ^= b;
    for (int k = 0; k < 8; ++k) crc = (crc >> 1) ^ (0x82F63B78u & (0u - (crc & 1u)));
  }
  return crc ^ 0xFFFFFFFFu;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

}  // namespace

TEST_CASE("crc32c check value") {
  const std::string s = "123456789";
  const std::vector<std::uint8_t> bytes(s.begin(), s.end());
  CHECK(io::crc32c(bytes) == 0xE3069283u);
  CHECK(crc32c_bitwise(bytes) == 0xE3069283u);
}

TEST_CASE("generate_key") {
  SUBCASE("N=784, L=2, P=784, D=10000 shape") {
    Rng rng(1, "key");
    const auto key = generate_key(784, 2, 784, 10000, rng);
    CHECK(key.n_features() == 784);
    CHECK(key.layers() == 2);
    CHECK(key.entries().size() == 1568);
    for (std::size_t i = 0; i < 784; ++i) CHECK(key.sub_key(i).size() == 2);
    CHECK(validate_key(key, BasePool::generate(784, 10000, 1)).empty());
  }
  SUBCASE("L=1, P=1 always names base 0") {
    Rng rng(2, "key");
    const auto key = generate_key(50, 1, 1, 64, rng);
    std::set<std::uint32_t> rotations;
    for (const auto& e : key.entries()) {
      CHECK(e.base == 0);
      CHECK(e.rotation < 64);
      rotations.insert(e.rotation);
    }
    CHECK(rotations.size() > 10);
  }
  SUBCASE("fixed seed gives identical key bytes") {
    Rng a(3, "key"), b(3, "key");
    CHECK(serialize_key(generate_key(10, 3, 5, 100, a)) == serialize_key(generate_key(10, 3, 5, 100, b)));
  }
  SUBCASE("tiny spaces still avoid duplicates") {
    Rng rng(4, "key");
    const auto key = generate_key(30, 4, 1, 4, rng);
    CHECK(validate_key(key, BasePool::generate(1, 4, 4)).empty());
    CHECK_THROWS_AS((void)generate_key(1, 5, 1, 4, rng), Error);
    CHECK_THROWS_AS((void)generate_key(0, 1, 1, 4, rng), Error);
    CHECK_THROWS_AS((void)generate_key(1, 0, 1, 4, rng), Error);
  }
}

TEST_CASE("attack_complexity") {
  const BigInt l2 = attack_complexity(784, 10000, 784, 2);
  CHECK(l2 == BigInt("48189030400000000"));
  CHECK(to_scientific(l2, 5) == "4.8189e16");
  const BigInt l1 = attack_complexity(784, 10000, 784, 1);
  CHECK(l1 == BigInt("6146560000"));
  CHECK(to_scientific(l1, 3) == "6.15e9");
  CHECK(baseline_complexity(784) == 614656);
  CHECK(to_scientific(baseline_complexity(784), 3) == "6.15e5");
  CHECK(per_feature_guesses(10000, 784, 2) == BigInt("61465600000000"));
  SUBCASE("exactly multiplicative in L") {
    for (std::uint64_t l = 1; l < 8; ++l) {
      CHECK(attack_complexity(784, 10000, 784, l + 1) == attack_complexity(784, 10000, 784, l) * 10000 * 784);
    }
    CHECK(attack_complexity(784, 10000, 784, 6) > BigInt(std::numeric_limits<std::uint64_t>::max()));
  }
  SUBCASE("monotone in every argument") {
    const BigInt c = attack_complexity(10, 20, 30, 2);
    CHECK(attack_complexity(11, 20, 30, 2) > c);
    CHECK(attack_complexity(10, 21, 30, 2) > c);
    CHECK(attack_complexity(10, 20, 31, 2) > c);
    CHECK(attack_complexity(10, 20, 30, 3) > c);
  }
}

TEST_CASE("to_scientific rounding") {
  CHECK(to_scientific(BigInt(0), 3) == "0.00e0");
  CHECK(to_scientific(BigInt(7), 3) == "7.00e0");
  CHECK(to_scientific(BigInt(9995), 3) == "1.00e4");
  CHECK(to_scientific(BigInt(12345), 1) == "1e4");
  CHECK(to_scientific(BigInt(-1250), 2) == "-1.3e3");
}

TEST_CASE("validate_key") {
  const auto pool = BasePool::generate(6, 32, 5);
  SUBCASE("identity key on a matching pool is valid") {
    CHECK(validate_key(LockKey::identity(6, 32), pool).empty());
  }
  SUBCASE("base index equal to P") {
    const LockKey key(1, 1, 6, 32, {{6, 0}});
    const auto v = validate_key(key, pool);
    REQUIRE(v.size() == 1);
    CHECK(v[0].reason == "index out of range");
  }
  SUBCASE("rotation equal to D") {
    const auto v = validate_key(LockKey(1, 1, 6, 32, {{0, 32}}), pool);
    REQUIRE(v.size() == 1);
    CHECK(v[0].reason == "rotation out of range");
  }
  SUBCASE("duplicate pair in sub-key 3") {
    std::vector<KeyEntry> e;
    for (std::uint32_t i = 0; i < 5; ++i) {
      e.push_back({i, 1});
      e.push_back({i, i == 3 ? 1u : 2u});
    }
    const auto v = validate_key(LockKey(5, 2, 6, 32, e), pool);
    REQUIRE(v.size() == 1);
    CHECK(v[0].feature == 3);
    CHECK(v[0].layer == 1);
    CHECK(v[0].reason.find("sub-key 3") != std::string::npos);
    try {
      require_valid_key(LockKey(5, 2, 6, 32, e), pool);
      FAIL("expected throw");
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::kKeyValidation);
    }
  }
  SUBCASE("pool shape mismatch") {
    CHECK(validate_key(LockKey::identity(6, 64), pool).size() == 1);
    CHECK(validate_key(LockKey::identity(5, 32), pool).size() == 1);
  }
}

TEST_CASE("key file layout is bit exact") {
  const LockKey key(2, 1, 3, 100, {{2, 99}, {0, 7}});
  std::vector<std::uint8_t> expect{'H', 'D', 'L', 'K', 1, 0};
  for (std::uint32_t v : {2u, 1u, 3u, 100u, 2u, 99u, 0u, 7u}) put_u32(expect, v);
  put_u32(expect, crc32c_bitwise(expect));
  CHECK(serialize_key(key) == expect);
  CHECK(deserialize_key(expect) == key);
}

TEST_CASE("key file round trip and corruption") {
  Rng rng(6, "key");
  const auto key = generate_key(17, 3, 9, 500, rng);
  const auto bytes = serialize_key(key);
  CHECK(deserialize_key(bytes) == key);
  CHECK(serialize_key(deserialize_key(bytes)) == bytes);
  for (std::size_t pos : {std::size_t{0}, std::size_t{5}, std::size_t{20}, bytes.size() - 1}) {
    auto bad = bytes;
    bad[pos] ^= 0x10;
    try {
      (void)deserialize_key(bad);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kFormat);
    }
  }
  auto truncated = bytes;
  truncated.resize(bytes.size() - 9);
  CHECK_THROWS_AS((void)deserialize_key(truncated), Error);
}
