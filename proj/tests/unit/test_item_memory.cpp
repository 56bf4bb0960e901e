#include <doctest.h>

#include <cmath>

#include "hdlock/error.hpp"
#include "hdlock/item_memory.hpp"

using namespace hdlock;

TEST_CASE("generate_feature_hvs") {
  SUBCASE("N=784, D=10000 pairwise distances stay inside 0.5 +- 5 sigma") {
    // About 0.18 excursions past 5 sigma are expected per 306936-pair memory.
    const auto count_outside = [](const std::vector<Hypervector>& fea) {
      std::size_t outside = 0;
      for (std::size_t i = 0; i < fea.size(); ++i) {
        for (std::size_t j = i + 1; j < fea.size(); ++j) {
          const double d = hamming(fea[i], fea[j]);
          outside += d < 0.475 || d > 0.525;
        }
      }
      return outside;
    };
    const auto im = ItemMemory::generate(784, 16, 10000, 1);
    REQUIRE(im.fea.size() == 784);
    CHECK(count_outside(im.fea) == 0);
    Rng rng(1, "fea");
    CHECK(count_outside(generate_feature_hvs(784, 10000, rng)) <= 2);
  }
  SUBCASE("N=1") {
    Rng rng(2, "fea");
    CHECK(generate_feature_hvs(1, 100, rng).size() == 1);
  }
  SUBCASE("N=3, D=64 is reproducible") {
    Rng a(3, "fea"), b(3, "fea");
    CHECK(generate_feature_hvs(3, 64, a) == generate_feature_hvs(3, 64, b));
  }
  SUBCASE("N=0 is rejected") {
    Rng rng(4, "fea");
    CHECK_THROWS_AS((void)generate_feature_hvs(0, 64, rng), Error);
  }
}

TEST_CASE("generate_value_hvs") {
  SUBCASE("M=11, D=10000 steps exactly 0.05 per level") {
    Rng rng(5, "val");
    const auto val = generate_value_hvs(11, 10000, rng);
    for (std::size_t j = 0; j < 11; ++j) {
      CHECK(hamming_count(val[0], val[j]) == 500 * j);
    }
  }
  SUBCASE("M=2 endpoints are exactly orthogonal") {
    Rng rng(6, "val");
    const auto val = generate_value_hvs(2, 10000, rng);
    CHECK(hamming(val[0], val[1]) == 0.5);
  }
  SUBCASE("M=2 negates the first floor(D/2) positions") {
    for (std::size_t d : {7, 64, 101}) {
      Rng rng(d, "val");
      const auto val = generate_value_hvs(2, d, rng);
      for (std::size_t i = 0; i < d; ++i) CHECK(val[1][i] == (i < d / 2 ? -val[0][i] : val[0][i]));
    }
  }
  SUBCASE("distances depend only on the level gap and grow with it") {
    Rng rng(7, "val");
    const std::size_t m = 9, d = 4096;
    const auto val = generate_value_hvs(m, d, rng);
    const auto blocks = level_blocks(m, d);
    REQUIRE(blocks.size() == m - 1);
    std::size_t covered = 0;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      CHECK(blocks[j].first == covered);
      covered = blocks[j].second;
      const std::size_t size = blocks[j].second - blocks[j].first;
      CHECK((size == (d / 2) / (m - 1) || size == (d / 2) / (m - 1) + 1));
    }
    CHECK(covered == d / 2);
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        std::size_t expect = 0;
        for (std::size_t j = std::min(a, b); j < std::max(a, b); ++j) expect += blocks[j].second - blocks[j].first;
        CHECK(hamming_count(val[a], val[b]) == expect);
      }
    }
    for (std::size_t j = 1; j < m; ++j) CHECK(hamming(val[0], val[j]) > hamming(val[0], val[j - 1]));
  }
  SUBCASE("preconditions") {
    Rng rng(8, "val");
    CHECK_THROWS_AS((void)generate_value_hvs(1, 64, rng), Error);
    CHECK_THROWS_AS((void)generate_value_hvs(5, 7, rng), Error);
    CHECK_NOTHROW((void)generate_value_hvs(5, 8, rng));
  }
}

TEST_CASE("quantize") {
  CHECK(quantize(0.0, 0.0, 255.0, 16) == 0);
  CHECK(quantize(255.0, 0.0, 255.0, 16) == 15);
  CHECK(quantize(127.5, 0.0, 255.0, 2) == 1);
  CHECK(quantize(127.4, 0.0, 255.0, 2) == 0);
  CHECK(quantize(-5.0, 0.0, 1.0, 4) == 0);
  CHECK(quantize(9.0, 0.0, 1.0, 4) == 3);
  CHECK(quantize(std::nan(""), 0.0, 1.0, 4) == 0);
  CHECK_THROWS_AS((void)quantize(0.5, 1.0, 1.0, 4), Error);
  SUBCASE("monotone and surjective over the range") {
    std::uint32_t prev = 0;
    std::vector<int> hit(8, 0);
    for (int k = 0; k <= 1000; ++k) {
      const auto q = quantize(k / 1000.0, 0.0, 1.0, 8);
      CHECK(q >= prev);
      prev = q;
      hit[q] = 1;
    }
    for (int h : hit) CHECK(h == 1);
  }
}

TEST_CASE("ItemMemory::generate is deterministic and shaped") {
  const auto a = ItemMemory::generate(5, 4, 256, 9);
  const auto b = ItemMemory::generate(5, 4, 256, 9);
  CHECK(a.fea == b.fea);
  CHECK(a.val == b.val);
  CHECK(a.fea.size() == 5);
  CHECK(a.val.size() == 4);
  CHECK(a.fea != ItemMemory::generate(5, 4, 256, 10).fea);
}
