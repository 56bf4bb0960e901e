#include <doctest.h>

#include <numeric>
#include <thread>

#include "../support/reference.hpp"
#include "hdlock/error.hpp"
#include "hdlock/hypervector.hpp"

using namespace hdlock;

namespace {

Hypervector hv(std::initializer_list<int> e) {
  const std::vector<int> v(e);
  return Hypervector::from_bipolar(v);
}

Accumulator acc(std::vector<std::int32_t> e, std::size_t terms) { return Accumulator(std::move(e), terms); }

ref::Acc to_ref(const Accumulator& a) { return ref::Acc(a.elements().begin(), a.elements().end()); }

Hypervector draw(std::size_t dim, std::uint64_t seed, const char* label = "t") {
  Rng rng(seed, label);
  return random_hypervector(dim, rng);
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

TEST_CASE("rng streams are pure functions of seed, label and index") {
  Rng a(7, "x");
  CHECK(a.at(0) == 0x3719bf5a0e222152ULL);
  CHECK(a.at(5) == 0x8483f04f86df5eceULL);
  CHECK(a.at(5) == ref::stream_value(7, "x", 5));
  Rng b(7, "x");
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
  CHECK(Rng(7, "x").fork("y").label() == "x/y");
  CHECK(Rng(7, "x").fork("y").at(3) == ref::stream_value(7, "x/y", 3));
  CHECK(Rng(7, "x").at(0) != Rng(8, "x").at(0));
  CHECK(Rng(7, "x").at(0) != Rng(7, "z").at(0));
}

TEST_CASE("rng uniform stays in range and covers it") {
  Rng r(3, "u");
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 2000; ++i) {
    const auto v = r.uniform(7);
    REQUIRE(v < 7);
    ++seen[v];
  }
  for (int c : seen) CHECK(c > 200);
}

TEST_CASE("random_hypervector") {
  SUBCASE("two independent D=10000 draws sit at 0.5 +- 3 sigma") {
    Rng r(11, "fea");
    const auto a = random_hypervector(10000, r);
    const auto b = random_hypervector(10000, r);
    const double d = hamming(a, b);
    CHECK(d >= 0.485);
    CHECK(d <= 0.515);
  }
  SUBCASE("same seed and label give the same vector") {
    CHECK(draw(4, 99) == draw(4, 99));
    CHECK(draw(4, 99).dim() == 4);
  }
  SUBCASE("element means of 100 draws stay within 0.03") {
    Rng r(12, "mean");
    for (int k = 0; k < 100; ++k) {
      const auto v = random_hypervector(10000, r).to_bipolar();
      long sum = 0;
      for (int x : v) sum += x;
      CHECK(std::abs(static_cast<double>(sum) / 10000.0) <= 0.03);
    }
  }
  SUBCASE("dim 0 is rejected") {
    Rng r(1, "z");
    CHECK(code_of([&] { (void)random_hypervector(0, r); }) == ErrorCode::kInvalidArgument);
  }
  SUBCASE("padding bits stay clear") {
    for (std::size_t d : {1, 63, 65, 127}) {
      const auto v = draw(d, d);
      CHECK((v.words().back() & ~tail_mask(d)) == 0);
    }
  }
}

TEST_CASE("multiply") {
  CHECK(multiply(hv({1, -1, 1, -1}), hv({1, 1, -1, -1})) == hv({1, -1, -1, 1}));
  const auto a = draw(4096, 1);
  const auto b = draw(4096, 2);
  const auto c = draw(4096, 3);
  CHECK(multiply(a, a) == Hypervector::ones(4096));
  CHECK(multiply(multiply(a, b), b) == a);
  CHECK(multiply(a, b) == multiply(b, a));
  CHECK(multiply(multiply(a, b), c) == multiply(a, multiply(b, c)));
  CHECK(code_of([&] { (void)multiply(a, draw(4095, 1)); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("add") {
  auto r = add(Accumulator(2), hv({1, -1}));
  CHECK(r == acc({1, -1}, 1));
  const auto a = draw(64, 5);
  const auto base = acc(std::vector<std::int32_t>(64, 3), 3);
  auto back = add(add(base, a), negate(a));
  CHECK(std::vector<std::int32_t>(back.elements().begin(), back.elements().end()) ==
        std::vector<std::int32_t>(64, 3));
  CHECK(back.term_count() == 5);

  const auto x = hv({1, 1, -1, -1});
  const auto y = hv({1, -1, 1, -1});
  const auto z = hv({1, -1, -1, 1});
  Accumulator s(4);
  add_into(s, x);
  add_into(s, y);
  add_into(s, z);
  ref::Acc expect(4, 0);
  for (const auto* v : {&x, &y, &z}) ref::add_into(expect, v->to_bipolar());
  CHECK(to_ref(s) == expect);
  CHECK(to_ref(s) == ref::Acc{3, -1, -1, -1});
  CHECK(s.term_count() == 3);
  CHECK(code_of([&] { add_into(s, draw(5, 1)); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("accumulator rejects elements beyond term_count") {
  CHECK(code_of([] { (void)Accumulator({3, 0}, 2); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("rotate") {
  CHECK(rotate(hv({1, -1, -1, 1}), 1) == hv({-1, -1, 1, 1}));
  const auto a = draw(64, 17);
  CHECK(rotate(a, 0) == a);
  CHECK(rotate(a, 64) == a);
  // 17 and 64 are coprime: 64 applications compose to 17*64, a multiple of D.
  Hypervector r = a;
  for (int i = 0; i < 64; ++i) r = rotate(r, 17);
  CHECK(r == a);
  for (int i = 0; i < 63; ++i) {
    if (i > 0) CHECK(rotate(a, 17 * i) != a);
  }
  const auto b = draw(1000, 4);
  CHECK(rotate(rotate(b, 300), 900) == rotate(b, 1200));
  CHECK(rotate(b, 1000 + 7) == rotate(b, 7));
}

TEST_CASE("binarize") {
  Rng rng(42, "tie");
  CHECK(binarize(acc({3, -2, 5}, 5), rng) == hv({1, -1, 1}));
  SUBCASE("odd term counts never consult the tie stream") {
    Accumulator s(300);
    for (int k = 0; k < 5; ++k) add_into(s, draw(300, 100 + k));
    CHECK(binarize(s, Rng(1, "a")) == binarize(s, Rng(2, "b")));
  }
  SUBCASE("zeros follow the hand-computed tie stream") {
    CHECK(binarize(acc({0, 0, 0}, 2), rng) == hv({1, -1, 1}));
    CHECK(TieBreaker(rng).word(0) == 0xa5d28e64bc0ee7cdULL);
    CHECK(TieBreaker(rng).word(0) == ref::stream_value(42, "tie/sign0", 0));
    const Accumulator zeros(200);
    CHECK(binarize(zeros, rng).to_bipolar() == ref::binarize(ref::Acc(200, 0), 42, "tie"));
  }
  SUBCASE("result ignores the rng cursor") {
    Rng advanced(42, "tie");
    (void)advanced.next();
    CHECK(binarize(acc({0, 0, 0}, 2), advanced) == binarize(acc({0, 0, 0}, 2), rng));
  }
}

TEST_CASE("hamming") {
  const auto a = draw(10000, 21);
  CHECK(hamming(a, a) == 0.0);
  CHECK(hamming(a, negate(a)) == 1.0);
  const double d = hamming(a, draw(10000, 22));
  CHECK(d >= 0.485);
  CHECK(d <= 0.515);
  CHECK(code_of([&] { (void)hamming(a, draw(9999, 1)); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("cosine") {
  const auto a = acc({3, -1, 2, 0}, 3);
  CHECK(cosine(a, a) == 1.0);
  CHECK(cosine(a, negate(a)) == -1.0);
  CHECK(cosine(acc({1, 0}, 1), acc({0, 2}, 2)) == 0.0);
  CHECK(cosine(a, acc({6, -2, 4, 0}, 6)) == 1.0);
  CHECK(code_of([&] { (void)cosine(a, Accumulator(4)); }) == ErrorCode::kDegenerate);
  CHECK(cosine_from_dots(4, 4, 4) == 1.0);
  CHECK(cosine_from_dots(1, 1, 4) == doctest::Approx(0.5));
}

TEST_CASE("packed and unpacked paths agree on random inputs") {
  Rng r(2024, "agree");
  for (std::size_t d : {63, 64, 65, 10000}) {
    for (int trial = 0; trial < 250; ++trial) {
      const auto a = random_hypervector(d, r);
      const auto b = random_hypervector(d, r);
      const auto ua = a.to_bipolar();
      const auto ub = b.to_bipolar();
      const std::size_t k = r.uniform(2 * d);
      REQUIRE(multiply(a, b).to_bipolar() == ref::multiply(ua, ub));
      REQUIRE(rotate(a, k).to_bipolar() == ref::rotate(ua, k));
      REQUIRE(hamming_count(a, b) == ref::hamming_count(ua, ub));
      REQUIRE(negate(a).to_bipolar() == ref::multiply(ua, std::vector<int>(d, -1)));
      Accumulator s = to_accumulator(a);
      add_into(s, b);
      ref::Acc rs(d, 0);
      ref::add_into(rs, ua);
      ref::add_into(rs, ub);
      REQUIRE(to_ref(s) == rs);
      REQUIRE(dot(to_accumulator(a), to_accumulator(b)) == ref::dot(ua, ub));
      REQUIRE(binarize(s, Rng(trial, "b")).to_bipolar() == ref::binarize(rs, trial, "b"));
      const auto m = multiply(s, a);
      for (std::size_t i = 0; i < d; ++i) REQUIRE(m[i] == rs[i] * ua[i]);
      REQUIRE(Hypervector::from_words(d, a.words()) == a);
    }
  }
}

TEST_CASE("multiply commutes with sign wherever the accumulator is nonzero") {
  Rng r(5, "sign");
  const std::size_t d = 2048;
  Accumulator s(d);
  for (int k = 0; k < 6; ++k) add_into(s, random_hypervector(d, r));
  const auto v = random_hypervector(d, r);
  const auto lhs = multiply(v, binarize(s, Rng(1, "l")));
  const auto rhs = binarize(multiply(s, v), Rng(2, "r"));
  for (std::size_t i = 0; i < d; ++i) {
    if (s[i] != 0) REQUIRE(lhs[i] == rhs[i]);
  }
}

TEST_CASE("hamming is a metric and rotation preserves it") {
  Rng r(9, "metric");
  for (int t = 0; t < 50; ++t) {
    const auto a = random_hypervector(777, r);
    const auto b = random_hypervector(777, r);
    const auto c = random_hypervector(777, r);
    CHECK(hamming_count(a, b) == hamming_count(b, a));
    CHECK(hamming_count(a, c) <= hamming_count(a, b) + hamming_count(b, c));
    const std::size_t k = r.uniform(777);
    CHECK(hamming(rotate(a, k), rotate(b, k)) == hamming(a, b));
    const auto ua = a.to_bipolar();
    const auto ur = rotate(a, k).to_bipolar();
    CHECK(std::accumulate(ua.begin(), ua.end(), 0) == std::accumulate(ur.begin(), ur.end(), 0));
    const double via_dot =
        (1.0 - static_cast<double>(dot(to_accumulator(a), to_accumulator(b))) / 777.0) / 2.0;
    CHECK(hamming(a, b) == doctest::Approx(via_dot).epsilon(1e-12));
  }
}

TEST_CASE("operations are safe to call concurrently") {
  const auto a = draw(10000, 1);
  const auto b = draw(10000, 2);
  const auto expect = binarize(add(to_accumulator(a), b), Rng(3, "c"));
  std::vector<std::thread> pool;
  std::vector<int> ok(4, 0);
  for (int t = 0; t < 4; ++t) {
    pool.emplace_back([&, t] {
      bool good = true;
      for (int i = 0; i < 20; ++i) good = good && binarize(add(to_accumulator(a), b), Rng(3, "c")) == expect;
      ok[t] = good;
    });
  }
  for (auto& th : pool) th.join();
  for (int v : ok) CHECK(v == 1);
}
