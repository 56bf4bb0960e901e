#include <doctest.h>

#include "config.hpp"
#include "hdlock/error.hpp"

using namespace hdlock;
using hdlock::cli::Config;

namespace {

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

TEST_CASE("config defaults resolve") {
  const auto r = cli::resolve(Config{});
  CHECK(r.seed == 1);
  CHECK(r.dim == 4096);
  CHECK(r.levels == 8);
  CHECK(r.mode == EncodeMode::kBinary);
  CHECK_FALSE(r.locked());
}

TEST_CASE("config text with sections, comments and overrides") {
  Config c;
  c.merge_text("# comment\n[model]\ndim = 1024\nmode=nonbinary\n\n[lock]\nlayers=2\npool_size=16\n; more\n", "t");
  c.set("model.dim=2048");
  const auto r = cli::resolve(c);
  CHECK(r.dim == 2048);
  CHECK(r.mode == EncodeMode::kNonBinary);
  CHECK(r.layers == 2);
  CHECK(r.pool_size == 16);
  CHECK(r.locked());
}

TEST_CASE("later assignments win") {
  Config c;
  c.merge_text("[run]\nseed=3\nseed=9\n", "t");
  CHECK(cli::resolve(c).seed == 9);
}

TEST_CASE("config errors are kConfig and name the line") {
  Config c;
  try {
    c.merge_text("[model]\ndim=64\nbogus=1\n", "file.ini");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
    CHECK(std::string(e.what()).find("file.ini:3") != std::string::npos);
  }
  CHECK(code_of([&] { c.merge_text("[model\n", "t"); }) == ErrorCode::kConfig);
  CHECK(code_of([&] { c.merge_text("novalue\n", "t"); }) == ErrorCode::kConfig);
  CHECK(code_of([&] { c.set("model.dim"); }) == ErrorCode::kConfig);
  CHECK(code_of([&] { c.merge_file("/nonexistent/hdlock.ini"); }) == ErrorCode::kConfig);
}

TEST_CASE("resolve rejects bad values and inconsistent locks") {
  const auto bad = [](const std::string& assignment) {
    Config c;
    c.set(assignment);
    return code_of([&] { (void)cli::resolve(c); });
  };
  CHECK(bad("model.dim=abc") == ErrorCode::kConfig);
  CHECK(bad("model.dim=1") == ErrorCode::kConfig);
  CHECK(bad("model.levels=1") == ErrorCode::kConfig);
  CHECK(bad("model.levels=4000") == ErrorCode::kConfig);
  CHECK(bad("lock.layers=2") == ErrorCode::kConfig);
  CHECK(bad("data.noise=0.5") == ErrorCode::kConfig);
  CHECK(bad("data.header=maybe") == ErrorCode::kConfig);
  CHECK(bad("run.seed=-1") == ErrorCode::kConfig);
}

TEST_CASE("config hash tracks the canonical text") {
  Config a, b;
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  b.set("run.seed=2");
  CHECK(a.hash() != b.hash());
  a.merge_text("[run]\nseed = 2\n", "t");
  CHECK(a.canonical() == b.canonical());
  CHECK(a.hash() == b.hash());
}
