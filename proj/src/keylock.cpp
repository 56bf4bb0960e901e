#include "hdlock/keylock.hpp"

#include <algorithm>
#include <sstream>

#include "hdlock/binary_io.hpp"
#include "hdlock/error.hpp"

namespace hdlock {

namespace {

constexpr std::string_view kKeyMagic = "HDLK";

std::uint32_t to_u32(std::size_t v, const char* what) {
  if (v > 0xFFFFFFFFULL) detail::fail(ErrorCode::kInvalidArgument, std::string(what) + " exceeds u32");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

BasePool BasePool::generate(std::size_t p, std::size_t dim, std::uint64_t seed) {
  if (p == 0) detail::fail(ErrorCode::kInvalidArgument, "base pool size must be >= 1");
  Rng rng(seed, "base-pool");
  BasePool pool;
  pool.dim = dim;
  pool.seed = seed;
  pool.bases.reserve(p);
  for (std::size_t i = 0; i < p; ++i) pool.bases.push_back(random_hypervector(dim, rng));
  return pool;
}

LockKey::LockKey(std::size_t n_features, std::size_t layers, std::size_t pool_size,
                 std::size_t dim, std::vector<KeyEntry> entries)
    : n_features_(n_features),
      layers_(layers),
      pool_size_(pool_size),
      dim_(dim),
      entries_(std::move(entries)) {
  if (n_features == 0 || layers == 0 || pool_size == 0 || dim == 0) {
    detail::fail(ErrorCode::kInvalidArgument, "lock key parameters N, L, P, D must all be >= 1");
  }
  if (entries_.size() != n_features * layers) {
    detail::fail(ErrorCode::kKeyValidation, "lock key has " + std::to_string(entries_.size()) +
                                                " entries, expected N*L = " +
                                                std::to_string(n_features * layers));
  }
}

LockKey LockKey::identity(std::size_t n_features, std::size_t dim) {
  std::vector<KeyEntry> entries(n_features);
  for (std::size_t i = 0; i < n_features; ++i) entries[i] = {to_u32(i, "base index"), 0};
  return LockKey(n_features, 1, n_features, dim, std::move(entries));
}

LockKey generate_key(std::size_t n, std::size_t layers, std::size_t p, std::size_t dim, Rng& rng) {
  if (n == 0 || layers == 0 || p == 0 || dim == 0) {
    detail::fail(ErrorCode::kInvalidArgument, "generate_key: N, L, P, D must all be >= 1");
  }
  if (static_cast<double>(p) * static_cast<double>(dim) < static_cast<double>(layers)) {
    detail::fail(ErrorCode::kInvalidArgument,
                 "generate_key: D*P < L leaves no duplicate-free sub-key");
  }
  std::vector<KeyEntry> entries;
  entries.reserve(n * layers);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t first = entries.size();
    for (std::size_t l = 0; l < layers; ++l) {
      KeyEntry e;
      do {
        e.base = static_cast<std::uint32_t>(rng.uniform(p));
        e.rotation = static_cast<std::uint32_t>(rng.uniform(dim));
      } while (std::find(entries.begin() + static_cast<std::ptrdiff_t>(first), entries.end(), e) !=
               entries.end());
      entries.push_back(e);
    }
  }
  return LockKey(n, layers, p, dim, std::move(entries));
}

std::vector<KeyViolation> validate_key(const LockKey& key, const BasePool& pool) {
  std::vector<KeyViolation> out;
  if (key.pool_size() != pool.size()) {
    out.push_back({0, 0, "key expects pool size " + std::to_string(key.pool_size()) +
                             " but pool has " + std::to_string(pool.size())});
  }
  if (key.dim() != pool.dim) {
    out.push_back({0, 0, "key dimension " + std::to_string(key.dim()) +
                             " differs from pool dimension " + std::to_string(pool.dim)});
  }
  for (std::size_t i = 0; i < key.n_features(); ++i) {
    const auto sub = key.sub_key(i);
    for (std::size_t l = 0; l < sub.size(); ++l) {
      if (sub[l].base >= pool.size()) out.push_back({i, l, "index out of range"});
      if (sub[l].rotation >= pool.dim) out.push_back({i, l, "rotation out of range"});
      for (std::size_t prev = 0; prev < l; ++prev) {
        if (sub[prev] == sub[l]) {
          out.push_back({i, l, "duplicate (base, rotation) pair in sub-key " + std::to_string(i)});
        }
      }
    }
  }
  return out;
}

void require_valid_key(const LockKey& key, const BasePool& pool) {
  const auto violations = validate_key(key, pool);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "lock key rejected (" << violations.size() << " violations)";
  for (std::size_t i = 0; i < std::min<std::size_t>(violations.size(), 5); ++i) {
    msg << "; feature " << violations[i].feature << " layer " << violations[i].layer << ": "
        << violations[i].reason;
  }
  detail::fail(ErrorCode::kKeyValidation, msg.str());
}

Hypervector derive_feature_hv(std::span<const KeyEntry> sub_key, const BasePool& pool) {
  if (sub_key.empty()) detail::fail(ErrorCode::kKeyValidation, "empty sub-key");
  for (const auto& e : sub_key) {
    if (e.base >= pool.size() || e.rotation >= pool.dim) {
      detail::fail(ErrorCode::kKeyValidation, "sub-key entry out of range for pool");
    }
  }
  Hypervector out = rotate(pool.bases[sub_key[0].base], sub_key[0].rotation);
  for (std::size_t l = 1; l < sub_key.size(); ++l) {
    out = multiply(out, rotate(pool.bases[sub_key[l].base], sub_key[l].rotation));
  }
  return out;
}

std::vector<Hypervector> derive_locked_feature_hvs(const BasePool& pool, const LockKey& key) {
  require_valid_key(key, pool);
  std::vector<Hypervector> out;
  out.reserve(key.n_features());
  for (std::size_t i = 0; i < key.n_features(); ++i) {
    out.push_back(derive_feature_hv(key.sub_key(i), pool));
  }
  return out;
}

std::vector<std::uint8_t> serialize_key(const LockKey& key) {
  io::ByteWriter w;
  w.bytes(kKeyMagic);
  w.u16(kKeyFileVersion);
  w.u32(to_u32(key.n_features(), "N"));
  w.u32(to_u32(key.layers(), "L"));
  w.u32(to_u32(key.pool_size(), "P"));
  w.u32(to_u32(key.dim(), "D"));
  for (const auto& e : key.entries()) {
    w.u32(e.base);
    w.u32(e.rotation);
  }
  w.crc_trailer();
  return w.release();
}

LockKey deserialize_key(std::span<const std::uint8_t> bytes) {
  const auto payload = io::verify_crc_trailer(bytes, "key file");
  io::ByteReader r(payload, "key file");
  if (r.bytes(4) != kKeyMagic) detail::fail(ErrorCode::kFormat, "key file: bad magic");
  const auto version = r.u16();
  if (version != kKeyFileVersion) {
    detail::fail(ErrorCode::kFormat, "key file: unsupported version " + std::to_string(version));
  }
  const std::size_t n = r.u32();
  const std::size_t layers = r.u32();
  const std::size_t p = r.u32();
  const std::size_t dim = r.u32();
  if (r.remaining() != n * layers * 8) {
    detail::fail(ErrorCode::kFormat, "key file: record count does not match N*L");
  }
  std::vector<KeyEntry> entries(n * layers);
  for (auto& e : entries) {
    e.base = r.u32();
    e.rotation = r.u32();
  }
  r.expect_end();
  return LockKey(n, layers, p, dim, std::move(entries));
}

BigInt per_feature_guesses(std::uint64_t dim, std::uint64_t p, std::uint64_t layers) {
  BigInt out = 1;
  const BigInt step = BigInt(dim) * p;
  for (std::uint64_t l = 0; l < layers; ++l) out *= step;
  return out;
}

BigInt attack_complexity(std::uint64_t n, std::uint64_t dim, std::uint64_t p,
                         std::uint64_t layers) {
  return BigInt(n) * per_feature_guesses(dim, p, layers);
}

BigInt baseline_complexity(std::uint64_t n) { return BigInt(n) * n; }

std::string to_scientific(const BigInt& value, unsigned digits) {
  if (digits == 0) detail::fail(ErrorCode::kInvalidArgument, "to_scientific: digits must be >= 1");
  if (value < 0) return "-" + to_scientific(-value, digits);
  std::string s = value.str();
  long exponent = static_cast<long>(s.size()) - 1;
  std::string mantissa;
  if (s.size() <= digits) {
    mantissa = s;
  } else {
    const BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(s.size() - digits));
    BigInt q = (value + scale / 2) / scale;  // round half up
    mantissa = q.str();
    if (mantissa.size() > digits) {  // carried into a new digit, e.g. 9.995 -> 10.0
      mantissa.pop_back();
      ++exponent;
    }
  }
  while (mantissa.size() < digits) mantissa.push_back('0');
  std::string out = mantissa.substr(0, 1);
  if (digits > 1) out += "." + mantissa.substr(1);
  return out + "e" + std::to_string(exponent);
}

}  // namespace hdlock
