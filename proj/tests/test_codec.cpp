#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "support/scripted_random.hpp"
#include "support/sweep.hpp"
#include "xorshard/codec.hpp"
#include "xorshard/error.hpp"

using namespace xorshard;
using testing::ScriptedRandom;

namespace {

SharePlan plan_for(int T, int l, int k) { return build_layout(derive_params(T, {l, k})); }

Bytes concat(const PaddedFile& f) {
  Bytes out;
  for (const auto& part : f.parts) out.insert(out.end(), part.begin(), part.end());
  return out;
}

ErrorKind decode_error(std::span<const ShareBlob> shares, const SharePlan& plan) {
  try {
    (void)decode(shares, plan);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("decode accepted invalid shares");
  return ErrorKind::ConstructionBug;
}

}  // namespace

TEST_CASE("pad") {
  SUBCASE("10 bytes into 4 parts") {
    const Bytes data{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const PaddedFile f = pad(data, 4);
    CHECK(f.part_len() == 3);
    CHECK(f.beta == 2);
    CHECK(f.original_len == 10);
    Bytes expect = data;
    expect.push_back(0);
    expect.push_back(0);
    CHECK(concat(f) == expect);
  }
  SUBCASE("12 bytes need no padding") {
    const PaddedFile f = pad(Bytes(12, 7), 4);
    CHECK(f.part_len() == 3);
    CHECK(f.beta == 0);
  }
  SUBCASE("empty file") {
    const PaddedFile f = pad(Bytes{}, 3);
    CHECK(f.parts.size() == 3);
    CHECK(f.part_len() == 0);
    CHECK(f.beta == 0);
  }
  SUBCASE("beta stays below k") {
    for (std::size_t n = 0; n < 50; ++n) {
      const PaddedFile f = pad(Bytes(n, 1), 7);
      CHECK(f.beta < 7);
      CHECK(f.part_len() * 7 == n + f.beta);
    }
  }
}

TEST_CASE("generate_keys") {
  const SchemeParams p = derive_params(3, {3, 10});
  SeededRandom rng(1);
  const KeyPool pool = generate_keys(p, 1, rng);
  CHECK(pool.keys.size() == 11);
  for (const auto& key : pool.keys) CHECK(key.size() == 1);

  SeededRandom a(42), b(42), c(43);
  CHECK(generate_keys(p, 16, a).keys == generate_keys(p, 16, b).keys);
  SeededRandom d(42);
  CHECK(generate_keys(p, 16, c).keys != generate_keys(p, 16, d).keys);

  const SchemeParams trivial = derive_params(2, {1, 2});
  CHECK(generate_keys(trivial, 8, a).keys.empty());

  testing::FailingRandom broken;
  CHECK_THROWS_AS((void)generate_keys(p, 4, broken), Error);
}

TEST_CASE("encode the T=3, alpha=1/4 instance with fixed keys") {
  const SharePlan plan = plan_for(3, 1, 4);
  ScriptedRandom keys({0x10, 0x20, 0x30, 0x40, 0x50});
  const Bytes data{0x01, 0x02, 0x03, 0x04};
  const auto shares = encode(data, plan, keys);
  REQUIRE(shares.size() == 3);
  // Hand-XORed: F2^K2^K4 = 02^20^40, F3^K1^K5 = 03^10^50, F4^K3 = 04^30.
  CHECK(shares[0].payload == Bytes{0x01, 0x10, 0x62});
  CHECK(shares[1].payload == Bytes{0x20, 0x30, 0x43});
  CHECK(shares[2].payload == Bytes{0x40, 0x50, 0x34});
  CHECK(shares[0].header.part_len == 1);
  CHECK(shares[0].header.slot_count == 3);
  CHECK(decode(shares, plan) == data);
}

TEST_CASE("all-zero keys leave encrypted slots equal to their parts") {
  const SharePlan plan = plan_for(5, 7, 11);
  ScriptedRandom zeros;
  Bytes data(22);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<std::uint8_t>(i + 1);
  const PaddedFile file = pad(data, 11);
  const auto shares = encode(data, plan, zeros);
  for (int t = 1; t <= 5; ++t) {
    const auto& layout = plan.share(t);
    for (std::size_t s = 0; s < layout.size(); ++s) {
      if (const auto* enc = std::get_if<EncryptedSlot>(&layout[s])) {
        const auto got = shares[t - 1].slot(s);
        CHECK(Bytes(got.begin(), got.end()) == file.parts[enc->part - 1]);
      }
    }
  }
}

TEST_CASE("T=5 7/11: server 5 slot 4 is F11 xor K7") {
  const SharePlan plan = plan_for(5, 7, 11);
  SeededRandom rng(9);
  Bytes data(11 * 4);
  std::iota(data.begin(), data.end(), 0);
  const PaddedFile file = pad(data, 11);
  SeededRandom replay(9);
  const KeyPool keys = generate_keys(plan.params, file.part_len(), replay);
  const auto shares = encode(data, plan, rng);
  const auto got = shares[4].slot(3);
  for (std::size_t b = 0; b < 4; ++b) {
    CHECK(got[b] == (file.parts[10][b] ^ keys.key(7)[b]));
  }
}

TEST_CASE("every encrypted slot unpads to its part") {
  std::mt19937_64 gen(5);
  for (const auto& [T, budget] : testing::sweep(2, 5, 20, true)) {
    const SharePlan plan = build_layout(derive_params(T, budget));
    Bytes data(gen() % 200);
    for (auto& b : data) b = static_cast<std::uint8_t>(gen());
    const PaddedFile file = pad(data, budget.k);
    SeededRandom rng(gen());
    const KeyPool keys = generate_keys(plan.params, file.part_len(), rng);
    const auto shares = materialize(file, keys, plan);
    for (int t = 1; t <= T; ++t) {
      const auto& layout = plan.share(t);
      for (std::size_t s = 0; s < layout.size(); ++s) {
        const auto* enc = std::get_if<EncryptedSlot>(&layout[s]);
        if (!enc) continue;
        const auto view = shares[t - 1].slot(s);
        Bytes clear(view.begin(), view.end());
        for (int key : enc->keys) {
          for (std::size_t b = 0; b < clear.size(); ++b) clear[b] ^= keys.key(key)[b];
        }
        CHECK(clear == file.parts[enc->part - 1]);
      }
    }
  }
}

TEST_CASE("decode inverts encode across the sweep") {
  std::mt19937_64 gen(11);
  for (const auto& [T, budget] : testing::sweep(2, 6, 30, false)) {
    const SharePlan plan = build_layout(derive_params(T, budget));
    for (std::size_t size : {std::size_t{0}, std::size_t{1}, static_cast<std::size_t>(budget.k) * 3,
                             static_cast<std::size_t>(gen() % 300)}) {
      Bytes data(size);
      for (auto& b : data) b = static_cast<std::uint8_t>(gen());
      SeededRandom rng(gen());
      auto shares = encode(data, plan, rng);
      std::shuffle(shares.begin(), shares.end(), gen);
      CHECK(decode(shares, plan) == data);
    }
  }
}

TEST_CASE("decode error classes") {
  const SharePlan plan = plan_for(3, 3, 10);
  SystemRandom rng;
  const Bytes data(25, 0xAB);
  const auto shares = encode(data, plan, rng);

  SUBCASE("missing share") {
    std::vector<ShareBlob> two(shares.begin(), shares.begin() + 2);
    CHECK(decode_error(two, plan) == ErrorKind::MissingShare);
  }
  SUBCASE("inconsistent original length") {
    auto bad = shares;
    bad[2].header.original_len = 24;
    CHECK(decode_error(bad, plan) == ErrorKind::HeaderMismatch);
  }
  SUBCASE("wrong budget in a header") {
    auto bad = shares;
    bad[1].header.l = 1;
    CHECK(decode_error(bad, plan) == ErrorKind::HeaderMismatch);
  }
  SUBCASE("duplicate server index") {
    auto bad = shares;
    bad[2].header.server_index = 1;
    CHECK(decode_error(bad, plan) == ErrorKind::HeaderMismatch);
  }
  SUBCASE("short payload") {
    auto bad = shares;
    bad[0].payload.pop_back();
    CHECK(decode_error(bad, plan) == ErrorKind::PayloadLengthMismatch);
  }
}

TEST_CASE("fresh system keys differ between encodes") {
  const SharePlan plan = plan_for(3, 1, 4);
  SystemRandom rng;
  const Bytes data(64, 0);
  const auto a = encode(data, plan, rng);
  const auto b = encode(data, plan, rng);
  CHECK(a[1].payload != b[1].payload);
}
