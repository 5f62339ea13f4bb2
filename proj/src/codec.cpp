#include "xorshard/codec.hpp"

#include <algorithm>
#include <string>

#include "xorshard/error.hpp"

namespace xorshard {

namespace {

void xor_into(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
}

std::string at_server(int t) { return " (server " + std::to_string(t) + ")"; }

}  // namespace

PaddedFile pad(std::span<const std::uint8_t> data, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "part count must be >= 1");
  const std::uint64_t kk = static_cast<std::uint64_t>(k);
  PaddedFile file;
  file.original_len = data.size();
  file.beta = (kk - file.original_len % kk) % kk;
  const std::uint64_t part_len = (file.original_len + file.beta) / kk;
  file.parts.assign(k, Bytes(part_len, 0));
  for (std::uint64_t i = 0; i < file.original_len; ++i) {
    file.parts[i / part_len][i % part_len] = data[i];
  }
  return file;
}

KeyPool generate_keys(const SchemeParams& params, std::uint64_t part_len, RandomSource& rng) {
  KeyPool pool;
  pool.keys.assign(params.n_keys, Bytes(part_len));
  for (auto& key : pool.keys) rng.fill(key);
  return pool;
}

ShareHeader make_header(const SchemeParams& params, int server, std::uint64_t part_len,
                        std::uint64_t original_len, std::size_t slot_count) {
  ShareHeader h;
  h.servers = static_cast<std::uint8_t>(params.T);
  h.server_index = static_cast<std::uint8_t>(server);
  h.l = static_cast<std::uint16_t>(params.l);
  h.k = static_cast<std::uint16_t>(params.k);
  h.case_tag = params.case_tag;
  h.part_len = part_len;
  h.original_len = original_len;
  h.slot_count = static_cast<std::uint16_t>(slot_count);
  return h;
}

std::vector<ShareBlob> materialize(const PaddedFile& file, const KeyPool& keys,
                                   const SharePlan& plan) {
  const SchemeParams& p = plan.params;
  if (static_cast<int>(file.parts.size()) != p.k) {
    throw Error(ErrorKind::InvalidArgument, "file has " + std::to_string(file.parts.size()) +
                                                " parts, plan expects " + std::to_string(p.k));
  }
  if (static_cast<int>(keys.keys.size()) != p.n_keys) {
    throw Error(ErrorKind::InvalidArgument, "key pool size does not match the plan");
  }
  const std::uint64_t len = file.part_len();
  std::vector<ShareBlob> shares;
  shares.reserve(p.T);
  for (int t = 1; t <= p.T; ++t) {
    const auto& layout = plan.share(t);
    ShareBlob blob;
    blob.header = make_header(p, t, len, file.original_len, layout.size());
    blob.payload.resize(layout.size() * len);
    for (std::size_t s = 0; s < layout.size(); ++s) {
      std::span<std::uint8_t> out(blob.payload.data() + s * len, len);
      const SlotSpec& spec = layout[s];
      if (const auto* plain = std::get_if<PlainSlot>(&spec)) {
        std::copy(file.parts[plain->part - 1].begin(), file.parts[plain->part - 1].end(), out.begin());
      } else if (const auto* key = std::get_if<KeySlot>(&spec)) {
        const Bytes& k = keys.key(key->key);
        std::copy(k.begin(), k.end(), out.begin());
      } else if (const auto* enc = std::get_if<EncryptedSlot>(&spec)) {
        std::copy(file.parts[enc->part - 1].begin(), file.parts[enc->part - 1].end(), out.begin());
        for (int index : enc->keys) xor_into(out, keys.key(index));
      } else {
        throw Error(ErrorKind::ConstructionBug, "plan has an unassigned slot" + at_server(t));
      }
    }
    shares.push_back(std::move(blob));
  }
  return shares;
}

std::vector<ShareBlob> encode(std::span<const std::uint8_t> data, const SharePlan& plan,
                              RandomSource& rng) {
  const PaddedFile file = pad(data, plan.params.k);
  const KeyPool keys = generate_keys(plan.params, file.part_len(), rng);
  return materialize(file, keys, plan);
}

Bytes decode(std::span<const ShareBlob> shares, const SharePlan& plan) {
  const SchemeParams& p = plan.params;
  std::vector<const ShareBlob*> by_server(p.T, nullptr);
  for (const auto& blob : shares) {
    const int t = blob.server_index();
    if (t < 1 || t > p.T) {
      throw Error(ErrorKind::HeaderMismatch,
                  "server index " + std::to_string(t) + " outside [1, " + std::to_string(p.T) + "]", t);
    }
    if (by_server[t - 1] != nullptr) {
      throw Error(ErrorKind::HeaderMismatch, "duplicate share" + at_server(t), t);
    }
    by_server[t - 1] = &blob;
  }
  for (int t = 1; t <= p.T; ++t) {
    if (by_server[t - 1] == nullptr) {
      throw Error(ErrorKind::MissingShare, "missing share" + at_server(t), t);
    }
  }

  const ShareHeader& ref = by_server[0]->header;
  const std::uint64_t kk = static_cast<std::uint64_t>(p.k);
  if (ref.part_len != (ref.original_len + kk - 1) / kk) {
    throw Error(ErrorKind::HeaderMismatch, "part length does not match original length", 1);
  }
  for (int t = 1; t <= p.T; ++t) {
    const ShareHeader& h = by_server[t - 1]->header;
    const bool agrees = h.version == ref.version && h.servers == p.T && h.l == p.l &&
                        h.k == p.k && h.case_tag == p.case_tag && h.part_len == ref.part_len &&
                        h.original_len == ref.original_len;
    if (!agrees) {
      throw Error(ErrorKind::HeaderMismatch, "header disagrees with the share set" + at_server(t), t);
    }
    if (h.slot_count != plan.share(t).size()) {
      throw Error(ErrorKind::HeaderMismatch, "slot count disagrees with the layout" + at_server(t), t);
    }
    if (by_server[t - 1]->payload.size() != h.slot_count * h.part_len) {
      throw Error(ErrorKind::PayloadLengthMismatch,
                  "payload is " + std::to_string(by_server[t - 1]->payload.size()) + " bytes, expected " +
                      std::to_string(h.slot_count * h.part_len) + at_server(t),
                  t);
    }
  }

  const std::uint64_t len = ref.part_len;
  std::vector<std::span<const std::uint8_t>> keys(p.n_keys + 1);
  for (int t = 1; t <= p.T; ++t) {
    const auto& layout = plan.share(t);
    for (std::size_t s = 0; s < layout.size(); ++s) {
      if (const auto* key = std::get_if<KeySlot>(&layout[s])) {
        keys.at(key->key) = by_server[t - 1]->slot(s);
      }
    }
  }

  Bytes out(len * kk, 0);
  for (int t = 1; t <= p.T; ++t) {
    const auto& layout = plan.share(t);
    for (std::size_t s = 0; s < layout.size(); ++s) {
      const auto payload = by_server[t - 1]->slot(s);
      int part = 0;
      if (const auto* plain = std::get_if<PlainSlot>(&layout[s])) {
        part = plain->part;
      } else if (const auto* enc = std::get_if<EncryptedSlot>(&layout[s])) {
        part = enc->part;
      } else {
        continue;
      }
      std::span<std::uint8_t> dst(out.data() + (part - 1) * len, len);
      std::copy(payload.begin(), payload.end(), dst.begin());
      if (const auto* enc = std::get_if<EncryptedSlot>(&layout[s])) {
        for (int index : enc->keys) xor_into(dst, keys.at(index));
      }
    }
  }
  out.resize(ref.original_len);
  return out;
}

}  // namespace xorshard
