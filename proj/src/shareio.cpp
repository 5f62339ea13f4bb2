#include "xorshard/shareio.hpp"

#include <sodium.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <system_error>

#include "xorshard/error.hpp"

namespace xorshard {

namespace fs = std::filesystem;

namespace {

template <typename U>
void put_le(Bytes& out, U value) {
  for (std::size_t b = 0; b < sizeof(U); ++b) out.push_back(static_cast<std::uint8_t>(value >> (8 * b)));
}

template <typename U>
U get_le(std::span<const std::uint8_t> in, std::size_t offset) {
  U value = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) value |= static_cast<U>(in[offset + b]) << (8 * b);
  return value;
}

Bytes header_prefix(const ShareHeader& h) {
  Bytes out(kShareMagic.begin(), kShareMagic.end());
  out.push_back(h.version);
  out.push_back(h.servers);
  out.push_back(h.server_index);
  put_le(out, h.l);
  put_le(out, h.k);
  out.push_back(static_cast<std::uint8_t>(h.case_tag));
  put_le(out, h.part_len);
  put_le(out, h.original_len);
  put_le(out, h.slot_count);
  return out;
}

Digest digest_of(std::span<const std::uint8_t> prefix, std::span<const std::uint8_t> payload) {
  if (sodium_init() < 0) throw Error(ErrorKind::RandomnessFailure, "libsodium initialisation failed");
  crypto_hash_sha256_state state;
  crypto_hash_sha256_init(&state);
  crypto_hash_sha256_update(&state, prefix.data(), prefix.size());
  crypto_hash_sha256_update(&state, payload.data(), payload.size());
  Digest d{};
  crypto_hash_sha256_final(&state, d.data());
  return d;
}

std::string server_tag(int t) { return "server " + std::to_string(t) + ": "; }

}  // namespace

Digest share_digest(const ShareBlob& blob) {
  return digest_of(header_prefix(blob.header), blob.payload);
}

Bytes serialize_share(const ShareBlob& blob) {
  Bytes out = header_prefix(blob.header);
  const Digest d = digest_of(out, blob.payload);
  out.insert(out.end(), d.begin(), d.end());
  out.insert(out.end(), blob.payload.begin(), blob.payload.end());
  return out;
}

ShareBlob deserialize_share(std::span<const std::uint8_t> bytes) {
  const std::size_t magic_len = std::min(bytes.size(), kShareMagic.size());
  if (!std::equal(bytes.begin(), bytes.begin() + magic_len, kShareMagic.begin())) {
    throw Error(ErrorKind::BadMagic, "not an xrsh share (bad magic)");
  }
  if (bytes.size() < kHeaderSize) {
    throw Error(ErrorKind::Truncated, "share shorter than its " + std::to_string(kHeaderSize) + "-byte header");
  }
  ShareBlob blob;
  ShareHeader& h = blob.header;
  h.version = bytes[4];
  if (h.version != kShareVersion) {
    throw Error(ErrorKind::UnsupportedVersion, "unsupported share version " + std::to_string(h.version));
  }
  h.servers = bytes[5];
  h.server_index = bytes[6];
  h.l = get_le<std::uint16_t>(bytes, 7);
  h.k = get_le<std::uint16_t>(bytes, 9);
  const std::uint8_t tag = bytes[11];
  h.part_len = get_le<std::uint64_t>(bytes, 12);
  h.original_len = get_le<std::uint64_t>(bytes, 20);
  h.slot_count = get_le<std::uint16_t>(bytes, 28);
  std::copy_n(bytes.begin() + kDigestOffset, h.digest.size(), h.digest.begin());

  const std::size_t available = bytes.size() - kHeaderSize;
  if (h.slot_count != 0 && h.part_len > std::numeric_limits<std::size_t>::max() / h.slot_count) {
    throw Error(ErrorKind::MalformedHeader, "payload size overflows");
  }
  const std::size_t expected = static_cast<std::size_t>(h.part_len) * h.slot_count;
  if (available < expected) {
    throw Error(ErrorKind::Truncated, "payload has " + std::to_string(available) + " of " +
                                          std::to_string(expected) + " bytes");
  }
  if (available > expected) {
    throw Error(ErrorKind::MalformedHeader, std::to_string(available - expected) + " trailing bytes after payload");
  }
  const auto payload = bytes.subspan(kHeaderSize);
  if (digest_of(bytes.first(kDigestOffset), payload) != h.digest) {
    throw Error(ErrorKind::DigestMismatch, "share digest mismatch");
  }
  if (h.servers < 2 || h.server_index < 1 || h.server_index > h.servers || h.k < 1 || h.l > h.k ||
      tag < 1 || tag > 4) {
    throw Error(ErrorKind::MalformedHeader, "share header fields out of range");
  }
  h.case_tag = static_cast<CaseTag>(tag);
  blob.payload.assign(payload.begin(), payload.end());
  return blob;
}

Dispersal Dispersal::under_root(const fs::path& root, int servers) {
  Dispersal d;
  for (int t = 1; t <= servers; ++t) d.server_dirs.push_back(root / ("server_" + std::to_string(t)));
  return d;
}

fs::path Dispersal::share_path(int server) const {
  return server_dirs.at(server - 1) / ("share_" + std::to_string(server) + ".xrsh");
}

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::Io, "read failed: " + path.string());
  return data;
}

namespace {

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

fs::path temp_path_for(const fs::path& path) {
  return path.parent_path() / ("." + path.filename().string() + ".tmp");
}

}  // namespace

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  const fs::path tmp = temp_path_for(path);
  write_file(tmp, bytes);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::Io, "cannot rename into " + path.string());
  }
}

void disperse(std::span<const ShareBlob> blobs, const Dispersal& dispersal) {
  if (static_cast<int>(blobs.size()) != dispersal.servers()) {
    throw Error(ErrorKind::InvalidArgument, std::to_string(blobs.size()) + " shares for " +
                                                std::to_string(dispersal.servers()) + " server directories");
  }
  std::vector<fs::path> staged;
  std::vector<fs::path> placed;
  auto roll_back = [&] {
    std::error_code ignored;
    for (const auto& p : staged) fs::remove(p, ignored);
    for (const auto& p : placed) fs::remove(p, ignored);
  };

  for (const auto& blob : blobs) {
    const int t = blob.server_index();
    if (t < 1 || t > dispersal.servers()) {
      roll_back();
      throw Error(ErrorKind::InvalidArgument, "share with server index " + std::to_string(t), t);
    }
    const fs::path final_path = dispersal.share_path(t);
    const fs::path tmp = temp_path_for(final_path);
    try {
      std::error_code ec;
      fs::create_directories(dispersal.server_dirs[t - 1], ec);
      if (ec) throw Error(ErrorKind::Io, "cannot create " + dispersal.server_dirs[t - 1].string());
      write_file(tmp, serialize_share(blob));
      staged.push_back(tmp);
    } catch (const Error& e) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      roll_back();
      throw Error(ErrorKind::Io, server_tag(t) + e.what(), t);
    }
  }
  for (std::size_t n = 0; n < staged.size(); ++n) {
    const int t = blobs[n].server_index();
    std::error_code ec;
    fs::rename(staged[n], dispersal.share_path(t), ec);
    if (ec) {
      roll_back();
      throw Error(ErrorKind::Io, server_tag(t) + "cannot rename into " + dispersal.share_path(t).string(), t);
    }
    placed.push_back(dispersal.share_path(t));
  }
}

std::vector<ShareBlob> collect(const Dispersal& dispersal) {
  std::vector<ShareBlob> blobs;
  for (int t = 1; t <= dispersal.servers(); ++t) {
    const fs::path path = dispersal.share_path(t);
    if (!fs::exists(path)) {
      throw Error(ErrorKind::MissingShare, server_tag(t) + "no share at " + path.string(), t);
    }
    try {
      blobs.push_back(deserialize_share(read_file(path)));
    } catch (const Error& e) {
      throw Error(e.kind(), server_tag(t) + e.what(), t);
    }
    if (blobs.back().server_index() != t) {
      throw Error(ErrorKind::HeaderMismatch,
                  server_tag(t) + "file claims server " + std::to_string(blobs.back().server_index()), t);
    }
  }
  return blobs;
}

}  // namespace xorshard
