#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "xorshard/share.hpp"

namespace xorshard {

// .xrsh layout (little-endian):
//   off  size  field
//     0     4  magic "XRSH"
//     4     1  version (1)
//     5     1  T
//     6     1  server index
//     7     2  l
//     9     2  k
//    11     1  case tag
//    12     8  part length (bytes)
//    20     8  original file length (bytes)
//    28     2  slot count
//    30    32  SHA-256 over bytes [0, 30) followed by the payload
//    62     -  payload, slot_count * part_length bytes
inline constexpr std::array<std::uint8_t, 4> kShareMagic{'X', 'R', 'S', 'H'};
inline constexpr std::uint8_t kShareVersion = 1;
inline constexpr std::size_t kDigestOffset = 30;
inline constexpr std::size_t kHeaderSize = 62;

[[nodiscard]] Digest share_digest(const ShareBlob& blob);

// Canonical bytes; the stored digest is recomputed, whatever blob.header.digest holds.
[[nodiscard]] Bytes serialize_share(const ShareBlob& blob);

/// Parses and validates one share. Distinct error kinds for bad magic,
/// unsupported version, truncated input, digest mismatch and malformed fields.
[[nodiscard]] ShareBlob deserialize_share(std::span<const std::uint8_t> bytes);

// Per-server directories standing in for the T storage servers.
struct Dispersal {
  std::vector<std::filesystem::path> server_dirs;  // server_dirs[t - 1] is server t

  // root/server_1 ... root/server_T
  [[nodiscard]] static Dispersal under_root(const std::filesystem::path& root, int servers);
  [[nodiscard]] int servers() const noexcept { return static_cast<int>(server_dirs.size()); }
  [[nodiscard]] std::filesystem::path share_path(int server) const;
};

/// Writes share_<t>.xrsh into each server directory via temp file + rename.
/// On failure every file written by this call is removed and the error names
/// the offending server.
void disperse(std::span<const ShareBlob> blobs, const Dispersal& dispersal);

// Reads every share back; errors carry the server index.
[[nodiscard]] std::vector<ShareBlob> collect(const Dispersal& dispersal);

[[nodiscard]] Bytes read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace xorshard
