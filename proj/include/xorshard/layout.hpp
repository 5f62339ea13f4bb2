#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "xorshard/params.hpp"

namespace xorshard {

// Part and key indices are 1-based throughout the layout.

struct PlainSlot {
  int part = 0;
  friend bool operator==(const PlainSlot&, const PlainSlot&) = default;
};

struct KeySlot {
  int key = 0;
  friend bool operator==(const KeySlot&, const KeySlot&) = default;
};

// Part XORed with at most one key from each foreign server. `keys` is kept
// sorted ascending; an empty set means every foreign pool was exhausted.
struct EncryptedSlot {
  int part = 0;
  std::vector<int> keys;
  friend bool operator==(const EncryptedSlot&, const EncryptedSlot&) = default;
};

// std::monostate marks a slot no assignment pass has filled yet.
using SlotSpec = std::variant<std::monostate, PlainSlot, KeySlot, EncryptedSlot>;

/// Symbolic description of every share: what each slot of each server holds.
struct SharePlan {
  SchemeParams params;
  // slots[t - 1] is the ordered slot list of server t.
  std::vector<std::vector<SlotSpec>> slots;
  // key_ownership[t - 1] is I_t, ascending.
  std::vector<std::vector<int>> key_ownership;

  [[nodiscard]] const std::vector<SlotSpec>& share(int server) const { return slots.at(server - 1); }
  [[nodiscard]] const std::vector<int>& keys_of(int server) const { return key_ownership.at(server - 1); }
  // Server owning key `key`, or 0 if no server stores it.
  [[nodiscard]] int owner_of_key(int key) const;

  friend bool operator==(const SharePlan&, const SharePlan&) = default;
};

// Plain parts F_{(t-1)q+1 .. tq} at slots 1..q, plus F_{Tq+t} at slot q+1 for t <= r.
// Returns a plan with k-l empty slots per server; only keyed cases are accepted.
[[nodiscard]] SharePlan assign_plain(const SchemeParams& params);

// Places the keys and records each server's key set.
void assign_keys(SharePlan& plan);

// Creates the encrypted slots, choosing for each foreign server the smallest
// not-yet-used key it owns. Loop order (slot rank outer, server inner) fixes
// which key pads which part.
void assign_encrypted(SharePlan& plan);

[[nodiscard]] SharePlan build_layout(const SchemeParams& params);

/// Throws ConstructionBug when the plan breaks a structural invariant
/// (part coverage, key partition, single use, foreign keys only, slot counts).
void validate_plan(const SharePlan& plan);

// Line-oriented dump; see docs/plan_format.md.
[[nodiscard]] std::string format_plan(const SharePlan& plan);
// One line per server, e.g. "M_1 = (F1 | K1 | F2+K2+K4)".
[[nodiscard]] std::string format_plan_compact(const SharePlan& plan);
// Inverse of format_plan. Does not validate; audit the result instead.
[[nodiscard]] SharePlan parse_plan(std::istream& in);

}  // namespace xorshard
