#include "xorshard/layout.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <sstream>

#include "xorshard/error.hpp"

namespace xorshard {

namespace {

[[noreturn]] void bug(const std::string& what) {
  throw Error(ErrorKind::ConstructionBug, what);
}

void put(SharePlan& plan, int server, int slot, SlotSpec spec) {
  auto& share = plan.slots.at(server - 1);
  if (slot < 1 || slot > static_cast<int>(share.size())) {
    bug("slot " + std::to_string(slot) + " out of range at server " + std::to_string(server));
  }
  auto& target = share[slot - 1];
  if (!std::holds_alternative<std::monostate>(target)) {
    bug("slot " + std::to_string(slot) + " assigned twice at server " + std::to_string(server));
  }
  target = std::move(spec);
}

void put_key_range(SharePlan& plan, int server, int first_slot, int first_key, int count) {
  for (int n = 0; n < count; ++n) {
    put(plan, server, first_slot + n, KeySlot{first_key + n});
  }
}

void require_keyed(const SchemeParams& p) {
  if (!is_keyed(p.case_tag)) {
    throw Error(ErrorKind::InvalidArgument,
                std::string("keyed layout requested for ") + std::string(to_string(p.case_tag)));
  }
}

// Parts dealt out contiguously in clear, server t receiving counts[t-1] parts.
SharePlan plain_split(const SchemeParams& p, const std::vector<int>& counts) {
  SharePlan plan;
  plan.params = p;
  plan.slots.resize(p.T);
  plan.key_ownership.resize(p.T);
  int next = 1;
  for (int t = 1; t <= p.T; ++t) {
    for (int n = 0; n < counts[t - 1] && next <= p.k; ++n) {
      plan.slots[t - 1].emplace_back(PlainSlot{next++});
    }
  }
  if (next != p.k + 1) {
    bug("plain split covers " + std::to_string(next - 1) + " of " + std::to_string(p.k) + " parts");
  }
  return plan;
}

struct Composition {
  int plain = 0;
  int keys = 0;
  int encrypted = 0;
};

// Per-server slot composition of the keyed layouts.
Composition expected_composition(const SchemeParams& p, int t) {
  const int T = p.T, q = p.q, r = p.r, u = p.u, v = p.v, x = p.x;
  if (p.case_tag == CaseTag::Case1) {
    if (t <= r) return {q + 1, u, x};
    if (t <= T - v) return {q, u, x + 1};
    return {q, u + 1, x};
  }
  if (t <= T - v) return {q + 1, u, x};
  if (t <= r) return {q + 1, u + 1, x - 1};
  return {q, u + 1, x};
}

}  // namespace

int SharePlan::owner_of_key(int key) const {
  for (std::size_t t = 0; t < key_ownership.size(); ++t) {
    if (std::binary_search(key_ownership[t].begin(), key_ownership[t].end(), key)) {
      return static_cast<int>(t) + 1;
    }
  }
  return 0;
}

SharePlan assign_plain(const SchemeParams& p) {
  require_keyed(p);
  SharePlan plan;
  plan.params = p;
  plan.slots.assign(p.T, std::vector<SlotSpec>(p.slots_per_share()));
  plan.key_ownership.resize(p.T);
  for (int t = 1; t <= p.T; ++t) {
    for (int s = 1; s <= p.q; ++s) {
      put(plan, t, s, PlainSlot{(t - 1) * p.q + s});
    }
    if (t <= p.r) {
      put(plan, t, p.q + 1, PlainSlot{p.T * p.q + t});
    }
  }
  return plan;
}

void assign_keys(SharePlan& plan) {
  const SchemeParams& p = plan.params;
  require_keyed(p);
  const int T = p.T, q = p.q, r = p.r, u = p.u, v = p.v;
  for (int t = 1; t <= T; ++t) {
    if (p.case_tag == CaseTag::Case1) {
      if (t <= r) {
        put_key_range(plan, t, q + 2, u * (t - 1) + 1, u);
      } else {
        put_key_range(plan, t, q + 1, u * (t - 1) + 1, u);
        if (t > T - v) {
          put(plan, t, q + u + 1, KeySlot{T * u + t - (T - v)});
        }
      }
    } else {
      const int base = u * (T - v) + (u + 1) * (t - T + v - 1);
      if (t <= T - v) {
        put_key_range(plan, t, q + 2, u * (t - 1) + 1, u);
      } else if (t <= r) {
        put_key_range(plan, t, q + 2, base + 1, u + 1);
      } else {
        put_key_range(plan, t, q + 1, base + 1, u + 1);
      }
    }

    auto& owned = plan.key_ownership[t - 1];
    owned.clear();
    for (const auto& slot : plan.slots[t - 1]) {
      if (const auto* key = std::get_if<KeySlot>(&slot)) {
        owned.push_back(key->key);
      }
    }
    std::sort(owned.begin(), owned.end());
  }
}

void assign_encrypted(SharePlan& plan) {
  const SchemeParams& p = plan.params;
  require_keyed(p);
  const int T = p.T, q = p.q, r = p.r, u = p.u, v = p.v, x = p.x;
  const int np = p.n_plain;

  // I_t is consumed strictly in ascending order, so a cursor per server
  // yields "the smallest key not chosen yet".
  std::vector<std::size_t> cursor(T, 0);
  std::vector<int> covered(p.k + 1, 0);

  auto emit = [&](int t, int j, int z) {
    EncryptedSlot slot{j, {}};
    for (int other = 1; other <= T; ++other) {
      if (other == t) continue;
      const auto& pool = plan.key_ownership[other - 1];
      auto& next = cursor[other - 1];
      if (next < pool.size()) {
        slot.keys.push_back(pool[next++]);
      }
    }
    std::sort(slot.keys.begin(), slot.keys.end());
    if (j < 1 || j > p.k) {
      bug("encrypted part index " + std::to_string(j) + " out of range");
    }
    ++covered[j];
    put(plan, t, z, std::move(slot));
  };

  if (p.case_tag == CaseTag::Case1) {
    for (int i = 1; i <= x + 1; ++i) {
      for (int t = 1; t <= T; ++t) {
        const bool last = (i == x + 1);
        if (t <= r) {
          if (!last) emit(t, np + (t - 1) * x + i, q + u + 1 + i);
        } else if (t <= T - v) {
          emit(t, np + r * x + (t - r - 1) * (x + 1) + i, q + u + i);
        } else if (!last) {
          emit(t, np + r * x + (x + 1) * (T - v - r) + (t - T + v - 1) * x + i, q + u + 1 + i);
        }
      }
    }
  } else {
    for (int i = 1; i <= x; ++i) {
      for (int t = 1; t <= T; ++t) {
        if (t <= T - v) {
          emit(t, np + (t - 1) * x + i, q + u + 1 + i);
        } else if (t <= r) {
          if (i != x) emit(t, np + (T - v) * x + (t - T + v - 1) * (x - 1) + i, q + u + 2 + i);
        } else {
          emit(t, np + (T - v) * x + (r - T + v) * (x - 1) + (t - r - 1) * x + i, q + u + 1 + i);
        }
      }
    }
  }

  for (int j = np + 1; j <= p.k; ++j) {
    if (covered[j] != 1) {
      bug("encrypted part F" + std::to_string(j) + " covered " + std::to_string(covered[j]) +
          " times");
    }
  }
}

SharePlan build_layout(const SchemeParams& p) {
  switch (p.case_tag) {
    case CaseTag::Case1:
    case CaseTag::Case2: {
      SharePlan plan = assign_plain(p);
      assign_keys(plan);
      assign_encrypted(plan);
      return plan;
    }
    case CaseTag::PlainSplitFallback: {
      std::vector<int> counts(p.T);
      for (int t = 1; t <= p.T; ++t) counts[t - 1] = p.q + (t <= p.r ? 1 : 0);
      return plain_split(p, counts);
    }
    case CaseTag::TrivialSplit: {
      std::vector<int> counts(p.T);
      for (int t = 1; t <= p.T; ++t) counts[t - 1] = p.k / p.T + (t <= p.k % p.T ? 1 : 0);
      return plain_split(p, counts);
    }
  }
  bug("unknown case tag");
}

void validate_plan(const SharePlan& plan) {
  const SchemeParams& p = plan.params;
  if (static_cast<int>(plan.slots.size()) != p.T ||
      static_cast<int>(plan.key_ownership.size()) != p.T) {
    bug("plan does not describe " + std::to_string(p.T) + " servers");
  }
  std::vector<int> part_seen(p.k + 1, 0);
  std::vector<int> key_stored(p.n_keys + 1, 0);
  std::vector<int> key_used(p.n_keys + 1, 0);
  auto check_key = [&](int key) {
    if (key < 1 || key > p.n_keys) bug("key index K" + std::to_string(key) + " out of range");
  };
  auto check_part = [&](int part) {
    if (part < 1 || part > p.k) bug("part index F" + std::to_string(part) + " out of range");
    ++part_seen[part];
  };

  for (int t = 1; t <= p.T; ++t) {
    const auto& share = plan.slots[t - 1];
    const auto& owned = plan.key_ownership[t - 1];
    Composition got;
    std::vector<int> stored_here;
    for (const auto& slot : share) {
      if (std::holds_alternative<std::monostate>(slot)) {
        bug("unassigned slot at server " + std::to_string(t));
      } else if (const auto* plain = std::get_if<PlainSlot>(&slot)) {
        check_part(plain->part);
        ++got.plain;
      } else if (const auto* key = std::get_if<KeySlot>(&slot)) {
        check_key(key->key);
        ++key_stored[key->key];
        stored_here.push_back(key->key);
        ++got.keys;
      } else {
        const auto& enc = std::get<EncryptedSlot>(slot);
        check_part(enc.part);
        ++got.encrypted;
        if (!std::is_sorted(enc.keys.begin(), enc.keys.end())) bug("unsorted key set");
        if (static_cast<int>(enc.keys.size()) > p.T - 1) bug("too many keys on one slot");
        std::vector<int> owners;
        for (int key : enc.keys) {
          check_key(key);
          ++key_used[key];
          const int owner = plan.owner_of_key(key);
          if (owner == t) {
            bug("server " + std::to_string(t) + " pads its own part with its own key");
          }
          owners.push_back(owner);
        }
        std::sort(owners.begin(), owners.end());
        if (std::adjacent_find(owners.begin(), owners.end()) != owners.end()) {
          bug("two keys from one server on a single slot");
        }
      }
    }
    std::sort(stored_here.begin(), stored_here.end());
    if (stored_here != owned) {
      bug("key ownership of server " + std::to_string(t) + " disagrees with its key slots");
    }
    if (is_keyed(p.case_tag)) {
      if (static_cast<int>(share.size()) != p.slots_per_share()) {
        bug("server " + std::to_string(t) + " does not hold k-l slots");
      }
      const Composition want = expected_composition(p, t);
      if (got.plain != want.plain || got.keys != want.keys || got.encrypted != want.encrypted) {
        bug("slot composition of server " + std::to_string(t) + " is off");
      }
    } else if (got.keys != 0 || got.encrypted != 0) {
      bug("fallback layout holds keys");
    }
  }
  for (int j = 1; j <= p.k; ++j) {
    if (part_seen[j] != 1) bug("part F" + std::to_string(j) + " stored " + std::to_string(part_seen[j]) + " times");
  }
  for (int key = 1; key <= p.n_keys; ++key) {
    if (key_stored[key] != 1) bug("key K" + std::to_string(key) + " stored " + std::to_string(key_stored[key]) + " times");
    if (key_used[key] > 1) bug("key K" + std::to_string(key) + " pads more than one part");
  }
}

std::string format_plan(const SharePlan& plan) {
  const SchemeParams& p = plan.params;
  std::ostringstream out;
  out << "# xorshard plan v1\n";
  out << "params T=" << p.T << " l=" << p.l << " k=" << p.k << " q=" << p.q << " r=" << p.r
      << " u=" << p.u << " v=" << p.v << " x=" << p.x
      << " case=" << static_cast<int>(p.case_tag) << " n_keys=" << p.n_keys
      << " n_plain=" << p.n_plain << " n_encrypted=" << p.n_encrypted << '\n';
  for (int t = 1; t <= static_cast<int>(plan.slots.size()); ++t) {
    const auto& share = plan.slots[t - 1];
    for (std::size_t s = 0; s < share.size(); ++s) {
      out << t << ' ' << s + 1 << ' ';
      std::visit(
          [&](const auto& slot) {
            using S = std::decay_t<decltype(slot)>;
            if constexpr (std::is_same_v<S, std::monostate>) {
              out << "empty";
            } else if constexpr (std::is_same_v<S, PlainSlot>) {
              out << "plain " << slot.part;
            } else if constexpr (std::is_same_v<S, KeySlot>) {
              out << "key " << slot.key;
            } else {
              out << "enc " << slot.part << ' ';
              if (slot.keys.empty()) out << '-';
              for (std::size_t n = 0; n < slot.keys.size(); ++n) {
                out << (n ? "," : "") << slot.keys[n];
              }
            }
          },
          share[s]);
      out << '\n';
    }
  }
  return out.str();
}

std::string format_plan_compact(const SharePlan& plan) {
  std::ostringstream out;
  for (int t = 1; t <= static_cast<int>(plan.slots.size()); ++t) {
    out << "M_" << t << " = (";
    const auto& share = plan.slots[t - 1];
    for (std::size_t s = 0; s < share.size(); ++s) {
      if (s) out << " | ";
      std::visit(
          [&](const auto& slot) {
            using S = std::decay_t<decltype(slot)>;
            if constexpr (std::is_same_v<S, std::monostate>) {
              out << '?';
            } else if constexpr (std::is_same_v<S, PlainSlot>) {
              out << 'F' << slot.part;
            } else if constexpr (std::is_same_v<S, KeySlot>) {
              out << 'K' << slot.key;
            } else {
              out << 'F' << slot.part;
              for (int key : slot.keys) out << "+K" << key;
            }
          },
          share[s]);
    }
    out << ")\n";
  }
  return out.str();
}

SharePlan parse_plan(std::istream& in) {
  auto fail = [](int line_no, const std::string& what) -> void {
    throw Error(ErrorKind::PlanSyntax, "plan line " + std::to_string(line_no) + ": " + what);
  };
  auto to_int = [&](const std::string& s, int line_no) {
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) fail(line_no, "expected an integer, got '" + s + "'");
    return value;
  };

  std::optional<SchemeParams> params;
  std::map<int, std::map<int, SlotSpec>> cells;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string head;
    fields >> head;
    if (head == "params") {
      SchemeParams p;
      std::map<std::string, int*> slots{{"T", &p.T}, {"l", &p.l}, {"k", &p.k}, {"q", &p.q},
                                        {"r", &p.r}, {"u", &p.u}, {"v", &p.v}, {"x", &p.x},
                                        {"n_keys", &p.n_keys}, {"n_plain", &p.n_plain},
                                        {"n_encrypted", &p.n_encrypted}};
      int tag = 0;
      std::string kv;
      std::size_t seen = 0;
      while (fields >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) fail(line_no, "expected key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const int value = to_int(kv.substr(eq + 1), line_no);
        if (key == "case") {
          tag = value;
        } else if (auto it = slots.find(key); it != slots.end()) {
          *it->second = value;
        } else {
          fail(line_no, "unknown parameter '" + key + "'");
        }
        ++seen;
      }
      if (seen != slots.size() + 1) fail(line_no, "incomplete params line");
      if (tag < 1 || tag > 4) fail(line_no, "unknown case tag");
      if (p.T < 2 || p.T > kMaxServers || p.k < 1 || p.k > kMaxParts || p.n_keys < 0) {
        fail(line_no, "parameters out of range");
      }
      p.case_tag = static_cast<CaseTag>(tag);
      params = p;
      continue;
    }
    if (!params) fail(line_no, "slot line before params line");
    std::string slot_text, kind, a, b;
    fields >> slot_text >> kind >> a;
    const int t = to_int(head, line_no);
    const int s = to_int(slot_text, line_no);
    if (t < 1 || t > params->T || s < 1) fail(line_no, "server or slot index out of range");
    SlotSpec spec;
    if (kind == "plain") {
      spec = PlainSlot{to_int(a, line_no)};
    } else if (kind == "key") {
      spec = KeySlot{to_int(a, line_no)};
    } else if (kind == "enc") {
      EncryptedSlot enc{to_int(a, line_no), {}};
      if (!(fields >> b)) fail(line_no, "encrypted slot without key list");
      if (b != "-") {
        std::istringstream list(b);
        std::string item;
        while (std::getline(list, item, ',')) enc.keys.push_back(to_int(item, line_no));
      }
      std::sort(enc.keys.begin(), enc.keys.end());
      spec = std::move(enc);
    } else {
      fail(line_no, "unknown slot kind '" + kind + "'");
    }
    std::string extra;
    if (fields >> extra) fail(line_no, "trailing text '" + extra + "'");
    if (!cells[t].emplace(s, std::move(spec)).second) fail(line_no, "duplicate slot");
  }
  if (!params) throw Error(ErrorKind::PlanSyntax, "plan has no params line");

  SharePlan plan;
  plan.params = *params;
  plan.slots.resize(params->T);
  plan.key_ownership.resize(params->T);
  for (auto& [t, row] : cells) {
    int expect = 1;
    for (auto& [s, spec] : row) {
      if (s != expect++) {
        throw Error(ErrorKind::PlanSyntax, "server " + std::to_string(t) + " skips slot " +
                                               std::to_string(expect - 1));
      }
      if (const auto* key = std::get_if<KeySlot>(&spec)) {
        plan.key_ownership[t - 1].push_back(key->key);
      }
      plan.slots[t - 1].push_back(std::move(spec));
    }
    std::sort(plan.key_ownership[t - 1].begin(), plan.key_ownership[t - 1].end());
  }
  return plan;
}

}  // namespace xorshard
