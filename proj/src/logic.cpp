/*
 * Copyright 2026 The pumsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pumsim/logic.hpp"

#include <algorithm>
#include <random>
#include <utility>

#include "pumsim/error.hpp"

namespace pumsim {

// ---------------------------------------------------------------------------
// LogicNetwork

LogicNetwork::Id LogicNetwork::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size() - 1);
}

void LogicNetwork::check_id(Id id) const {
  if (id >= nodes_.size()) fail(ErrorCode::InvalidArgument, "unknown logic node " + std::to_string(id));
}

LogicNetwork::Id LogicNetwork::add_input(std::string name, std::uint32_t bit) {
  Node n;
  n.kind = Kind::Input;
  n.port = {std::move(name), bit};
  for (Id i : inputs_)
    if (nodes_[i].port == n.port) fail(ErrorCode::InvalidArgument, "duplicate input " + n.port.str());
  const Id id = push(std::move(n));
  inputs_.push_back(id);
  return id;
}

LogicNetwork::Id LogicNetwork::add_const(bool value) {
  Node n;
  n.kind = Kind::Const;
  n.value = value;
  return push(std::move(n));
}

LogicNetwork::Id LogicNetwork::add_and(Id a, Id b) {
  check_id(a);
  check_id(b);
  return push(Node{Kind::And, a, b, false, {}});
}

LogicNetwork::Id LogicNetwork::add_or(Id a, Id b) {
  check_id(a);
  check_id(b);
  return push(Node{Kind::Or, a, b, false, {}});
}

LogicNetwork::Id LogicNetwork::add_not(Id a) {
  check_id(a);
  return push(Node{Kind::Not, a, 0, false, {}});
}

LogicNetwork::Id LogicNetwork::add_xor(Id a, Id b) {
  return add_and(add_or(a, b), add_not(add_and(a, b)));
}

void LogicNetwork::add_output(std::string name, std::uint32_t bit, Id node) {
  check_id(node);
  outputs_.emplace_back(PortRef{std::move(name), bit}, node);
}

void LogicNetwork::set_fanin(Id node, int slot, Id fanin) {
  check_id(node);
  check_id(fanin);
  Node& n = nodes_[node];
  const bool binary = n.kind == Kind::And || n.kind == Kind::Or;
  if ((slot == 0 && (binary || n.kind == Kind::Not)) ) {
    n.a = fanin;
  } else if (slot == 1 && binary) {
    n.b = fanin;
  } else {
    fail(ErrorCode::InvalidArgument, "node " + std::to_string(node) + " has no fanin slot " + std::to_string(slot));
  }
}

std::vector<LogicNetwork::Id> LogicNetwork::topological_order() const {
  // Iterative DFS with three colours; a grey hit is a cycle.
  std::vector<std::uint8_t> colour(nodes_.size(), 0);
  std::vector<Id> order;
  order.reserve(nodes_.size());
  std::vector<std::pair<Id, int>> stack;
  for (Id root = 0; root < nodes_.size(); ++root) {
    if (colour[root]) continue;
    stack.emplace_back(root, 0);
    colour[root] = 1;
    while (!stack.empty()) {
      auto& [id, next] = stack.back();
      const Node& n = nodes_[id];
      const int arity = n.kind == Kind::And || n.kind == Kind::Or ? 2 : n.kind == Kind::Not ? 1 : 0;
      if (next < arity) {
        const Id f = next == 0 ? n.a : n.b;
        ++next;
        if (colour[f] == 1) fail(ErrorCode::CyclicNetwork, "logic network has a cycle through node " + std::to_string(f));
        if (colour[f] == 0) {
          colour[f] = 1;
          stack.emplace_back(f, 0);
        }
        continue;
      }
      colour[id] = 2;
      order.push_back(id);
      stack.pop_back();
    }
  }
  return order;
}

std::vector<std::uint64_t> LogicNetwork::evaluate(const std::vector<std::uint64_t>& in) const {
  if (in.size() != inputs_.size()) fail(ErrorCode::InvalidArgument, "one word per input expected");
  std::vector<std::uint64_t> v(nodes_.size(), 0);
  for (std::size_t i = 0; i < inputs_.size(); ++i) v[inputs_[i]] = in[i];
  for (Id id : topological_order()) {
    const Node& n = nodes_[id];
    switch (n.kind) {
      case Kind::Input: break;
      case Kind::Const: v[id] = n.value ? ~std::uint64_t{0} : 0; break;
      case Kind::And: v[id] = v[n.a] & v[n.b]; break;
      case Kind::Or: v[id] = v[n.a] | v[n.b]; break;
      case Kind::Not: v[id] = ~v[n.a]; break;
    }
  }
  std::vector<std::uint64_t> out;
  out.reserve(outputs_.size());
  for (const auto& [port, id] : outputs_) out.push_back(v[id]);
  return out;
}

// ---------------------------------------------------------------------------
// MajNetwork

MajNetwork::MajNetwork() { fanins_.push_back({0, 0, 0}); }

MajNetwork::Signal MajNetwork::create_pi(std::string name, std::uint32_t bit) {
  if (fanins_.size() != pis_.size() + 1) fail(ErrorCode::InvalidArgument, "inputs must be created before MAJ nodes");
  PortRef port{std::move(name), bit};
  for (const auto& p : pis_)
    if (p == port) fail(ErrorCode::InvalidArgument, "duplicate input " + port.str());
  pis_.push_back(std::move(port));
  fanins_.push_back({0, 0, 0});
  return make_signal(static_cast<std::uint32_t>(fanins_.size() - 1), false);
}

bool MajNetwork::simplify(std::array<Signal, 3>& f, bool& flip, Signal& out) {
  std::sort(f.begin(), f.end());
  if (f[0] == f[1] || f[1] == f[2]) {
    out = f[1];
    return true;
  }
  if ((f[0] ^ 1u) == f[1]) {
    out = f[2];
    return true;
  }
  if ((f[1] ^ 1u) == f[2]) {
    out = f[0];
    return true;
  }
  flip = (is_complemented(f[0]) + is_complemented(f[1]) + is_complemented(f[2])) >= 2;
  if (flip)
    for (auto& s : f) s ^= 1u;
  return false;
}

bool MajNetwork::lookup_maj(Signal a, Signal b, Signal c, Signal& out) const {
  std::array<Signal, 3> f{a, b, c};
  bool flip = false;
  if (simplify(f, flip, out)) return true;
  auto it = strash_.find(f);
  if (it == strash_.end()) return false;
  out = make_signal(it->second, flip);
  return true;
}

MajNetwork::Signal MajNetwork::create_maj(Signal a, Signal b, Signal c) {
  for (Signal s : {a, b, c})
    if (node_of(s) >= fanins_.size()) fail(ErrorCode::InvalidArgument, "unknown MAJ fanin");
  std::array<Signal, 3> f{a, b, c};
  bool flip = false;
  Signal out = 0;
  if (simplify(f, flip, out)) return out;
  auto [it, inserted] = strash_.try_emplace(f, static_cast<std::uint32_t>(fanins_.size()));
  if (inserted) fanins_.push_back(f);
  return make_signal(it->second, flip);
}

void MajNetwork::create_po(std::string name, std::uint32_t bit, Signal s) {
  if (node_of(s) >= fanins_.size()) fail(ErrorCode::InvalidArgument, "unknown output signal");
  outputs_.emplace_back(PortRef{std::move(name), bit}, s);
}

namespace {

std::vector<bool> reachable(const MajNetwork& net) {
  std::vector<bool> live(net.size(), false);
  for (const auto& [port, s] : net.outputs()) live[MajNetwork::node_of(s)] = true;
  for (std::size_t n = net.size(); n-- > 0;) {
    if (!live[n] || !net.is_maj(static_cast<std::uint32_t>(n))) continue;
    for (auto f : net.fanins(static_cast<std::uint32_t>(n))) live[MajNetwork::node_of(f)] = true;
  }
  return live;
}

}  // namespace

std::size_t MajNetwork::num_maj() const {
  const auto live = reachable(*this);
  std::size_t n = 0;
  for (std::uint32_t i = 0; i < size(); ++i) n += live[i] && is_maj(i);
  return n;
}

MajNetwork MajNetwork::cleanup() const {
  const auto live = reachable(*this);
  MajNetwork out;
  std::vector<Signal> map(size(), const0);
  for (std::uint32_t i = 1; i <= pis_.size(); ++i) map[i] = out.create_pi(pis_[i - 1].name, pis_[i - 1].bit);
  auto m = [&map](Signal s) { return map[node_of(s)] ^ (s & 1u); };
  for (std::uint32_t n = static_cast<std::uint32_t>(pis_.size()) + 1; n < size(); ++n) {
    if (!live[n]) continue;
    const auto& f = fanins_[n];
    map[n] = out.create_maj(m(f[0]), m(f[1]), m(f[2]));
  }
  for (const auto& [port, s] : outputs_) out.create_po(port.name, port.bit, m(s));
  return out;
}

std::vector<std::uint64_t> MajNetwork::evaluate(const std::vector<std::uint64_t>& in) const {
  if (in.size() != pis_.size()) fail(ErrorCode::InvalidArgument, "one word per input expected");
  std::vector<std::uint64_t> v(size(), 0);
  for (std::size_t i = 0; i < pis_.size(); ++i) v[i + 1] = in[i];
  auto val = [&v](Signal s) { return is_complemented(s) ? ~v[node_of(s)] : v[node_of(s)]; };
  for (std::uint32_t n = static_cast<std::uint32_t>(pis_.size()) + 1; n < size(); ++n) {
    const auto& f = fanins_[n];
    const std::uint64_t a = val(f[0]), b = val(f[1]), c = val(f[2]);
    v[n] = (a & b) | (a & c) | (b & c);
  }
  std::vector<std::uint64_t> out;
  out.reserve(outputs_.size());
  for (const auto& [port, s] : outputs_) out.push_back(val(s));
  return out;
}

// ---------------------------------------------------------------------------
// Rewriting

namespace {

// Source codes inside a template: 0 = constant 0, 1..3 = leaves x0..x2,
// 4.. = earlier template nodes. Edge = source << 1 | complemented.
struct Template {
  std::uint8_t size = 0xff;  // 0xff: not representable in <= 3 nodes
  std::array<std::array<std::uint8_t, 3>, 3> nodes{};
  std::uint8_t out = 0;
};

constexpr std::uint8_t leaf_tt[4] = {0x00, 0xaa, 0xcc, 0xf0};

std::uint8_t maj8(std::uint8_t a, std::uint8_t b, std::uint8_t c) {
  return static_cast<std::uint8_t>((a & b) | (a & c) | (b & c));
}

class TemplateDb {
 public:
  TemplateDb() {
    for (std::uint8_t s = 0; s < 4; ++s)
      for (std::uint8_t pol = 0; pol < 2; ++pol) {
        const auto tt = static_cast<std::uint8_t>(pol ? ~leaf_tt[s] : leaf_tt[s]);
        if (db_[tt].size != 0) {
          db_[tt].size = 0;
          db_[tt].out = static_cast<std::uint8_t>(s << 1 | pol);
        }
      }
    Template cur;
    std::array<std::uint8_t, 7> tts{};
    for (int i = 0; i < 4; ++i) tts[i] = leaf_tt[i];
    grow(cur, tts, 0);
  }

  const Template& operator[](std::uint8_t tt) const { return db_[tt]; }

 private:
  void grow(Template& cur, std::array<std::uint8_t, 7>& tts, int depth) {
    if (depth == 3) return;
    const int avail = 4 + depth;
    for (int i = 0; i < avail; ++i)
      for (int j = i + 1; j < avail; ++j)
        for (int k = j + 1; k < avail; ++k)
          for (int pol = 0; pol < 4; ++pol) {  // no complement, or exactly one of the three
            const std::array<int, 3> src{i, j, k};
            std::array<std::uint8_t, 3> edge{};
            std::array<std::uint8_t, 3> val{};
            for (int e = 0; e < 3; ++e) {
              const bool c = pol == e + 1;
              edge[e] = static_cast<std::uint8_t>(src[e] << 1 | c);
              val[e] = static_cast<std::uint8_t>(c ? ~tts[src[e]] : tts[src[e]]);
            }
            cur.nodes[depth] = edge;
            const std::uint8_t tt = maj8(val[0], val[1], val[2]);
            tts[4 + depth] = tt;
            const auto size = static_cast<std::uint8_t>(depth + 1);
            for (int c = 0; c < 2; ++c) {
              const auto f = static_cast<std::uint8_t>(c ? ~tt : tt);
              if (db_[f].size > size) {
                db_[f] = cur;
                db_[f].size = size;
                db_[f].out = static_cast<std::uint8_t>((4 + depth) << 1 | c);
              }
            }
            grow(cur, tts, depth + 1);
          }
  }

  std::array<Template, 256> db_{};
};

const TemplateDb& template_db() {
  static const TemplateDb db;
  return db;
}

using Signal = MajNetwork::Signal;

struct Cut {
  std::array<std::uint32_t, 3> leaves{};
  std::uint8_t size = 0;

  bool contains(const Cut& other) const {  // other is a subset of this
    for (std::uint8_t i = 0; i < other.size; ++i)
      if (std::find(leaves.begin(), leaves.begin() + size, other.leaves[i]) == leaves.begin() + size) return false;
    return true;
  }
  friend bool operator==(const Cut& a, const Cut& b) {
    return a.size == b.size && std::equal(a.leaves.begin(), a.leaves.begin() + a.size, b.leaves.begin());
  }
};

bool merge(const Cut& a, const Cut& b, Cut& out) {
  std::array<std::uint32_t, 6> tmp{};
  std::size_t n = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size || j < b.size) {
    std::uint32_t v;
    if (j == b.size || (i < a.size && a.leaves[i] < b.leaves[j])) v = a.leaves[i++];
    else if (i == a.size || b.leaves[j] < a.leaves[i]) v = b.leaves[j++];
    else { v = a.leaves[i++]; ++j; }
    if (n == 3) return false;
    tmp[n++] = v;
  }
  out.size = static_cast<std::uint8_t>(n);
  std::copy(tmp.begin(), tmp.begin() + n, out.leaves.begin());
  return true;
}

class Rewriter {
 public:
  Rewriter(const MajNetwork& net, std::size_t cut_limit, bool zero_gain)
      : old_(net), limit_(cut_limit), zero_gain_(zero_gain), refs_(net.size(), 0), cuts_(net.size()), stamp_(net.size(), 0),
        tt_(net.size(), 0) {
    for (std::uint32_t n = 0; n < net.size(); ++n)
      if (net.is_maj(n))
        for (auto f : net.fanins(n)) ++refs_[MajNetwork::node_of(f)];
    for (const auto& [port, s] : net.outputs()) ++refs_[MajNetwork::node_of(s)];
    enumerate_cuts();
  }

  MajNetwork run() {
    MajNetwork out;
    map_.assign(old_.size(), MajNetwork::const0);
    for (std::uint32_t i = 1; i <= old_.pis().size(); ++i)
      map_[i] = out.create_pi(old_.pis()[i - 1].name, old_.pis()[i - 1].bit);
    const auto& db = template_db();
    for (std::uint32_t n = static_cast<std::uint32_t>(old_.pis().size()) + 1; n < old_.size(); ++n) {
      if (refs_[n] == 0) continue;
      const Cut* best = nullptr;
      // Zero-gain moves restructure shared logic so a later pass can find a gain.
      int best_gain = zero_gain_ ? -1 : 0;
      int best_new = 0;
      for (const Cut& cut : cuts_[n]) {
        if ((cut.size == 1 && cut.leaves[0] == n) || is_fanin_cut(n, cut)) continue;
        const Template& t = db[truth_table(n, cut)];
        if (t.size == 0xff) continue;
        std::vector<std::uint32_t> mffc;
        const int saved = mffc_size(n, cut, mffc);
        std::vector<std::uint32_t> excluded;
        for (auto m : mffc)
          if (m != n) excluded.push_back(MajNetwork::node_of(map_[m]));
        const int added = dry_run(out, t, cut, excluded);
        const int gain = saved - added;
        if (gain > best_gain || (gain == best_gain && best && added < best_new)) {
          best = &cut;
          best_gain = gain;
          best_new = added;
        }
      }
      if (best) {
        map_[n] = instantiate(out, db[truth_table(n, *best)], *best);
      } else {
        const auto& f = old_.fanins(n);
        map_[n] = out.create_maj(m(f[0]), m(f[1]), m(f[2]));
      }
    }
    for (const auto& [port, s] : old_.outputs()) out.create_po(port.name, port.bit, m(s));
    return out.cleanup();
  }

 private:
  Signal m(Signal s) const { return map_[MajNetwork::node_of(s)] ^ (s & 1u); }

  void enumerate_cuts() {
    for (std::uint32_t n = 0; n < old_.size(); ++n) {
      auto& cs = cuts_[n];
      if (old_.is_constant(n)) {
        cs.push_back(Cut{});
        continue;
      }
      Cut self;
      self.leaves[0] = n;
      self.size = 1;
      if (old_.is_pi(n)) {
        cs.push_back(self);
        continue;
      }
      const auto& f = old_.fanins(n);
      const auto& c0 = cuts_[MajNetwork::node_of(f[0])];
      const auto& c1 = cuts_[MajNetwork::node_of(f[1])];
      const auto& c2 = cuts_[MajNetwork::node_of(f[2])];
      std::vector<Cut> found;
      for (const Cut& a : c0)
        for (const Cut& b : c1) {
          Cut ab;
          if (!merge(a, b, ab)) continue;
          for (const Cut& c : c2) {
            Cut abc;
            if (!merge(ab, c, abc)) continue;
            bool dominated = false;
            for (const Cut& g : found)
              if (abc.contains(g)) {
                dominated = true;
                break;
              }
            if (dominated) continue;
            found.erase(std::remove_if(found.begin(), found.end(), [&](const Cut& g) { return g.contains(abc); }),
                        found.end());
            found.push_back(abc);
          }
        }
      // Small cuts first; among equals, leaves nearer the inputs cover larger cones.
      std::sort(found.begin(), found.end(), [](const Cut& a, const Cut& b) {
        if (a.size != b.size) return a.size < b.size;
        return a.leaves < b.leaves;
      });
      if (found.size() > limit_) found.resize(limit_);
      cs = std::move(found);
      cs.push_back(self);
    }
  }

  std::uint8_t truth_table(std::uint32_t root, const Cut& cut) {
    ++epoch_;
    stamp_[0] = epoch_;
    tt_[0] = 0;
    for (std::uint8_t i = 0; i < cut.size; ++i) {
      stamp_[cut.leaves[i]] = epoch_;
      tt_[cut.leaves[i]] = leaf_tt[i + 1];
    }
    return simulate(root);
  }

  std::uint8_t simulate(std::uint32_t n) {
    if (stamp_[n] == epoch_) return tt_[n];
    if (!old_.is_maj(n)) fail(ErrorCode::Internal, "cut does not separate the cone from the inputs");
    std::array<std::uint8_t, 3> v{};
    const auto& f = old_.fanins(n);
    for (int i = 0; i < 3; ++i) {
      const std::uint8_t x = simulate(MajNetwork::node_of(f[i]));
      v[i] = MajNetwork::is_complemented(f[i]) ? static_cast<std::uint8_t>(~x) : x;
    }
    stamp_[n] = epoch_;
    tt_[n] = maj8(v[0], v[1], v[2]);
    return tt_[n];
  }

  // The cut made of n's own non-constant fanins only rebuilds n.
  bool is_fanin_cut(std::uint32_t n, const Cut& cut) const {
    Cut f;
    for (auto s : old_.fanins(n)) {
      const auto c = MajNetwork::node_of(s);
      if (c != 0 && !is_leaf(f, c)) f.leaves[f.size++] = c;
    }
    std::sort(f.leaves.begin(), f.leaves.begin() + f.size);
    return f == cut;
  }

  bool is_leaf(const Cut& cut, std::uint32_t n) const {
    return std::find(cut.leaves.begin(), cut.leaves.begin() + cut.size, n) != cut.leaves.begin() + cut.size;
  }

  // Nodes freed if `root` were re-expressed over the cut leaves.
  int mffc_size(std::uint32_t root, const Cut& cut, std::vector<std::uint32_t>& nodes) {
    deref(root, cut, nodes);
    // deref decremented the fanins of every collected node; restore them.
    for (auto n : nodes)
      for (auto f : old_.fanins(n)) ++refs_[MajNetwork::node_of(f)];
    return static_cast<int>(nodes.size());
  }

  void deref(std::uint32_t n, const Cut& cut, std::vector<std::uint32_t>& nodes) {
    nodes.push_back(n);
    for (auto f : old_.fanins(n)) {
      const auto c = MajNetwork::node_of(f);
      if (--refs_[c] == 0 && old_.is_maj(c) && !is_leaf(cut, c)) deref(c, cut, nodes);
    }
  }

  Signal leaf_signal(std::uint8_t src, const Cut& cut) const {
    if (src == 0) return MajNetwork::const0;
    if (src - 1u < cut.size) return map_[cut.leaves[src - 1]];
    return MajNetwork::const0;  // leaf the function does not depend on
  }

  int dry_run(const MajNetwork& out, const Template& t, const Cut& cut, const std::vector<std::uint32_t>& excluded) {
    if (t.size == 0) return 0;
    std::array<Signal, 3> made{};
    std::array<bool, 3> real{};
    int added = 0;
    for (int k = 0; k < t.size; ++k) {
      std::array<Signal, 3> f{};
      bool all_real = true;
      for (int e = 0; e < 3; ++e) {
        const std::uint8_t src = t.nodes[k][e] >> 1;
        const bool c = t.nodes[k][e] & 1u;
        if (src < 4) {
          f[e] = leaf_signal(src, cut) ^ c;
        } else {
          all_real = all_real && real[src - 4];
          f[e] = made[src - 4] ^ c;
        }
      }
      Signal s = 0;
      if (all_real && out.lookup_maj(f[0], f[1], f[2], s)) {
        const auto node = MajNetwork::node_of(s);
        if (out.is_maj(node) && std::find(excluded.begin(), excluded.end(), node) != excluded.end()) ++added;
        made[k] = s;
        real[k] = true;
      } else {
        ++added;
        real[k] = false;
      }
    }
    return added;
  }

  Signal instantiate(MajNetwork& out, const Template& t, const Cut& cut) {
    std::array<Signal, 7> sig{};
    for (std::uint8_t s = 0; s < 4; ++s) sig[s] = leaf_signal(s, cut);
    for (int k = 0; k < t.size; ++k) {
      std::array<Signal, 3> f{};
      for (int e = 0; e < 3; ++e) f[e] = sig[t.nodes[k][e] >> 1] ^ (t.nodes[k][e] & 1u);
      sig[4 + k] = out.create_maj(f[0], f[1], f[2]);
    }
    return sig[t.out >> 1] ^ (t.out & 1u);
  }

  const MajNetwork& old_;
  std::size_t limit_;
  bool zero_gain_;
  std::vector<int> refs_;
  std::vector<std::vector<Cut>> cuts_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint8_t> tt_;
  std::uint32_t epoch_ = 0;
  std::vector<Signal> map_;
};

}  // namespace

MajNetwork rewrite_pass(const MajNetwork& net, std::size_t cut_limit, bool zero_gain) {
  return Rewriter(net, cut_limit, zero_gain).run();
}

namespace {

// Input words for assignment block `w`: exhaustive when `exhaustive`, else random.
std::vector<std::uint64_t> stimulus(std::size_t inputs, std::size_t w, bool exhaustive, std::mt19937_64& rng) {
  static constexpr std::uint64_t lanes[6] = {0xaaaaaaaaaaaaaaaaull, 0xccccccccccccccccull, 0xf0f0f0f0f0f0f0f0ull,
                                             0xff00ff00ff00ff00ull, 0xffff0000ffff0000ull, 0xffffffff00000000ull};
  std::vector<std::uint64_t> in(inputs);
  for (std::size_t i = 0; i < inputs; ++i) {
    if (!exhaustive) in[i] = rng();
    else if (i < 6) in[i] = lanes[i];
    else in[i] = ((w >> (i - 6)) & 1u) ? ~std::uint64_t{0} : 0;
  }
  return in;
}

}  // namespace

bool equivalent(const LogicNetwork& a, const MajNetwork& b, std::uint64_t seed, std::size_t samples) {
  const std::size_t n = a.inputs().size();
  if (n != b.pis().size() || a.outputs().size() != b.outputs().size()) return false;
  const bool exhaustive = n <= 12;
  const std::size_t rounds = exhaustive ? (n <= 6 ? 1 : std::size_t{1} << (n - 6)) : (samples + 63) / 64;
  const std::uint64_t valid = exhaustive && n < 6 ? (std::uint64_t{1} << (std::uint64_t{1} << n)) - 1 : ~std::uint64_t{0};
  std::mt19937_64 rng(seed);
  for (std::size_t w = 0; w < rounds; ++w) {
    const auto in = stimulus(n, w, exhaustive, rng);
    const auto x = a.evaluate(in);
    const auto y = b.evaluate(in);
    for (std::size_t o = 0; o < x.size(); ++o)
      if ((x[o] ^ y[o]) & valid) return false;
  }
  return true;
}

MajNetwork to_majnet(const LogicNetwork& net, const MajOptions& options) {
  const auto order = net.topological_order();
  MajNetwork mig;
  std::vector<Signal> map(net.size(), MajNetwork::const0);
  for (auto id : net.inputs()) map[id] = mig.create_pi(net.node(id).port.name, net.node(id).port.bit);
  for (auto id : order) {
    const auto& n = net.node(id);
    switch (n.kind) {
      case LogicNetwork::Kind::Input: break;
      case LogicNetwork::Kind::Const: map[id] = n.value ? MajNetwork::const1 : MajNetwork::const0; break;
      case LogicNetwork::Kind::And: map[id] = mig.create_and(map[n.a], map[n.b]); break;
      case LogicNetwork::Kind::Or: map[id] = mig.create_or(map[n.a], map[n.b]); break;
      case LogicNetwork::Kind::Not: map[id] = MajNetwork::complement(map[n.a]); break;
    }
  }
  for (const auto& [port, id] : net.outputs()) mig.create_po(port.name, port.bit, map[id]);
  mig = mig.cleanup();
  for (int pass = 0; pass < options.rewrite_passes; ++pass) {
    MajNetwork next = rewrite_pass(mig, options.cut_limit, options.zero_gain);
    if (next.num_maj() > mig.num_maj()) break;
    mig = std::move(next);
  }
  if (!equivalent(net, mig)) fail(ErrorCode::Internal, "rewritten MAJ network is not equivalent to its source");
  return mig;
}

}  // namespace pumsim
