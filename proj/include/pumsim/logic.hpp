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

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace pumsim {

/// Named bit of an operand, e.g. {"a", 3}. Printed as "a3".
struct PortRef {
  std::string name;
  std::uint32_t bit = 0;

  std::string str() const { return name + std::to_string(bit); }
  friend bool operator==(const PortRef&, const PortRef&) = default;
};

/// AND/OR/NOT network. Node ids are dense indices in creation order; fanins
/// may be rewired later with set_fanin, so a network can be cyclic until checked.
class LogicNetwork {
 public:
  enum class Kind : std::uint8_t { Input, Const, And, Or, Not };
  struct Node {
    Kind kind = Kind::Const;
    std::uint32_t a = 0, b = 0;  // fanins (And/Or use both, Not uses a)
    bool value = false;          // Const
    PortRef port;                // Input
  };
  using Id = std::uint32_t;

  Id add_input(std::string name, std::uint32_t bit);
  Id add_const(bool value);
  Id add_and(Id a, Id b);
  Id add_or(Id a, Id b);
  Id add_not(Id a);
  /// a ^ b built from AND/OR/NOT.
  Id add_xor(Id a, Id b);
  void add_output(std::string name, std::uint32_t bit, Id node);
  void set_fanin(Id node, int slot, Id fanin);

  std::size_t size() const noexcept { return nodes_.size(); }
  const Node& node(Id id) const { return nodes_.at(id); }
  const std::vector<Id>& inputs() const noexcept { return inputs_; }
  const std::vector<std::pair<PortRef, Id>>& outputs() const noexcept { return outputs_; }

  /// Throws CyclicNetwork.
  std::vector<Id> topological_order() const;

  /// Bit-parallel evaluation: in[i] holds 64 assignments of inputs()[i]; returns one word per output.
  std::vector<std::uint64_t> evaluate(const std::vector<std::uint64_t>& in) const;

 private:
  Id push(Node n);
  void check_id(Id id) const;

  std::vector<Node> nodes_;
  std::vector<Id> inputs_;
  std::vector<std::pair<PortRef, Id>> outputs_;
};

/// Majority-inverter graph with complemented edges. Node 0 is constant 0,
/// inputs follow, and every MAJ node comes after its fanins.
class MajNetwork {
 public:
  /// node << 1 | complemented
  using Signal = std::uint32_t;
  static constexpr Signal const0 = 0;
  static constexpr Signal const1 = 1;

  static std::uint32_t node_of(Signal s) noexcept { return s >> 1; }
  static bool is_complemented(Signal s) noexcept { return s & 1u; }
  static Signal make_signal(std::uint32_t node, bool complemented) noexcept { return node << 1 | complemented; }
  static Signal complement(Signal s) noexcept { return s ^ 1u; }

  MajNetwork();

  Signal create_pi(std::string name, std::uint32_t bit);
  /// Applies MAJ(x,x,y)=x, MAJ(x,!x,y)=y, self-duality normalization and structural hashing.
  Signal create_maj(Signal a, Signal b, Signal c);
  Signal create_and(Signal a, Signal b) { return create_maj(a, b, const0); }
  Signal create_or(Signal a, Signal b) { return create_maj(a, b, const1); }
  void create_po(std::string name, std::uint32_t bit, Signal s);

  /// create_maj without inserting anything: the resulting signal if it needs no new node.
  bool lookup_maj(Signal a, Signal b, Signal c, Signal& out) const;

  std::size_t size() const noexcept { return fanins_.size(); }
  bool is_constant(std::uint32_t n) const noexcept { return n == 0; }
  bool is_pi(std::uint32_t n) const noexcept { return n >= 1 && n <= pis_.size(); }
  bool is_maj(std::uint32_t n) const noexcept { return n > pis_.size(); }
  const std::array<Signal, 3>& fanins(std::uint32_t n) const { return fanins_.at(n); }
  const std::vector<PortRef>& pis() const noexcept { return pis_; }
  /// Input port of node n (n must be a PI).
  const PortRef& pi_port(std::uint32_t n) const { return pis_.at(n - 1); }
  const std::vector<std::pair<PortRef, Signal>>& outputs() const noexcept { return outputs_; }

  /// MAJ nodes reachable from an output.
  std::size_t num_maj() const;
  /// Copy holding only nodes reachable from outputs, in the same relative order.
  MajNetwork cleanup() const;

  /// Bit-parallel evaluation; in[i] is pis()[i].
  std::vector<std::uint64_t> evaluate(const std::vector<std::uint64_t>& in) const;

 private:
  struct KeyHash {
    std::size_t operator()(const std::array<Signal, 3>& k) const noexcept {
      return (std::size_t{k[0]} * 0x9e3779b97f4a7c15ull) ^ (std::size_t{k[1]} * 0xc2b2ae3d27d4eb4full) ^ k[2];
    }
  };
  // Returns true and sets `out` when the simplified MAJ is a fanin or a constant.
  static bool simplify(std::array<Signal, 3>& f, bool& flip, Signal& out);

  std::vector<std::array<Signal, 3>> fanins_;
  std::vector<PortRef> pis_;
  std::vector<std::pair<PortRef, Signal>> outputs_;
  std::unordered_map<std::array<Signal, 3>, std::uint32_t, KeyHash> strash_;
};

struct MajOptions {
  int rewrite_passes = 3;
  std::size_t cut_limit = 12;
  /// Also accept replacements that keep the node count unchanged.
  bool zero_gain = true;
};

/// Lowers AND to MAJ(a,b,0), OR to MAJ(a,b,1), NOT to edge complement, then
/// runs greedy 3-cut rewriting passes. The result is checked against `net` by
/// simulation (exhaustive up to 12 inputs, else 10^4 random assignments).
/// Throws CyclicNetwork.
MajNetwork to_majnet(const LogicNetwork& net, const MajOptions& options = {});

/// One greedy rewriting pass; exposed for tests.
MajNetwork rewrite_pass(const MajNetwork& net, std::size_t cut_limit, bool zero_gain = true);

/// True when both networks agree on every output (same input and output order)
/// over exhaustive or `samples` random assignments.
bool equivalent(const LogicNetwork& a, const MajNetwork& b, std::uint64_t seed = 1, std::size_t samples = 10000);

}  // namespace pumsim
