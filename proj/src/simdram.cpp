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

#include "pumsim/simdram.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <tuple>

#include "pumsim/error.hpp"

namespace pumsim {

// ---------------------------------------------------------------------------
// Symbolic rows and program text

namespace {

bool is_port_name(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return (c >= 'a' && c <= 'z') || c == '_'; });
}

std::uint32_t parse_u32(std::string_view t, std::string_view what) {
  std::uint32_t v = 0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size())
    fail(ErrorCode::ParseError, "bad " + std::string(what) + " '" + std::string(t) + "'");
  return v;
}

}  // namespace

std::string SymRow::str() const {
  switch (kind) {
    case Kind::Operand:
    case Kind::Result: return name + std::to_string(index);
    case Kind::Tra: return "T" + std::to_string(index);
    case Kind::Dcc: return (negated ? "~D" : "D") + std::to_string(index);
    case Kind::Zero: return "C0";
    case Kind::One: return "C1";
    case Kind::Spill: return "S" + std::to_string(index);
    case Kind::Scratch: return "X" + std::to_string(index);
  }
  return "?";
}

SymRow SymRow::parse(std::string_view t) {
  SymRow r;
  if (t == "C0") return SymRow{Kind::Zero, {}, 0, false};
  if (t == "C1") return SymRow{Kind::One, {}, 0, false};
  if (t.size() >= 3 && t.substr(0, 2) == "~D") return SymRow{Kind::Dcc, {}, parse_u32(t.substr(2), "row"), true};
  if (t.size() >= 2 && std::isupper(static_cast<unsigned char>(t[0]))) {
    const std::uint32_t i = parse_u32(t.substr(1), "row");
    switch (t[0]) {
      case 'T': return SymRow{Kind::Tra, {}, i, false};
      case 'D': return SymRow{Kind::Dcc, {}, i, false};
      case 'S': return SymRow{Kind::Spill, {}, i, false};
      case 'X': return SymRow{Kind::Scratch, {}, i, false};
      default: break;
    }
    fail(ErrorCode::ParseError, "unknown row '" + std::string(t) + "'");
  }
  const auto digits = t.find_first_of("0123456789");
  if (digits == std::string_view::npos || !is_port_name(t.substr(0, digits)))
    fail(ErrorCode::ParseError, "unknown row '" + std::string(t) + "'");
  // Operand and result rows share the syntax; the program header decides which.
  r.kind = Kind::Operand;
  r.name = std::string(t.substr(0, digits));
  r.index = parse_u32(t.substr(digits), "bit");
  return r;
}

std::string MicroOp::str() const {
  switch (kind) {
    case Kind::Aap: return "AAP " + src.at(0).str() + " " + dst.str();
    case Kind::Ap: {
      std::string s = "AP ";
      for (std::size_t i = 0; i < src.size(); ++i) s += (i ? "," : "") + src[i].str();
      return s;
    }
    case Kind::Init: return std::string("INIT ") + (value ? "1 " : "0 ") + dst.str();
  }
  return "?";
}

std::size_t Microprogram::count(MicroOp::Kind k) const {
  return static_cast<std::size_t>(std::count_if(ops.begin(), ops.end(), [k](const MicroOp& o) { return o.kind == k; }));
}

std::uint64_t Microprogram::dram_command_count() const {
  std::uint64_t n = 0;
  for (const auto& o : ops) n += o.kind == MicroOp::Kind::Ap ? 2 : 3;
  return n;
}

std::string Microprogram::to_text() const {
  std::ostringstream os;
  for (const auto& o : operands) os << "operand " << o.name << ' ' << o.width << '\n';
  for (const auto& o : results) os << "result " << o.name << ' ' << o.width << '\n';
  os << "scratch " << scratch_rows << '\n';
  for (const auto& op : ops) os << op.str() << '\n';
  return os.str();
}

Microprogram Microprogram::parse(std::string_view text) {
  Microprogram p;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  auto result_name = [&p](const std::string& n) {
    return std::any_of(p.results.begin(), p.results.end(), [&n](const OperandDesc& d) { return d.name == n; });
  };
  auto row = [&](const std::string& t) {
    SymRow r = SymRow::parse(t);
    if (r.kind == SymRow::Kind::Operand && result_name(r.name)) r.kind = SymRow::Kind::Result;
    return r;
  };
  try {
    while (std::getline(in, line)) {
      ++lineno;
      std::istringstream ls(line);
      std::string head;
      if (!(ls >> head) || head[0] == '#') continue;
      std::vector<std::string> f;
      for (std::string t; ls >> t;) f.push_back(t);
      auto need = [&](std::size_t n) {
        if (f.size() != n) fail(ErrorCode::ParseError, head + " takes " + std::to_string(n) + " fields");
      };
      if (head == "operand" || head == "result") {
        need(2);
        if (!is_port_name(f[0])) fail(ErrorCode::ParseError, "bad name '" + f[0] + "'");
        (head == "operand" ? p.operands : p.results).push_back({f[0], parse_u32(f[1], "width")});
      } else if (head == "scratch") {
        need(1);
        p.scratch_rows = parse_u32(f[0], "scratch count");
      } else if (head == "AAP") {
        need(2);
        p.ops.push_back({MicroOp::Kind::Aap, {row(f[0])}, row(f[1]), false});
      } else if (head == "AP") {
        need(1);
        MicroOp op{MicroOp::Kind::Ap, {}, {}, false};
        std::string_view g = f[0];
        while (true) {
          const auto comma = g.find(',');
          op.src.push_back(row(std::string(g.substr(0, comma))));
          if (comma == std::string_view::npos) break;
          g.remove_prefix(comma + 1);
        }
        p.ops.push_back(std::move(op));
      } else if (head == "INIT") {
        need(2);
        if (f[0] != "0" && f[0] != "1") fail(ErrorCode::ParseError, "INIT value must be 0 or 1");
        p.ops.push_back({MicroOp::Kind::Init, {}, row(f[1]), f[0] == "1"});
      } else {
        fail(ErrorCode::ParseError, "unknown directive '" + head + "'");
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ParseError) throw;
    fail(ErrorCode::ParseError, "microprogram line " + std::to_string(lineno) + ": " + e.what());
  }
  return p;
}

// ---------------------------------------------------------------------------
// Allocation

namespace {

using Signal = MajNetwork::Signal;
constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();

struct Loc {
  enum class Where : std::uint8_t { Reg, Spill, Scratch, Operand, Result };
  Where where = Where::Reg;
  std::uint32_t index = 0;
  bool comp = false;  // the cell holds the complement of the node value

  bool permanent() const { return where == Where::Operand || where == Where::Result; }
  friend bool operator==(const Loc&, const Loc&) = default;
};

struct Slot {
  std::uint32_t node = none;
  bool comp = false;
};

class Allocator {
 public:
  Allocator(const MajNetwork& mig, const ComputeLayout& layout, const AllocOptions& options)
      : mig_(mig), tra_(layout.tra_rows), nreg_(layout.tra_rows + layout.dcc_rows), options_(options),
        regs_(nreg_), spill_(layout.spill_rows), locs_(mig.size()), rem_(mig.size(), 0) {
    if (layout.tra_rows < 3 || layout.dcc_rows < 1)
      fail(ErrorCode::InvalidGeometry, "allocation needs at least 3 triple-activation rows and 1 DCC row");
    for (std::uint32_t n = 0; n < mig.size(); ++n)
      if (mig.is_maj(n))
        for (auto f : mig.fanins(n)) ++rem_[MajNetwork::node_of(f)];
    for (std::uint32_t i = 1; i <= mig.pis().size(); ++i) locs_[i].push_back({Loc::Where::Operand, i - 1, false});
  }

  RowAllocation run() {
    // Outputs that need no MAJ: constants and (possibly complemented) inputs.
    for (std::size_t o = 0; o < mig_.outputs().size(); ++o) {
      const Signal s = mig_.outputs()[o].second;
      if (!mig_.is_maj(MajNetwork::node_of(s))) emit_output(o, s, {});
    }
    for (std::uint32_t n = 0; n < mig_.size(); ++n) {
      if (!mig_.is_maj(n)) continue;
      schedule(n);
      std::uint32_t live = 0;
      for (std::uint32_t v = 1; v < mig_.size(); ++v) live += rem_[v] > 0 && mig_.is_maj(v);
      out_.peak_live = std::max(out_.peak_live, live);
    }
    return std::move(out_);
  }

 private:
  bool is_dcc(std::uint32_t r) const { return r >= tra_; }

  SymRow reg_row(std::uint32_t r, bool negated = false) const {
    return is_dcc(r) ? SymRow{SymRow::Kind::Dcc, {}, r - tra_, negated} : SymRow{SymRow::Kind::Tra, {}, r, false};
  }

  SymRow loc_row(const Loc& l, bool negated_port = false) const {
    switch (l.where) {
      case Loc::Where::Reg: return reg_row(l.index, negated_port);
      case Loc::Where::Spill: return {SymRow::Kind::Spill, {}, l.index, false};
      case Loc::Where::Scratch: return {SymRow::Kind::Scratch, {}, l.index, false};
      case Loc::Where::Operand: {
        const auto& p = mig_.pis()[l.index];
        return {SymRow::Kind::Operand, p.name, p.bit, false};
      }
      case Loc::Where::Result: {
        const auto& p = mig_.outputs()[l.index].first;
        return {SymRow::Kind::Result, p.name, p.bit, false};
      }
    }
    return {};
  }

  bool in_group(const Loc& l, const std::array<std::uint32_t, 3>& g) const {
    return l.where == Loc::Where::Reg && std::find(g.begin(), g.end(), l.index) != g.end();
  }

  // Values whose last copy sits in `regs` and that are still needed afterwards.
  std::vector<std::uint32_t> values_to_save(const std::array<std::uint32_t, 3>& g, std::size_t count,
                                            const std::array<int, 3>& uses_now) const {
    std::vector<std::uint32_t> out;
    for (std::size_t j = 0; j < count; ++j) {
      const std::uint32_t v = regs_[g[j]].node;
      if (v == none || std::find(out.begin(), out.end(), v) != out.end()) continue;
      int after = rem_[v];
      for (std::size_t i = 0; i < 3; ++i)
        if (uses_now[i] >= 0 && static_cast<std::uint32_t>(uses_now[i]) == v) --after;
      if (after <= 0) continue;
      bool elsewhere = false;
      for (const Loc& l : locs_[v]) elsewhere = elsewhere || !in_group(l, g);
      if (!elsewhere) out.push_back(v);
    }
    return out;
  }

  struct Option {
    std::array<std::uint32_t, 3> rows{};
    int cost = std::numeric_limits<int>::max();
    int clobber = 0;
  };

  // Register r may be overwritten: its value is dead or has a copy outside r and `avoid`.
  template <class Rows>
  bool reg_free(std::uint32_t r, const std::array<Signal, 3>& f, const Rows& avoid) const {
    const std::uint32_t v = regs_[r].node;
    if (v == none) return true;
    for (auto s : f)
      if (MajNetwork::node_of(s) == v) return false;
    if (rem_[v] == 0) return true;
    for (const Loc& l : locs_[v]) {
      if (l.where != Loc::Where::Reg) return true;
      if (l.index != r && std::find(avoid.begin(), avoid.end(), l.index) == avoid.end()) return true;
    }
    return false;
  }

  // Cost of issuing MAJ(f) on rows g (g[i] receives f[i]); nullopt if infeasible.
  std::optional<Option> evaluate(const std::array<Signal, 3>& f, const std::array<std::uint32_t, 3>& g,
                                 const std::array<int, 3>& uses_now) const {
    Option o;
    o.rows = g;
    int cost = 0;
    std::array<bool, 3> kept{};
    for (int i = 0; i < 3; ++i) {
      const Slot& s = regs_[g[i]];
      const auto v = MajNetwork::node_of(f[i]);
      kept[i] = v != 0 && s.node == v && (is_dcc(g[i]) || s.comp == MajNetwork::is_complemented(f[i]));
    }
    const auto saves = values_to_save(g, 3, uses_now);
    cost += static_cast<int>(saves.size());
    for (int i = 0; i < 3; ++i) {
      if (kept[i]) continue;
      const auto v = MajNetwork::node_of(f[i]);
      if (v == 0) {
        cost += 1;
        continue;
      }
      bool any = false, exact = false;
      for (const Loc& l : locs_[v]) {
        bool usable = !in_group(l, g);
        for (int j = 0; j < 3; ++j) usable = usable || (kept[j] && l.where == Loc::Where::Reg && l.index == g[j]);
        if (!usable && std::find(saves.begin(), saves.end(), v) == saves.end()) continue;
        any = true;
        const bool flexible = l.where == Loc::Where::Reg && is_dcc(l.index);
        exact = exact || flexible || l.comp == MajNetwork::is_complemented(f[i]);
      }
      if (!any) return std::nullopt;
      if (is_dcc(g[i]) || exact) {
        cost += 1;
      } else {
        bool temp = false;
        for (std::uint32_t r = tra_; r < nreg_ && !temp; ++r)
          temp = std::find(g.begin(), g.end(), r) == g.end() && reg_free(r, f, g);
        if (!temp) return std::nullopt;
        cost += 2;
      }
    }
    for (int j = 0; j < 3; ++j) {
      const std::uint32_t v = regs_[g[j]].node;
      if (v != none && rem_[v] > 1 && !kept[j]) ++o.clobber;
    }
    o.cost = cost;
    return o;
  }

  void emit_aap(const SymRow& src, const SymRow& dst) { out_.ops.push_back({MicroOp::Kind::Aap, {src}, dst, false}); }

  void drop_loc(std::uint32_t v, const Loc& l) {
    auto& ls = locs_[v];
    ls.erase(std::remove(ls.begin(), ls.end(), l), ls.end());
  }

  // Overwrites register r with node v (cell complement `comp`).
  void set_reg(std::uint32_t r, std::uint32_t v, bool comp) {
    if (regs_[r].node != none) drop_loc(regs_[r].node, {Loc::Where::Reg, r, regs_[r].comp});
    regs_[r] = {v, comp};
    if (v != none) locs_[v].push_back({Loc::Where::Reg, r, comp});
  }

  void set_hold(std::vector<Slot>& slots, Loc::Where where, std::uint32_t i, std::uint32_t v, bool comp) {
    if (slots[i].node != none) drop_loc(slots[i].node, {where, i, slots[i].comp});
    slots[i] = {v, comp};
    locs_[v].push_back({where, i, comp});
  }

  // Copies node v out of the group before it is destroyed.
  void save(std::uint32_t v, const std::vector<std::uint32_t>& avoid, const std::array<Signal, 3>& f) {
    Loc src{};
    bool found = false;
    for (const Loc& l : locs_[v])
      if (l.where == Loc::Where::Reg) {
        src = l;
        found = true;
        break;
      }
    if (!found) fail(ErrorCode::Internal, "value to save has no register copy");
    const SymRow from = reg_row(src.index);
    for (std::uint32_t r = 0; r < nreg_; ++r) {
      if (std::find(avoid.begin(), avoid.end(), r) != avoid.end() || !reg_free(r, f, avoid)) continue;
      emit_aap(from, reg_row(r));
      set_reg(r, v, src.comp);
      return;
    }
    auto dead = [this](const Slot& s) { return s.node == none || rem_[s.node] == 0; };
    for (std::uint32_t i = 0; i < spill_.size(); ++i)
      if (dead(spill_[i])) {
        emit_aap(from, {SymRow::Kind::Spill, {}, i, false});
        set_hold(spill_, Loc::Where::Spill, i, v, src.comp);
        out_.spill_used = std::max(out_.spill_used, i + 1);
        return;
      }
    for (std::uint32_t i = 0; i < scratch_.size(); ++i)
      if (dead(scratch_[i])) {
        emit_aap(from, {SymRow::Kind::Scratch, {}, i, false});
        set_hold(scratch_, Loc::Where::Scratch, i, v, src.comp);
        return;
      }
    if (scratch_.size() < options_.scratch_rows) {
      const auto i = static_cast<std::uint32_t>(scratch_.size());
      scratch_.push_back({});
      emit_aap(from, {SymRow::Kind::Scratch, {}, i, false});
      set_hold(scratch_, Loc::Where::Scratch, i, v, src.comp);
      out_.scratch_used = static_cast<std::uint32_t>(scratch_.size());
      return;
    }
    fail(ErrorCode::InsufficientRows, "more live values than compute, spill and scratch rows (" +
                                          std::to_string(nreg_) + " + " + std::to_string(spill_.size()) + " + " +
                                          std::to_string(options_.scratch_rows) + ")");
  }

  // A DCC row outside `avoid` ready to be overwritten, saving its content if needed.
  std::uint32_t temp_dcc(const std::array<std::uint32_t, 3>& avoid, const std::array<Signal, 3>& f) {
    for (std::uint32_t r = tra_; r < nreg_; ++r)
      if (std::find(avoid.begin(), avoid.end(), r) == avoid.end() && reg_free(r, f, avoid)) return r;
    for (std::uint32_t r = tra_; r < nreg_; ++r) {
      if (std::find(avoid.begin(), avoid.end(), r) != avoid.end()) continue;
      std::vector<std::uint32_t> keep(avoid.begin(), avoid.end());
      keep.push_back(r);
      save(regs_[r].node, keep, f);
      return r;
    }
    fail(ErrorCode::InsufficientRows, "no DCC row available for a complement");
  }

  // Writes signal s = (v, c) into row `dst`, a register (cell gets V^c) or a result row.
  void materialize(Signal s, const SymRow& dst, const std::array<std::uint32_t, 3>& avoid,
                   const std::array<std::uint32_t, 3>& sources_from_group, bool dst_is_dcc, bool& dst_comp,
                   const std::array<Signal, 3>& f) {
    const auto v = MajNetwork::node_of(s);
    const bool c = MajNetwork::is_complemented(s);
    if (v == 0) {
      out_.ops.push_back({MicroOp::Kind::Init, {}, dst, c});
      dst_comp = false;
      return;
    }
    // Pick a source: exact polarity, else any DCC copy, else any copy via a temporary DCC row.
    const Loc* best = nullptr;
    int rank = 3;
    for (const Loc& l : locs_[v]) {
      const bool grouped = in_group(l, avoid);
      const bool allowed = !grouped || std::find(sources_from_group.begin(), sources_from_group.end(), l.index) !=
                                           sources_from_group.end();
      if (!allowed) continue;
      const bool flexible = l.where == Loc::Where::Reg && is_dcc(l.index);
      int r = l.comp == c ? 0 : flexible ? 1 : 2;
      if (dst_is_dcc) r = 0;
      if (r < rank) {
        rank = r;
        best = &l;
      }
    }
    if (!best) fail(ErrorCode::Internal, "operand value is not stored anywhere");
    const Loc src = *best;
    if (dst_is_dcc) {
      emit_aap(loc_row(src), dst);
      dst_comp = src.comp;
      return;
    }
    dst_comp = c;
    if (rank == 0) {
      emit_aap(loc_row(src), dst);
    } else if (rank == 1) {
      emit_aap(loc_row(src, true), dst);
    } else {
      const std::uint32_t t = temp_dcc(avoid, f);
      emit_aap(loc_row(src), reg_row(t, true));
      set_reg(t, v, !src.comp);
      emit_aap(reg_row(t), dst);
    }
  }

  void emit_output(std::size_t o, Signal s, const std::array<std::uint32_t, 3>& group) {
    const auto& port = mig_.outputs()[o].first;
    const SymRow dst{SymRow::Kind::Result, port.name, port.bit, false};
    bool comp = false;
    const std::array<std::uint32_t, 3> nothing{none, none, none};
    const std::array<Signal, 3> f{s, s, s};
    materialize(s, dst, nothing, group, false, comp, f);
    const auto v = MajNetwork::node_of(s);
    if (v != 0) locs_[v].push_back({Loc::Where::Result, static_cast<std::uint32_t>(o), comp});
  }

  void schedule(std::uint32_t n) {
    const auto f = mig_.fanins(n);
    std::array<int, 3> uses_now{};
    for (int i = 0; i < 3; ++i) {
      const auto v = MajNetwork::node_of(f[i]);
      uses_now[i] = v == 0 ? -1 : static_cast<int>(v);
    }
    std::optional<Option> best;
    for (std::uint32_t a = 0; a < nreg_; ++a)
      for (std::uint32_t b = 0; b < nreg_; ++b)
        for (std::uint32_t c = 0; c < nreg_; ++c) {
          if (a == b || a == c || b == c) continue;
          auto o = evaluate(f, {a, b, c}, uses_now);
          if (!o) continue;
          if (!best || std::tie(o->cost, o->clobber) < std::tie(best->cost, best->clobber)) best = o;
        }
    if (!best) fail(ErrorCode::InsufficientRows, "no feasible compute-row group");
    const auto g = best->rows;

    std::array<bool, 3> kept{};
    std::array<bool, 3> port_neg{};
    for (int i = 0; i < 3; ++i) {
      const Slot& s = regs_[g[i]];
      const auto v = MajNetwork::node_of(f[i]);
      kept[i] = v != 0 && s.node == v && (is_dcc(g[i]) || s.comp == MajNetwork::is_complemented(f[i]));
      if (kept[i]) port_neg[i] = s.comp != MajNetwork::is_complemented(f[i]);
    }
    for (auto v : values_to_save(g, 3, uses_now)) save(v, {g.begin(), g.end()}, f);
    std::array<std::uint32_t, 3> kept_rows{none, none, none};
    for (int i = 0; i < 3; ++i)
      if (kept[i]) kept_rows[i] = g[i];
    for (int i = 0; i < 3; ++i) {
      if (kept[i]) continue;
      bool comp = false;
      materialize(f[i], reg_row(g[i]), g, kept_rows, is_dcc(g[i]), comp, f);
      const auto v = MajNetwork::node_of(f[i]);
      if (v == 0) {
        set_reg(g[i], none, false);
        port_neg[i] = false;
      } else {
        set_reg(g[i], v, comp);
        port_neg[i] = is_dcc(g[i]) && comp != MajNetwork::is_complemented(f[i]);
      }
      kept_rows[i] = g[i];
    }
    MicroOp ap{MicroOp::Kind::Ap, {}, {}, false};
    for (int i = 0; i < 3; ++i) ap.src.push_back(reg_row(g[i], port_neg[i]));
    out_.ops.push_back(ap);
    RowAllocation::Placement pl;
    pl.node = n;
    for (int i = 0; i < 3; ++i) pl.group[i] = ap.src[i];
    pl.op_index = out_.ops.size() - 1;
    out_.placements.push_back(pl);
    for (int i = 0; i < 3; ++i) set_reg(g[i], n, port_neg[i]);
    for (auto s : f) {
      const auto v = MajNetwork::node_of(s);
      if (v != 0) --rem_[v];
    }
    for (std::size_t o = 0; o < mig_.outputs().size(); ++o)
      if (MajNetwork::node_of(mig_.outputs()[o].second) == n) emit_output(o, mig_.outputs()[o].second, g);
  }

  const MajNetwork& mig_;
  std::uint32_t tra_, nreg_;
  AllocOptions options_;
  std::vector<Slot> regs_, spill_, scratch_;
  std::vector<std::vector<Loc>> locs_;
  std::vector<int> rem_;
  RowAllocation out_;
};

std::vector<OperandDesc> describe(const std::vector<PortRef>& ports) {
  std::vector<OperandDesc> out;
  for (const auto& p : ports) {
    if (!is_port_name(p.name))
      fail(ErrorCode::InvalidArgument, "port name '" + p.name + "' must be lower-case letters or '_'");
    auto it = std::find_if(out.begin(), out.end(), [&p](const OperandDesc& d) { return d.name == p.name; });
    if (it == out.end()) out.push_back({p.name, p.bit + 1});
    else it->width = std::max(it->width, p.bit + 1);
  }
  return out;
}

}  // namespace

RowAllocation allocate_rows(const MajNetwork& mig, const ComputeLayout& layout, const AllocOptions& options) {
  return Allocator(mig, layout, options).run();
}

Microprogram codegen(const MajNetwork& mig, const RowAllocation& alloc) {
  Microprogram p;
  p.operands = describe(mig.pis());
  std::vector<PortRef> outs;
  for (const auto& [port, s] : mig.outputs()) outs.push_back(port);
  p.results = describe(outs);
  for (const auto& r : p.results)
    for (const auto& o : p.operands)
      if (r.name == o.name) fail(ErrorCode::InvalidArgument, "'" + r.name + "' is both an operand and a result");
  p.scratch_rows = alloc.scratch_used;
  p.ops = alloc.ops;
  return p;
}

// ---------------------------------------------------------------------------
// Execution

void execute(DramDevice& device, const Microprogram& program, std::uint32_t bank, std::uint32_t subarray,
             const Binding& binding) {
  struct Range {
    std::string what;
    std::uint32_t begin, end;
  };
  std::vector<Range> ranges;
  auto base_of = [&binding](const std::string& name) {
    auto it = binding.base_row.find(name);
    if (it == binding.base_row.end()) fail(ErrorCode::InvalidArgument, "no rows bound to '" + name + "'");
    return it->second;
  };
  for (const auto* list : {&program.operands, &program.results})
    for (const auto& d : *list) ranges.push_back({d.name, base_of(d.name), base_of(d.name) + d.width});
  if (program.scratch_rows)
    ranges.push_back({"scratch", binding.scratch_base, binding.scratch_base + program.scratch_rows});
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (ranges[i].end > device.data_rows())
      fail(ErrorCode::OutOfRange, "rows of '" + ranges[i].what + "' run past the data rows");
    for (std::size_t j = 0; j < i; ++j)
      if (ranges[i].begin < ranges[j].end && ranges[j].begin < ranges[i].end)
        fail(ErrorCode::InvalidArgument, "rows of '" + ranges[i].what + "' overlap '" + ranges[j].what + "'");
  }
  auto width_of = [](const std::vector<OperandDesc>& list, const std::string& name) -> std::optional<std::uint32_t> {
    for (const auto& d : list)
      if (d.name == name) return d.width;
    return std::nullopt;
  };
  auto resolve = [&](const SymRow& r, bool as_dst) -> RowRef {
    switch (r.kind) {
      case SymRow::Kind::Operand:
      case SymRow::Kind::Result: {
        const bool is_result = r.kind == SymRow::Kind::Result;
        auto w = width_of(is_result ? program.results : program.operands, r.name);
        if (!w || r.index >= *w) fail(ErrorCode::OutOfRange, "row " + r.str() + " is not declared");
        if (as_dst && !is_result) fail(ErrorCode::InvalidArgument, "operand row " + r.str() + " is read-only");
        return {base_of(r.name) + r.index, false};
      }
      case SymRow::Kind::Tra: return {device.tra_row(r.index), false};
      case SymRow::Kind::Dcc: return {device.dcc_row(r.index), r.negated};
      case SymRow::Kind::Zero: return {device.c0_row(), false};
      case SymRow::Kind::One: return {device.c1_row(), false};
      case SymRow::Kind::Spill: return {device.spill_row(r.index), false};
      case SymRow::Kind::Scratch:
        if (r.index >= program.scratch_rows) fail(ErrorCode::OutOfRange, "row " + r.str() + " is not declared");
        return {binding.scratch_base + r.index, false};
    }
    return {};
  };
  struct Resolved {
    RowGroup src, dst;
    bool ap;
  };
  std::vector<Resolved> plan;
  plan.reserve(program.ops.size());
  for (const auto& op : program.ops) {
    Resolved x{};
    switch (op.kind) {
      case MicroOp::Kind::Aap:
        if (op.src.size() != 1) fail(ErrorCode::InvalidArgument, "AAP takes one source row");
        x.src.push_back(resolve(op.src[0], false));
        x.dst.push_back(resolve(op.dst, true));
        break;
      case MicroOp::Kind::Init:
        x.src.push_back({op.value ? device.c1_row() : device.c0_row(), false});
        x.dst.push_back(resolve(op.dst, true));
        break;
      case MicroOp::Kind::Ap:
        for (const auto& r : op.src) {
          const RowRef rr = resolve(r, true);
          x.src.push_back(rr);
        }
        x.ap = true;
        break;
    }
    plan.push_back(std::move(x));
  }
  for (const auto& x : plan) {
    if (x.ap) device.ap(bank, subarray, x.src);
    else device.aap(bank, subarray, x.src, x.dst);
  }
}

// ---------------------------------------------------------------------------
// Transposition

std::vector<BitRow> transpose(std::span<const std::uint64_t> words, std::uint32_t width, std::uint32_t columns) {
  if (width == 0 || width > 64) fail(ErrorCode::WidthOutOfRange, "width must be 1..64");
  if (words.size() > columns)
    fail(ErrorCode::TooManyLanes,
         std::to_string(words.size()) + " lanes exceed " + std::to_string(columns) + " columns");
  const std::uint64_t mask = width == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
  std::vector<BitRow> rows(width, BitRow(columns));
  for (std::size_t j = 0; j < words.size(); ++j) {
    if (words[j] & ~mask) fail(ErrorCode::InvalidArgument, "lane value wider than the vector");
    for (std::uint32_t i = 0; i < width; ++i)
      if ((words[j] >> i) & 1u) rows[i].set(j, true);
  }
  return rows;
}

std::vector<std::uint64_t> untranspose(std::span<const BitRow> rows, std::uint32_t lanes) {
  if (rows.size() > 64) fail(ErrorCode::WidthOutOfRange, "width must be 1..64");
  std::vector<std::uint64_t> out(lanes, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() < lanes) fail(ErrorCode::TooManyLanes, "row shorter than the lane count");
    for (std::uint32_t j = 0; j < lanes; ++j) out[j] |= std::uint64_t{rows[i].get(j)} << i;
  }
  return out;
}

VerticalVector transpose_in(DramDevice& device, std::uint32_t bank, std::uint32_t subarray, std::uint32_t base_row,
                            std::span<const std::uint64_t> words, std::uint32_t width, bool is_signed) {
  const auto rows = transpose(words, width, device.geometry().columns_per_row);
  if (base_row + width > device.data_rows()) fail(ErrorCode::OutOfRange, "vector runs past the data rows");
  for (std::uint32_t i = 0; i < width; ++i) device.store_row({bank, subarray, base_row + i}, rows[i]);
  return {bank, subarray, base_row, width, static_cast<std::uint32_t>(words.size()), is_signed};
}

std::vector<std::uint64_t> transpose_out(DramDevice& device, const VerticalVector& v) {
  std::vector<BitRow> rows;
  rows.reserve(v.width);
  for (std::uint32_t i = 0; i < v.width; ++i) rows.push_back(device.load_row({v.bank, v.subarray, v.base_row + i}));
  return untranspose(rows, v.lanes);
}

// ---------------------------------------------------------------------------
// Operation library

std::string_view to_string(SimdOpKind k) noexcept {
  switch (k) {
    case SimdOpKind::Add: return "add";
    case SimdOpKind::Sub: return "sub";
    case SimdOpKind::Mul: return "mul";
    case SimdOpKind::Relu: return "relu";
    case SimdOpKind::GreaterThan: return "gt";
  }
  return "?";
}

SimdOpKind parse_simd_op(std::string_view name) {
  for (auto k : {SimdOpKind::Add, SimdOpKind::Sub, SimdOpKind::Mul, SimdOpKind::Relu, SimdOpKind::GreaterThan})
    if (to_string(k) == name) return k;
  if (name == "greater_than") return SimdOpKind::GreaterThan;
  fail(ErrorCode::InvalidArgument, "unknown SIMD op '" + std::string(name) + "'");
}

bool is_binary(SimdOpKind k) noexcept { return k != SimdOpKind::Relu; }

std::uint32_t result_width(SimdOpKind k, std::uint32_t width) noexcept {
  return k == SimdOpKind::GreaterThan ? 1 : width;
}

namespace {

using Id = LogicNetwork::Id;

// Full adder over AND/OR/NOT; returns {sum, carry}.
std::pair<Id, Id> full_add(LogicNetwork& n, Id x, Id y, Id c) {
  const Id p = n.add_xor(x, y);
  return {n.add_xor(p, c), n.add_or(n.add_and(x, y), n.add_and(c, p))};
}

Id carry_only(LogicNetwork& n, Id x, Id y, Id c) {
  return n.add_or(n.add_and(x, y), n.add_and(c, n.add_or(x, y)));
}

}  // namespace

LogicNetwork simd_logic(SimdOpKind kind, std::uint32_t w) {
  if (w < 2 || w > 64) fail(ErrorCode::WidthOutOfRange, "width " + std::to_string(w) + " outside 2..64");
  LogicNetwork n;
  std::vector<Id> a(w), b;
  for (std::uint32_t i = 0; i < w; ++i) a[i] = n.add_input("a", i);
  if (is_binary(kind)) {
    b.resize(w);
    for (std::uint32_t i = 0; i < w; ++i) b[i] = n.add_input("b", i);
  }
  switch (kind) {
    case SimdOpKind::Add:
    case SimdOpKind::Sub: {
      Id c = n.add_const(kind == SimdOpKind::Sub);
      for (std::uint32_t i = 0; i < w; ++i) {
        const Id y = kind == SimdOpKind::Sub ? n.add_not(b[i]) : b[i];
        auto [s, co] = full_add(n, a[i], y, c);
        n.add_output("r", i, s);
        c = co;
      }
      break;
    }
    case SimdOpKind::Mul: {
      std::vector<Id> acc(w);
      for (std::uint32_t i = 0; i < w; ++i) acc[i] = n.add_and(a[i], b[0]);
      for (std::uint32_t j = 1; j < w; ++j) {
        // acc[j..w) += (a << j)[j..w) & b_j; lower bits are final.
        Id c = n.add_const(false);
        for (std::uint32_t i = j; i < w; ++i) {
          const Id pp = n.add_and(a[i - j], b[j]);
          auto [s, co] = full_add(n, acc[i], pp, c);
          acc[i] = s;
          c = co;
        }
      }
      for (std::uint32_t i = 0; i < w; ++i) n.add_output("r", i, acc[i]);
      break;
    }
    case SimdOpKind::Relu: {
      const Id keep = n.add_not(a[w - 1]);
      for (std::uint32_t i = 0; i + 1 < w; ++i) n.add_output("r", i, n.add_and(a[i], keep));
      n.add_output("r", w - 1, n.add_const(false));
      break;
    }
    case SimdOpKind::GreaterThan: {
      // b + ~a + 1 carries out exactly when b >= a.
      Id c = n.add_const(true);
      for (std::uint32_t i = 0; i < w; ++i) c = carry_only(n, b[i], n.add_not(a[i]), c);
      n.add_output("r", 0, n.add_not(c));
      break;
    }
  }
  return n;
}

Microprogram build_simd_op(SimdOpKind kind, std::uint32_t width, const ComputeLayout& layout) {
  if (width < 2 || width > 64) fail(ErrorCode::WidthOutOfRange, "width " + std::to_string(width) + " outside 2..64");
  static std::mutex mu;
  static std::map<std::tuple<int, std::uint32_t, std::uint32_t, std::uint32_t, std::uint32_t>, Microprogram> cache;
  const auto key = std::make_tuple(static_cast<int>(kind), width, layout.tra_rows, layout.dcc_rows, layout.spill_rows);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const MajNetwork mig = to_majnet(simd_logic(kind, width));
  AllocOptions opt;
  opt.scratch_rows = std::numeric_limits<std::uint32_t>::max();
  Microprogram p = codegen(mig, allocate_rows(mig, layout, opt));
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, p);
  return p;
}

std::uint64_t simd_reference(SimdOpKind kind, std::uint32_t w, std::uint64_t a, std::uint64_t b) noexcept {
  const std::uint64_t m = w >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << w) - 1;
  a &= m;
  b &= m;
  switch (kind) {
    case SimdOpKind::Add: return (a + b) & m;
    case SimdOpKind::Sub: return (a - b) & m;
    case SimdOpKind::Mul: return (a * b) & m;
    case SimdOpKind::Relu: return (a >> (w - 1)) & 1u ? 0 : a;
    case SimdOpKind::GreaterThan: return a > b ? 1 : 0;
  }
  return 0;
}

Binding default_binding(const Microprogram& program, std::uint32_t first_row) {
  Binding b;
  std::uint32_t row = first_row;
  for (const auto* list : {&program.operands, &program.results})
    for (const auto& d : *list) {
      b.base_row[d.name] = row;
      row += d.width;
    }
  b.scratch_base = row;
  return b;
}

std::uint32_t rows_needed(const Microprogram& program) {
  std::uint32_t n = program.scratch_rows;
  for (const auto* list : {&program.operands, &program.results})
    for (const auto& d : *list) n += d.width;
  return n;
}

std::vector<std::uint64_t> run_simd(DramDevice& device, const Microprogram& program, std::uint32_t bank,
                                    std::uint32_t subarray, std::span<const std::uint64_t> a,
                                    std::span<const std::uint64_t> b) {
  if (rows_needed(program) > device.data_rows())
    fail(ErrorCode::InsufficientRows, "program needs " + std::to_string(rows_needed(program)) + " data rows");
  const Binding bind = default_binding(program);
  std::uint32_t lanes = static_cast<std::uint32_t>(a.size());
  for (const auto& d : program.operands) {
    std::span<const std::uint64_t> src;
    if (d.name == "a") src = a;
    else if (d.name == "b") src = b;
    else fail(ErrorCode::InvalidArgument, "run_simd binds only operands 'a' and 'b'");
    if (src.size() != lanes) fail(ErrorCode::InvalidArgument, "operands differ in lane count");
    transpose_in(device, bank, subarray, bind.base_row.at(d.name), src, d.width);
  }
  execute(device, program, bank, subarray, bind);
  if (program.results.size() != 1) fail(ErrorCode::InvalidArgument, "run_simd expects one result");
  const auto& r = program.results[0];
  return transpose_out(device, {bank, subarray, bind.base_row.at(r.name), r.width, lanes, false});
}

}  // namespace pumsim
