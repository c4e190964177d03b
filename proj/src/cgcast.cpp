#include "crn/cgcast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace crn {
namespace {

constexpr std::uint64_t kTagDiscovery = 0x200;
constexpr std::uint64_t kTagTimes = 0x201;
constexpr std::uint64_t kTagHandoff = 0x280;
constexpr std::uint64_t kTagDissemination = 0x290;
constexpr std::uint64_t kTagColoring = 0x400;
constexpr std::uint64_t kTagColoringRuns = 0x1000;

using EdgeKey = std::pair<NodeId, NodeId>;

EdgeKey edge_key(NodeId u, NodeId v) { return u < v ? EdgeKey{u, v} : EdgeKey{v, u}; }

bool line_adjacent(NodeId a, NodeId b, NodeId u, NodeId v) {
  if (edge_key(a, b) == edge_key(u, v)) return false;
  return a == u || a == v || b == u || b == v;
}

std::vector<ColorEntry> received_entries(const SeekMachine& m) {
  std::vector<ColorEntry> out;
  for (const auto& [sender, payload] : m.state().payload_log) {
    if (const auto* info = std::get_if<ColorInfo>(&payload)) {
      out.insert(out.end(), info->entries.begin(), info->entries.end());
    }
  }
  return out;
}

void sort_unique(std::vector<ColorEntry>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

int coloring_phases(const NetworkParams& params, const CgcastConfig& cfg) {
  return static_cast<int>(std::ceil(cfg.phase_mult * std::log(static_cast<double>(params.n))));
}

int dissemination_rounds(const NetworkParams& params, const CgcastConfig& cfg) {
  if (cfg.rounds_per_step) return *cfg.rounds_per_step;
  return static_cast<int>(std::ceil(2.0 * std::log(static_cast<double>(params.n))));
}

DedicatedChannelTable fix_dedicated_channels(NodeId self, const std::map<NodeId, Slot>& first_heard,
                                             const std::map<NodeId, Payload>& exchange_log,
                                             const std::function<Label(Slot)>& label_at) {
  constexpr Slot kNever = std::numeric_limits<Slot>::max();
  // Times the neighbors reported: v -> t_{v,self} (kNever when v never heard us).
  std::map<NodeId, Slot> reported;
  for (const auto& [sender, payload] : exchange_log) {
    const auto* times = std::get_if<IdentityWithTimes>(&payload);
    if (times == nullptr) continue;
    Slot t = kNever;
    for (const auto& h : times->heard) {
      if (h.neighbor == self) t = h.slot;
    }
    reported[sender] = t;
  }

  std::set<NodeId> candidates;
  for (const auto& [v, t] : first_heard) candidates.insert(v);
  for (const auto& [v, t] : reported) {
    if (t != kNever) candidates.insert(v);
  }

  DedicatedChannelTable table;
  for (NodeId v : candidates) {
    auto rep = reported.find(v);
    if (rep == reported.end()) {
      table.flagged.push_back(v);
      continue;
    }
    auto own = first_heard.find(v);
    const Slot t_uv = own == first_heard.end() ? kNever : own->second;
    const Slot t = std::min(t_uv, rep->second);
    const Label label = label_at(t);
    if (label == 0) {
      table.flagged.push_back(v);
      continue;
    }
    table.labels[v] = label;
    table.meeting_slot[v] = t;
  }
  return table;
}

ExchangeResult exchange_round(const NetworkInstance& net, const std::vector<ColorInfo>& outgoing,
                              bool two_hop, const SeekConfig& cfg, std::uint64_t seed,
                              std::uint64_t purpose_tag) {
  const int n = net.node_count();
  if (static_cast<int>(outgoing.size()) != n) {
    throw ConfigurationFault("exchange_round: need one ColorInfo per node");
  }
  const Slot run_slots = seek_budget(net.params, cfg).total_slots();
  ExchangeResult result;
  result.received.assign(n, {});
  result.slots = run_slots * (two_hop ? 2 : 1);

  const bool anything = std::any_of(outgoing.begin(), outgoing.end(),
                                    [](const ColorInfo& c) { return !c.entries.empty(); });
  if (!anything) return result;
  result.simulated = true;

  std::vector<Payload> payloads;
  payloads.reserve(n);
  for (NodeId u = 0; u < n; ++u) payloads.emplace_back(ColorInfo{u, outgoing[u].entries});
  auto first = run_seek(net, cfg, seed, purpose_tag, &payloads);
  for (NodeId u = 0; u < n; ++u) result.received[u] = received_entries(first.machines[u]);

  if (two_hop) {
    std::vector<Payload> relay;
    relay.reserve(n);
    for (NodeId u = 0; u < n; ++u) {
      auto entries = outgoing[u].entries;
      entries.insert(entries.end(), result.received[u].begin(), result.received[u].end());
      sort_unique(entries);
      relay.emplace_back(ColorInfo{u, std::move(entries)});
    }
    auto second = run_seek(net, cfg, seed, purpose_tag + 1, &relay);
    for (NodeId u = 0; u < n; ++u) {
      auto more = received_entries(second.machines[u]);
      result.received[u].insert(result.received[u].end(), more.begin(), more.end());
    }
  }
  for (NodeId u = 0; u < n; ++u) {
    auto& r = result.received[u];
    sort_unique(r);
    std::set<ColorEntry> own(outgoing[u].entries.begin(), outgoing[u].entries.end());
    std::erase_if(r, [&own](const ColorEntry& e) { return own.contains(e); });
  }
  return result;
}

ColoringOutcome color_line_graph(const NetworkInstance& net,
                                 const std::vector<std::vector<NodeId>>& known_neighbors,
                                 const CgcastConfig& cfg, std::uint64_t seed) {
  const int n = net.node_count();
  const int colors = 2 * net.params.delta_max;
  ColoringOutcome out;
  out.phase_budget = coloring_phases(net.params, cfg);
  out.states.assign(n, {});
  std::vector<RngStream> rng;
  rng.reserve(n);
  for (NodeId u = 0; u < n; ++u) {
    rng.push_back(derive_stream(seed, u, kTagColoring));
    for (NodeId v : known_neighbors[u]) {
      if (u < v) {
        VirtualNode vn;
        vn.other = v;
        for (int col = 1; col <= colors; ++col) vn.palette.push_back(col);
        out.states[u].owned.push_back(std::move(vn));
      }
    }
  }

  for (int phase = 1; phase <= out.phase_budget; ++phase) {
    const std::uint64_t tag = kTagColoringRuns + 4 * static_cast<std::uint64_t>(phase);

    // Step one: tentative picks; half of the active virtual nodes sit out.
    std::vector<ColorInfo> picks(n);
    for (NodeId u = 0; u < n; ++u) {
      picks[u].id = u;
      for (auto& vn : out.states[u].owned) {
        vn.tentative.reset();
        if (!vn.active || rng[u].coin() || vn.palette.empty()) continue;
        vn.tentative = vn.palette[rng[u].below(vn.palette.size())];
        picks[u].entries.push_back({u, vn.other, *vn.tentative, ColorTag::kTentative});
      }
    }
    auto heard_picks = exchange_round(net, picks, true, cfg.seek, seed, tag);
    out.slots += heard_picks.slots;

    std::vector<ColorInfo> decisions(n);
    for (NodeId u = 0; u < n; ++u) {
      decisions[u].id = u;
      auto& owned = out.states[u].owned;
      std::vector<bool> clash(owned.size(), false);
      for (std::size_t i = 0; i < owned.size(); ++i) {
        if (!owned[i].tentative) continue;
        const int col = *owned[i].tentative;
        for (std::size_t j = 0; j < owned.size(); ++j) {
          if (j != i && owned[j].tentative == col) clash[i] = true;
        }
        for (const auto& e : heard_picks.received[u]) {
          if (e.tag == ColorTag::kTentative && e.color == col &&
              line_adjacent(e.a, e.b, u, owned[i].other)) {
            clash[i] = true;
          }
        }
      }
      for (std::size_t i = 0; i < owned.size(); ++i) {
        if (clash[i]) owned[i].tentative.reset();
        if (owned[i].tentative) {
          decisions[u].entries.push_back({u, owned[i].other, *owned[i].tentative, ColorTag::kDecided});
        }
      }
    }

    // Step two: announce decisions; the rest strike those colors.
    auto heard_decisions = exchange_round(net, decisions, true, cfg.seek, seed, tag + 2);
    out.slots += heard_decisions.slots;
    for (NodeId u = 0; u < n; ++u) {
      auto& owned = out.states[u].owned;
      std::vector<ColorEntry> fixed = heard_decisions.received[u];
      fixed.insert(fixed.end(), decisions[u].entries.begin(), decisions[u].entries.end());
      for (auto& vn : owned) {
        if (!vn.active) continue;
        if (vn.tentative) {
          vn.final_color = vn.tentative;
          vn.active = false;
          out.phases_used = phase;
          continue;
        }
        for (const auto& e : fixed) {
          if (line_adjacent(e.a, e.b, u, vn.other)) std::erase(vn.palette, e.color);
        }
      }
    }
  }

  out.colored = true;
  for (NodeId u = 0; u < n; ++u) {
    for (const auto& vn : out.states[u].owned) {
      if (vn.final_color) {
        out.edge_colors[edge_key(u, vn.other)] = *vn.final_color;
      } else {
        out.colored = false;
      }
    }
  }
  return out;
}

bool coloring_proper(const std::map<std::pair<NodeId, NodeId>, int>& edge_colors, int delta) {
  std::map<NodeId, std::set<int>> seen;
  for (const auto& [edge, col] : edge_colors) {
    if (col < 1 || col > 2 * delta) return false;
    if (!seen[edge.first].insert(col).second) return false;
    if (!seen[edge.second].insert(col).second) return false;
  }
  return true;
}

DisseminationMachine::DisseminationMachine(const NodeView& view, DisseminationSchedule schedule,
                                           bool source, const Data& message, int rounds_per_step)
    : schedule_(std::move(schedule)),
      rng_(view.rng),
      message_(message),
      colors_(2 * view.params.delta_max),
      backoff_exp_(ceil_log2(std::max(1, view.params.delta_max))),
      backoff_len_(std::max(1, backoff_exp_)),
      step_len_(static_cast<Slot>(rounds_per_step) * backoff_len_),
      total_slots_(static_cast<Slot>(view.params.diam) * colors_ * step_len_),
      informed_(source) {
  if (source) informed_at_ = 0;
}

SlotAction DisseminationMachine::act(Slot slot) {
  if (slot >= total_slots_) {
    finished_ = true;
    return SlotAction::idle();
  }
  const Slot in_step = slot % step_len_;
  if (in_step == 0) {
    const int color = static_cast<int>((slot / step_len_) % colors_) + 1;
    auto it = schedule_.find(color);
    step_label_ = it == schedule_.end() ? 0 : it->second;
    sending_ = informed_;
  }
  if (step_label_ == 0) return SlotAction::idle();
  if (!sending_) return SlotAction::listen(step_label_);
  const int i = static_cast<int>(in_step % backoff_len_) + 1;
  const int shift = std::max(0, backoff_exp_ - i + 1);
  if (rng_.one_in(std::uint64_t{1} << shift)) return SlotAction::broadcast(step_label_, message_);
  return SlotAction::idle(step_label_);
}

void DisseminationMachine::observe(Slot slot, const SlotObservation& obs) {
  if (!informed_ && !obs.silent() && std::holds_alternative<Data>(*obs.heard)) {
    informed_ = true;
    informed_at_ = slot;
  }
  if (slot + 1 >= total_slots_) finished_ = true;
}

DisseminationResult disseminate(const NetworkInstance& net, NodeId source, const Data& message,
                                const std::vector<DisseminationSchedule>& schedules,
                                int rounds_per_step, std::uint64_t seed) {
  const int n = net.node_count();
  if (static_cast<int>(schedules.size()) != n) {
    throw ConfigurationFault("disseminate: need one schedule per node");
  }
  if (rounds_per_step < 1) throw ParameterFault("rounds per step must be >= 1");
  RunOptions opts;
  opts.master_seed = seed;
  opts.purpose_tag = kTagDissemination;
  const auto& p = net.params;
  opts.slot_budget = static_cast<Slot>(p.diam) * 2 * p.delta_max * rounds_per_step *
                     std::max(1, ceil_log2(std::max(1, p.delta_max)));
  auto run = run_protocol(
      net,
      [&](NodeView view) {
        return DisseminationMachine(view, schedules[view.id], view.id == source, message,
                                    rounds_per_step);
      },
      opts,
      // Nothing changes once everyone holds the message.
      [](Slot, const std::vector<DisseminationMachine>& ms) {
        return std::all_of(ms.begin(), ms.end(),
                           [](const DisseminationMachine& m) { return m.informed_at().has_value(); });
      });
  DisseminationResult out;
  out.slots = run.machines.empty() ? 0 : run.machines.front().total_slots();
  for (const auto& m : run.machines) out.informed_at.push_back(m.informed_at());
  return out;
}

nlohmann::json CgcastResult::to_json() const {
  nlohmann::json informed = nlohmann::json::object();
  for (std::size_t u = 0; u < informed_at.size(); ++u) {
    informed[std::to_string(u)] = informed_at[u] ? nlohmann::json(*informed_at[u]) : nlohmann::json(nullptr);
  }
  nlohmann::json flagged = nlohmann::json::array();
  for (auto [u, v] : flagged_edges) flagged.push_back({u, v});
  return {{"colored", colored},
          {"phases_used", phases_used},
          {"informed_at", informed},
          {"flagged_edges", flagged}};
}

CgcastResult cgcast(const NetworkInstance& net, NodeId source, const Data& message,
                    const CgcastConfig& cfg, std::uint64_t seed) {
  const int n = net.node_count();
  if (source < 0 || source >= n) throw ConfigurationFault("cgcast: unknown source node");
  SeekConfig seek = cfg.seek;
  seek.mode = SeekMode::kFull;
  CgcastConfig run_cfg = cfg;
  run_cfg.seek = seek;

  CgcastResult out;
  out.seek_slots = seek_budget(net.params, seek).total_slots();

  // Discovery, then a second run carrying first-heard times.
  auto first = run_seek(net, seek, seed, kTagDiscovery);
  std::vector<Payload> times(n);
  for (NodeId u = 0; u < n; ++u) {
    IdentityWithTimes p{u, {}};
    for (auto [v, t] : first.machines[u].state().first_heard) p.heard.push_back({v, t});
    times[u] = std::move(p);
  }
  auto second = run_seek(net, seek, seed, kTagTimes, &times);
  out.discovery_slots = 2 * out.seek_slots;

  std::vector<DedicatedChannelTable> tables(n);
  std::vector<std::vector<NodeId>> known(n);
  std::set<EdgeKey> flagged;
  for (NodeId u = 0; u < n; ++u) {
    const auto& m = first.machines[u];
    tables[u] = fix_dedicated_channels(u, m.state().first_heard, second.machines[u].state().payload_log,
                                       [&m](Slot s) { return m.label_at(s); });
    for (const auto& [v, label] : tables[u].labels) known[u].push_back(v);
    for (NodeId v : tables[u].flagged) flagged.insert(edge_key(u, v));
  }
  out.channels_agree = true;
  for (NodeId u = 0; u < n; ++u) {
    for (const auto& [v, label] : tables[u].labels) {
      auto it = tables[v].labels.find(u);
      if (it == tables[v].labels.end()) {
        flagged.insert(edge_key(u, v));
        continue;
      }
      if (net.global_channel(u, label) != net.global_channel(v, it->second)) out.channels_agree = false;
    }
  }
  out.flagged_edges.assign(flagged.begin(), flagged.end());

  auto coloring = color_line_graph(net, known, run_cfg, seed);
  out.colored = coloring.colored;
  out.phases_used = coloring.phases_used;
  out.phase_budget = coloring.phase_budget;
  out.coloring_slots = coloring.slots;
  out.edge_colors = coloring.edge_colors;
  out.proper = coloring_proper(coloring.edge_colors, net.params.delta_max);

  // The owner of each edge tells the other endpoint its color.
  std::vector<ColorInfo> handoff(n);
  std::vector<DisseminationSchedule> schedules(n);
  for (NodeId u = 0; u < n; ++u) {
    handoff[u].id = u;
    for (const auto& vn : coloring.states[u].owned) {
      if (!vn.final_color) continue;
      handoff[u].entries.push_back({u, vn.other, *vn.final_color, ColorTag::kHandoff});
      schedules[u].try_emplace(*vn.final_color, tables[u].labels.at(vn.other));
    }
  }
  auto told = exchange_round(net, handoff, false, seek, seed, kTagHandoff);
  out.handoff_slots = told.slots;
  for (NodeId u = 0; u < n; ++u) {
    for (const auto& e : told.received[u]) {
      if (e.tag != ColorTag::kHandoff || (e.a != u && e.b != u)) continue;
      const NodeId other = e.a == u ? e.b : e.a;
      auto it = tables[u].labels.find(other);
      if (it != tables[u].labels.end()) schedules[u].try_emplace(e.color, it->second);
    }
  }

  out.rounds_per_step = dissemination_rounds(net.params, cfg);
  const Slot start = out.discovery_slots + out.coloring_slots + out.handoff_slots;
  auto spread = disseminate(net, source, message, schedules, out.rounds_per_step, seed);
  out.dissemination_slots = spread.slots;
  out.total_slots = start + spread.slots;

  out.informed_at.assign(n, std::nullopt);
  out.all_informed = true;
  Slot last = 0;
  for (NodeId u = 0; u < n; ++u) {
    if (u == source) {
      out.informed_at[u] = 0;
      continue;
    }
    if (spread.informed_at[u]) {
      out.informed_at[u] = start + *spread.informed_at[u];
      last = std::max(last, *spread.informed_at[u] + 1);
    } else {
      out.all_informed = false;
    }
  }
  if (out.all_informed) out.dissemination_all_informed = last;
  return out;
}

}  // namespace crn
