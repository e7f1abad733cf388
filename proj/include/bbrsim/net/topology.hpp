#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bbrsim/net/channel.hpp"
#include "bbrsim/net/packet.hpp"
#include "bbrsim/sim/rng.hpp"
#include "bbrsim/sim/simulator.hpp"

namespace bbrsim {

enum class Node : int { n0 = 0, n1, n2, n3, n4, n5 };

inline std::string NodeName(Node n) { return "n" + std::to_string(static_cast<int>(n)); }

// Dumbbell wiring: senders n0/n1 hang off n2, receivers n4/n5 off n3, and
// l2 (n2-n3) is the shared bottleneck.
struct LinkSpec {
  const char* name;
  Node a;
  Node b;
};
inline constexpr std::array<LinkSpec, 5> kDumbbellLinks = {{
    {"l1", Node::n0, Node::n2},
    {"l2", Node::n2, Node::n3},
    {"l3", Node::n1, Node::n2},
    {"l4", Node::n3, Node::n4},
    {"l5", Node::n3, Node::n5},
}};
inline constexpr const char* kBottleneckLink = "l2";

struct FlowPath {
  Node src = Node::n2;
  Node dst = Node::n3;
  std::vector<std::string> links;  // in order from src to dst
};

struct FlowDropCounts {
  uint64_t tail_drops = 0;
  uint64_t random_drops = 0;
  uint64_t total() const { return tail_drops + random_drops; }
};

class Topology {
 public:
  using EndpointFn = std::function<void(Packet)>;

  // Builds the dumbbell. `side_links` holds configs for whichever of l1, l3,
  // l4, l5 are in use; the bottleneck is l2. Random loss on the bottleneck is
  // applied on the n2->n3 direction only.
  static std::unique_ptr<Topology> BuildDumbbell(Simulator& sim, const LinkConfig& bottleneck,
                                                 const std::map<std::string, LinkConfig>& side_links,
                                                 const std::map<FlowId, FlowPath>& paths,
                                                 uint64_t seed) {
    auto topo = std::unique_ptr<Topology>(new Topology(sim));
    for (const auto& [name, _] : side_links) {
      if (name == kBottleneckLink || FindSpec(name) == nullptr) {
        throw std::invalid_argument("unknown side link: " + name);
      }
      if (!(side_links.at(name).bandwidth_bps > bottleneck.bandwidth_bps)) {
        throw std::invalid_argument("side link " + name + " must be faster than the bottleneck");
      }
    }
    for (const auto& spec : kDumbbellLinks) {
      const bool is_bottleneck = std::string(spec.name) == kBottleneckLink;
      const LinkConfig* cfg = nullptr;
      if (is_bottleneck) {
        cfg = &bottleneck;
      } else if (auto it = side_links.find(spec.name); it != side_links.end()) {
        cfg = &it->second;
      } else {
        continue;
      }
      LinkConfig forward = *cfg;
      LinkConfig reverse = *cfg;
      reverse.random_loss_rate = 0.0;
      std::optional<RngStream> rng;
      if (!is_bottleneck) {
        forward.random_loss_rate = 0.0;
      } else if (forward.random_loss_rate > 0.0) {
        rng.emplace(seed, static_cast<uint32_t>(StreamId::kBottleneckLoss));
      }
      auto& link = topo->links_[spec.name];
      link.spec = spec;
      link.forward = std::make_unique<Channel>(sim, std::string(spec.name) + ":" + NodeName(spec.a) + "->" + NodeName(spec.b),
                                               forward, std::move(rng));
      link.reverse = std::make_unique<Channel>(sim, std::string(spec.name) + ":" + NodeName(spec.b) + "->" + NodeName(spec.a),
                                               reverse);
    }
    for (auto& [name, link] : topo->links_) {
      for (Channel* ch : {link.forward.get(), link.reverse.get()}) {
        Topology* self = topo.get();
        ch->set_deliver([self](Packet p) { self->Forward(std::move(p)); });
        ch->set_on_drop([self](const Packet& p, EnqueueResult why) { self->CountDrop(p, why); });
      }
    }
    for (const auto& [flow, path] : paths) topo->AddRoute(flow, path);
    return topo;
  }

  void AttachReceiver(FlowId flow, EndpointFn fn) { Route(flow).receiver = std::move(fn); }
  void AttachSender(FlowId flow, EndpointFn fn) { Route(flow).sender = std::move(fn); }

  // Injects a data packet at the flow's source (or an ACK at its sink).
  EnqueueResult Send(Packet p) {
    FlowRoute& r = Route(p.flow_id);
    p.hop = 0;
    auto& hops = p.kind == PacketKind::kData ? r.forward : r.reverse;
    return hops.front()->Enqueue(std::move(p));
  }

  size_t PathLength(FlowId flow) const { return routes_.at(flow).forward.size(); }

  Duration PathPropDelay(FlowId flow) const {
    Duration d = Duration::Zero();
    for (const Channel* ch : routes_.at(flow).forward) d = d + ch->prop_delay();
    return d;
  }

  Duration RoundTripPropDelay(FlowId flow) const {
    Duration d = PathPropDelay(flow);
    for (const Channel* ch : routes_.at(flow).reverse) d = d + ch->prop_delay();
    return d;
  }

  Channel& BottleneckForward() { return *links_.at(kBottleneckLink).forward; }
  const Channel& BottleneckForward() const { return *links_.at(kBottleneckLink).forward; }

  std::vector<const Channel*> Channels() const {
    std::vector<const Channel*> out;
    for (const auto& [_, link] : links_) {
      out.push_back(link.forward.get());
      out.push_back(link.reverse.get());
    }
    return out;
  }

  bool ConservationHolds() const {
    for (const Channel* ch : Channels()) {
      if (!ch->ConservationHolds()) return false;
    }
    return true;
  }

  FlowDropCounts drops(FlowId flow) const {
    auto it = drops_.find(flow);
    return it == drops_.end() ? FlowDropCounts{} : it->second;
  }

 private:
  struct Link {
    LinkSpec spec{};
    std::unique_ptr<Channel> forward;  // spec.a -> spec.b
    std::unique_ptr<Channel> reverse;
  };
  struct FlowRoute {
    std::vector<Channel*> forward;
    std::vector<Channel*> reverse;
    EndpointFn sender;
    EndpointFn receiver;
  };

  explicit Topology(Simulator& sim) : sim_(sim) {}

  static const LinkSpec* FindSpec(const std::string& name) {
    for (const auto& s : kDumbbellLinks) {
      if (name == s.name) return &s;
    }
    return nullptr;
  }

  FlowRoute& Route(FlowId flow) {
    auto it = routes_.find(flow);
    if (it == routes_.end()) throw std::invalid_argument("no route for flow " + std::to_string(flow));
    return it->second;
  }

  void AddRoute(FlowId flow, const FlowPath& path) {
    if (path.links.empty()) throw std::invalid_argument("empty path");
    FlowRoute route;
    Node at = path.src;
    int bottleneck_crossings = 0;
    for (const std::string& name : path.links) {
      auto it = links_.find(name);
      if (it == links_.end()) throw std::invalid_argument("path references unknown link: " + name);
      Link& link = it->second;
      if (link.spec.a == at) {
        route.forward.push_back(link.forward.get());
        route.reverse.insert(route.reverse.begin(), link.reverse.get());
        at = link.spec.b;
      } else if (link.spec.b == at) {
        route.forward.push_back(link.reverse.get());
        route.reverse.insert(route.reverse.begin(), link.forward.get());
        at = link.spec.a;
      } else {
        throw std::invalid_argument("link " + name + " does not touch " + NodeName(at));
      }
      if (name == kBottleneckLink) {
        ++bottleneck_crossings;
        if (at != Node::n3) throw std::invalid_argument("data must cross l2 from n2 to n3");
      }
    }
    if (at != path.dst) throw std::invalid_argument("path does not end at " + NodeName(path.dst));
    if (bottleneck_crossings != 1) throw std::invalid_argument("path must cross l2 exactly once");
    routes_[flow] = std::move(route);
  }

  void Forward(Packet p) {
    FlowRoute& r = Route(p.flow_id);
    const bool data = p.kind == PacketKind::kData;
    auto& hops = data ? r.forward : r.reverse;
    ++p.hop;
    if (p.hop < hops.size()) {
      hops[p.hop]->Enqueue(std::move(p));
      return;
    }
    EndpointFn& sink = data ? r.receiver : r.sender;
    if (sink) sink(std::move(p));
  }

  void CountDrop(const Packet& p, EnqueueResult why) {
    if (p.kind != PacketKind::kData) return;
    auto& c = drops_[p.flow_id];
    if (why == EnqueueResult::kDroppedTail) ++c.tail_drops;
    if (why == EnqueueResult::kDroppedRandom) ++c.random_drops;
  }

  Simulator& sim_;
  std::map<std::string, Link> links_;
  std::map<FlowId, FlowRoute> routes_;
  std::map<FlowId, FlowDropCounts> drops_;
};

}  // namespace bbrsim
