#include "manetsim/clustering.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace manet {

namespace {

const std::set<NodeId>& adjacent(const NeighborGraph& graph, NodeId node) {
    static const std::set<NodeId> kEmpty;
    auto it = graph.find(node);
    return it == graph.end() ? kEmpty : it->second;
}

std::set<NodeId> head_neighbors(const ClusterView& view, const NeighborGraph& graph, NodeId node) {
    std::set<NodeId> out;
    for (NodeId n : adjacent(graph, node)) {
        if (view.role(n).kind == ClusterRole::Kind::Head) {
            out.insert(n);
        }
    }
    return out;
}

bool share_any(const std::set<NodeId>& a, const std::set<NodeId>& b) {
    return std::any_of(a.begin(), a.end(), [&](NodeId x) { return b.contains(x); });
}

}  // namespace

std::string_view to_string(ClusterMode mode) {
    switch (mode) {
    case ClusterMode::Off: return "off";
    case ClusterMode::Overlay: return "overlay";
    case ClusterMode::Forwarding: return "forwarding";
    }
    return "?";
}

std::optional<ClusterMode> cluster_mode_from_string(std::string_view text) {
    if (text == "off") return ClusterMode::Off;
    if (text == "overlay") return ClusterMode::Overlay;
    if (text == "forwarding") return ClusterMode::Forwarding;
    return std::nullopt;
}

std::string ClusterRole::str() const {
    auto join = [this]() {
        std::string s;
        for (NodeId h : heads) {
            if (!s.empty()) {
                s += '+';
            }
            s += std::to_string(h);
        }
        return s;
    };
    switch (kind) {
    case Kind::Undecided: return "undecided";
    case Kind::Head: return "head";
    case Kind::Member: return "member:" + join();
    case Kind::Gateway: return "gateway:" + join();
    }
    return "?";
}

std::set<NodeId> ClusterView::heads() const {
    std::set<NodeId> out;
    for (const auto& [id, r] : roles) {
        if (r.kind == ClusterRole::Kind::Head) {
            out.insert(id);
        }
    }
    return out;
}

const ClusterRole& ClusterView::role(NodeId node) const {
    auto it = roles.find(node);
    if (it == roles.end()) {
        throw UnknownNodeError(node);
    }
    return it->second;
}

ClusterView elect_clusters(const NeighborGraph& graph, const std::set<NodeId>& incumbents) {
    ClusterView view;
    for (const auto& [id, _] : graph) {
        view.roles[id] = ClusterRole::undecided();
    }
    auto claim = [&](NodeId head) {
        view.roles[head] = ClusterRole::head();
        for (NodeId n : adjacent(graph, head)) {
            if (view.roles[n].kind == ClusterRole::Kind::Undecided) {
                view.roles[n] = ClusterRole::member(head);
            }
        }
    };

    for (NodeId h : incumbents) {
        if (!graph.contains(h) || view.roles[h].kind != ClusterRole::Kind::Undecided) {
            continue;
        }
        claim(h);
    }

    while (true) {
        std::vector<NodeId> minima;
        for (const auto& [id, role] : view.roles) {
            if (role.kind != ClusterRole::Kind::Undecided) {
                continue;
            }
            bool smallest = true;
            for (NodeId n : adjacent(graph, id)) {
                if (n < id && view.roles[n].kind == ClusterRole::Kind::Undecided) {
                    smallest = false;
                    break;
                }
            }
            if (smallest) {
                minima.push_back(id);
            }
        }
        if (minima.empty()) {
            break;
        }
        for (NodeId id : minima) {
            if (view.roles[id].kind == ClusterRole::Kind::Undecided) {
                claim(id);
            }
        }
    }
    return view;
}

ClusterView identify_gateways(ClusterView view, const NeighborGraph& graph) {
    for (const auto& [id, role] : view.roles) {
        if (role.kind == ClusterRole::Kind::Undecided) {
            throw std::invalid_argument("identify_gateways requires a complete election");
        }
    }
    std::map<NodeId, std::set<NodeId>> heads_of;
    for (const auto& [id, role] : view.roles) {
        if (role.kind != ClusterRole::Kind::Head) {
            heads_of[id] = head_neighbors(view, graph, id);
        }
    }
    for (auto& [id, role] : view.roles) {
        if (role.kind != ClusterRole::Kind::Head && heads_of[id].size() >= 2) {
            role = ClusterRole::gateway(heads_of[id]);
        }
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [id, role] : view.roles) {
            if (role.kind != ClusterRole::Kind::Member || heads_of[id].size() != 1) {
                continue;
            }
            NodeId own_head = *heads_of[id].begin();
            for (NodeId n : adjacent(graph, id)) {
                const ClusterRole& other = view.roles.at(n);
                if (other.kind == ClusterRole::Kind::Head || heads_of[n].contains(own_head)) {
                    continue;
                }
                bool bridge = other.kind == ClusterRole::Kind::Gateway || heads_of[n].size() == 1;
                if (bridge) {
                    role = ClusterRole::gateway(heads_of[id]);
                    changed = true;
                    break;
                }
            }
        }
    }
    return view;
}

std::optional<std::vector<NodeId>> cluster_route(NodeId src, NodeId dst, const ClusterView& view,
                                                 const NeighborGraph& graph) {
    if (!graph.contains(src)) {
        throw UnknownNodeError(src);
    }
    if (!graph.contains(dst)) {
        throw UnknownNodeError(dst);
    }
    if (src == dst) {
        return std::vector<NodeId>{src};
    }
    auto relay_ok = [&](NodeId from, NodeId to) {
        const ClusterRole& rt = view.role(to);
        if (!rt.is_backbone()) {
            return false;
        }
        if (from == src) {
            return true;
        }
        const ClusterRole& rf = view.role(from);
        if (rf.kind == ClusterRole::Kind::Head && rt.kind == ClusterRole::Kind::Head) {
            return false;
        }
        if (rf.kind == ClusterRole::Kind::Gateway && rt.kind == ClusterRole::Kind::Gateway) {
            return !share_any(rf.heads, rt.heads);
        }
        return true;
    };

    std::map<NodeId, NodeId> parent;
    std::deque<NodeId> frontier{src};
    parent[src] = src;
    while (!frontier.empty()) {
        NodeId u = frontier.front();
        frontier.pop_front();
        for (NodeId v : adjacent(graph, u)) {
            if (parent.contains(v)) {
                continue;
            }
            if (v == dst) {
                std::vector<NodeId> path{dst};
                for (NodeId x = u; x != src; x = parent[x]) {
                    path.push_back(x);
                }
                path.push_back(src);
                std::reverse(path.begin(), path.end());
                return path;
            }
            if (relay_ok(u, v)) {
                parent[v] = u;
                frontier.push_back(v);
            }
        }
    }
    return std::nullopt;
}

bool is_connected(const NeighborGraph& graph) {
    if (graph.empty()) {
        return true;
    }
    std::set<NodeId> seen{graph.begin()->first};
    std::deque<NodeId> frontier{graph.begin()->first};
    while (!frontier.empty()) {
        NodeId u = frontier.front();
        frontier.pop_front();
        for (NodeId v : adjacent(graph, u)) {
            if (seen.insert(v).second) {
                frontier.push_back(v);
            }
        }
    }
    return seen.size() == graph.size();
}

}  // namespace manet
