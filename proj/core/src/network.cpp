#include "vlnc/network.hpp"

#include <algorithm>
#include <istream>
#include <queue>
#include <sstream>

namespace vlnc {

const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Source: return "source";
        case NodeKind::Inner: return "inner";
        case NodeKind::Terminal: return "terminal";
    }
    return "?";
}

void Network::add_node(const std::string& id, NodeKind kind) {
    if (id.empty()) raise(ErrorKind::InvalidArg, "empty node id");
    if (node_ix_.count(id)) raise(ErrorKind::InvalidArg, "duplicate node id: " + id);
    node_ix_[id] = (int)nodes_.size();
    nodes_.push_back({id, kind});
}

void Network::add_edge(const std::string& id, const std::string& tail, const std::string& head) {
    if (id.empty()) raise(ErrorKind::InvalidArg, "empty edge id");
    if (edge_ix_.count(id)) raise(ErrorKind::InvalidArg, "duplicate edge id: " + id);
    edge_ix_[id] = (int)edges_.size();
    edges_.push_back({id, tail, head});
}

void Network::set_demand(const std::string& terminal, std::vector<std::string> sources) {
    demands_[terminal] = std::move(sources);
}

const Node& Network::node(const std::string& id) const {
    auto it = node_ix_.find(id);
    if (it == node_ix_.end()) raise(ErrorKind::NoSuchNode, id);
    return nodes_[it->second];
}

const Edge& Network::edge(const std::string& id) const {
    auto it = edge_ix_.find(id);
    if (it == edge_ix_.end()) raise(ErrorKind::NoSuchEdge, id);
    return edges_[it->second];
}

int Network::node_index(const std::string& id) const {
    auto it = node_ix_.find(id);
    if (it == node_ix_.end()) raise(ErrorKind::NoSuchNode, id);
    return it->second;
}

int Network::edge_index(const std::string& id) const {
    auto it = edge_ix_.find(id);
    if (it == edge_ix_.end()) raise(ErrorKind::NoSuchEdge, id);
    return it->second;
}

std::vector<std::string> Network::sources() const {
    std::vector<std::string> out;
    for (auto& n : nodes_)
        if (n.kind == NodeKind::Source) out.push_back(n.id);
    return out;
}

std::vector<std::string> Network::terminals() const {
    std::vector<std::string> out;
    for (auto& n : nodes_)
        if (n.kind == NodeKind::Terminal) out.push_back(n.id);
    return out;
}

std::vector<std::string> Network::in_edges(const std::string& node_id) const {
    std::vector<std::string> out;
    for (auto& e : edges_)
        if (e.head == node_id) out.push_back(e.id);
    return out;
}

std::vector<std::string> Network::out_edges(const std::string& node_id) const {
    std::vector<std::string> out;
    for (auto& e : edges_)
        if (e.tail == node_id) out.push_back(e.id);
    return out;
}

const std::vector<std::string>& Network::demand(const std::string& terminal) const {
    static const std::vector<std::string> kEmpty;
    auto it = demands_.find(terminal);
    return it == demands_.end() ? kEmpty : it->second;
}

std::vector<std::string> Network::topo_order() const {
    std::map<std::string, int> indeg;
    for (auto& n : nodes_) indeg[n.id] = 0;
    for (auto& e : edges_)
        if (indeg.count(e.head)) ++indeg[e.head];
    std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
    for (auto& [id, d] : indeg)
        if (d == 0) ready.push(id);
    std::vector<std::string> order;
    while (!ready.empty()) {
        std::string id = ready.top();
        ready.pop();
        order.push_back(id);
        for (auto& e : edges_) {
            if (e.tail != id || !indeg.count(e.head)) continue;
            if (--indeg[e.head] == 0) ready.push(e.head);
        }
    }
    if (order.size() != nodes_.size()) raise(ErrorKind::InvalidArg, "CycleDetected in " + name_);
    return order;
}

bool Network::operator==(const Network& o) const {
    if (demands_ != o.demands_) return false;
    auto nodes_sorted = [](const Network& n) {
        auto v = n.nodes();
        std::sort(v.begin(), v.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
        return v;
    };
    auto edges_sorted = [](const Network& n) {
        auto v = n.edges();
        std::sort(v.begin(), v.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
        return v;
    };
    return nodes_sorted(*this) == nodes_sorted(o) && edges_sorted(*this) == edges_sorted(o);
}

std::vector<Violation> validate(const Network& net) {
    std::vector<Violation> out;
    for (auto& e : net.edges()) {
        if (!net.has_node(e.tail))
            out.push_back({"UnknownNode", e.id, "tail '" + e.tail + "' does not exist"});
        if (!net.has_node(e.head))
            out.push_back({"UnknownNode", e.id, "head '" + e.head + "' does not exist"});
        if (net.has_node(e.tail) && net.node(e.tail).kind == NodeKind::Terminal)
            out.push_back({"TerminalHasOutEdge", e.tail, "edge " + e.id});
        if (net.has_node(e.head) && net.node(e.head).kind == NodeKind::Source)
            out.push_back({"SourceHasInEdge", e.head, "edge " + e.id});
    }
    for (auto& [t, srcs] : net.demands()) {
        if (!net.has_node(t)) {
            out.push_back({"UnknownNode", t, "demand names a missing node"});
            continue;
        }
        if (net.node(t).kind != NodeKind::Terminal)
            out.push_back({"DemandOnNonTerminal", t, ""});
        for (auto& s : srcs) {
            if (!net.has_node(s))
                out.push_back({"UnknownDemandSource", t, "demands missing '" + s + "'"});
            else if (net.node(s).kind != NodeKind::Source)
                out.push_back({"DemandOfNonSource", t, "demands non-source '" + s + "'"});
        }
    }
    // Cycle check via Kahn on well-formed incidences only.
    std::map<std::string, int> indeg;
    for (auto& n : net.nodes()) indeg[n.id] = 0;
    for (auto& e : net.edges())
        if (indeg.count(e.tail) && indeg.count(e.head)) ++indeg[e.head];
    std::vector<std::string> ready;
    for (auto& [id, d] : indeg)
        if (d == 0) ready.push_back(id);
    size_t seen = 0;
    while (!ready.empty()) {
        std::string id = ready.back();
        ready.pop_back();
        ++seen;
        for (auto& e : net.edges())
            if (e.tail == id && indeg.count(e.head) && --indeg[e.head] == 0)
                ready.push_back(e.head);
    }
    if (seen != net.nodes().size()) {
        for (auto& [id, d] : indeg)
            if (d > 0) {
                out.push_back({"CycleDetected", id, ""});
                break;
            }
    }
    return out;
}

Network union_nets(const Network& a, const Network& b) {
    for (auto& n : b.nodes())
        if (a.has_node(n.id)) raise(ErrorKind::NotDisjoint, "node id '" + n.id + "' in both networks");
    for (auto& e : b.edges())
        if (a.has_edge(e.id)) raise(ErrorKind::NotDisjoint, "edge id '" + e.id + "' in both networks");
    Network u(a.name().empty() || b.name().empty() ? a.name() + b.name()
                                                   : a.name() + "+" + b.name());
    for (auto& n : a.nodes()) u.add_node(n.id, n.kind);
    for (auto& n : b.nodes()) u.add_node(n.id, n.kind);
    for (auto& e : a.edges()) u.add_edge(e.id, e.tail, e.head);
    for (auto& e : b.edges()) u.add_edge(e.id, e.tail, e.head);
    for (auto& [t, srcs] : a.demands()) u.set_demand(t, srcs);
    for (auto& [t, srcs] : b.demands()) u.set_demand(t, srcs);
    return u;
}

Network rename_prefixed(const Network& net, const std::string& prefix) {
    Network out(prefix + net.name());
    for (auto& n : net.nodes()) out.add_node(prefix + n.id, n.kind);
    for (auto& e : net.edges()) out.add_edge(prefix + e.id, prefix + e.tail, prefix + e.head);
    for (auto& [t, srcs] : net.demands()) {
        std::vector<std::string> renamed;
        for (auto& s : srcs) renamed.push_back(prefix + s);
        out.set_demand(prefix + t, std::move(renamed));
    }
    return out;
}

std::set<std::string> source_support(const Network& net, const std::string& edge_id) {
    const Edge& e = net.edge(edge_id);
    std::set<std::string> support, visited;
    std::vector<std::string> stack{e.tail};
    while (!stack.empty()) {
        std::string id = stack.back();
        stack.pop_back();
        if (!visited.insert(id).second) continue;
        if (net.node(id).kind == NodeKind::Source) {
            support.insert(id);
            continue;
        }
        for (auto& in : net.edges())
            if (in.head == id) stack.push_back(in.tail);
    }
    return support;
}

Network parse_network(std::istream& in) {
    Network net;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string kw;
        if (!(ss >> kw)) continue;
        try {
            if (kw == "node") {
                std::string id, kind;
                if (!(ss >> id >> kind)) raise(ErrorKind::ParseError, "node needs <id> <kind>");
                NodeKind k;
                if (kind == "source")
                    k = NodeKind::Source;
                else if (kind == "inner")
                    k = NodeKind::Inner;
                else if (kind == "terminal")
                    k = NodeKind::Terminal;
                else
                    raise(ErrorKind::ParseError, "unknown node kind '" + kind + "'");
                net.add_node(id, k);
            } else if (kw == "edge") {
                std::string id, tail, head;
                if (!(ss >> id >> tail >> head)) raise(ErrorKind::ParseError, "edge needs <id> <tail> <head>");
                net.add_edge(id, tail, head);
            } else if (kw == "demand") {
                std::string t, s;
                if (!(ss >> t)) raise(ErrorKind::ParseError, "demand needs <terminal>");
                std::vector<std::string> srcs;
                while (ss >> s) srcs.push_back(s);
                if (srcs.empty()) raise(ErrorKind::ParseError, "demand needs at least one source");
                net.set_demand(t, std::move(srcs));
            } else {
                raise(ErrorKind::ParseError, "unknown keyword '" + kw + "'");
            }
        } catch (const Error& e) {
            raise(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return net;
}

Network parse_network_string(const std::string& text) {
    std::istringstream ss(text);
    return parse_network(ss);
}

std::string serialize_network(const Network& net) {
    std::ostringstream out;
    for (NodeKind k : {NodeKind::Source, NodeKind::Inner, NodeKind::Terminal}) {
        std::vector<std::string> ids;
        for (auto& n : net.nodes())
            if (n.kind == k) ids.push_back(n.id);
        std::sort(ids.begin(), ids.end());
        for (auto& id : ids) out << "node " << id << " " << to_string(k) << "\n";
    }
    std::vector<const Edge*> es;
    for (auto& e : net.edges()) es.push_back(&e);
    std::sort(es.begin(), es.end(), [](const Edge* a, const Edge* b) { return a->id < b->id; });
    for (auto* e : es) out << "edge " << e->id << " " << e->tail << " " << e->head << "\n";
    for (auto& [t, srcs] : net.demands()) {
        out << "demand " << t;
        for (auto& s : srcs) out << " " << s;
        out << "\n";
    }
    return out.str();
}

} // namespace vlnc
