#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vlnc/error.hpp"

namespace vlnc {

enum class NodeKind { Source, Inner, Terminal };

const char* to_string(NodeKind k);

struct Node {
    std::string id;
    NodeKind kind;
};

struct Edge {
    std::string id;
    std::string tail;
    std::string head;
};

struct Violation {
    std::string kind;    // e.g. "CycleDetected", "TerminalHasOutEdge"
    std::string subject; // offending node or edge id
    std::string detail;
};

// Directed acyclic coding network: partitioned nodes, identified edges,
// ordered per-terminal demands. Immutable once built (builder-style setters,
// no removal). Parallel edges are allowed; identifiers are unique per kind.
class Network {
public:
    Network() = default;
    explicit Network(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

    void add_node(const std::string& id, NodeKind kind);
    void add_edge(const std::string& id, const std::string& tail, const std::string& head);
    void set_demand(const std::string& terminal, std::vector<std::string> sources);

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::map<std::string, std::vector<std::string>>& demands() const { return demands_; }

    bool has_node(const std::string& id) const { return node_ix_.count(id) != 0; }
    bool has_edge(const std::string& id) const { return edge_ix_.count(id) != 0; }
    const Node& node(const std::string& id) const;
    const Edge& edge(const std::string& id) const;
    int node_index(const std::string& id) const;
    int edge_index(const std::string& id) const;

    std::vector<std::string> sources() const;   // in insertion order
    std::vector<std::string> terminals() const; // in insertion order

    // Edge ids incident to a node, in edge insertion order.
    std::vector<std::string> in_edges(const std::string& node_id) const;
    std::vector<std::string> out_edges(const std::string& node_id) const;

    const std::vector<std::string>& demand(const std::string& terminal) const;

    // Node ids in a deterministic topological order (Kahn's algorithm, ties
    // broken by identifier). Throws CycleDetected on cyclic graphs.
    std::vector<std::string> topo_order() const;

    // Structural equality, independent of insertion order.
    bool operator==(const Network& o) const;

private:
    std::string name_;
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::map<std::string, int> node_ix_, edge_ix_;
    std::map<std::string, std::vector<std::string>> demands_;
};

inline bool operator==(const Node& a, const Node& b) { return a.id == b.id && a.kind == b.kind; }
inline bool operator==(const Edge& a, const Edge& b) {
    return a.id == b.id && a.tail == b.tail && a.head == b.head;
}

// Structural checks; empty result iff the network is a valid coding network.
std::vector<Violation> validate(const Network& net);

// Disjoint union; throws NotDisjoint on any node or edge identifier collision.
Network union_nets(const Network& a, const Network& b);

// Returns a copy with every node and edge identifier prefixed.
Network rename_prefixed(const Network& net, const std::string& prefix);

// Sources that can influence the vector carried by an edge: sources with a
// directed path to tail(e), plus tail(e) itself when it is a source.
std::set<std::string> source_support(const Network& net, const std::string& edge_id);

// Line-oriented text format:
//   node <id> source|inner|terminal
//   edge <id> <tail> <head>
//   demand <terminal> <source> [<source> ...]
// '#' starts a comment. serialize_network emits the canonical form (nodes
// sorted source/inner/terminal then by id, edges and demands sorted by id).
Network parse_network(std::istream& in);
Network parse_network_string(const std::string& text);
std::string serialize_network(const Network& net);

} // namespace vlnc
