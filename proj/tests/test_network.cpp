#include "doctest.h"
#include "vlnc/network.hpp"
#include "vlnc/zoo.hpp"

#include <algorithm>

using namespace vlnc;

TEST_CASE("zoo networks validate cleanly") {
    for (auto name : {"m2", "m3", "char-m:2", "char-m:3", "char-qs:2", "char-qs:3", "n1:2", "n2:2"}) {
        Network net = zoo_network(name);
        CHECK_MESSAGE(validate(net).empty(), name);
    }
}

TEST_CASE("validate reports structural violations as data") {
    Network n;
    n.add_node("s", NodeKind::Source);
    n.add_node("t", NodeKind::Terminal);
    n.add_edge("back", "t", "s");
    auto v = validate(n);
    REQUIRE(!v.empty());
    bool saw_terminal_out = false, saw_source_in = false;
    for (auto& viol : v) {
        if (viol.kind == "TerminalHasOutEdge" && viol.subject == "t") saw_terminal_out = true;
        if (viol.kind == "SourceHasInEdge" && viol.subject == "s") saw_source_in = true;
    }
    CHECK(saw_terminal_out);
    CHECK(saw_source_in);

    Network cyc;
    cyc.add_node("a", NodeKind::Inner);
    cyc.add_node("b", NodeKind::Inner);
    cyc.add_edge("e1", "a", "b");
    cyc.add_edge("e2", "b", "a");
    auto cv = validate(cyc);
    CHECK(std::any_of(cv.begin(), cv.end(), [](auto& x) { return x.kind == "CycleDetected"; }));

    Network miss;
    miss.add_node("t", NodeKind::Terminal);
    miss.set_demand("t", {"ghost"});
    auto mv = validate(miss);
    CHECK(std::any_of(mv.begin(), mv.end(), [](auto& x) { return x.kind == "UnknownDemandSource"; }));
}

TEST_CASE("duplicate identifiers are construction errors") {
    Network n;
    n.add_node("a", NodeKind::Source);
    CHECK_THROWS_AS(n.add_node("a", NodeKind::Inner), Error);
    n.add_node("b", NodeKind::Inner);
    n.add_edge("e", "a", "b");
    CHECK_THROWS_AS(n.add_edge("e", "a", "b"), Error);
}

TEST_CASE("union merges disjoint networks and rejects collisions") {
    Network m2 = zoo_network("m2");
    Network cq = rename_prefixed(zoo_network("char-qs:2"), "C:");
    Network u = union_nets(m2, cq);
    CHECK(u.sources().size() == 9);
    CHECK(u.terminals().size() == 9);
    CHECK(validate(u).empty());

    Network empty;
    Network same = union_nets(m2, empty);
    CHECK(same == m2);

    CHECK_THROWS_AS(union_nets(m2, m2), Error);
    try {
        union_nets(m2, m2);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotDisjoint);
    }
}

TEST_CASE("union of valid disjoint networks validates") {
    for (auto a : {"m2", "char-m:2"})
        for (auto b : {"char-qs:2", "m3"}) {
            Network u = union_nets(rename_prefixed(zoo_network(a), "A:"),
                                   rename_prefixed(zoo_network(b), "B:"));
            CHECK(validate(u).empty());
        }
}

TEST_CASE("source support follows directed paths") {
    Network m2 = zoo_network("m2");
    CHECK(source_support(m2, "e11") == std::set<std::string>{"a", "b"});
    CHECK(source_support(m2, "v3->t1") == std::set<std::string>{"a", "b", "x", "y"});

    Network cq = zoo_network("char-qs:2");
    CHECK(source_support(cq, "e1") == std::set<std::string>{"x1", "s"});
    CHECK(source_support(cq, "s->m1") == std::set<std::string>{"s"});

    CHECK_THROWS_AS(source_support(m2, "nope"), Error);
}

TEST_CASE("support is monotone along single-join paths") {
    for (auto name : {"m2", "char-qs:2", "n1:2"}) {
        Network net = zoo_network(name);
        for (auto& e : net.edges()) {
            auto sup = source_support(net, e.id);
            for (auto& e2 : net.edges()) {
                if (e2.tail != e.head) continue;
                // Every source reaching e also reaches any edge leaving its head.
                auto sup2 = source_support(net, e2.id);
                for (auto& s : sup) CHECK(sup2.count(s) == 1);
            }
        }
    }
}

TEST_CASE("topological order is deterministic and respects edges") {
    Network m2 = zoo_network("m2");
    auto order = m2.topo_order();
    CHECK(order.size() == m2.nodes().size());
    std::map<std::string, int> pos;
    for (size_t i = 0; i < order.size(); ++i) pos[order[i]] = (int)i;
    for (auto& e : m2.edges()) CHECK(pos[e.tail] < pos[e.head]);
    CHECK(order == m2.topo_order());
}

TEST_CASE("network files round-trip through the canonical form") {
    Network m2 = zoo_network("m2");
    std::string text = serialize_network(m2);
    Network back = parse_network_string(text);
    CHECK(back == m2);
    CHECK(serialize_network(back) == text);

    std::string with_comments = "# demo\nnode s source\nnode t terminal # trailing\nedge e s t\ndemand t s\n";
    Network tiny = parse_network_string(with_comments);
    CHECK(tiny.sources() == std::vector<std::string>{"s"});
    CHECK(tiny.demand("t") == std::vector<std::string>{"s"});

    CHECK_THROWS_AS(parse_network_string("node a wrongkind\n"), Error);
    CHECK_THROWS_AS(parse_network_string("edge e a\n"), Error);
}

TEST_CASE("parallel edges are representable") {
    Network n;
    n.add_node("s", NodeKind::Source);
    n.add_node("v", NodeKind::Inner);
    n.add_node("t", NodeKind::Terminal);
    n.add_edge("p1", "s", "v");
    n.add_edge("p2", "s", "v");
    n.add_edge("out", "v", "t");
    n.set_demand("t", {"s"});
    CHECK(validate(n).empty());
    CHECK(n.in_edges("v").size() == 2);
}

TEST_CASE("m2 structure matches its published shape") {
    Network m2 = zoo_network("m2");
    CHECK(m2.edges().size() == 20);
    CHECK(m2.sources().size() == 4);
    CHECK(m2.terminals().size() == 4);
    CHECK(m2.demand("t1") == std::vector<std::string>{"a", "x"});
    CHECK(m2.demand("t4") == std::vector<std::string>{"b", "y"});
}

TEST_CASE("m3 structure") {
    Network m3 = zoo_network("m3");
    CHECK(m3.terminals().size() == 27);
    int middle = 0;
    for (auto& e : m3.edges())
        if (e.tail[0] == 'u' && e.head[0] == 'v') ++middle;
    CHECK(middle == 9);
    CHECK(m3.demand("t1") == std::vector<std::string>{"a", "r", "x"});
    CHECK(m3.demand("t14") == std::vector<std::string>{"b", "s", "y"});
    CHECK(m3.demand("t27") == std::vector<std::string>{"c", "w", "z"});
    CHECK(m3.edges().size() == 9 + 9 + 5 * 27);
}

TEST_CASE("char-m structure") {
    CHECK_THROWS_AS(build_char_m(1), Error);
    Network c2 = build_char_m(2);
    CHECK(c2.terminals().size() == 5);
    CHECK(c2.demand("r5") == std::vector<std::string>{"x1"});
    CHECK(c2.demand("r3") == std::vector<std::string>{"x3"});
    // Every relay u_j sees every source except x_j.
    for (int j = 1; j <= 4; ++j) {
        auto ins = c2.in_edges("u" + std::to_string(j));
        CHECK(ins.size() == 3);
        for (auto& e : ins) CHECK(c2.edge(e).tail != "x" + std::to_string(j));
    }
    CHECK(c2.in_edges("u5").size() == 4);
}

TEST_CASE("char-qs structure") {
    Network cq = build_char_qs(2);
    CHECK(cq.sources().size() == 5);
    CHECK(cq.terminals().size() == 5);
    // No terminal demands the dummy source s.
    for (auto& [t, dem] : cq.demands())
        for (auto& s : dem) CHECK(s != "s");
    CHECK(cq.demand("r1") == std::vector<std::string>{"x4"});
    CHECK(cq.demand("r5") == std::vector<std::string>{"x1"});
    // r1 hears n1, n5 and the direct feeds from x2, x3.
    std::set<std::string> tails;
    for (auto& e : cq.in_edges("r1")) tails.insert(cq.edge(e).tail);
    CHECK(tails == std::set<std::string>{"n1", "n5", "x2", "x3"});
}

TEST_CASE("n1 structure") {
    Network n1 = build_n1(2);
    CHECK(validate(n1).empty());
    std::set<std::string> t4_tails;
    for (auto& e : n1.in_edges("t4")) t4_tails.insert(n1.edge(e).tail);
    CHECK(t4_tails == std::set<std::string>{"v1", "v2", "v3", "n1"});
    CHECK(n1.demand("r5") == std::vector<std::string>{"a"});
    // a stands in for the removed first char source, y for the dummy.
    CHECK(source_support(n1, "e1") == std::set<std::string>{"a", "y"});
    CHECK(n1.sources().size() == 7);
}

TEST_CASE("n2 structure") {
    Network n2 = build_n2(2);
    CHECK(validate(n2).empty());
    std::set<std::string> t25_tails;
    for (auto& e : n2.in_edges("t25")) t25_tails.insert(n2.edge(e).tail);
    CHECK(t25_tails == std::set<std::string>{"v1", "v2", "v3", "v4", "v5", "a", "n1"});
    std::set<std::string> t7_tails;
    for (auto& e : n2.in_edges("t7")) t7_tails.insert(n2.edge(e).tail);
    CHECK(t7_tails.count("w") == 1);
    CHECK(n2.demand("r5") == std::vector<std::string>{"a"});
    CHECK(source_support(n2, "e1") == std::set<std::string>{"a", "x"});
    CHECK(n2.sources().size() == 12);
    CHECK(n2.terminals().size() == 32);
}
