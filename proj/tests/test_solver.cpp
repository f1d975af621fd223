#include "doctest.h"
#include "vlnc/polymatroid.hpp"
#include "vlnc/solver.hpp"
#include "vlnc/zoo.hpp"

using namespace vlnc;

namespace {

const Field& f2 = Field::get(2, 1);
const Field& f3 = Field::get(3, 1);
const Field& f5 = Field::get(5, 1);

SearchConfig cfg_for(const Field& f, int d) {
    SearchConfig cfg;
    cfg.field = &f;
    cfg.dim = d;
    return cfg;
}

// Naive oracle: enumerate every local coding matrix of every coding pair,
// including decode matrices, and ask verify_solution. Only usable on micro
// networks over GF(2) at d=1.
bool naive_solvable(const Network& net, const Field& f, int d) {
    struct Pair {
        int kind; // 0 src, 1 adj, 2 dec
        std::string a, b;
        int block = 0;
    };
    std::vector<Pair> pairs;
    for (auto& e : net.edges()) {
        if (net.node(e.tail).kind == NodeKind::Source)
            pairs.push_back({0, e.tail, e.id});
        else
            for (auto& in : net.in_edges(e.tail)) pairs.push_back({1, in, e.id});
    }
    for (auto& t : net.terminals())
        for (auto& e : net.in_edges(t))
            for (int b = 0; b < (int)net.demand(t).size(); ++b) pairs.push_back({2, e, t, b});

    const int q = f.size();
    const int digits_per = d * d;
    int64_t total = 1;
    for (size_t i = 0; i < pairs.size() * digits_per; ++i) {
        total *= q;
        REQUIRE(total <= (int64_t)1 << 24); // keep the oracle an oracle
    }
    std::vector<int> digit(pairs.size() * digits_per, 0);
    for (;;) {
        VlncCode code(f, d);
        for (size_t i = 0; i < pairs.size(); ++i) {
            Mat m(f, d, d);
            bool nz = false;
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) {
                    m.set(r, c, digit[i * digits_per + r * d + c]);
                    nz |= m.at(r, c) != 0;
                }
            if (!nz) continue;
            if (pairs[i].kind == 0)
                code.set_src(pairs[i].a, pairs[i].b, m);
            else if (pairs[i].kind == 1)
                code.set_adj(pairs[i].a, pairs[i].b, m);
            else
                code.set_dec(pairs[i].a, pairs[i].b, pairs[i].block, m);
        }
        bool pass = false;
        try {
            pass = verify_solution(net, code).pass;
        } catch (const Error&) {
            pass = false; // incomplete decode sets
        }
        if (pass) return true;
        size_t i = digit.size();
        while (i > 0 && digit[i - 1] == q - 1) digit[--i] = 0;
        if (i == 0) break;
        ++digit[i - 1];
    }
    return false;
}

Network micro_direct() {
    Network n;
    n.add_node("s", NodeKind::Source);
    n.add_node("t", NodeKind::Terminal);
    n.add_edge("e", "s", "t");
    n.set_demand("t", {"s"});
    return n;
}

Network micro_chain() {
    Network n;
    n.add_node("s", NodeKind::Source);
    n.add_node("v", NodeKind::Inner);
    n.add_node("t", NodeKind::Terminal);
    n.add_edge("e1", "s", "v");
    n.add_edge("e2", "v", "t");
    n.set_demand("t", {"s"});
    return n;
}

// Two sources squeezed through one scalar edge: unsolvable at d=1.
Network micro_bottleneck() {
    Network n;
    n.add_node("s1", NodeKind::Source);
    n.add_node("s2", NodeKind::Source);
    n.add_node("v", NodeKind::Inner);
    n.add_node("t", NodeKind::Terminal);
    n.add_edge("e1", "s1", "v");
    n.add_edge("e2", "s2", "v");
    n.add_edge("e3", "v", "t");
    n.set_demand("t", {"s1", "s2"});
    return n;
}

Network micro_unreachable() {
    Network n;
    n.add_node("s1", NodeKind::Source);
    n.add_node("s2", NodeKind::Source);
    n.add_node("t", NodeKind::Terminal);
    n.add_edge("e", "s1", "t");
    n.set_demand("t", {"s2"});
    return n;
}

} // namespace

namespace {

// Two chained inner layers force the on-the-fly slot path (the second slot's
// in-blocks depend on the first slot's choice).
Network micro_two_layer(bool second_demand) {
    Network n;
    n.add_node("s1", NodeKind::Source);
    n.add_node("s2", NodeKind::Source);
    n.add_node("v1", NodeKind::Inner);
    n.add_node("v2", NodeKind::Inner);
    n.add_node("t", NodeKind::Terminal);
    n.add_edge("e1", "s1", "v1");
    n.add_edge("e2", "s2", "v1");
    n.add_edge("mid", "v1", "v2");
    n.add_edge("out", "v2", "t");
    n.set_demand("t", second_demand ? std::vector<std::string>{"s1", "s2"}
                                    : std::vector<std::string>{"s1"});
    return n;
}

} // namespace

TEST_CASE("chained inner layers search correctly") {
    // One demand fits through the scalar relay chain; two cannot.
    auto good = micro_two_layer(false);
    auto out = solve(good, cfg_for(f2, 1));
    REQUIRE(out.status == SolveStatus::Solvable);
    CHECK(verify_solution(good, *out.witness).pass);
    CHECK(naive_solvable(good, f2, 1));

    auto bad = micro_two_layer(true);
    CHECK(solve(bad, cfg_for(f2, 1)).status == SolveStatus::Unsolvable);
    CHECK(!naive_solvable(bad, f2, 1));
    // The relay chain carries d symbols against 2d demanded ones, so raising
    // the dimension cannot help.
    CHECK(solve(bad, cfg_for(f2, 2)).status == SolveStatus::Unsolvable);
}

TEST_CASE("census respects pins") {
    Network cq = build_char_qs(2);
    // Restrict to solutions that mix the dummy source onto e1, then ask
    // whether they all keep it off: every survivor is a counterexample.
    SearchConfig cfg = cfg_for(f2, 1);
    cfg.pins.push_back({"s", "e1", PinConstraint::Kind::NonZero, std::nullopt});
    auto res = census(cq, cfg, CensusPredicate::global_zero("s", "e1"));
    CHECK(res.completed);
    CHECK(!res.all_satisfy);
    REQUIRE(res.counterexample.has_value());
    CHECK(verify_solution(cq, *res.counterexample).pass);

    // The same restriction over GF(3) admits no solutions at all.
    SearchConfig cfg3 = cfg_for(f3, 1);
    cfg3.pins.push_back({"s", "e1", PinConstraint::Kind::NonZero, std::nullopt});
    auto res3 = census(cq, cfg3, CensusPredicate::global_zero("s", "e1"));
    CHECK(res3.completed);
    CHECK(res3.vacuous);
    CHECK(res3.all_satisfy);
}

TEST_CASE("solve agrees with the naive oracle on micro networks") {
    for (auto make : {micro_direct, micro_chain, micro_bottleneck, micro_unreachable}) {
        Network net = make();
        bool oracle = naive_solvable(net, f2, 1);
        auto out = solve(net, cfg_for(f2, 1));
        CHECK(out.status != SolveStatus::Inconclusive);
        CHECK((out.status == SolveStatus::Solvable) == oracle);
        if (out.witness) CHECK(verify_solution(net, *out.witness).pass);
    }
}

TEST_CASE("single direct edge is solvable with an identity witness") {
    auto out = solve(micro_direct(), cfg_for(f2, 1));
    REQUIRE(out.status == SolveStatus::Solvable);
    auto g = evaluate_global(micro_direct(), *out.witness);
    CHECK(g.coeff("e", "s") == Mat::identity(f2, 1));
}

TEST_CASE("m2 has no scalar solution but a d=2 solution over GF(2)") {
    Network m2 = build_m2();
    auto s1 = solve(m2, cfg_for(f2, 1));
    CHECK(s1.status == SolveStatus::Unsolvable);
    auto s1b = solve(m2, cfg_for(f3, 1));
    CHECK(s1b.status == SolveStatus::Unsolvable);

    auto s2 = solve(m2, cfg_for(f2, 2));
    REQUIRE(s2.status == SolveStatus::Solvable);
    CHECK(verify_solution(m2, *s2.witness).pass);
}

TEST_CASE("char-qs is solvable over every small field") {
    Network cq = build_char_qs(2);
    for (const Field* f : {&f2, &f3, &f5}) {
        auto out = solve(cq, cfg_for(*f, 1));
        REQUIRE(out.status == SolveStatus::Solvable);
        CHECK(verify_solution(cq, *out.witness).pass);
    }
}

TEST_CASE("pinning the dummy source onto e1 forces the dividing characteristic") {
    Network cq = build_char_qs(2);
    SearchConfig cfg = cfg_for(f2, 1);
    cfg.pins.push_back({"s", "e1", PinConstraint::Kind::NonZero, std::nullopt});
    auto out = solve(cq, cfg);
    REQUIRE(out.status == SolveStatus::Solvable);
    auto g = evaluate_global(cq, *out.witness);
    CHECK(!g.coeff("e1", "s").is_zero());

    SearchConfig cfg3 = cfg_for(f3, 1);
    cfg3.pins.push_back({"s", "e1", PinConstraint::Kind::NonZero, std::nullopt});
    CHECK(solve(cq, cfg3).status == SolveStatus::Unsolvable);
}

TEST_CASE("fixed-matrix pins are honored") {
    Network cq = build_char_qs(2);
    SearchConfig cfg = cfg_for(f3, 1);
    Mat two(f3, 1, 1);
    two.set(0, 0, 2);
    cfg.pins.push_back({"x1", "e1", PinConstraint::Kind::Fixed, two});
    auto out = solve(cq, cfg);
    REQUIRE(out.status == SolveStatus::Solvable);
    CHECK(evaluate_global(cq, *out.witness).coeff("e1", "x1") == two);
}

TEST_CASE("pins on source-adjacent edges are rejected") {
    Network cq = build_char_qs(2);
    SearchConfig cfg = cfg_for(f2, 1);
    cfg.pins.push_back({"s", "s->m1", PinConstraint::Kind::Zero, std::nullopt});
    CHECK_THROWS_AS(solve(cq, cfg), Error);
    SearchConfig cfg2 = cfg_for(f2, 1);
    cfg2.pins.push_back({"s", "ghost", PinConstraint::Kind::Zero, std::nullopt});
    CHECK_THROWS_AS(solve(cq, cfg2), Error);
}

TEST_CASE("normalization flag does not change solvability status") {
    for (auto [net, f] : {std::pair{build_m2(), &f2}, {build_m2(), &f3},
                          {build_char_qs(2), &f2}, {build_char_qs(2), &f3}}) {
        SearchConfig plain = cfg_for(*f, 1);
        SearchConfig norm = cfg_for(*f, 1);
        norm.normalize = true;
        CHECK(solve(net, plain).status == solve(net, norm).status);
    }
}

TEST_CASE("lexicographic and heuristic orders agree on status") {
    for (auto [name, f] : {std::pair{"m2", &f2}, {"char-qs:2", &f3}, {"char-m:2", &f3}}) {
        Network net = zoo_network(name);
        SearchConfig a = cfg_for(*f, 1);
        SearchConfig b = cfg_for(*f, 1);
        b.lexicographic_order = true;
        CHECK(solve(net, a).status == solve(net, b).status);
    }
}

TEST_CASE("solve is deterministic") {
    Network cq = build_char_qs(2);
    auto a = solve(cq, cfg_for(f3, 1));
    auto b = solve(cq, cfg_for(f3, 1));
    REQUIRE(a.witness.has_value());
    CHECK(serialize_code(*a.witness) == serialize_code(*b.witness));
    CHECK(a.stats.assignments == b.stats.assignments);
    CHECK(a.stats.prunes == b.stats.prunes);
}

TEST_CASE("parallel search returns the same witness and status") {
    Network cq = build_char_qs(2);
    SearchConfig seq = cfg_for(f3, 1);
    SearchConfig par = cfg_for(f3, 1);
    par.jobs = 4;
    auto a = solve(cq, seq);
    auto b = solve(cq, par);
    CHECK(a.status == b.status);
    REQUIRE(b.witness.has_value());
    CHECK(serialize_code(*a.witness) == serialize_code(*b.witness));

    Network m2 = build_m2();
    SearchConfig p2 = cfg_for(f3, 1);
    p2.jobs = 3;
    CHECK(solve(m2, p2).status == SolveStatus::Unsolvable);
}

TEST_CASE("witnesses pass verification and the polymatroid conditions") {
    // Solver soundness: check a solvable instance end to end.
    Network cm = build_char_m(2);
    auto out = solve(cm, cfg_for(f2, 1));
    REQUIRE(out.status == SolveStatus::Solvable);
    CHECK(verify_solution(cm, *out.witness).pass);
    auto ind = induce_from_code(cm, *out.witness);
    CHECK(check_dp_map(cm, 1, ind.rank, ind.map).ok);
}

TEST_CASE("char-m probe matches the divisibility rule") {
    Network cm = build_char_m(2);
    SearchConfig base;
    auto res = probe_characteristics(cm, 1, {&f2, &f3, &f5}, base);
    CHECK(res["2"].status == SolveStatus::Solvable);
    CHECK(res["3"].status == SolveStatus::Unsolvable);
    CHECK(res["5"].status == SolveStatus::Unsolvable);

    Network cm3 = build_char_m(3);
    auto res3 = probe_characteristics(cm3, 1, {&f2, &f3}, base);
    CHECK(res3["2"].status == SolveStatus::Unsolvable);
    CHECK(res3["3"].status == SolveStatus::Solvable);
}

TEST_CASE("probe on a disjoint union intersects the parts") {
    Network u = union_nets(rename_prefixed(build_m2(), "A:"),
                           rename_prefixed(build_char_qs(2), "B:"));
    SearchConfig base;
    auto res = probe_characteristics(u, 1, {&f2, &f3}, base);
    CHECK(res["2"].status == SolveStatus::Unsolvable);
    CHECK(res["3"].status == SolveStatus::Unsolvable);
}

TEST_CASE("census finds the scalar dichotomy on char-qs") {
    Network cq = build_char_qs(2);
    auto pred = CensusPredicate::global_zero("s", "e1");

    SearchConfig c3 = cfg_for(f3, 1);
    auto r3 = census(cq, c3, pred);
    CHECK(r3.completed);
    CHECK(r3.all_satisfy);
    CHECK(!r3.vacuous);
    CHECK(r3.solutions > 0);

    SearchConfig c2 = cfg_for(f2, 1);
    auto r2 = census(cq, c2, pred);
    CHECK(r2.completed);
    CHECK(!r2.all_satisfy);
    REQUIRE(r2.counterexample.has_value());
    CHECK(verify_solution(cq, *r2.counterexample).pass);
    CHECK(!evaluate_global(cq, *r2.counterexample).coeff("e1", "s").is_zero());
}

TEST_CASE("census over an unsolvable instance is vacuous") {
    Network m2 = build_m2();
    CensusPredicate pred;
    pred.kind = CensusPredicate::Kind::Custom;
    pred.fn = [](const VlncCode&, const GlobalCoding&) { return true; };
    SearchConfig scfg = cfg_for(f2, 1);
    auto res = census(m2, scfg, pred);
    CHECK(res.completed);
    CHECK(res.all_satisfy);
    CHECK(res.vacuous);
    CHECK(res.solutions == 0);
}

TEST_CASE("census with a constantly-true predicate confirms every solution") {
    Network cq = build_char_qs(2);
    CensusPredicate pred;
    pred.kind = CensusPredicate::Kind::Custom;
    pred.fn = [](const VlncCode&, const GlobalCoding&) { return true; };
    SearchConfig cfg = cfg_for(f2, 1);
    auto res = census(cq, cfg, pred);
    CHECK(res.completed);
    CHECK(res.all_satisfy);
    CHECK(!res.vacuous);
}

TEST_CASE("custom census predicates see materialized codes") {
    Network cq = build_char_qs(2);
    SearchConfig cfg = cfg_for(f2, 1);
    CensusPredicate pred;
    pred.kind = CensusPredicate::Kind::Custom;
    pred.fn = [&](const VlncCode&, const GlobalCoding& g) {
        // Equivalent formulation of the zero predicate through the globals.
        return g.coeff("e1", "s").is_zero();
    };
    auto res = census(cq, cfg, pred);
    CHECK(res.completed);
    CHECK(!res.all_satisfy);
    REQUIRE(res.counterexample.has_value());
    CHECK(verify_solution(cq, *res.counterexample).pass);
}

TEST_CASE("user limits make oversized searches inconclusive") {
    // n1 at d=1 over GF(3) has an interior space near 3^24; no witness exists,
    // so a bounded run must stop at the assignment budget.
    Network n1 = build_n1(2);
    SearchConfig cfg = cfg_for(f3, 1);
    cfg.max_assignments = 200000;
    auto out = solve(n1, cfg);
    CHECK(out.status == SolveStatus::Inconclusive);
    CHECK(out.stats.raw_space > 1e11);
}

TEST_CASE("the work ceiling raises SpaceTooLarge") {
    Network n1 = build_n1(2);
    SearchConfig tiny = cfg_for(f3, 1);
    tiny.space_ceiling = 100; // below even a single node's local space
    bool threw = false;
    try {
        solve(n1, tiny);
    } catch (const Error& e) {
        threw = e.kind() == ErrorKind::SpaceTooLarge;
    }
    CHECK(threw);
}

TEST_CASE("n1 is scalar-solvable over GF(2) (within the guard)") {
    Network n1 = build_n1(2);
    auto out = solve(n1, cfg_for(f2, 1));
    REQUIRE(out.status == SolveStatus::Solvable);
    CHECK(verify_solution(n1, *out.witness).pass);
}

TEST_CASE("time and assignment budgets yield Inconclusive") {
    Network m2 = build_m2();
    SearchConfig cfg = cfg_for(f3, 1);
    cfg.max_assignments = 3;
    auto out = solve(m2, cfg);
    CHECK(out.status == SolveStatus::Inconclusive);
}

TEST_CASE("probe records per-field errors without failing") {
    Network n1 = build_n1(2);
    SearchConfig base;
    base.space_ceiling = 1000; // forces SpaceTooLarge per field
    auto res = probe_characteristics(n1, 1, {&f3}, base);
    CHECK(res["3"].status == SolveStatus::Inconclusive);
    CHECK(!res["3"].error.empty());
}

TEST_CASE("derived n2 d=2 code verifies over GF(2)") {
    const Field& f = f2;
    auto code = code_n2_dim2(2, f);
    Network n2 = build_n2(2);
    CHECK(verify_solution(n2, code).pass);
    // Cached second call is instant and identical.
    auto again = code_n2_dim2(2, f);
    CHECK(serialize_code(again) == serialize_code(code));
    CHECK_THROWS_AS(code_n2_dim2(2, f3), Error);
}

TEST_CASE("extend_terminal completes a partial code") {
    Network cq = build_char_qs(2);
    VlncCode partial(f3, 1);
    // Interior: the additive code without any terminal parts.
    Mat I = Mat::identity(f3, 1);
    partial.set_src("x1", "x1->m1", I);
    partial.set_adj("x1->m1", "e1", I);
    for (int j = 2; j <= 5; ++j)
        for (int i = 2; i <= 4; ++i) {
            if (i == j) continue;
            partial.set_src("x" + std::to_string(i), "x" + std::to_string(i) + "->m" + std::to_string(j), I);
            partial.set_adj("x" + std::to_string(i) + "->m" + std::to_string(j), "e" + std::to_string(j), I);
        }
    auto g = evaluate_global(cq, partial);
    for (auto& t : cq.terminals()) {
        auto ext = extend_terminal(cq, g, t);
        REQUIRE_MESSAGE(ext.has_value(), t);
        for (auto& [k, m] : ext->adj) partial.set_adj(k.first, k.second, m);
        for (auto& [e, m] : ext->src) partial.set_src(cq.edge(e).tail, e, m);
        for (auto& [k, m] : ext->dec) partial.set_dec(k.first, t, k.second, m);
    }
    CHECK(verify_solution(cq, partial).pass);
}
