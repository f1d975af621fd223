#include "vlnc/zoo.hpp"

#include <map>
#include <mutex>

#include "vlnc/solver.hpp"

namespace vlnc {

namespace {

std::string num(int i) { return std::to_string(i); }

std::string arrow(const std::string& a, const std::string& b) { return a + "->" + b; }

void add_edge_auto(Network& n, const std::string& tail, const std::string& head) {
    n.add_edge(arrow(tail, head), tail, head);
}

} // namespace

Network build_m2() {
    Network n("m2");
    for (auto s : {"a", "b", "x", "y"}) n.add_node(s, NodeKind::Source);
    for (auto v : {"u1", "u2", "v1", "v2", "v3"}) n.add_node(v, NodeKind::Inner);
    for (int i = 1; i <= 4; ++i) n.add_node("t" + num(i), NodeKind::Terminal);

    add_edge_auto(n, "a", "u1");
    add_edge_auto(n, "b", "u1");
    add_edge_auto(n, "x", "u2");
    add_edge_auto(n, "y", "u2");
    n.add_edge("e11", "u1", "v1");
    n.add_edge("e13", "u1", "v3");
    n.add_edge("e22", "u2", "v2");
    n.add_edge("e23", "u2", "v3");
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 4; ++j) add_edge_auto(n, "v" + num(i), "t" + num(j));

    // One terminal per admissible pair: one of {a,b} with one of {x,y}.
    n.set_demand("t1", {"a", "x"});
    n.set_demand("t2", {"a", "y"});
    n.set_demand("t3", {"b", "x"});
    n.set_demand("t4", {"b", "y"});
    return n;
}

namespace {
const char* kM3Group1[3] = {"a", "b", "c"};
const char* kM3Group2[3] = {"r", "s", "w"};
const char* kM3Group3[3] = {"x", "y", "z"};
} // namespace

Network build_m3() {
    Network n("m3");
    for (auto s : kM3Group1) n.add_node(s, NodeKind::Source);
    for (auto s : kM3Group2) n.add_node(s, NodeKind::Source);
    for (auto s : kM3Group3) n.add_node(s, NodeKind::Source);
    for (int i = 1; i <= 3; ++i) n.add_node("u" + num(i), NodeKind::Inner);
    for (int i = 1; i <= 5; ++i) n.add_node("v" + num(i), NodeKind::Inner);
    for (int i = 1; i <= 27; ++i) n.add_node("t" + num(i), NodeKind::Terminal);

    for (auto s : kM3Group1) add_edge_auto(n, s, "u1");
    for (auto s : kM3Group2) add_edge_auto(n, s, "u2");
    for (auto s : kM3Group3) add_edge_auto(n, s, "u3");
    for (int i = 1; i <= 3; ++i) {
        n.add_edge("e" + num(i) + num(i), "u" + num(i), "v" + num(i));
        n.add_edge("e" + num(i) + "4", "u" + num(i), "v4");
        n.add_edge("e" + num(i) + "5", "u" + num(i), "v5");
    }
    for (int i = 1; i <= 5; ++i)
        for (int j = 1; j <= 27; ++j) add_edge_auto(n, "v" + num(i), "t" + num(j));

    // One terminal per triple, enumerated lexicographically.
    int t = 1;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                n.set_demand("t" + num(t++), {kM3Group1[i], kM3Group2[j], kM3Group3[k]});
    return n;
}

Network build_char_m(int m) {
    if (m < 2) raise(ErrorKind::InvalidArg, "char-m needs m >= 2");
    Network n("char-m:" + num(m));
    for (int i = 1; i <= m + 2; ++i) n.add_node("x" + num(i), NodeKind::Source);
    for (int i = 1; i <= m + 3; ++i) n.add_node("u" + num(i), NodeKind::Inner);
    for (int i = 1; i <= m + 3; ++i) n.add_node("v" + num(i), NodeKind::Inner);
    for (int i = 1; i <= m + 3; ++i) n.add_node("r" + num(i), NodeKind::Terminal);

    for (int i = 1; i <= m + 2; ++i)
        for (int j = 1; j <= m + 3; ++j)
            if (i != j) add_edge_auto(n, "x" + num(i), "u" + num(j));
    for (int i = 1; i <= m + 3; ++i) n.add_edge("e" + num(i), "u" + num(i), "v" + num(i));
    for (int i = 1; i <= m + 2; ++i) add_edge_auto(n, "v" + num(i), "r" + num(i));
    for (int i = 1; i <= m + 2; ++i) add_edge_auto(n, "v" + num(m + 3), "r" + num(i));
    for (int i = 2; i <= m + 2; ++i) add_edge_auto(n, "v" + num(i), "r" + num(m + 3));

    for (int i = 1; i <= m + 2; ++i) n.set_demand("r" + num(i), {"x" + num(i)});
    n.set_demand("r" + num(m + 3), {"x1"});
    return n;
}

namespace {

// Shared topology of the char-q-s gadget: sources x1role (the demanded source
// x1) and srole (the undemanded mixer s) may be nodes of an ambient network.
// Adds m/n relays, r terminals, and all gadget edges.
void add_char_qs_part(Network& n, int q, const std::string& x1, const std::string& s,
                      bool add_sources) {
    if (q < 2) raise(ErrorKind::InvalidArg, "char-q-s needs q >= 2");
    if (add_sources) {
        n.add_node(s, NodeKind::Source);
        n.add_node(x1, NodeKind::Source);
    }
    for (int i = 2; i <= q + 2; ++i) n.add_node("x" + num(i), NodeKind::Source);
    for (int i = 1; i <= q + 3; ++i) n.add_node("m" + num(i), NodeKind::Inner);
    for (int i = 1; i <= q + 3; ++i) n.add_node("n" + num(i), NodeKind::Inner);
    for (int i = 1; i <= q + 3; ++i) n.add_node("r" + num(i), NodeKind::Terminal);

    for (int i = 1; i <= q + 1; ++i) add_edge_auto(n, x1, "m" + num(i));
    add_edge_auto(n, s, "m1");
    for (int i = 4; i <= q + 3; ++i) add_edge_auto(n, s, "m" + num(i));
    for (int i = 2; i <= q + 2; ++i)
        for (int j = 2; j <= q + 2; ++j)
            if (i != j) add_edge_auto(n, "x" + num(i), "m" + num(j));
    add_edge_auto(n, x1, "m" + num(q + 3));
    for (int i = 2; i <= q + 2; ++i) add_edge_auto(n, "x" + num(i), "m" + num(q + 3));
    for (int i = 1; i <= q + 3; ++i) n.add_edge("e" + num(i), "m" + num(i), "n" + num(i));
    for (int i = 1; i <= q + 2; ++i) add_edge_auto(n, "n" + num(i), "r" + num(i));
    for (int i = 1; i <= q + 2; ++i) add_edge_auto(n, "n" + num(q + 3), "r" + num(i));
    for (int i = 1; i <= q + 2; ++i) add_edge_auto(n, "n" + num(i), "r" + num(q + 3));
    for (int i = 2; i <= q + 1; ++i) add_edge_auto(n, "x" + num(i), "r1");
    add_edge_auto(n, x1, "r" + num(q + 2));
    add_edge_auto(n, s, "r2");
    add_edge_auto(n, s, "r3");

    n.set_demand("r1", {"x" + num(q + 2)});
    for (int i = 2; i <= q + 2; ++i) n.set_demand("r" + num(i), {"x" + num(i)});
    n.set_demand("r" + num(q + 3), {x1});
}

} // namespace

Network build_char_qs(int q) {
    Network n("char-qs:" + num(q));
    add_char_qs_part(n, q, "x1", "s", /*add_sources=*/true);
    return n;
}

Network build_n1(int q) {
    if (q < 2) raise(ErrorKind::InvalidArg, "n1 needs q >= 2");
    Network n("n1:" + num(q));
    for (auto s : {"a", "b", "x", "y"}) n.add_node(s, NodeKind::Source);
    for (auto v : {"u1", "u2", "v1", "v2", "v3"}) n.add_node(v, NodeKind::Inner);
    for (int i = 1; i <= 4; ++i) n.add_node("t" + num(i), NodeKind::Terminal);
    add_edge_auto(n, "a", "u1");
    add_edge_auto(n, "b", "u1");
    add_edge_auto(n, "x", "u2");
    add_edge_auto(n, "y", "u2");
    n.add_edge("e11", "u1", "v1");
    n.add_edge("e13", "u1", "v3");
    n.add_edge("e22", "u2", "v2");
    n.add_edge("e23", "u2", "v3");
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 4; ++j) add_edge_auto(n, "v" + num(i), "t" + num(j));
    n.set_demand("t1", {"a", "x"});
    n.set_demand("t2", {"a", "y"});
    n.set_demand("t3", {"b", "x"});
    n.set_demand("t4", {"b", "y"});

    // char-q-y part on shared sources: a plays x1, y plays s.
    add_char_qs_part(n, q, "a", "y", /*add_sources=*/false);
    n.set_demand("r" + num(q + 3), {"a"});

    add_edge_auto(n, "n1", "t4");
    return n;
}

Network build_n2(int qp) {
    if (qp < 2) raise(ErrorKind::InvalidArg, "n2 needs q' >= 2");
    Network n = build_m3();
    n.set_name("n2:" + num(qp));

    // char-q'-x part on shared sources: a plays x1, x plays s.
    add_char_qs_part(n, qp, "a", "x", /*add_sources=*/false);
    n.set_demand("r" + num(qp + 3), {"a"});

    // Direct helper edges for the m3-part terminals.
    for (int j : {7, 8, 9, 16, 17, 18}) add_edge_auto(n, "w", "t" + num(j));
    for (int j : {19, 20, 21, 22, 23, 24}) add_edge_auto(n, "c", "t" + num(j));
    add_edge_auto(n, "a", "t25");
    add_edge_auto(n, "y", "t26");
    add_edge_auto(n, "n1", "t25");
    return n;
}

// ---------------------------------------------------------------------------
// Codes

namespace {

// Additive char-q-s code on a network containing the gadget, with x1role /
// srole naming the two special sources. e1 carries x1role; e_j (j >= 2)
// carries the sum of x_i over 2 <= i <= q+2, i != j.
void apply_char_additive(VlncCode& code, int q, const std::string& x1, const std::string& s) {
    (void)s;
    const Domain& dom = code.dom();
    const int d = code.dim();
    Mat I = Mat::identity(dom, d);
    Mat nI = mat_neg(I);

    code.set_src(x1, arrow(x1, "m1"), I);
    code.set_adj(arrow(x1, "m1"), "e1", I);
    for (int j = 2; j <= q + 3; ++j) {
        for (int i = 2; i <= q + 2; ++i) {
            if (i == j) continue;
            std::string in = arrow("x" + num(i), "m" + num(j));
            code.set_src("x" + num(i), in, I);
            code.set_adj(in, "e" + num(j), I);
        }
    }

    // r1: x_{q+2} = e_{q+3} - sum of direct x_i, 2 <= i <= q+1.
    code.set_adj("e" + num(q + 3), arrow("n" + num(q + 3), "r1"), I);
    code.set_dec(arrow("n" + num(q + 3), "r1"), "r1", 0, I);
    for (int i = 2; i <= q + 1; ++i) {
        code.set_src("x" + num(i), arrow("x" + num(i), "r1"), I);
        code.set_dec(arrow("x" + num(i), "r1"), "r1", 0, nI);
    }
    // r_i: x_i = e_{q+3} - e_i.
    for (int i = 2; i <= q + 2; ++i) {
        code.set_adj("e" + num(q + 3), arrow("n" + num(q + 3), "r" + num(i)), I);
        code.set_adj("e" + num(i), arrow("n" + num(i), "r" + num(i)), I);
        code.set_dec(arrow("n" + num(q + 3), "r" + num(i)), "r" + num(i), 0, I);
        code.set_dec(arrow("n" + num(i), "r" + num(i)), "r" + num(i), 0, nI);
    }
    // r_{q+3}: x1 from e1.
    code.set_adj("e1", arrow("n1", "r" + num(q + 3)), I);
    code.set_dec(arrow("n1", "r" + num(q + 3)), "r" + num(q + 3), 0, I);
}

// Characteristic-gated char-q-s code: e1 = x1 + s, e_j as below, the last
// terminal decodes x1 via the sum of e_1..e_{q+2}.
void apply_char_charp(VlncCode& code, int q, const std::string& x1, const std::string& s) {
    const Domain& dom = code.dom();
    const int d = code.dim();
    Mat I = Mat::identity(dom, d);
    Mat nI = mat_neg(I);

    auto feed = [&](const std::string& src, int j) {
        std::string in = arrow(src, "m" + num(j));
        code.set_src(src, in, I);
        code.set_adj(in, "e" + num(j), I);
    };

    // e1 = x1 + s
    feed(x1, 1);
    feed(s, 1);
    // e2 = x1 + x3 + ... + x_{q+2}
    feed(x1, 2);
    for (int i = 3; i <= q + 2; ++i) feed("x" + num(i), 2);
    // e3 = x1 + x2 + x4 + ... + x_{q+2}
    feed(x1, 3);
    feed("x2", 3);
    for (int i = 4; i <= q + 2; ++i) feed("x" + num(i), 3);
    // e_j = s + sum_{i != j} x_i for 4 <= j <= q+1 (x1 included)
    for (int j = 4; j <= q + 1; ++j) {
        feed(s, j);
        feed(x1, j);
        for (int i = 2; i <= q + 2; ++i)
            if (i != j) feed("x" + num(i), j);
    }
    // e_{q+2} = s + x2 + ... + x_{q+1}
    feed(s, q + 2);
    for (int i = 2; i <= q + 1; ++i) feed("x" + num(i), q + 2);
    // e_{q+3} = s + x1 + ... + x_{q+2}
    feed(s, q + 3);
    feed(x1, q + 3);
    for (int i = 2; i <= q + 2; ++i) feed("x" + num(i), q + 3);

    auto relay = [&](int i, const std::string& r) {
        code.set_adj("e" + num(i), arrow("n" + num(i), r), I);
    };

    // r1: x_{q+2} = e_{q+3} - e_1 - x2 - ... - x_{q+1}.
    relay(q + 3, "r1");
    relay(1, "r1");
    code.set_dec(arrow("n" + num(q + 3), "r1"), "r1", 0, I);
    code.set_dec(arrow("n1", "r1"), "r1", 0, nI);
    for (int i = 2; i <= q + 1; ++i) {
        code.set_src("x" + num(i), arrow("x" + num(i), "r1"), I);
        code.set_dec(arrow("x" + num(i), "r1"), "r1", 0, nI);
    }
    // r2: x2 = e_{q+3} - e_2 - s (s via direct edge).
    relay(q + 3, "r2");
    relay(2, "r2");
    code.set_src(s, arrow(s, "r2"), I);
    code.set_dec(arrow("n" + num(q + 3), "r2"), "r2", 0, I);
    code.set_dec(arrow("n2", "r2"), "r2", 0, nI);
    code.set_dec(arrow(s, "r2"), "r2", 0, nI);
    // r3: x3 = e_{q+3} - e_3 - s.
    relay(q + 3, "r3");
    relay(3, "r3");
    code.set_src(s, arrow(s, "r3"), I);
    code.set_dec(arrow("n" + num(q + 3), "r3"), "r3", 0, I);
    code.set_dec(arrow("n3", "r3"), "r3", 0, nI);
    code.set_dec(arrow(s, "r3"), "r3", 0, nI);
    // r_j: x_j = e_{q+3} - e_j for 4 <= j <= q+1.
    for (int j = 4; j <= q + 1; ++j) {
        relay(q + 3, "r" + num(j));
        relay(j, "r" + num(j));
        code.set_dec(arrow("n" + num(q + 3), "r" + num(j)), "r" + num(j), 0, I);
        code.set_dec(arrow("n" + num(j), "r" + num(j)), "r" + num(j), 0, nI);
    }
    // r_{q+2}: x_{q+2} = e_{q+3} - e_{q+2} - x1 (x1 via direct edge).
    relay(q + 3, "r" + num(q + 2));
    relay(q + 2, "r" + num(q + 2));
    code.set_src(x1, arrow(x1, "r" + num(q + 2)), I);
    code.set_dec(arrow("n" + num(q + 3), "r" + num(q + 2)), "r" + num(q + 2), 0, I);
    code.set_dec(arrow("n" + num(q + 2), "r" + num(q + 2)), "r" + num(q + 2), 0, nI);
    code.set_dec(arrow(x1, "r" + num(q + 2)), "r" + num(q + 2), 0, nI);
    // r_{q+3}: x1 = e_1 + e_2 + ... + e_{q+2}; needs char | q.
    for (int i = 1; i <= q + 2; ++i) {
        relay(i, "r" + num(q + 3));
        code.set_dec(arrow("n" + num(i), "r" + num(q + 3)), "r" + num(q + 3), 0, I);
    }
}

// m2-part d=2 split: e11 = [a1 b1], e13 = [a2 b2], e22 = [x1 y1],
// e23 = [x2 y2]; each v3->t edge forwards the right pair of second halves.
void apply_m2_dim2(VlncCode& code) {
    const Domain& dom = code.dom();
    Mat I = Mat::identity(dom, 2);
    Mat top1 = Mat::unit(dom, 2, 0, 0); // first comp -> row 1
    Mat top2 = Mat::unit(dom, 2, 0, 1); // second comp -> row 1
    Mat bot1 = Mat::unit(dom, 2, 1, 0); // first comp -> row 2
    Mat bot2 = Mat::unit(dom, 2, 1, 1); // second comp -> row 2

    code.set_src("a", arrow("a", "u1"), I);
    code.set_src("b", arrow("b", "u1"), I);
    code.set_src("x", arrow("x", "u2"), I);
    code.set_src("y", arrow("y", "u2"), I);
    code.set_adj(arrow("a", "u1"), "e11", top1);
    code.set_adj(arrow("b", "u1"), "e11", bot1);
    code.set_adj(arrow("a", "u1"), "e13", top2);
    code.set_adj(arrow("b", "u1"), "e13", bot2);
    code.set_adj(arrow("x", "u2"), "e22", top1);
    code.set_adj(arrow("y", "u2"), "e22", bot1);
    code.set_adj(arrow("x", "u2"), "e23", top2);
    code.set_adj(arrow("y", "u2"), "e23", bot2);

    // Demands: t1 (a,x), t2 (a,y), t3 (b,x), t4 (b,y). First components travel
    // on v1/v2, second components in the per-terminal v3 mix.
    for (auto [t, ab_a, xy_x] : {std::tuple{"t1", true, true}, std::tuple{"t2", true, false},
                                 std::tuple{"t3", false, true}, std::tuple{"t4", false, false}}) {
        std::string v1e = arrow("v1", t), v2e = arrow("v2", t), v3e = arrow("v3", t);
        code.set_adj("e11", v1e, I);
        code.set_adj("e22", v2e, I);
        // v3 forwards [ab2, xy2]: row 1 from e13, row 2 from e23.
        code.set_adj("e13", v3e, ab_a ? top1 : top2);
        code.set_adj("e23", v3e, xy_x ? bot1 : bot2);
        // Block 0: the {a,b} source. Row 1 from v1 (component 1), row 2 from v3.
        code.set_dec(v1e, t, 0, ab_a ? top1 : top2);
        code.set_dec(v3e, t, 0, bot1);
        // Block 1: the {x,y} source.
        code.set_dec(v2e, t, 1, xy_x ? top1 : top2);
        code.set_dec(v3e, t, 1, bot2);
    }
}

} // namespace

VlncCode code_char_qs_additive(int q, const Domain& dom, int d) {
    if (q < 2) raise(ErrorKind::InvalidArg, "char-qs-additive needs q >= 2");
    VlncCode code(dom, d, "char-qs-additive:" + num(q));
    apply_char_additive(code, q, "x1", "s");
    return code;
}

VlncCode code_char_qs_charp(int q, const Field& f, int d) {
    if (q < 2) raise(ErrorKind::InvalidArg, "char-qs-charp needs q >= 2");
    VlncCode code(f, d, "char-qs-charp:" + num(q));
    apply_char_charp(code, q, "x1", "s");
    return code;
}

VlncCode code_m2_dim2(const Field& f) {
    VlncCode code(f, 2, "m2-dim2");
    apply_m2_dim2(code);
    return code;
}

VlncCode code_n1_dim2(int q, const Field& f) {
    if (q < 2) raise(ErrorKind::InvalidArg, "n1-dim2 needs q >= 2");
    VlncCode code(f, 2, "n1-dim2:" + num(q));
    apply_m2_dim2(code);
    apply_char_additive(code, q, "a", "y");
    return code;
}

VlncCode code_n1_scalar_charp(int q, const Field& f) {
    if (q < 2) raise(ErrorKind::InvalidArg, "n1-scalar-charp needs q >= 2");
    VlncCode code(f, 1, "n1-scalar-charp:" + num(q));
    Mat I = Mat::identity(f, 1);
    Mat nI = mat_neg(I);

    // m2 part: e11 = a, e13 = b, e22 = x, e23 = y.
    code.set_src("a", arrow("a", "u1"), I);
    code.set_src("b", arrow("b", "u1"), I);
    code.set_src("x", arrow("x", "u2"), I);
    code.set_src("y", arrow("y", "u2"), I);
    code.set_adj(arrow("a", "u1"), "e11", I);
    code.set_adj(arrow("b", "u1"), "e13", I);
    code.set_adj(arrow("x", "u2"), "e22", I);
    code.set_adj(arrow("y", "u2"), "e23", I);

    // t1 (a,x): a from v1, x from v2. t2 (a,y): y from v3. t3 (b,x): b from v3.
    code.set_adj("e11", arrow("v1", "t1"), I);
    code.set_adj("e22", arrow("v2", "t1"), I);
    code.set_dec(arrow("v1", "t1"), "t1", 0, I);
    code.set_dec(arrow("v2", "t1"), "t1", 1, I);

    code.set_adj("e11", arrow("v1", "t2"), I);
    code.set_adj("e23", arrow("v3", "t2"), I);
    code.set_dec(arrow("v1", "t2"), "t2", 0, I);
    code.set_dec(arrow("v3", "t2"), "t2", 1, I);

    code.set_adj("e13", arrow("v3", "t3"), I);
    code.set_adj("e22", arrow("v2", "t3"), I);
    code.set_dec(arrow("v3", "t3"), "t3", 0, I);
    code.set_dec(arrow("v2", "t3"), "t3", 1, I);

    // t4 (b,y): b from v3; y = (a+y) - a with a+y relayed from e1 via n1->t4
    // and a from v1.
    code.set_adj("e13", arrow("v3", "t4"), I);
    code.set_adj("e11", arrow("v1", "t4"), I);
    code.set_adj("e1", arrow("n1", "t4"), I);
    code.set_dec(arrow("v3", "t4"), "t4", 0, I);
    code.set_dec(arrow("n1", "t4"), "t4", 1, I);
    code.set_dec(arrow("v1", "t4"), "t4", 1, nI);

    apply_char_charp(code, q, "a", "y");
    return code;
}

VlncCode code_n2_dim3(int qp, const Field& f) {
    if (qp < 2) raise(ErrorKind::InvalidArg, "n2-dim3 needs q' >= 2");
    VlncCode code(f, 3, "n2-dim3:" + num(qp));
    Mat I = Mat::identity(f, 3);

    auto comp_to_row = [&](int comp, int row) { return Mat::unit(f, 3, row, comp); };

    const char* groups[3][3] = {{"a", "b", "c"}, {"r", "s", "w"}, {"x", "y", "z"}};
    for (int gi = 0; gi < 3; ++gi) {
        std::string u = "u" + num(gi + 1);
        for (int si = 0; si < 3; ++si) code.set_src(groups[gi][si], arrow(groups[gi][si], u), I);
        // e_{ (gi+1)(gi+1) } carries component 1 of the three group sources,
        // e_{ (gi+1)4 } component 2, e_{ (gi+1)5 } component 3.
        std::string mids[3] = {"e" + num(gi + 1) + num(gi + 1), "e" + num(gi + 1) + "4",
                               "e" + num(gi + 1) + "5"};
        for (int comp = 0; comp < 3; ++comp)
            for (int si = 0; si < 3; ++si)
                code.set_adj(arrow(groups[gi][si], u), mids[comp], comp_to_row(comp, si));
    }

    // Terminal t_k demands (g1[i], g2[j], g3[k]); component c of demand block b
    // comes from v_{b+1} (c=0) or v4 (c=1) or v5 (c=2), selecting the source's
    // row within the forwarded vector.
    int t = 1;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k, ++t) {
                std::string tid = "t" + num(t);
                int pick[3] = {i, j, k};
                for (int b = 0; b < 3; ++b) {
                    std::string vb = arrow("v" + num(b + 1), tid);
                    code.set_adj("e" + num(b + 1) + num(b + 1), vb, I);
                    code.set_dec(vb, tid, b, comp_to_row(pick[b], 0));
                }
                std::string v4 = arrow("v4", tid), v5 = arrow("v5", tid);
                // v4 forwards component 2 of all three demanded sources, one per row.
                for (int b = 0; b < 3; ++b) {
                    code.set_adj("e" + num(b + 1) + "4", v4, comp_to_row(pick[b], b));
                    code.set_adj("e" + num(b + 1) + "5", v5, comp_to_row(pick[b], b));
                    code.set_dec(v4, tid, b, Mat::unit(f, 3, 1, b));
                    code.set_dec(v5, tid, b, Mat::unit(f, 3, 2, b));
                }
            }

    apply_char_additive(code, qp, "a", "x");
    return code;
}

VlncCode code_n1_ring16(int q) {
    if (q < 2) raise(ErrorKind::InvalidArg, "n1-ring16 needs q >= 2");
    const MatrixRing& R = MatrixRing::get(2, 2);
    VlncCode code(R, 1, "n1-ring16:" + num(q));
    Mat I = Mat::identity(R, 1);
    auto unit = [&](const char* lit) { return mat_from_string(R, std::string("[[") + lit + "]]"); };
    Mat E11 = unit("[[1,0],[0,0]]");
    Mat E12 = unit("[[0,1],[0,0]]");
    Mat E21 = unit("[[0,0],[1,0]]");
    Mat E22 = unit("[[0,0],[0,1]]");

    code.set_src("a", arrow("a", "u1"), I);
    code.set_src("b", arrow("b", "u1"), I);
    code.set_src("x", arrow("x", "u2"), I);
    code.set_src("y", arrow("y", "u2"), I);
    // e11 = top(a) + bot(b) = [a_1; b_1] (rows of the ring elements),
    // e13 = [a_2; b_2], e22 = [x_1; y_1], e23 = [x_2; y_2].
    code.set_adj(arrow("a", "u1"), "e11", E11);
    code.set_adj(arrow("b", "u1"), "e11", E21);
    code.set_adj(arrow("a", "u1"), "e13", E12);
    code.set_adj(arrow("b", "u1"), "e13", E22);
    code.set_adj(arrow("x", "u2"), "e22", E11);
    code.set_adj(arrow("y", "u2"), "e22", E21);
    code.set_adj(arrow("x", "u2"), "e23", E12);
    code.set_adj(arrow("y", "u2"), "e23", E22);

    // v3 forwards per terminal the pair of second rows it needs; v1/v2 relay.
    // t1 (a,x): [a_2; x_2], t2 (a,y): [a_2; y_2], t3 (b,x): [b_2; x_2],
    // t4 (b,y): [b_2; y_2]. Row 1 of e13 holds a_2; row 2 holds b_2.
    for (auto [t, ab_a, xy_x] : {std::tuple{"t1", true, true}, std::tuple{"t2", true, false},
                                 std::tuple{"t3", false, true}, std::tuple{"t4", false, false}}) {
        std::string v1e = arrow("v1", t), v2e = arrow("v2", t), v3e = arrow("v3", t);
        code.set_adj("e11", v1e, I);
        code.set_adj("e22", v2e, I);
        code.set_adj("e13", v3e, ab_a ? E11 : E12);
        code.set_adj("e23", v3e, xy_x ? E21 : E22);
        // Decode block 0 ({a,b} source): row 1 from v1 (or row 2 for b), row 2
        // from v3's row 1.
        code.set_dec(v1e, t, 0, ab_a ? E11 : E12);
        code.set_dec(v3e, t, 0, E21);
        // Decode block 1 ({x,y} source): row 1 from v2, row 2 from v3's row 2.
        code.set_dec(v2e, t, 1, xy_x ? E11 : E12);
        code.set_dec(v3e, t, 1, E22);
    }

    apply_char_additive(code, q, "a", "y");
    return code;
}

VlncCode code_n2_dim2(int qp, const Field& f) {
    if (qp < 2) raise(ErrorKind::InvalidArg, "n2-dim2 needs q' >= 2");
    if (f.characteristic() == 0 || qp % f.characteristic() != 0)
        raise(ErrorKind::InvalidArg, "n2-dim2 needs the characteristic to divide q'");
    static std::mutex mu;
    static std::map<std::pair<int, std::string>, VlncCode> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find({qp, f.name()});
        if (it != cache.end()) return it->second;
    }
    VlncCode code = derive_n2_dim2(qp, f);
    std::lock_guard<std::mutex> lock(mu);
    cache.insert({{qp, f.name()}, code});
    return code;
}

// ---------------------------------------------------------------------------
// Registry

const std::vector<ZooEntry>& zoo_entries() {
    static const std::vector<ZooEntry> entries = {
        {"m2", true, "", {{2, 0, CharClaim::AllPrimes, "even dimensions"},
                          {2, 1, CharClaim::NoPrime, "odd dimensions"}}},
        {"m3", true, "", {{3, 0, CharClaim::AllPrimes, "dimensions divisible by 3"},
                          {3, 1, CharClaim::NoPrime, ""},
                          {3, 2, CharClaim::NoPrime, ""}}},
        {"char-m:<m>", true, "m >= 2", {{1, 0, CharClaim::DividesParam, "all dimensions"}}},
        {"char-qs:<q>", true, "q >= 2", {{1, 0, CharClaim::AllPrimes, "addition-only code"}}},
        {"n1:<q>", true, "q >= 2", {{2, 1, CharClaim::DividesParam, "odd dimensions"},
                                    {2, 0, CharClaim::AllPrimes, "even dimensions"}}},
        {"n2:<q'>", true, "q' >= 2", {{0, 1, CharClaim::NoPrime, ""},
                                      {0, 2, CharClaim::DividesParam, ""},
                                      {0, 3, CharClaim::AllPrimes, ""},
                                      {0, 5, CharClaim::DividesParam, ""}}},
        {"char-qs-additive:<q>", false, "any domain, any dim", {}},
        {"char-qs-charp:<q>", false, "field with char | q", {}},
        {"m2-dim2", false, "any field", {}},
        {"n1-dim2:<q>", false, "any field", {}},
        {"n1-scalar-charp:<q>", false, "field with char | q", {}},
        {"n2-dim3:<q'>", false, "any field", {}},
        {"n1-ring16:<q>", false, "ring:2,2", {}},
        {"n2-dim2:<q'>", false, "field with char | q'; derived by search", {}},
    };
    return entries;
}

namespace {

std::pair<std::string, int> split_param(const std::string& mnemonic, int dflt) {
    auto colon = mnemonic.rfind(':');
    if (colon == std::string::npos) return {mnemonic, dflt};
    try {
        return {mnemonic.substr(0, colon), std::stoi(mnemonic.substr(colon + 1))};
    } catch (const std::exception&) {
        raise(ErrorKind::InvalidArg, "bad parameter in '" + mnemonic + "'");
    }
}

} // namespace

Network zoo_network(const std::string& mnemonic) {
    auto [base, param] = split_param(mnemonic, -1);
    if (base == "m2") return build_m2();
    if (base == "m3") return build_m3();
    if (base == "char-m") return build_char_m(param < 0 ? 2 : param);
    if (base == "char-qs") return build_char_qs(param < 0 ? 2 : param);
    if (base == "n1") return build_n1(param < 0 ? 2 : param);
    if (base == "n2") return build_n2(param < 0 ? 2 : param);
    raise(ErrorKind::InvalidArg, "unknown network '" + mnemonic + "'");
}

VlncCode zoo_code(const std::string& mnemonic, const std::string& domain_tag, int dim) {
    auto [base, param] = split_param(mnemonic, 2);
    const Domain& dom = domain_from_tag(domain_tag.empty() ? "2" : domain_tag);
    auto field = [&]() -> const Field& {
        if (!dom.is_field()) raise(ErrorKind::UnsupportedDomain, base + " needs a field domain");
        return static_cast<const Field&>(dom);
    };
    if (base == "char-qs-additive") return code_char_qs_additive(param, dom, dim < 1 ? 1 : dim);
    if (base == "char-qs-charp") return code_char_qs_charp(param, field(), dim < 1 ? 1 : dim);
    if (base == "m2-dim2") return code_m2_dim2(field());
    if (base == "n1-dim2") return code_n1_dim2(param, field());
    if (base == "n1-scalar-charp") return code_n1_scalar_charp(param, field());
    if (base == "n2-dim3") return code_n2_dim3(param, field());
    if (base == "n1-ring16") return code_n1_ring16(param);
    if (base == "n2-dim2") return code_n2_dim2(param, field());
    raise(ErrorKind::InvalidArg, "unknown code '" + mnemonic + "'");
}

std::string zoo_code_network(const std::string& mnemonic) {
    auto [base, param] = split_param(mnemonic, 2);
    std::string q = num(param);
    if (base == "char-qs-additive" || base == "char-qs-charp") return "char-qs:" + q;
    if (base == "m2-dim2") return "m2";
    if (base == "n1-dim2" || base == "n1-scalar-charp" || base == "n1-ring16") return "n1:" + q;
    if (base == "n2-dim3" || base == "n2-dim2") return "n2:" + q;
    raise(ErrorKind::InvalidArg, "unknown code '" + mnemonic + "'");
}

} // namespace vlnc
