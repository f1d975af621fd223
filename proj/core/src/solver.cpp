#include "vlnc/solver.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstring>
#include <functional>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_set>

#include "vlnc/zoo.hpp"

namespace vlnc {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Solvable: return "Solvable";
        case SolveStatus::Unsolvable: return "Unsolvable";
        case SolveStatus::Inconclusive: return "Inconclusive";
    }
    return "?";
}

std::string CensusPredicate::describe() const {
    switch (kind) {
        case Kind::GlobalZero: return "zero(" + source + "," + edge + ")";
        case Kind::GlobalNonZero: return "nonzero(" + source + "," + edge + ")";
        case Kind::Custom: return "custom";
    }
    return "?";
}

CensusPredicate CensusPredicate::global_zero(std::string source, std::string edge) {
    CensusPredicate p;
    p.kind = Kind::GlobalZero;
    p.source = std::move(source);
    p.edge = std::move(edge);
    return p;
}

CensusPredicate CensusPredicate::global_nonzero(std::string source, std::string edge) {
    CensusPredicate p;
    p.kind = Kind::GlobalNonZero;
    p.source = std::move(source);
    p.edge = std::move(edge);
    return p;
}

namespace {

using Clock = std::chrono::steady_clock;

// Dense row vectors over the stacked source columns: W = d * #sources.
using Row = std::vector<uint16_t>;

void guard_slot_branches(const struct Prep& P, double ceiling);

// Incremental row basis in echelon form; rows normalized to pivot 1.
struct Eliminator {
    const Field* F = nullptr;
    int W = 0;
    std::vector<Row> basis;
    std::vector<int> pivots;

    void init(const Field& f, int w) {
        F = &f;
        W = w;
        basis.clear();
        pivots.clear();
    }

    int reduce(uint16_t* row) const {
        for (size_t i = 0; i < basis.size(); ++i) {
            const int p = pivots[i];
            if (row[p] == 0) continue;
            const int c = row[p];
            const Row& b = basis[i];
            for (int j = p; j < W; ++j)
                if (b[j] != 0) row[j] = (uint16_t)F->sub(row[j], F->mul(c, b[j]));
        }
        for (int j = 0; j < W; ++j)
            if (row[j] != 0) return j;
        return -1;
    }

    bool add_row(const uint16_t* src) {
        Row r(src, src + W);
        const int p = reduce(r.data());
        if (p < 0) return false;
        const int inv = F->inv(r[p]);
        for (int j = p; j < W; ++j) r[j] = (uint16_t)F->mul(inv, r[j]);
        size_t pos = 0;
        while (pos < pivots.size() && pivots[pos] < p) ++pos;
        basis.insert(basis.begin() + pos, std::move(r));
        pivots.insert(pivots.begin() + pos, p);
        return true;
    }

    bool contains(const uint16_t* row) const {
        Row r(row, row + W);
        return reduce(r.data()) < 0;
    }

    int rank() const { return (int)basis.size(); }
};

// Canonical RREF of a row set, flattened; equal strings <=> equal row spaces.
std::vector<uint16_t> canon_rows(const Field& F, int W, const std::vector<const uint16_t*>& rows) {
    Eliminator e;
    e.init(F, W);
    for (auto* r : rows) e.add_row(r);
    for (size_t i = 0; i < e.basis.size(); ++i)
        for (size_t j = i + 1; j < e.basis.size(); ++j) {
            const int p = e.pivots[j];
            const int c = e.basis[i][p];
            if (c == 0) continue;
            for (int col = p; col < W; ++col)
                e.basis[i][col] = (uint16_t)F.sub(e.basis[i][col], F.mul(c, e.basis[j][col]));
        }
    std::vector<uint16_t> out;
    for (auto& b : e.basis) out.insert(out.end(), b.begin(), b.end());
    return out;
}

struct PinResolved {
    int src_block = -1;
    PinConstraint::Kind kind = PinConstraint::Kind::Zero;
    std::vector<uint16_t> fixed; // d*d when Fixed
};

// One attainable mix an edge can carry, with the locals realizing it.
struct Candidate {
    std::vector<uint16_t> rows;  // d rows of W
    std::vector<uint8_t> digits; // d*d per in-edge of the tail
};

struct Prep {
    const Network* net = nullptr;
    const Field* F = nullptr;
    int d = 1, W = 0;
    std::vector<std::string> srcs;
    std::map<std::string, int> src_col;

    std::vector<int> interior_edge;           // dense -> net edge index
    std::map<std::string, int> dense_of_edge; // interior edges only
    std::vector<int> src_block_of_dense;      // >= 0 when the tail is a source
    std::vector<std::vector<int>> support_of_dense;
    std::vector<int> slot_of_dense; // producing slot, -1 = source-adjacent

    struct Slot {
        std::string node;
        std::vector<int> ins;  // dense in-edge indices
        std::vector<int> outs; // dense interior out-edge indices
        uint64_t branch = 1;
        bool constant_ins = true;
        std::vector<std::pair<int, PinResolved>> pins; // (out position, pin)
        std::vector<int> dep_slots;
    };
    std::vector<Slot> slots;

    struct TermIn {
        std::string edge_id;
        bool from_source = false;
        int src_block = -1;
        std::vector<int> tail_ins;
        std::vector<PinResolved> pins;
    };
    struct Term {
        std::string id;
        std::vector<TermIn> ins;
        std::vector<Row> selectors;
        std::vector<int> dep_slots;
    };
    std::vector<Term> terms;

    double raw_space = 1;
};

Row selector_row(int W, int col, const Field& F) {
    Row r(W, 0);
    r[col] = (uint16_t)F.one();
    return r;
}

Prep prepare(const Network& net, const SearchConfig& cfg) {
    if (!cfg.field) raise(ErrorKind::InvalidArg, "search config needs a field");
    if (cfg.dim < 1) raise(ErrorKind::InvalidArg, "search dimension must be >= 1");
    {
        auto viol = validate(net);
        if (!viol.empty())
            raise(ErrorKind::InvalidArg,
                  "network fails validation: " + viol[0].kind + " at " + viol[0].subject);
    }
    Prep P;
    P.net = &net;
    P.F = cfg.field;
    P.d = cfg.dim;
    P.srcs = net.sources();
    P.W = P.d * (int)P.srcs.size();
    for (size_t i = 0; i < P.srcs.size(); ++i) P.src_col[P.srcs[i]] = (int)i;

    const auto& edges = net.edges();
    for (int i = 0; i < (int)edges.size(); ++i) {
        if (net.node(edges[i].head).kind == NodeKind::Terminal) continue;
        P.dense_of_edge[edges[i].id] = (int)P.interior_edge.size();
        P.interior_edge.push_back(i);
    }
    const int nDense = (int)P.interior_edge.size();
    P.src_block_of_dense.assign(nDense, -1);
    P.support_of_dense.resize(nDense);
    P.slot_of_dense.assign(nDense, -1);
    for (int dix = 0; dix < nDense; ++dix) {
        const Edge& e = edges[P.interior_edge[dix]];
        if (net.node(e.tail).kind == NodeKind::Source) P.src_block_of_dense[dix] = P.src_col[e.tail];
        for (auto& s : source_support(net, e.id)) P.support_of_dense[dix].push_back(P.src_col[s]);
    }

    for (auto& n : net.nodes()) {
        if (n.kind != NodeKind::Inner) continue;
        Prep::Slot s;
        s.node = n.id;
        for (auto& eid : net.out_edges(n.id)) {
            auto it = P.dense_of_edge.find(eid);
            if (it != P.dense_of_edge.end()) s.outs.push_back(it->second);
        }
        if (s.outs.empty()) continue;
        for (auto& eid : net.in_edges(n.id)) s.ins.push_back(P.dense_of_edge.at(eid));
        for (int in : s.ins)
            if (P.src_block_of_dense[in] < 0) s.constant_ins = false;

        const uint64_t digits = (uint64_t)P.d * P.d * s.ins.size() * s.outs.size();
        long double branch = 1;
        for (uint64_t i = 0; i < digits; ++i) {
            branch *= P.F->size();
            if (branch > 9e18) {
                branch = 9e18; // saturate; enumeration guards catch this later
                break;
            }
        }
        s.branch = (uint64_t)branch;
        P.slots.push_back(std::move(s));
    }
    for (int si = 0; si < (int)P.slots.size(); ++si)
        for (int out : P.slots[si].outs) P.slot_of_dense[out] = si;
    for (auto& s : P.slots)
        for (int in : s.ins)
            if (P.slot_of_dense[in] >= 0) s.dep_slots.push_back(P.slot_of_dense[in]);

    for (auto& pin : cfg.pins) {
        if (!net.has_edge(pin.edge)) raise(ErrorKind::NoSuchEdge, "pin edge " + pin.edge);
        if (!net.has_node(pin.source) || net.node(pin.source).kind != NodeKind::Source)
            raise(ErrorKind::InvalidArg, "pin source " + pin.source + " is not a source");
        PinResolved pr;
        pr.src_block = P.src_col[pin.source];
        pr.kind = pin.kind;
        if (pin.kind == PinConstraint::Kind::Fixed) {
            if (!pin.value || pin.value->rows() != P.d || pin.value->cols() != P.d ||
                pin.value->dom_ptr() != P.F)
                raise(ErrorKind::InvalidArg, "fixed pin needs a d x d matrix over the search field");
            for (int r = 0; r < P.d; ++r)
                for (int c = 0; c < P.d; ++c) pr.fixed.push_back((uint16_t)pin.value->at(r, c));
        }
        auto it = P.dense_of_edge.find(pin.edge);
        if (it == P.dense_of_edge.end()) continue; // terminal-adjacent: resolved below
        const int dix = it->second;
        const int si = P.slot_of_dense[dix];
        if (si < 0)
            raise(ErrorKind::InvalidArg,
                  "pin on source-adjacent edge " + pin.edge +
                      "; its local is identity-normalized, pin a downstream edge instead");
        auto& slot = P.slots[si];
        int pos = (int)(std::find(slot.outs.begin(), slot.outs.end(), dix) - slot.outs.begin());
        slot.pins.push_back({pos, std::move(pr)});
    }

    for (auto& t : net.terminals()) {
        Prep::Term term;
        term.id = t;
        for (auto& eid : net.in_edges(t)) {
            Prep::TermIn ti;
            ti.edge_id = eid;
            const Edge& e = net.edge(eid);
            if (net.node(e.tail).kind == NodeKind::Source) {
                ti.from_source = true;
                ti.src_block = P.src_col[e.tail];
            } else {
                for (auto& in : net.in_edges(e.tail)) ti.tail_ins.push_back(P.dense_of_edge.at(in));
            }
            for (auto& pin : cfg.pins)
                if (pin.edge == eid) {
                    PinResolved pr;
                    pr.src_block = P.src_col.at(pin.source);
                    pr.kind = pin.kind;
                    if (pin.kind == PinConstraint::Kind::Fixed)
                        for (int r = 0; r < P.d; ++r)
                            for (int c = 0; c < P.d; ++c)
                                pr.fixed.push_back((uint16_t)pin.value->at(r, c));
                    ti.pins.push_back(std::move(pr));
                }
            term.ins.push_back(std::move(ti));
        }
        for (auto& s : net.demand(t))
            for (int r = 0; r < P.d; ++r)
                term.selectors.push_back(selector_row(P.W, P.src_col.at(s) * P.d + r, *P.F));
        std::set<int> deps;
        for (auto& ti : term.ins)
            for (int in : ti.tail_ins)
                if (P.slot_of_dense[in] >= 0) deps.insert(P.slot_of_dense[in]);
        term.dep_slots.assign(deps.begin(), deps.end());
        P.terms.push_back(std::move(term));
    }

    P.raw_space = 1;
    for (auto& s : P.slots) {
        P.raw_space *= (double)s.branch;
        if (P.raw_space > 1e300) P.raw_space = 1e300;
    }
    return P;
}

void guard_slot_branches(const Prep& P, double ceiling) {
    for (auto& s : P.slots)
        if ((double)s.branch > ceiling)
            raise(ErrorKind::SpaceTooLarge,
                  "local matrix space at node " + s.node + " exceeds the ceiling (" +
                      std::to_string((double)s.branch) + " > " + std::to_string(ceiling) + ")");
}

// Search order over a subset of slots. Default: greedy readiness order,
// picking next the slot that brings some unfinished terminal closest to fully
// assigned, so pruning starts as early as possible. Alternative: topological
// order with identifier tie-breaks.
std::vector<int> slot_order(const Prep& P, const std::vector<int>& subset, bool lexicographic) {
    std::vector<int> order;
    std::set<int> remaining(subset.begin(), subset.end());
    std::set<int> chosen;
    auto deps_ok = [&](int s) {
        for (int dep : P.slots[s].dep_slots)
            if (remaining.count(dep)) return false;
        return true;
    };
    while (!remaining.empty()) {
        int best = -1;
        long best_missing = LONG_MAX;
        long best_completed = -1;
        for (int s : remaining) {
            if (!deps_ok(s)) continue;
            if (lexicographic) {
                if (best < 0 || P.slots[s].node < P.slots[best].node) best = s;
                continue;
            }
            long missing = LONG_MAX;
            long completed = 0;
            for (auto& t : P.terms) {
                if (t.dep_slots.empty()) continue;
                bool uses = false, ready = true;
                long after = 0;
                for (int dep : t.dep_slots) {
                    if (dep == s) uses = true;
                    if (!chosen.count(dep)) {
                        ready = false;
                        if (dep != s) ++after;
                    }
                }
                if (ready || !uses) continue;
                missing = std::min(missing, after);
                if (after == 0) ++completed;
            }
            if (best < 0 || missing < best_missing ||
                (missing == best_missing && completed > best_completed) ||
                (missing == best_missing && completed == best_completed &&
                 P.slots[s].node < P.slots[best].node)) {
                best = s;
                best_missing = missing;
                best_completed = completed;
            }
        }
        if (best < 0) raise(ErrorKind::InvalidArg, "slot dependency cycle");
        order.push_back(best);
        chosen.insert(best);
        remaining.erase(best);
    }
    return order;
}

// Runtime state: one row block per interior edge; source-adjacent blocks are
// constant selectors.
struct State {
    int d = 0, W = 0;
    std::vector<uint16_t> rows;
    std::vector<int> assigned_depth; // -1 = constant, INT32_MAX = unassigned

    uint16_t* block(int dense) { return rows.data() + (size_t)dense * d * W; }
    const uint16_t* block(int dense) const { return rows.data() + (size_t)dense * d * W; }
};

State make_state(const Prep& P) {
    State st;
    st.d = P.d;
    st.W = P.W;
    st.rows.assign(P.interior_edge.size() * (size_t)P.d * P.W, 0);
    st.assigned_depth.assign(P.interior_edge.size(), INT32_MAX);
    for (int dix = 0; dix < (int)P.interior_edge.size(); ++dix) {
        if (P.src_block_of_dense[dix] < 0) continue;
        st.assigned_depth[dix] = -1;
        uint16_t* b = st.block(dix);
        for (int r = 0; r < P.d; ++r)
            b[(size_t)r * P.W + P.src_block_of_dense[dix] * P.d + r] = (uint16_t)P.F->one();
    }
    return st;
}

bool pin_matches(const Prep& P, const PinResolved& pin, const uint16_t* rows) {
    const int d = P.d, W = P.W;
    bool zero = true;
    for (int r = 0; r < d && zero; ++r)
        for (int c = 0; c < d; ++c)
            if (rows[(size_t)r * W + pin.src_block * d + c] != 0) {
                zero = false;
                break;
            }
    switch (pin.kind) {
        case PinConstraint::Kind::Zero: return zero;
        case PinConstraint::Kind::NonZero: return !zero;
        case PinConstraint::Kind::Fixed:
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c)
                    if (rows[(size_t)r * W + pin.src_block * d + c] != pin.fixed[r * d + c])
                        return false;
            return true;
    }
    return false;
}

// Attainable mixes { sum_i A_i G_i } for an edge whose tail reads the given
// blocks, deduplicated, pin-filtered, and reduced to row-space-maximal
// representatives. Decodability is monotone in the row space carried, so the
// maximal set decides feasibility exactly.
std::vector<Candidate> achievable_mixes(const Prep& P,
                                        const std::vector<const uint16_t*>& in_blocks,
                                        const std::vector<PinResolved>& pins, double ceiling) {
    const Field& F = *P.F;
    const int d = P.d, W = P.W, q = F.size();
    const int nd = d * d * (int)in_blocks.size();
    long double space = 1;
    for (int i = 0; i < nd; ++i) {
        space *= q;
        if (space > ceiling)
            raise(ErrorKind::SpaceTooLarge, "terminal-side local space exceeds the ceiling");
    }
    std::vector<Candidate> cands;
    std::unordered_set<std::string> seen;
    std::vector<uint8_t> digits(nd, 0);
    std::vector<uint16_t> rows((size_t)d * W);
    for (;;) {
        std::fill(rows.begin(), rows.end(), 0);
        for (size_t i = 0; i < in_blocks.size(); ++i) {
            const uint8_t* A = digits.data() + i * d * d;
            const uint16_t* G = in_blocks[i];
            for (int r = 0; r < d; ++r)
                for (int k = 0; k < d; ++k) {
                    const int a = A[r * d + k];
                    if (a == 0) continue;
                    const uint16_t* grow = G + (size_t)k * W;
                    uint16_t* orow = rows.data() + (size_t)r * W;
                    for (int c = 0; c < W; ++c)
                        if (grow[c] != 0) orow[c] = (uint16_t)F.add(orow[c], F.mul(a, grow[c]));
                }
        }
        bool ok = true;
        for (auto& pin : pins)
            if (!pin_matches(P, pin, rows.data())) {
                ok = false;
                break;
            }
        if (ok) {
            // Row-space key: span-equal mixes are interchangeable for both
            // feasibility and witness extraction.
            std::vector<const uint16_t*> rp;
            for (int r = 0; r < d; ++r) rp.push_back(rows.data() + (size_t)r * W);
            auto canon = canon_rows(F, W, rp);
            std::string key((const char*)canon.data(), canon.size() * sizeof(uint16_t));
            if (seen.insert(key).second) {
                Candidate c;
                c.rows = rows;
                c.digits = digits;
                cands.push_back(std::move(c));
            }
        }
        int i = nd - 1;
        while (i >= 0 && digits[i] == q - 1) digits[i--] = 0;
        if (i < 0) break;
        ++digits[i];
    }
    // Drop candidates whose row space sits inside another's. Spans are
    // pairwise distinct after the dedup, so containment is strict dominance.
    std::vector<Eliminator> elims(cands.size());
    for (size_t i = 0; i < cands.size(); ++i) {
        elims[i].init(F, W);
        for (int r = 0; r < d; ++r) elims[i].add_row(cands[i].rows.data() + (size_t)r * W);
    }
    std::vector<Candidate> maximal;
    for (size_t i = 0; i < cands.size(); ++i) {
        bool dominated = false;
        for (size_t j = 0; j < cands.size() && !dominated; ++j) {
            if (i == j || elims[j].rank() <= elims[i].rank()) continue;
            bool inside = true;
            for (int r = 0; r < d && inside; ++r)
                inside = elims[j].contains(cands[i].rows.data() + (size_t)r * W);
            dominated = inside;
        }
        if (!dominated) maximal.push_back(cands[i]);
    }
    return maximal;
}

struct TermWitness {
    std::vector<std::vector<uint8_t>> in_digits; // per in-edge (empty for source tails)
    Mat decode{};                                // k*d x |ins|*d
};

// Attainable-mix cache shared by the terminal checks of one search node; the
// interior state is fixed while it is alive. Keyed by the tail's in-edge list.
using MixCache = std::map<std::vector<int>, std::vector<Candidate>>;

// Exact feasibility of one terminal against the current interior state.
bool term_feasible(const Prep& P, const Prep::Term& term, const State& st, double ceiling,
                   TermWitness* witness, MixCache* cache = nullptr) {
    const Field& F = *P.F;
    const int d = P.d, W = P.W;

    std::vector<std::vector<Candidate>> lists(term.ins.size());
    for (size_t i = 0; i < term.ins.size(); ++i) {
        const auto& ti = term.ins[i];
        if (ti.from_source) {
            Candidate c;
            c.rows.assign((size_t)d * W, 0);
            for (int r = 0; r < d; ++r)
                c.rows[(size_t)r * W + ti.src_block * d + r] = (uint16_t)F.one();
            bool ok = true;
            for (auto& pin : ti.pins)
                if (!pin_matches(P, pin, c.rows.data())) ok = false;
            if (ok) {
                lists[i] = {std::move(c)};
            } else {
                std::vector<uint16_t> sel = c.rows;
                const uint16_t* blk = sel.data();
                lists[i] = achievable_mixes(P, {blk}, ti.pins, ceiling);
            }
        } else if (ti.tail_ins.size() == 1 && ti.pins.empty()) {
            Candidate c;
            const uint16_t* b = st.block(ti.tail_ins[0]);
            c.rows.assign(b, b + (size_t)d * W);
            c.digits.assign((size_t)d * d, 0);
            for (int r = 0; r < d; ++r) c.digits[r * d + r] = (uint8_t)F.one();
            lists[i] = {std::move(c)};
        } else {
            if (cache && ti.pins.empty()) {
                auto it = cache->find(ti.tail_ins);
                if (it != cache->end()) {
                    lists[i] = it->second;
                    continue;
                }
            }
            std::vector<const uint16_t*> blocks;
            for (int in : ti.tail_ins) blocks.push_back(st.block(in));
            lists[i] = achievable_mixes(P, blocks, ti.pins, ceiling);
            if (cache && ti.pins.empty()) (*cache)[ti.tail_ins] = lists[i];
            if (lists[i].empty()) return false;
        }
    }

    // Union-span pretest.
    {
        Eliminator all;
        all.init(F, W);
        for (auto& list : lists)
            for (auto& c : list)
                for (int r = 0; r < d; ++r) all.add_row(c.rows.data() + (size_t)r * W);
        for (auto& sel : term.selectors)
            if (!all.contains(sel.data())) return false;
    }

    Eliminator base;
    base.init(F, W);
    std::vector<size_t> multi;
    for (size_t i = 0; i < lists.size(); ++i) {
        if (lists[i].size() == 1) {
            for (int r = 0; r < d; ++r) base.add_row(lists[i][0].rows.data() + (size_t)r * W);
        } else {
            multi.push_back(i);
        }
    }

    auto selectors_ok = [&](const Eliminator& e) {
        for (auto& sel : term.selectors)
            if (!e.contains(sel.data())) return false;
        return true;
    };

    bool found = false;
    std::vector<int> choice(multi.size(), 0), found_choice;
    if (multi.empty()) {
        found = selectors_ok(base);
    } else {
        std::vector<Eliminator> stack(multi.size() + 1);
        stack[0] = base;
        size_t level = 0;
        for (;;) {
            if (choice[level] == (int)lists[multi[level]].size()) {
                if (level == 0) break;
                choice[level] = 0;
                --level;
                ++choice[level];
                continue;
            }
            stack[level + 1] = stack[level];
            const Candidate& c = lists[multi[level]][choice[level]];
            for (int r = 0; r < d; ++r) stack[level + 1].add_row(c.rows.data() + (size_t)r * W);
            if (level + 1 == multi.size()) {
                if (selectors_ok(stack[level + 1])) {
                    found = true;
                    found_choice = choice;
                    break;
                }
                ++choice[level];
            } else {
                ++level;
            }
        }
    }
    if (!found || !witness) return found;

    witness->in_digits.assign(term.ins.size(), {});
    Mat stacked(F, (int)term.ins.size() * d, W);
    for (size_t i = 0; i < term.ins.size(); ++i) {
        const Candidate* c = nullptr;
        if (lists[i].size() == 1) {
            c = &lists[i][0];
        } else {
            size_t pos = std::find(multi.begin(), multi.end(), i) - multi.begin();
            c = &lists[i][found_choice[pos]];
        }
        witness->in_digits[i] = c->digits;
        for (int r = 0; r < d; ++r)
            for (int col = 0; col < W; ++col)
                stacked.set((int)i * d + r, col, c->rows[(size_t)r * W + col]);
    }
    const int k = (int)term.selectors.size();
    Mat want(F, k, W);
    for (int r = 0; r < k; ++r)
        for (int col = 0; col < W; ++col) want.set(r, col, term.selectors[r][col]);
    auto X = mat_solve_left(stacked, want);
    if (!X) raise(ErrorKind::InvalidArg, "internal: witness decode vanished");
    witness->decode = *X;
    return true;
}

// Relaxed feasibility: unassigned interior edges contribute free rows over
// their source support and per-edge capacities are ignored. Sound pruning.
bool term_relaxed_feasible(const Prep& P, const Prep::Term& term, const State& st, int depth) {
    const Field& F = *P.F;
    const int d = P.d, W = P.W;
    Eliminator e;
    e.init(F, W);
    for (auto& ti : term.ins) {
        if (ti.from_source) {
            for (int r = 0; r < d; ++r) {
                Row row = selector_row(W, ti.src_block * d + r, F);
                e.add_row(row.data());
            }
            continue;
        }
        for (int in : ti.tail_ins) {
            if (st.assigned_depth[in] <= depth) {
                const uint16_t* b = st.block(in);
                for (int r = 0; r < d; ++r) e.add_row(b + (size_t)r * W);
            } else {
                for (int blk : P.support_of_dense[in])
                    for (int r = 0; r < d; ++r) {
                        Row row = selector_row(W, blk * d + r, F);
                        e.add_row(row.data());
                    }
            }
        }
    }
    for (auto& sel : term.selectors)
        if (!e.contains(sel.data())) return false;
    return true;
}

constexpr uint64_t kPrecompMax = 1u << 20;
constexpr uint64_t kDedupMin = 512;

void compute_outs(const Prep& P, const Prep::Slot& slot, const State& st,
                  const std::vector<uint8_t>& digits, std::vector<uint16_t>& outs) {
    const Field& F = *P.F;
    const int d = P.d, W = P.W;
    outs.assign(slot.outs.size() * (size_t)d * W, 0);
    for (size_t o = 0; o < slot.outs.size(); ++o) {
        uint16_t* G = outs.data() + (size_t)o * d * W;
        for (size_t i = 0; i < slot.ins.size(); ++i) {
            const uint8_t* A = digits.data() + (o * slot.ins.size() + i) * d * d;
            const uint16_t* Gin = st.block(slot.ins[i]);
            for (int r = 0; r < d; ++r)
                for (int k = 0; k < d; ++k) {
                    const int a = A[r * d + k];
                    if (a == 0) continue;
                    const uint16_t* grow = Gin + (size_t)k * W;
                    uint16_t* orow = G + (size_t)r * W;
                    for (int c = 0; c < W; ++c)
                        if (grow[c] != 0) orow[c] = (uint16_t)F.add(orow[c], F.mul(a, grow[c]));
                }
        }
    }
}

bool slot_pins_ok(const Prep& P, const Prep::Slot& slot, const std::vector<uint16_t>& outs) {
    for (auto& [pos, pin] : slot.pins)
        if (!pin_matches(P, pin, outs.data() + (size_t)pos * P.d * P.W)) return false;
    return true;
}

struct SlotPlan {
    bool precomputed = false;
    std::vector<std::vector<uint8_t>> digits;
    std::vector<std::vector<uint16_t>> outs;
};

// Precomputes the assignment list of a slot whose in-blocks are constant.
// In solve mode, assignments with identical per-out-edge row spaces are
// collapsed to their first representative: achievable downstream mixes,
// pins and decodability only see row spaces.
SlotPlan plan_slot(const Prep& P, const Prep::Slot& slot, const State& st, bool dedupe) {
    SlotPlan plan;
    if (!slot.constant_ins || slot.branch > kPrecompMax) return plan;
    plan.precomputed = true;
    const int q = P.F->size();
    const int nd = P.d * P.d * (int)(slot.ins.size() * slot.outs.size());
    std::vector<uint8_t> digits(nd, 0);
    std::vector<uint16_t> outs;
    std::unordered_set<std::string> seen;
    const bool use_dedupe = dedupe && slot.branch >= kDedupMin;
    for (;;) {
        compute_outs(P, slot, st, digits, outs);
        if (slot_pins_ok(P, slot, outs)) {
            bool fresh = true;
            if (use_dedupe) {
                std::string key;
                for (size_t o = 0; o < slot.outs.size(); ++o) {
                    std::vector<const uint16_t*> rows;
                    for (int r = 0; r < P.d; ++r)
                        rows.push_back(outs.data() + ((size_t)o * P.d + r) * P.W);
                    auto canon = canon_rows(*P.F, P.W, rows);
                    key.append((const char*)canon.data(), canon.size() * sizeof(uint16_t));
                    key.push_back('|');
                }
                fresh = seen.insert(key).second;
            }
            if (fresh) {
                plan.digits.push_back(digits);
                plan.outs.push_back(outs);
            }
        }
        int i = nd - 1;
        while (i >= 0 && digits[i] == q - 1) digits[i--] = 0;
        if (i < 0) break;
        ++digits[i];
    }
    return plan;
}

struct LimitHit {
    bool inconclusive = false;
    bool space = false;
};

struct Engine {
    const Prep& P;
    const SearchConfig& cfg;
    std::vector<int> order;
    std::vector<SlotPlan> plans;
    std::vector<std::vector<int>> ready_terms;
    std::vector<std::vector<int>> relaxed_terms;
    std::vector<int> check_terms;

    State st;
    SearchStats stats;
    LimitHit limit;
    Clock::time_point t0, last_progress;
    uint64_t first_slot_lo = 0, first_slot_hi = UINT64_MAX;
    std::atomic<uint64_t>* shared_best = nullptr;
    uint64_t my_first_index = UINT64_MAX;

    bool census_mode = false;
    std::function<bool()> on_survivor;

    bool found = false;
    std::vector<std::vector<uint8_t>> found_digits;
    std::vector<std::vector<uint8_t>> cur_digits;

    Engine(const Prep& p, const SearchConfig& c) : P(p), cfg(c), st(make_state(p)) {
        t0 = last_progress = Clock::now();
    }

    void build(const std::vector<int>& slots_subset, const std::vector<int>& terms_subset) {
        order = slot_order(P, slots_subset, cfg.lexicographic_order);
        check_terms = terms_subset;
        plans.resize(order.size());
        for (size_t k = 0; k < order.size(); ++k)
            plans[k] = plan_slot(P, P.slots[order[k]], st, /*dedupe=*/!census_mode);
        std::map<int, int> pos_of_slot;
        for (size_t k = 0; k < order.size(); ++k) pos_of_slot[order[k]] = (int)k;
        ready_terms.assign(order.size(), {});
        relaxed_terms.assign(order.size(), {});
        for (int ti : check_terms) {
            auto& term = P.terms[ti];
            int ready = -1;
            for (int dep : term.dep_slots) {
                auto it = pos_of_slot.find(dep);
                if (it != pos_of_slot.end()) ready = std::max(ready, it->second);
            }
            if (ready < 0) continue;
            ready_terms[ready].push_back(ti);
            for (int dep : term.dep_slots) {
                int pos = pos_of_slot.at(dep);
                if (pos < ready) relaxed_terms[pos].push_back(ti);
            }
        }
        cur_digits.assign(order.size(), {});
    }

    bool tick() {
        ++stats.assignments;
        if ((stats.assignments & 1023) == 0) {
            auto now = Clock::now();
            stats.elapsed_sec = std::chrono::duration<double>(now - t0).count();
            if (cfg.time_budget_sec > 0 && stats.elapsed_sec > cfg.time_budget_sec) {
                limit.inconclusive = true;
                return true;
            }
            if (cfg.progress && std::chrono::duration<double>(now - last_progress).count() > 0.5) {
                last_progress = now;
                cfg.progress(stats);
            }
        }
        if (cfg.max_assignments > 0 && stats.assignments > cfg.max_assignments) {
            limit.inconclusive = true;
            return true;
        }
        if ((double)stats.assignments > cfg.space_ceiling) {
            limit.space = true;
            return true;
        }
        return false;
    }

    bool checks_pass(size_t depth) {
        MixCache cache;
        for (int ti : ready_terms[depth])
            if (!term_feasible(P, P.terms[ti], st, cfg.space_ceiling, nullptr, &cache)) {
                ++stats.prunes;
                return false;
            }
        for (int ti : relaxed_terms[depth])
            if (!term_relaxed_feasible(P, P.terms[ti], st, (int)depth)) {
                ++stats.prunes;
                return false;
            }
        return true;
    }

    void apply(size_t depth, const std::vector<uint8_t>& digits, const std::vector<uint16_t>& outs) {
        const auto& slot = P.slots[order[depth]];
        for (size_t o = 0; o < slot.outs.size(); ++o) {
            uint16_t* dst = st.block(slot.outs[o]);
            std::memcpy(dst, outs.data() + (size_t)o * P.d * P.W,
                        (size_t)P.d * P.W * sizeof(uint16_t));
            st.assigned_depth[slot.outs[o]] = (int)depth;
        }
        cur_digits[depth] = digits;
    }

    void unassign(size_t depth) {
        for (int out : P.slots[order[depth]].outs) st.assigned_depth[out] = INT32_MAX;
    }

    bool dfs(size_t depth) {
        if (depth == order.size()) {
            if (census_mode) return on_survivor();
            found = true;
            found_digits = cur_digits;
            return true;
        }
        const auto& slot = P.slots[order[depth]];
        const auto& plan = plans[depth];
        auto visit = [&](uint64_t index, const std::vector<uint8_t>& digits,
                         const std::vector<uint16_t>& outs) -> bool {
            if (depth == 0) {
                if (index < first_slot_lo) return false;
                if (index >= first_slot_hi) return true;
                my_first_index = index;
                if (shared_best && shared_best->load(std::memory_order_relaxed) < index) return true;
            }
            apply(depth, digits, outs);
            if (tick()) return true;
            if (!checks_pass(depth)) {
                unassign(depth);
                return false;
            }
            bool stop = dfs(depth + 1);
            unassign(depth);
            return stop;
        };
        if (plan.precomputed) {
            for (uint64_t i = 0; i < plan.digits.size(); ++i)
                if (visit(i, plan.digits[i], plan.outs[i])) return true;
            return false;
        }
        const int q = P.F->size();
        const int nd = P.d * P.d * (int)(slot.ins.size() * slot.outs.size());
        std::vector<uint8_t> digits(nd, 0);
        std::vector<uint16_t> outs;
        uint64_t index = 0;
        for (;;) {
            compute_outs(P, slot, st, digits, outs);
            if (slot_pins_ok(P, slot, outs) && visit(index, digits, outs)) return true;
            int i = nd - 1;
            while (i >= 0 && digits[i] == q - 1) digits[i--] = 0;
            if (i < 0) break;
            ++digits[i];
            ++index;
        }
        return false;
    }
};

// Slots coupled by a shared terminal or a dependency chain must be searched
// jointly; distinct components factor the search exactly.
std::vector<std::vector<int>> components(const Prep& P) {
    std::vector<int> parent(P.slots.size());
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = (int)i;
    std::function<int(int)> find = [&](int x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
    for (auto& t : P.terms)
        for (size_t i = 1; i < t.dep_slots.size(); ++i) unite(t.dep_slots[0], t.dep_slots[i]);
    for (size_t s = 0; s < P.slots.size(); ++s)
        for (int dep : P.slots[s].dep_slots) unite((int)s, dep);
    std::map<int, std::vector<int>> groups;
    for (size_t s = 0; s < P.slots.size(); ++s) groups[find((int)s)].push_back((int)s);
    std::vector<std::vector<int>> out;
    for (auto& [root, slots] : groups) out.push_back(slots);
    return out;
}

VlncCode materialize_from_digits(const Prep& P,
                                 const std::map<int, std::vector<uint8_t>>& slot_digits,
                                 double ceiling) {
    const Network& net = *P.net;
    const Field& F = *P.F;
    const int d = P.d;

    State st = make_state(P);
    std::set<int> done;
    while (done.size() < P.slots.size()) {
        bool progressed = false;
        for (int s = 0; s < (int)P.slots.size(); ++s) {
            if (done.count(s)) continue;
            bool ok = true;
            for (int dep : P.slots[s].dep_slots)
                if (!done.count(dep)) ok = false;
            if (!ok) continue;
            auto it = slot_digits.find(s);
            if (it == slot_digits.end()) raise(ErrorKind::InvalidArg, "missing slot digits");
            std::vector<uint16_t> outs;
            compute_outs(P, P.slots[s], st, it->second, outs);
            for (size_t o = 0; o < P.slots[s].outs.size(); ++o) {
                uint16_t* dst = st.block(P.slots[s].outs[o]);
                std::memcpy(dst, outs.data() + (size_t)o * d * P.W,
                            (size_t)d * P.W * sizeof(uint16_t));
                st.assigned_depth[P.slots[s].outs[o]] = 0;
            }
            done.insert(s);
            progressed = true;
        }
        if (!progressed) raise(ErrorKind::InvalidArg, "slot dependency cycle");
    }

    VlncCode code(F, d, "search-witness");
    Mat I = Mat::identity(F, d);
    for (auto& e : net.edges())
        if (net.node(e.tail).kind == NodeKind::Source) code.set_src(e.tail, e.id, I);

    auto digits_to_mat = [&](const uint8_t* A) {
        Mat m(F, d, d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) m.set(r, c, A[r * d + c]);
        return m;
    };

    for (int s = 0; s < (int)P.slots.size(); ++s) {
        const auto& slot = P.slots[s];
        const auto& digits = slot_digits.at(s);
        for (size_t o = 0; o < slot.outs.size(); ++o)
            for (size_t i = 0; i < slot.ins.size(); ++i) {
                Mat A = digits_to_mat(digits.data() + (o * slot.ins.size() + i) * d * d);
                if (A.is_zero()) continue;
                code.set_adj(net.edges()[P.interior_edge[slot.ins[i]]].id,
                             net.edges()[P.interior_edge[slot.outs[o]]].id, std::move(A));
            }
    }

    for (auto& term : P.terms) {
        TermWitness w;
        if (!term_feasible(P, term, st, ceiling, &w))
            raise(ErrorKind::InvalidArg, "internal: terminal infeasible at materialization");
        const auto& dem = net.demand(term.id);
        for (size_t i = 0; i < term.ins.size(); ++i) {
            const auto& ti = term.ins[i];
            if (!ti.from_source) {
                for (size_t j = 0; j < ti.tail_ins.size(); ++j) {
                    Mat A = digits_to_mat(w.in_digits[i].data() + j * (size_t)d * d);
                    if (A.is_zero()) continue;
                    code.set_adj(net.edges()[P.interior_edge[ti.tail_ins[j]]].id, ti.edge_id,
                                 std::move(A));
                }
            }
            for (int b = 0; b < (int)dem.size(); ++b) {
                Mat X = mat_submatrix(w.decode, b * d, (int)i * d, d, d);
                if (!X.is_zero()) code.set_dec(ti.edge_id, term.id, b, std::move(X));
            }
        }
    }
    return code;
}

} // namespace

SearchOutcome solve(const Network& net, const SearchConfig& cfg) {
    Prep P = prepare(net, cfg);
    guard_slot_branches(P, cfg.space_ceiling);
    SearchOutcome out;
    out.stats.raw_space = P.raw_space;
    auto t0 = Clock::now();
    auto finish = [&](SolveStatus status, std::string note) {
        out.status = status;
        out.note = std::move(note);
        out.stats.elapsed_sec = std::chrono::duration<double>(Clock::now() - t0).count();
        return out;
    };

    State constant_state = make_state(P);
    for (auto& term : P.terms) {
        if (!term.dep_slots.empty()) continue;
        if (!term_feasible(P, term, constant_state, cfg.space_ceiling, nullptr))
            return finish(SolveStatus::Unsolvable,
                          "terminal " + term.id + " cannot decode from its fixed resources");
    }

    std::map<int, std::vector<uint8_t>> chosen;
    auto comps = components(P);
    std::sort(comps.begin(), comps.end(), [&](const auto& a, const auto& b) {
        return P.slots[a[0]].node < P.slots[b[0]].node;
    });
    for (auto& comp : comps) {
        std::vector<int> comp_terms;
        std::set<int> comp_set(comp.begin(), comp.end());
        for (int ti = 0; ti < (int)P.terms.size(); ++ti) {
            if (P.terms[ti].dep_slots.empty()) continue;
            if (comp_set.count(P.terms[ti].dep_slots[0])) comp_terms.push_back(ti);
        }

        auto order = slot_order(P, comp, cfg.lexicographic_order);
        const uint64_t first_branch = order.empty() ? 0 : P.slots[order[0]].branch;

        bool comp_found = false;
        std::map<int, std::vector<uint8_t>> comp_digits;
        SearchStats comp_stats;
        LimitHit comp_limit;

        const int jobs = std::max(1, cfg.jobs);
        if (jobs == 1 || order.empty() || first_branch < 2ull * (uint64_t)jobs) {
            Engine e(P, cfg);
            e.build(comp, comp_terms);
            e.dfs(0);
            comp_stats = e.stats;
            comp_limit = e.limit;
            if (e.found) {
                comp_found = true;
                for (size_t k = 0; k < e.order.size(); ++k)
                    comp_digits[e.order[k]] = e.found_digits[k];
            }
        } else {
            std::atomic<uint64_t> best{UINT64_MAX};
            std::vector<Engine> engines;
            engines.reserve(jobs);
            const uint64_t per = first_branch / jobs + 1;
            for (int j = 0; j < jobs; ++j) {
                engines.emplace_back(P, cfg);
                Engine& e = engines.back();
                e.build(comp, comp_terms);
                e.first_slot_lo = (uint64_t)j * per;
                e.first_slot_hi = std::min<uint64_t>(first_branch, (uint64_t)(j + 1) * per);
                e.shared_best = &best;
            }
            std::vector<std::thread> threads;
            for (int j = 0; j < jobs; ++j)
                threads.emplace_back([&engines, &best, j] {
                    engines[j].dfs(0);
                    if (engines[j].found) {
                        uint64_t prev = best.load();
                        while (engines[j].my_first_index < prev &&
                               !best.compare_exchange_weak(prev, engines[j].my_first_index)) {
                        }
                    }
                });
            for (auto& th : threads) th.join();
            Engine* winner = nullptr;
            for (auto& e : engines) {
                comp_stats.assignments += e.stats.assignments;
                comp_stats.prunes += e.stats.prunes;
                comp_limit.inconclusive |= e.limit.inconclusive;
                comp_limit.space |= e.limit.space;
                if (e.found && (!winner || e.my_first_index < winner->my_first_index)) winner = &e;
            }
            if (winner) {
                comp_found = true;
                for (size_t k = 0; k < winner->order.size(); ++k)
                    comp_digits[winner->order[k]] = winner->found_digits[k];
            }
        }

        out.stats.assignments += comp_stats.assignments;
        out.stats.prunes += comp_stats.prunes;
        if (comp_found) {
            for (auto& [s, dg] : comp_digits) chosen[s] = dg;
            continue;
        }
        if (comp_limit.space)
            raise(ErrorKind::SpaceTooLarge,
                  "explored work exceeded the ceiling (raw interior space " +
                      std::to_string(P.raw_space) + ", explored " +
                      std::to_string(out.stats.assignments) + " assignments)");
        if (comp_limit.inconclusive)
            return finish(SolveStatus::Inconclusive, "assignment or time budget exhausted");
        return finish(SolveStatus::Unsolvable,
                      comp.empty() ? "" : "no interior coding around node " + P.slots[comp[0]].node);
    }

    VlncCode code = materialize_from_digits(P, chosen, cfg.space_ceiling);
    auto report = verify_solution(net, code);
    if (!report.pass) raise(ErrorKind::InvalidArg, "internal: witness failed verification");
    out.witness = std::move(code);
    return finish(SolveStatus::Solvable, "");
}

CensusResult census(const Network& net, const SearchConfig& cfg, const CensusPredicate& pred) {
    Prep P = prepare(net, cfg);
    guard_slot_branches(P, cfg.space_ceiling);
    CensusResult out;
    out.stats.raw_space = P.raw_space;
    auto t0 = Clock::now();

    int pred_dense = -1, pred_block = -1;
    if (pred.kind != CensusPredicate::Kind::Custom) {
        auto it = P.dense_of_edge.find(pred.edge);
        if (it == P.dense_of_edge.end())
            raise(ErrorKind::InvalidArg, "census predicate edge must be an interior edge");
        if (P.src_block_of_dense[it->second] >= 0)
            raise(ErrorKind::InvalidArg,
                  "census predicate on a source-adjacent edge is constant under the searched quotient");
        auto sit = P.src_col.find(pred.source);
        if (sit == P.src_col.end()) raise(ErrorKind::InvalidArg, "census predicate source unknown");
        pred_dense = it->second;
        pred_block = sit->second;
    }

    State constant_state = make_state(P);
    for (auto& term : P.terms) {
        if (!term.dep_slots.empty()) continue;
        if (!term_feasible(P, term, constant_state, cfg.space_ceiling, nullptr)) {
            out.all_satisfy = true;
            out.vacuous = true;
            out.stats.elapsed_sec = std::chrono::duration<double>(Clock::now() - t0).count();
            return out;
        }
    }

    std::vector<int> all_slots(P.slots.size());
    for (size_t i = 0; i < P.slots.size(); ++i) all_slots[i] = (int)i;
    std::vector<int> dep_terms;
    for (int ti = 0; ti < (int)P.terms.size(); ++ti)
        if (!P.terms[ti].dep_slots.empty()) dep_terms.push_back(ti);

    Engine e(P, cfg);
    e.census_mode = true;
    e.build(all_slots, dep_terms);

    auto block_is_zero = [&]() {
        const uint16_t* b = e.st.block(pred_dense);
        for (int r = 0; r < P.d; ++r)
            for (int c = 0; c < P.d; ++c)
                if (b[(size_t)r * P.W + pred_block * P.d + c] != 0) return false;
        return true;
    };
    auto current_digits = [&]() {
        std::map<int, std::vector<uint8_t>> digits;
        for (size_t k = 0; k < e.order.size(); ++k) digits[e.order[k]] = e.cur_digits[k];
        return digits;
    };

    e.on_survivor = [&]() -> bool {
        ++out.solutions;
        bool holds;
        if (pred.kind == CensusPredicate::Kind::GlobalZero)
            holds = block_is_zero();
        else if (pred.kind == CensusPredicate::Kind::GlobalNonZero)
            holds = !block_is_zero();
        else {
            VlncCode code = materialize_from_digits(P, current_digits(), cfg.space_ceiling);
            holds = pred.fn(code, evaluate_global(net, code));
        }
        if (holds) return false;
        out.counterexample = materialize_from_digits(P, current_digits(), cfg.space_ceiling);
        return true;
    };
    e.dfs(0);
    out.stats.assignments = e.stats.assignments;
    out.stats.prunes = e.stats.prunes;
    out.stats.elapsed_sec = std::chrono::duration<double>(Clock::now() - t0).count();
    if (e.limit.space)
        raise(ErrorKind::SpaceTooLarge, "explored work exceeded the ceiling (raw interior space " +
                                            std::to_string(P.raw_space) + ")");
    out.completed = !e.limit.inconclusive;
    if (out.completed) {
        out.all_satisfy = !out.counterexample.has_value();
        out.vacuous = out.solutions == 0;
    } else {
        out.note = "assignment or time budget exhausted; census undecided";
    }
    return out;
}

std::map<std::string, ProbeEntry> probe_characteristics(const Network& net, int d,
                                                        const std::vector<const Field*>& fields,
                                                        const SearchConfig& base) {
    std::map<std::string, ProbeEntry> out;
    for (const Field* f : fields) {
        SearchConfig cfg = base;
        cfg.field = f;
        cfg.dim = d;
        ProbeEntry entry;
        try {
            SearchOutcome o = solve(net, cfg);
            entry.status = o.status;
            entry.stats = o.stats;
        } catch (const Error& e) {
            entry.status = SolveStatus::Inconclusive;
            entry.error = e.what();
        }
        out[f->name()] = std::move(entry);
    }
    return out;
}

std::optional<TerminalExtension> extend_terminal(const Network& net, const GlobalCoding& interior,
                                                 const std::string& terminal) {
    if (!interior.dom->is_field())
        raise(ErrorKind::UnsupportedDomain, "extend_terminal requires a field domain");
    SearchConfig cfg;
    cfg.field = static_cast<const Field*>(interior.dom);
    cfg.dim = interior.dim;
    Prep P = prepare(net, cfg);
    State st = make_state(P);
    for (auto& [eid, dix] : P.dense_of_edge) {
        if (P.src_block_of_dense[dix] >= 0) continue;
        uint16_t* b = st.block(dix);
        std::fill(b, b + (size_t)P.d * P.W, 0);
        auto eit = interior.per_edge.find(eid);
        if (eit != interior.per_edge.end())
            for (auto& [s, m] : eit->second) {
                const int blk = P.src_col.at(s);
                for (int r = 0; r < P.d; ++r)
                    for (int c = 0; c < P.d; ++c)
                        b[(size_t)r * P.W + blk * P.d + c] = (uint16_t)m.at(r, c);
            }
        st.assigned_depth[dix] = -1;
    }
    const Prep::Term* term = nullptr;
    for (auto& t : P.terms)
        if (t.id == terminal) term = &t;
    if (!term) raise(ErrorKind::NoSuchNode, terminal + " is not a terminal");

    TermWitness w;
    if (!term_feasible(P, *term, st, cfg.space_ceiling, &w)) return std::nullopt;

    TerminalExtension ext;
    const Field& F = *P.F;
    const int d = P.d;
    const auto& dem = net.demand(terminal);
    for (size_t i = 0; i < term->ins.size(); ++i) {
        const auto& ti = term->ins[i];
        if (ti.from_source) {
            ext.src[ti.edge_id] = Mat::identity(F, d);
        } else {
            for (size_t j = 0; j < ti.tail_ins.size(); ++j) {
                Mat A(F, d, d);
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c)
                        A.set(r, c, w.in_digits[i][j * (size_t)d * d + r * d + c]);
                if (!A.is_zero())
                    ext.adj[{net.edges()[P.interior_edge[ti.tail_ins[j]]].id, ti.edge_id}] =
                        std::move(A);
            }
        }
        for (int b = 0; b < (int)dem.size(); ++b) {
            Mat X = mat_submatrix(w.decode, b * d, (int)i * d, d, d);
            if (!X.is_zero()) ext.dec[{ti.edge_id, b}] = std::move(X);
        }
    }
    return ext;
}

// ---------------------------------------------------------------------------
// n2 d=2 derivation

namespace {

// Component-routing form of one middle edge over a 3-source group: carry one
// whole source, or the aligned k-th components of two sources.
struct RouteForm {
    int kind; // 0 = whole source, 1 = component pair
    int a = 0, b = 0;
    int comp = 0;
};

// The terminal-fitting question for the n2 t-terminals has fixed resources
// plus exactly two capacity-bounded relays (v4, v5). U4 can be restricted to
// the part of span(W4) that meets span(selectors + base + W5); enumerate those
// subspaces of dimension <= d, then the U5 budget is dim(sel mod base+U4).
struct TwoCapFit {
    std::vector<Row> u4, u5; // chosen mixes (row bases, <= d rows each)
};

std::optional<TwoCapFit> fit_two_capacities(const Field& F, int W, int d,
                                            const std::vector<Row>& base,
                                            const std::vector<Row>& w4,
                                            const std::vector<Row>& w5,
                                            const std::vector<Row>& selectors) {
    Eliminator e_base;
    e_base.init(F, W);
    for (auto& r : base) e_base.add_row(r.data());

    Eliminator e_all = e_base;
    for (auto& r : w4) e_all.add_row(r.data());
    for (auto& r : w5) e_all.add_row(r.data());
    for (auto& sel : selectors)
        if (!e_all.contains(sel.data())) return std::nullopt;

    Eliminator e_bw5 = e_base;
    for (auto& r : w5) e_bw5.add_row(r.data());

    // Z = span(selectors + base + W5); the useful part of W4 lies inside Z.
    Eliminator e_z = e_bw5;
    for (auto& sel : selectors) e_z.add_row(sel.data());

    // Enumerate span(w4) and keep vectors inside Z.
    Eliminator e_w4;
    e_w4.init(F, W);
    for (auto& r : w4) e_w4.add_row(r.data());
    const int dim4 = e_w4.rank();
    std::vector<Row> y4; // useful W4 vectors
    {
        std::vector<int> digit(dim4, 0);
        const int q = F.size();
        for (;;) {
            Row v(W, 0);
            bool nonzero = false;
            for (int i = 0; i < dim4; ++i) {
                if (digit[i] == 0) continue;
                nonzero = true;
                for (int c = 0; c < W; ++c)
                    v[c] = (uint16_t)F.add(v[c], F.mul(digit[i], e_w4.basis[i][c]));
            }
            if (nonzero && e_z.contains(v.data())) y4.push_back(v);
            int i = dim4 - 1;
            while (i >= 0 && digit[i] == q - 1) digit[i--] = 0;
            if (i < 0) break;
            ++digit[i];
        }
    }

    // Candidate U4 spans: subsets of y4 of size <= d, deduplicated by span.
    std::vector<std::vector<Row>> u4_cands;
    u4_cands.push_back({}); // empty U4
    std::unordered_set<std::string> seen;
    std::vector<int> idx;
    std::function<void(size_t, size_t)> gen = [&](size_t start, size_t depth) {
        if (depth == (size_t)d) return;
        for (size_t i = start; i < y4.size(); ++i) {
            idx.push_back((int)i);
            std::vector<const uint16_t*> rows;
            for (int j : idx) rows.push_back(y4[j].data());
            auto canon = canon_rows(F, W, rows);
            std::string key((const char*)canon.data(), canon.size() * sizeof(uint16_t));
            if (seen.insert(key).second) {
                std::vector<Row> cand;
                for (int j : idx) cand.push_back(y4[j]);
                u4_cands.push_back(std::move(cand));
            }
            gen(i + 1, depth + 1);
            idx.pop_back();
        }
    };
    gen(0, 0);

    for (auto& u4 : u4_cands) {
        Eliminator e_bu4 = e_base;
        for (auto& r : u4) e_bu4.add_row(r.data());
        // Everything must be reachable with W5 unrestricted...
        Eliminator e_bu4w5 = e_bu4;
        for (auto& r : w5) e_bu4w5.add_row(r.data());
        bool reach = true;
        for (auto& sel : selectors)
            if (!e_bu4w5.contains(sel.data())) {
                reach = false;
                break;
            }
        if (!reach) continue;
        // ...and the residue after base+U4 must fit in d rows of W5.
        std::vector<Row> u5;
        Eliminator e_cover = e_bu4;
        bool ok = true;
        for (auto& sel : selectors) {
            if (e_cover.contains(sel.data())) continue;
            if ((int)u5.size() == d) {
                ok = false;
                break;
            }
            // Decompose sel = p + w with p in base+U4 and w in span(W5): solve
            // against the stacked rows.
            std::vector<Row> stack_rows;
            for (auto& r : base) stack_rows.push_back(r);
            for (auto& r : u4) stack_rows.push_back(r);
            for (auto& r : w5) stack_rows.push_back(r);
            Mat A(F, (int)stack_rows.size(), W);
            for (int r = 0; r < (int)stack_rows.size(); ++r)
                for (int c = 0; c < W; ++c) A.set(r, c, stack_rows[r][c]);
            Mat B(F, 1, W);
            for (int c = 0; c < W; ++c) B.set(0, c, sel[c]);
            auto X = mat_solve_left(A, B);
            if (!X) {
                ok = false;
                break;
            }
            Row w(W, 0);
            const int off = (int)(base.size() + u4.size());
            for (size_t j = 0; j < w5.size(); ++j) {
                const int coef = X->at(0, off + (int)j);
                if (coef == 0) continue;
                for (int c = 0; c < W; ++c) w[c] = (uint16_t)F.add(w[c], F.mul(coef, w5[j][c]));
            }
            u5.push_back(w);
            e_cover.add_row(w.data());
            if (!e_cover.contains(sel.data())) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        TwoCapFit fit;
        fit.u4 = u4;
        fit.u5 = u5;
        return fit;
    }
    return std::nullopt;
}

} // namespace

VlncCode derive_n2_dim2(int qp, const Field& f) {
    if (qp < 2) raise(ErrorKind::InvalidArg, "n2-dim2 needs q' >= 2");
    if (qp % f.characteristic() != 0)
        raise(ErrorKind::InvalidArg, "n2-dim2 needs the characteristic to divide q'");
    Network net = build_n2(qp);
    const int d = 2;

    std::vector<RouteForm> forms;
    for (int i = 0; i < 3; ++i) forms.push_back({0, i, 0, 0});
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            for (int k = 0; k < 2; ++k) forms.push_back({1, i, j, k});
    auto triple_ok = [&](int f1, int f2, int f3) {
        int seen[6] = {0};
        for (int fi : {f1, f2, f3}) {
            const RouteForm& fm = forms[fi];
            if (fm.kind == 0) {
                ++seen[fm.a * 2];
                ++seen[fm.a * 2 + 1];
            } else {
                ++seen[fm.a * 2 + fm.comp];
                ++seen[fm.b * 2 + fm.comp];
            }
        }
        for (int i = 0; i < 6; ++i)
            if (seen[i] != 1) return false;
        return true;
    };
    std::vector<std::array<int, 3>> triples;
    for (int a = 0; a < (int)forms.size(); ++a)
        for (int b = 0; b < (int)forms.size(); ++b)
            for (int c = 0; c < (int)forms.size(); ++c)
                if (triple_ok(a, b, c)) triples.push_back({a, b, c});

    const char* groups[3][3] = {{"a", "b", "c"}, {"r", "s", "w"}, {"x", "y", "z"}};
    const auto srcs = net.sources();
    const int W = d * (int)srcs.size();
    std::map<std::string, int> src_col;
    for (size_t i = 0; i < srcs.size(); ++i) src_col[srcs[i]] = (int)i;
    Mat I = Mat::identity(f, d);

    // The char part is fixed across candidates: the characteristic-gated code
    // with x1 -> a and s -> x.
    VlncCode charp = code_char_qs_charp(qp, f, d);
    std::function<std::string(const std::string&)> ren = [&](const std::string& id) -> std::string {
        if (id == "x1") return "a";
        if (id == "s") return "x";
        auto pos = id.find("->");
        if (pos != std::string::npos) return ren(id.substr(0, pos)) + "->" + ren(id.substr(pos + 2));
        return id;
    };

    auto form_rows = [&](int gi, const RouteForm& fm) {
        // Rows (as W-vectors) carried by a middle edge of group gi.
        std::vector<Row> rows(d, Row(W, 0));
        auto col = [&](int si, int comp) { return src_col.at(groups[gi][si]) * d + comp; };
        if (fm.kind == 0) {
            rows[0][col(fm.a, 0)] = (uint16_t)f.one();
            rows[1][col(fm.a, 1)] = (uint16_t)f.one();
        } else {
            rows[0][col(fm.a, fm.comp)] = (uint16_t)f.one();
            rows[1][col(fm.b, fm.comp)] = (uint16_t)f.one();
        }
        return rows;
    };

    auto build_code = [&](const std::array<int, 3>& t1, const std::array<int, 3>& t2,
                          const std::array<int, 3>& t3) {
        VlncCode code(f, d, "n2-dim2:" + std::to_string(qp));
        for (auto& [k, m] : charp.src_locals()) code.set_src(ren(k.source), ren(k.edge), m);
        for (auto& [k, m] : charp.adj_locals()) code.set_adj(ren(k.from), ren(k.to), m);
        for (auto& [k, m] : charp.dec_locals()) code.set_dec(ren(k.edge), k.terminal, k.block, m);
        const std::array<int, 3> chosen[3] = {t1, t2, t3};
        for (int gi = 0; gi < 3; ++gi) {
            std::string u = "u" + std::to_string(gi + 1);
            for (int si = 0; si < 3; ++si)
                code.set_src(groups[gi][si], groups[gi][si] + std::string("->") + u, I);
            std::string mids[3] = {"e" + std::to_string(gi + 1) + std::to_string(gi + 1),
                                   "e" + std::to_string(gi + 1) + "4",
                                   "e" + std::to_string(gi + 1) + "5"};
            for (int pos = 0; pos < 3; ++pos) {
                const RouteForm& fm = forms[chosen[gi][pos]];
                if (fm.kind == 0) {
                    code.set_adj(groups[gi][fm.a] + std::string("->") + u, mids[pos], I);
                } else {
                    code.set_adj(groups[gi][fm.a] + std::string("->") + u, mids[pos],
                                 Mat::unit(f, d, 0, fm.comp));
                    code.set_adj(groups[gi][fm.b] + std::string("->") + u, mids[pos],
                                 Mat::unit(f, d, 1, fm.comp));
                }
            }
        }
        return code;
    };

    // Char-part edge rows, computed once from the transplanted charp code.
    std::map<std::string, std::vector<Row>> char_rows; // interior char edges
    {
        VlncCode probe = build_code(triples[0], triples[0], triples[0]);
        GlobalCoding g = evaluate_global(net, probe);
        for (int i = 1; i <= qp + 3; ++i) {
            std::string eid = "e" + std::to_string(i);
            std::vector<Row> rows(d, Row(W, 0));
            auto it = g.per_edge.find(eid);
            if (it != g.per_edge.end())
                for (auto& [s, m] : it->second) {
                    const int blk = src_col.at(s);
                    for (int r = 0; r < d; ++r)
                        for (int c = 0; c < d; ++c) rows[r][blk * d + c] = (uint16_t)m.at(r, c);
                }
            char_rows[eid] = std::move(rows);
        }
    }

    auto sel_rows = [&](const std::string& s) {
        std::vector<Row> rows(d, Row(W, 0));
        for (int r = 0; r < d; ++r) rows[r][src_col.at(s) * d + r] = (uint16_t)f.one();
        return rows;
    };

    // Per-terminal fixed data for the fitting test.
    struct TermFit {
        std::string id;
        std::vector<std::string> dem;
        std::vector<Row> extra; // direct edges and relayed char rows
    };
    std::vector<TermFit> tfits;
    for (int t = 1; t <= 27; ++t) {
        TermFit tf;
        tf.id = "t" + std::to_string(t);
        tf.dem = net.demand(tf.id);
        for (auto& eid : net.in_edges(tf.id)) {
            const Edge& e = net.edge(eid);
            if (net.node(e.tail).kind == NodeKind::Source) {
                for (auto& r : sel_rows(e.tail)) tf.extra.push_back(r);
            } else if (e.tail == "n1") {
                for (auto& r : char_rows.at("e1")) tf.extra.push_back(r);
            }
        }
        tfits.push_back(std::move(tf));
    }
    // Contention-heavy terminals first so bad triples die fast.
    std::vector<int> check_order = {26, 0, 13, 24, 25};
    for (int t = 0; t < 27; ++t)
        if (std::find(check_order.begin(), check_order.end(), t) == check_order.end())
            check_order.push_back(t);

    for (auto& t1 : triples)
        for (auto& t2 : triples)
            for (auto& t3 : triples) {
                const std::array<int, 3> chosen[3] = {t1, t2, t3};
                std::vector<Row> vi_rows[3], w4, w5;
                for (int gi = 0; gi < 3; ++gi) {
                    vi_rows[gi] = form_rows(gi, forms[chosen[gi][0]]);
                    for (auto& r : form_rows(gi, forms[chosen[gi][1]])) w4.push_back(r);
                    for (auto& r : form_rows(gi, forms[chosen[gi][2]])) w5.push_back(r);
                }
                bool ok = true;
                for (int ti : check_order) {
                    const TermFit& tf = tfits[ti];
                    std::vector<Row> base = tf.extra;
                    for (int gi = 0; gi < 3; ++gi)
                        for (auto& r : vi_rows[gi]) base.push_back(r);
                    std::vector<Row> selectors;
                    for (auto& s : tf.dem)
                        for (auto& r : sel_rows(s)) selectors.push_back(r);
                    if (!fit_two_capacities(f, W, d, base, w4, w5, selectors)) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                // Candidate routing works; build the full code and let
                // extend_terminal pick every terminal's mixes and decodes.
                VlncCode code = build_code(t1, t2, t3);
                GlobalCoding g = evaluate_global(net, code);
                bool complete = true;
                for (int t = 1; t <= 27 && complete; ++t) {
                    std::string tid = "t" + std::to_string(t);
                    auto ext = extend_terminal(net, g, tid);
                    if (!ext) {
                        complete = false;
                        break;
                    }
                    for (auto& [k, m] : ext->adj) code.set_adj(k.first, k.second, m);
                    for (auto& [e, m] : ext->src) code.set_src(net.edge(e).tail, e, m);
                    for (auto& [k, m] : ext->dec) code.set_dec(k.first, tid, k.second, m);
                }
                if (!complete) continue;
                auto report = verify_solution(net, code);
                if (report.pass) return code;
            }
    raise(ErrorKind::InvalidArg, "no component-routing code found for n2-dim2");
}

} // namespace vlnc
