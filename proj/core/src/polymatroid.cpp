#include "vlnc/polymatroid.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

namespace vlnc {

void RankFunction::set(uint32_t mask, int value) {
    if (mask >= table_.size()) raise(ErrorKind::InvalidArg, "subset mask out of range");
    if (value < 0) raise(ErrorKind::InvalidArg, "rank values must be nonnegative");
    table_[mask] = value;
}

int RankFunction::at(uint32_t mask) const {
    if (mask >= table_.size()) raise(ErrorKind::InvalidArg, "subset mask out of range");
    if (table_[mask] < 0) raise(ErrorKind::IncompleteRank, "rank undefined for a subset");
    return table_[mask];
}

bool RankFunction::complete() const {
    return std::all_of(table_.begin(), table_.end(), [](int v) { return v >= 0; });
}

AxiomReport check_axioms(const RankFunction& r) {
    if (!r.complete()) raise(ErrorKind::IncompleteRank, "rank table does not cover all subsets");
    const int n = r.ground_size();
    const uint32_t full = (n == 32 ? 0xffffffffu : (1u << n) - 1);
    AxiomReport rep;
    if (r.at(0) != 0) {
        rep.failed_axiom = "P1";
        return rep;
    }
    // Monotone: enough to check one-element extensions.
    for (uint32_t a = 0; a <= full; ++a)
        for (int i = 0; i < n; ++i) {
            if (a & (1u << i)) continue;
            if (r.at(a) > r.at(a | (1u << i))) {
                rep.failed_axiom = "P2";
                rep.witness_a = a;
                rep.witness_b = a | (1u << i);
                return rep;
            }
        }
    // Submodular: local exchange form, witness reported as (A+{i}, A+{j}).
    for (uint32_t a = 0; a <= full; ++a)
        for (int i = 0; i < n; ++i) {
            if (a & (1u << i)) continue;
            for (int j = i + 1; j < n; ++j) {
                if (a & (1u << j)) continue;
                const uint32_t ai = a | (1u << i), aj = a | (1u << j);
                if (r.at(ai) + r.at(aj) < r.at(ai | aj) + r.at(a)) {
                    rep.failed_axiom = "P3";
                    rep.witness_a = ai;
                    rep.witness_b = aj;
                    return rep;
                }
            }
        }
    rep.ok = true;
    return rep;
}

std::vector<std::vector<int>> members(const RankFunction& r) {
    auto ax = check_axioms(r);
    if (!ax.ok) raise(ErrorKind::NotPolymatroid, "axiom " + ax.failed_axiom + " fails");
    const int n = r.ground_size();
    const uint32_t full = (1u << n) - 1;
    std::vector<std::vector<int>> out;
    std::vector<int> x(n, 0);
    // Product space bounded by singleton ranks, then filtered by all subsets.
    auto ok = [&] {
        for (uint32_t a = 1; a <= full; ++a) {
            int sum = 0;
            for (int i = 0; i < n; ++i)
                if (a & (1u << i)) sum += x[i];
            if (sum > r.at(a)) return false;
        }
        return true;
    };
    for (;;) {
        if (ok()) out.push_back(x);
        int i = n - 1;
        while (i >= 0 && x[i] == r.at(1u << i)) x[i--] = 0;
        if (i < 0) break;
        ++x[i];
    }
    return out;
}

RankFunction induced_rank(const SubspaceFamily& fam) {
    const int n = fam.size();
    for (auto& b : fam.bases) {
        if (b.dom_ptr() != fam.field) raise(ErrorKind::FieldMismatch, "basis over wrong field");
        if (b.cols() != fam.ambient) raise(ErrorKind::ShapeError, "basis column count != ambient");
    }
    RankFunction r(n);
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<const Mat*> parts;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) parts.push_back(&fam.bases[i]);
        r.set(mask, parts.empty() ? 0 : mat_stack_rank(parts));
    }
    return r;
}

InducedPolymatroid induce_from_code(const Network& net, const VlncCode& code) {
    if (!code.dom().is_field())
        raise(ErrorKind::UnsupportedDomain, "induce_from_code requires a field domain");
    auto report = verify_solution(net, code);
    if (!report.pass) {
        std::string bad;
        for (auto& t : report.terminals)
            if (!t.pass) bad = t.terminal;
        raise(ErrorKind::NotASolution, "code fails verify_solution at terminal " + bad);
    }
    const Field& f = static_cast<const Field&>(code.dom());
    const int d = code.dim();
    auto srcs = net.sources();
    const int ambient = d * (int)srcs.size();
    GlobalCoding g = evaluate_global(net, code);

    InducedPolymatroid out;
    out.family.field = &f;
    out.family.ambient = ambient;

    auto add_space = [&](const Mat& rows) -> int {
        Mat canon = mat_rowspace_canon(rows);
        for (int i = 0; i < (int)out.family.bases.size(); ++i)
            if (out.family.bases[i] == canon) return i;
        out.family.bases.push_back(canon);
        return (int)out.family.bases.size() - 1;
    };

    for (size_t si = 0; si < srcs.size(); ++si) {
        Mat sel(f, d, ambient);
        for (int r = 0; r < d; ++r) sel.set(r, (int)si * d + r, f.one());
        out.map.of_source[srcs[si]] = add_space(sel);
    }
    for (auto& e : net.edges()) {
        Mat rows(f, d, ambient);
        for (size_t si = 0; si < srcs.size(); ++si) {
            Mat c = g.coeff(e.id, srcs[si]);
            for (int r = 0; r < d; ++r)
                for (int j = 0; j < d; ++j) rows.set(r, (int)si * d + j, c.at(r, j));
        }
        out.map.of_edge[e.id] = add_space(rows);
    }
    out.map.ground_size = (int)out.family.bases.size();
    if (out.map.ground_size > 24)
        raise(ErrorKind::InvalidArg, "induced ground set exceeds desk scale");
    out.rank = induced_rank(out.family);
    return out;
}

DpReport check_dp_map(const Network& net, int d, const RankFunction& r, const GroundMap& f) {
    DpReport rep;
    auto ax = check_axioms(r);
    if (!ax.ok) raise(ErrorKind::NotPolymatroid, "axiom " + ax.failed_axiom + " fails");

    auto source_elem = [&](const std::string& s) {
        auto it = f.of_source.find(s);
        if (it == f.of_source.end()) raise(ErrorKind::IncompleteMap, "source not mapped: " + s);
        return it->second;
    };
    auto edge_elem = [&](const std::string& e) {
        auto it = f.of_edge.find(e);
        if (it == f.of_edge.end()) raise(ErrorKind::IncompleteMap, "edge not mapped: " + e);
        return it->second;
    };

    // D1: one-to-one on sources.
    std::map<int, std::string> seen;
    for (auto& s : net.sources()) {
        int e = source_elem(s);
        auto [it, fresh] = seen.emplace(e, s);
        if (!fresh) {
            rep.failed_condition = "D1";
            rep.detail = "sources " + it->second + " and " + s + " share a ground element";
            return rep;
        }
    }
    // D2: the d-uniform vector on source elements is a member, by direct
    // inequality testing against every subset.
    std::vector<int> v(f.ground_size, 0);
    for (auto& s : net.sources()) v[source_elem(s)] += d;
    const uint32_t full = (1u << f.ground_size) - 1;
    for (uint32_t a = 1; a <= full; ++a) {
        int sum = 0;
        for (int i = 0; i < f.ground_size; ++i)
            if (a & (1u << i)) sum += v[i];
        if (sum > r.at(a)) {
            rep.failed_condition = "D2";
            rep.detail = "subset mask " + std::to_string(a);
            return rep;
        }
    }
    // D3: source ranks equal d, edge ranks at most d.
    for (auto& s : net.sources())
        if (r.at(1u << source_elem(s)) != d) {
            rep.failed_condition = "D3";
            rep.detail = "source " + s;
            return rep;
        }
    for (auto& e : net.edges())
        if (r.at(1u << edge_elem(e.id)) > d) {
            rep.failed_condition = "D3";
            rep.detail = "edge " + e.id;
            return rep;
        }
    // D4: outputs add nothing to inputs at every non-source node; terminals
    // output their demanded sources.
    for (auto& node : net.nodes()) {
        if (node.kind == NodeKind::Source) continue;
        uint32_t in_mask = 0, out_mask = 0;
        for (auto& e : net.in_edges(node.id)) in_mask |= 1u << edge_elem(e);
        if (node.kind == NodeKind::Inner) {
            for (auto& e : net.out_edges(node.id)) out_mask |= 1u << edge_elem(e);
        } else {
            for (auto& s : net.demand(node.id)) out_mask |= 1u << source_elem(s);
        }
        if (r.at(in_mask) != r.at(in_mask | out_mask)) {
            rep.failed_condition = "D4";
            rep.detail = "node " + node.id;
            return rep;
        }
    }
    rep.ok = true;
    return rep;
}

DpReport check_dp_induced(const Network& net, const VlncCode& code) {
    if (!code.dom().is_field())
        raise(ErrorKind::UnsupportedDomain, "check_dp_induced requires a field domain");
    auto report = verify_solution(net, code);
    if (!report.pass) raise(ErrorKind::NotASolution, "code fails verify_solution");
    const Field& f = static_cast<const Field&>(code.dom());
    const int d = code.dim();
    auto srcs = net.sources();
    const int ambient = d * (int)srcs.size();
    GlobalCoding g = evaluate_global(net, code);

    // One canonical subspace per source / edge, shared when equal.
    std::vector<Mat> spaces;
    std::map<std::string, int> of_source, of_edge;
    auto add_space = [&](const Mat& rows) -> int {
        Mat canon = mat_rowspace_canon(rows);
        for (int i = 0; i < (int)spaces.size(); ++i)
            if (spaces[i] == canon) return i;
        spaces.push_back(canon);
        return (int)spaces.size() - 1;
    };
    for (size_t si = 0; si < srcs.size(); ++si) {
        Mat sel(f, d, ambient);
        for (int r = 0; r < d; ++r) sel.set(r, (int)si * d + r, f.one());
        of_source[srcs[si]] = add_space(sel);
    }
    for (auto& e : net.edges()) {
        Mat rows(f, d, ambient);
        for (size_t si = 0; si < srcs.size(); ++si) {
            Mat c = g.coeff(e.id, srcs[si]);
            for (int r = 0; r < d; ++r)
                for (int j = 0; j < d; ++j) rows.set(r, (int)si * d + j, c.at(r, j));
        }
        of_edge[e.id] = add_space(rows);
    }

    auto rank_of = [&](const std::set<int>& elems) {
        std::vector<const Mat*> parts;
        for (int i : elems) parts.push_back(&spaces[i]);
        return parts.empty() ? 0 : mat_stack_rank(parts);
    };

    DpReport rep;
    // D1: distinct source selectors are always distinct subspaces, but check.
    std::set<int> src_elems;
    for (auto& s : srcs)
        if (!src_elems.insert(of_source[s]).second) {
            rep.failed_condition = "D1";
            rep.detail = "source " + s;
            return rep;
        }
    // D2 reduced to source subsets: rank(f(S')) >= d |S'| for all S' (the
    // uniform vector is zero outside f(S) and ranks only grow with supersets).
    const int nS = (int)srcs.size();
    if (nS <= 20) {
        for (uint32_t mask = 1; mask < (1u << nS); ++mask) {
            std::set<int> elems;
            int cnt = 0;
            for (int i = 0; i < nS; ++i)
                if (mask & (1u << i)) {
                    elems.insert(of_source[srcs[i]]);
                    ++cnt;
                }
            if (rank_of(elems) < d * cnt) {
                rep.failed_condition = "D2";
                rep.detail = "source subset mask " + std::to_string(mask);
                return rep;
            }
        }
    }
    // D3.
    for (auto& s : srcs)
        if (rank_of({of_source[s]}) != d) {
            rep.failed_condition = "D3";
            rep.detail = "source " + s;
            return rep;
        }
    for (auto& e : net.edges())
        if (rank_of({of_edge[e.id]}) > d) {
            rep.failed_condition = "D3";
            rep.detail = "edge " + e.id;
            return rep;
        }
    // D4.
    for (auto& node : net.nodes()) {
        if (node.kind == NodeKind::Source) continue;
        std::set<int> in_set, both;
        for (auto& e : net.in_edges(node.id)) in_set.insert(of_edge[e]);
        both = in_set;
        if (node.kind == NodeKind::Inner) {
            for (auto& e : net.out_edges(node.id)) both.insert(of_edge[e]);
        } else {
            for (auto& s : net.demand(node.id)) both.insert(of_source[s]);
        }
        if (rank_of(in_set) != rank_of(both)) {
            rep.failed_condition = "D4";
            rep.detail = "node " + node.id;
            return rep;
        }
    }
    rep.ok = true;
    return rep;
}

namespace {

// All subspaces of F^ambient of a given dimension, as canonical basis
// matrices. Enumerates all row-sets and dedupes by canonical form.
std::vector<Mat> subspaces_of_dim(const Field& f, int ambient, int dim) {
    std::vector<Mat> out;
    if (dim == 0) {
        out.emplace_back(f, 0, ambient);
        return out;
    }
    int64_t total = 1;
    for (int i = 0; i < ambient * dim; ++i) total *= f.size();
    for (int64_t idx = 0; idx < total; ++idx) {
        Mat m(f, dim, ambient);
        int64_t t = idx;
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < ambient; ++c) {
                m.set(r, c, (int)(t % f.size()));
                t /= f.size();
            }
        if (mat_rank(m) != dim) continue;
        Mat canon = mat_rowspace_canon(m);
        if (std::find(out.begin(), out.end(), canon) == out.end()) out.push_back(std::move(canon));
    }
    return out;
}

} // namespace

std::optional<SubspaceFamily> find_representation(const RankFunction& r, const Field& f,
                                                  int ambient) {
    auto ax = check_axioms(r);
    if (!ax.ok) raise(ErrorKind::NotPolymatroid, "axiom " + ax.failed_axiom + " fails");
    const int n = r.ground_size();
    if (n > 4 || ambient > 4 || f.size() > 3)
        raise(ErrorKind::InvalidArg, "representability search limited to n<=4, ambient<=4, |F|<=3");

    std::vector<std::vector<Mat>> candidates(n);
    for (int i = 0; i < n; ++i) {
        const int dim = r.at(1u << i);
        if (dim > ambient) return std::nullopt;
        candidates[i] = subspaces_of_dim(f, ambient, dim);
    }

    SubspaceFamily fam;
    fam.field = &f;
    fam.ambient = ambient;
    fam.bases.assign(n, Mat(f, 0, ambient));

    // Depth-first assignment with incremental subset checks over the chosen
    // prefix.
    std::vector<int> pick(n, 0);
    int level = 0;
    auto prefix_ok = [&](int upto) {
        for (uint32_t a = 1; a < (1u << (upto + 1)); ++a) {
            if (!(a & (1u << upto))) continue; // only subsets touching the new element
            std::vector<const Mat*> parts;
            for (int i = 0; i <= upto; ++i)
                if (a & (1u << i)) parts.push_back(&fam.bases[i]);
            if (mat_stack_rank(parts) != r.at(a)) return false;
        }
        return true;
    };
    while (level >= 0) {
        if (level == n) return fam;
        if (pick[level] == (int)candidates[level].size()) {
            pick[level] = 0;
            --level;
            if (level >= 0) ++pick[level];
            continue;
        }
        fam.bases[level] = candidates[level][pick[level]];
        if (prefix_ok(level))
            ++level;
        else
            ++pick[level];
    }
    return std::nullopt;
}

RankFunction parse_rank(std::istream& in) {
    std::string line;
    int lineno = 0;
    RankFunction r;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string kw;
        if (!(ss >> kw)) continue;
        if (kw == "rank") {
            int n;
            if (!(ss >> n)) raise(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": rank needs <n>");
            r = RankFunction(n);
            have_header = true;
        } else if (kw == "set") {
            if (!have_header) raise(ErrorKind::ParseError, "set before rank header");
            uint32_t mask;
            int value;
            if (!(ss >> mask >> value))
                raise(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": set needs <mask> <value>");
            r.set(mask, value);
        } else {
            raise(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": unknown keyword '" + kw + "'");
        }
    }
    if (!have_header) raise(ErrorKind::ParseError, "missing rank header");
    return r;
}

RankFunction parse_rank_string(const std::string& text) {
    std::istringstream ss(text);
    return parse_rank(ss);
}

std::string serialize_rank(const RankFunction& r) {
    std::ostringstream out;
    out << "rank " << r.ground_size() << "\n";
    for (uint32_t mask = 0; mask < (1u << r.ground_size()); ++mask)
        out << "set " << mask << " " << r.at(mask) << "\n";
    return out.str();
}

} // namespace vlnc
