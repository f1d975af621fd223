#include "vlnc/code.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

namespace vlnc {

VlncCode::VlncCode(const Domain& dom, int dim, std::string name)
    : dom_(&dom), dim_(dim), name_(std::move(name)) {
    if (dim < 1) raise(ErrorKind::InvalidArg, "code dimension must be >= 1");
}

void VlncCode::check_mat(const Mat& m) const {
    if (m.dom_ptr() != dom_) raise(ErrorKind::FieldMismatch, "local matrix over wrong domain");
    if (m.rows() != dim_ || m.cols() != dim_)
        raise(ErrorKind::ShapeError, "local matrix must be dim x dim");
}

void VlncCode::set_src(const std::string& source, const std::string& edge, Mat m) {
    check_mat(m);
    src_[{source, edge}] = std::move(m);
}

void VlncCode::set_adj(const std::string& from_edge, const std::string& to_edge, Mat m) {
    check_mat(m);
    adj_[{from_edge, to_edge}] = std::move(m);
}

void VlncCode::set_dec(const std::string& edge, const std::string& terminal, int block, Mat m) {
    check_mat(m);
    if (block < 0) raise(ErrorKind::InvalidArg, "negative demand block");
    dec_[{edge, terminal, block}] = std::move(m);
}

Mat VlncCode::src(const std::string& source, const std::string& edge) const {
    auto it = src_.find({source, edge});
    return it == src_.end() ? Mat(*dom_, dim_, dim_) : it->second;
}

Mat VlncCode::adj(const std::string& from_edge, const std::string& to_edge) const {
    auto it = adj_.find({from_edge, to_edge});
    return it == adj_.end() ? Mat(*dom_, dim_, dim_) : it->second;
}

Mat VlncCode::dec(const std::string& edge, const std::string& terminal, int block) const {
    auto it = dec_.find({edge, terminal, block});
    return it == dec_.end() ? Mat(*dom_, dim_, dim_) : it->second;
}

bool VlncCode::has_dec_for(const std::string& terminal, int block) const {
    for (auto& [k, m] : dec_)
        if (k.terminal == terminal && k.block == block) return true;
    return false;
}

Mat GlobalCoding::coeff(const std::string& edge, const std::string& source) const {
    auto eit = per_edge.find(edge);
    if (eit != per_edge.end()) {
        auto sit = eit->second.find(source);
        if (sit != eit->second.end()) return sit->second;
    }
    return Mat(*dom, dim, dim);
}

GlobalCoding evaluate_global(const Network& net, const VlncCode& code) {
    const Domain& dom = code.dom();
    const int d = code.dim();

    for (auto& [k, m] : code.src_locals()) {
        if (!net.has_node(k.source) || !net.has_edge(k.edge) ||
            net.edge(k.edge).tail != k.source || net.node(k.source).kind != NodeKind::Source)
            raise(ErrorKind::InconsistentCode,
                  "src local (" + k.source + "," + k.edge + ") does not match the network");
    }
    for (auto& [k, m] : code.adj_locals()) {
        if (!net.has_edge(k.from) || !net.has_edge(k.to) ||
            net.edge(k.from).head != net.edge(k.to).tail)
            raise(ErrorKind::InconsistentCode,
                  "adj local (" + k.from + "," + k.to + ") does not match the network");
    }

    // Node rank in topological order; edges are evaluated ordered by the rank
    // of their tail so all upstream globals exist.
    auto order = net.topo_order();
    std::map<std::string, int> rank;
    for (size_t i = 0; i < order.size(); ++i) rank[order[i]] = (int)i;

    std::vector<const Edge*> edges;
    for (auto& e : net.edges()) edges.push_back(&e);
    std::sort(edges.begin(), edges.end(), [&](const Edge* a, const Edge* b) {
        if (rank[a->tail] != rank[b->tail]) return rank[a->tail] < rank[b->tail];
        return a->id < b->id;
    });

    GlobalCoding g;
    g.dom = &dom;
    g.dim = d;
    for (const Edge* e : edges) {
        std::map<std::string, Mat> mix;
        if (net.node(e->tail).kind == NodeKind::Source) {
            Mat a = code.src(e->tail, e->id);
            if (!a.is_zero()) mix.emplace(e->tail, std::move(a));
        } else {
            for (auto& in_id : net.in_edges(e->tail)) {
                Mat a = code.adj(in_id, e->id);
                if (a.is_zero()) continue;
                for (auto& [s, gm] : g.per_edge[in_id]) {
                    Mat term = mat_mul(a, gm);
                    auto it = mix.find(s);
                    if (it == mix.end())
                        mix.emplace(s, std::move(term));
                    else
                        it->second = mat_add(it->second, term);
                }
            }
            for (auto it = mix.begin(); it != mix.end();)
                it = it->second.is_zero() ? mix.erase(it) : std::next(it);
        }
        g.per_edge[e->id] = std::move(mix);
    }
    return g;
}

const TerminalResult* VerifyReport::result_for(const std::string& terminal) const {
    for (auto& r : terminals)
        if (r.terminal == terminal) return &r;
    return nullptr;
}

VerifyReport verify_solution(const Network& net, const VlncCode& code) {
    const Domain& dom = code.dom();
    const int d = code.dim();
    GlobalCoding g = evaluate_global(net, code);

    for (auto& [k, m] : code.dec_locals()) {
        if (!net.has_edge(k.edge) || !net.has_node(k.terminal) ||
            net.edge(k.edge).head != k.terminal)
            raise(ErrorKind::InconsistentCode,
                  "dec local (" + k.edge + "," + k.terminal + ") does not match the network");
    }

    VerifyReport report;
    report.pass = true;
    for (auto& t : net.terminals()) {
        const auto& dem = net.demand(t);
        TerminalResult res;
        res.terminal = t;
        res.pass = true;
        auto ins = net.in_edges(t);
        for (int j = 0; j < (int)dem.size() && res.pass; ++j) {
            if (!code.has_dec_for(t, j))
                raise(ErrorKind::IncompleteCode,
                      "terminal " + t + " has no decode matrices for block " + std::to_string(j));
            // Decoded block j as a function of every source must equal the
            // selector of dem[j].
            std::map<std::string, Mat> got;
            for (auto& e : ins) {
                Mat a = code.dec(e, t, j);
                if (a.is_zero()) continue;
                auto eit = g.per_edge.find(e);
                if (eit == g.per_edge.end()) continue;
                for (auto& [s, gm] : eit->second) {
                    Mat term = mat_mul(a, gm);
                    auto it = got.find(s);
                    if (it == got.end())
                        got.emplace(s, std::move(term));
                    else
                        it->second = mat_add(it->second, term);
                }
            }
            for (auto& s : net.sources()) {
                Mat want = s == dem[j] ? Mat::identity(dom, d) : Mat(dom, d, d);
                auto it = got.find(s);
                Mat have = it == got.end() ? Mat(dom, d, d) : it->second;
                if (have != want) {
                    res.pass = false;
                    res.failed_block = j;
                    res.mismatched_source = dem[j];
                    break;
                }
            }
        }
        if (!res.pass) report.pass = false;
        report.terminals.push_back(std::move(res));
    }
    return report;
}

std::optional<DecodeWitness> decodable(const Network& net, const GlobalCoding& global,
                                       const std::string& terminal) {
    if (!global.dom->is_field())
        raise(ErrorKind::UnsupportedDomain, "decodable requires a field domain");
    const Domain& dom = *global.dom;
    const int d = global.dim;
    auto srcs = net.sources();
    const int ncols = d * (int)srcs.size();

    auto ins = net.in_edges(terminal);
    Mat stack(dom, 0, ncols);
    for (auto& e : ins) {
        Mat row(dom, d, ncols);
        for (size_t si = 0; si < srcs.size(); ++si) {
            Mat c = global.coeff(e, srcs[si]);
            for (int r = 0; r < d; ++r)
                for (int j = 0; j < d; ++j) row.set(r, (int)si * d + j, c.at(r, j));
        }
        stack = mat_vcat(stack, row);
    }

    const auto& dem = net.demand(terminal);
    Mat want(dom, 0, ncols);
    for (auto& s : dem) {
        Mat sel(dom, d, ncols);
        auto si = std::find(srcs.begin(), srcs.end(), s) - srcs.begin();
        for (int r = 0; r < d; ++r) sel.set(r, (int)si * d + r, dom.one());
        want = mat_vcat(want, sel);
    }

    auto X = mat_solve_left(stack, want);
    if (!X) return std::nullopt;
    DecodeWitness w;
    for (size_t i = 0; i < ins.size(); ++i)
        for (int j = 0; j < (int)dem.size(); ++j) {
            Mat piece = mat_submatrix(*X, j * d, (int)i * d, d, d);
            if (!piece.is_zero()) w[{ins[i], j}] = std::move(piece);
        }
    return w;
}

VlncCode repeat_code(const VlncCode& code, int k) {
    if (k < 1) raise(ErrorKind::InvalidArg, "repeat factor must be >= 1");
    if (!code.dom().is_field())
        raise(ErrorKind::UnsupportedDomain, "repeat_code requires a field domain");
    VlncCode out(code.dom(), code.dim() * k, code.name());
    for (auto& [key, m] : code.src_locals()) out.set_src(key.source, key.edge, mat_block_diag(m, k));
    for (auto& [key, m] : code.adj_locals()) out.set_adj(key.from, key.to, mat_block_diag(m, k));
    for (auto& [key, m] : code.dec_locals())
        out.set_dec(key.edge, key.terminal, key.block, mat_block_diag(m, k));
    return out;
}

SimulationResult simulate(const Network& net, const VlncCode& code,
                          const MessageAssignment& messages) {
    const Domain& dom = code.dom();
    const int d = code.dim();
    for (auto& s : net.sources())
        if (!messages.count(s) || (int)messages.at(s).size() != d)
            raise(ErrorKind::InvalidArg, "message assignment must give a d-vector per source");

    auto as_col = [&](const std::vector<int>& v) {
        Mat m(dom, d, 1);
        for (int i = 0; i < d; ++i) m.set(i, 0, v[i]);
        return m;
    };
    auto as_vec = [&](const Mat& m) {
        std::vector<int> v(d);
        for (int i = 0; i < d; ++i) v[i] = m.at(i, 0);
        return v;
    };

    auto order = net.topo_order();
    std::map<std::string, int> rank;
    for (size_t i = 0; i < order.size(); ++i) rank[order[i]] = (int)i;
    std::vector<const Edge*> edges;
    for (auto& e : net.edges()) edges.push_back(&e);
    std::sort(edges.begin(), edges.end(), [&](const Edge* a, const Edge* b) {
        if (rank[a->tail] != rank[b->tail]) return rank[a->tail] < rank[b->tail];
        return a->id < b->id;
    });

    SimulationResult out;
    std::map<std::string, Mat> carried;
    for (const Edge* e : edges) {
        Mat y(dom, d, 1);
        if (net.node(e->tail).kind == NodeKind::Source) {
            y = mat_mul(code.src(e->tail, e->id), as_col(messages.at(e->tail)));
        } else {
            for (auto& in_id : net.in_edges(e->tail))
                y = mat_add(y, mat_mul(code.adj(in_id, e->id), carried.at(in_id)));
        }
        out.edge_vectors[e->id] = as_vec(y);
        carried.emplace(e->id, std::move(y));
    }
    for (auto& t : net.terminals()) {
        const auto& dem = net.demand(t);
        std::vector<std::vector<int>> blocks;
        for (int j = 0; j < (int)dem.size(); ++j) {
            Mat y(dom, d, 1);
            for (auto& e : net.in_edges(t)) y = mat_add(y, mat_mul(code.dec(e, t, j), carried.at(e)));
            blocks.push_back(as_vec(y));
        }
        out.decoded[t] = std::move(blocks);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Code file format

const Domain& domain_from_tag(const std::string& tag) {
    try {
        if (tag.rfind("ring:", 0) == 0) {
            auto comma = tag.find(',', 5);
            if (comma == std::string::npos)
                raise(ErrorKind::ParseError, "ring tag needs 'ring:p,k'");
            int p = std::stoi(tag.substr(5, comma - 5));
            int k = std::stoi(tag.substr(comma + 1));
            return MatrixRing::get(p, k);
        }
        auto caret = tag.find('^');
        if (caret == std::string::npos) return Field::get(std::stoi(tag), 1);
        return Field::get(std::stoi(tag.substr(0, caret)), std::stoi(tag.substr(caret + 1)));
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        raise(ErrorKind::ParseError, "bad domain tag '" + tag + "'");
    }
}

VlncCode parse_code(std::istream& in) {
    std::string line;
    int lineno = 0;
    VlncCode code;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string kw;
        if (!(ss >> kw)) continue;
        try {
            if (kw == "code") {
                std::string name, domkv, dimkv;
                if (!(ss >> name >> domkv >> dimkv))
                    raise(ErrorKind::ParseError, "code needs <name> domain=<tag> dim=<d>");
                if (domkv.rfind("domain=", 0) != 0 || dimkv.rfind("dim=", 0) != 0)
                    raise(ErrorKind::ParseError, "code needs domain= and dim=");
                const Domain& dom = domain_from_tag(domkv.substr(7));
                code = VlncCode(dom, std::stoi(dimkv.substr(4)), name);
                have_header = true;
            } else if (kw == "local") {
                if (!have_header) raise(ErrorKind::ParseError, "local before code header");
                std::string kind;
                if (!(ss >> kind)) raise(ErrorKind::ParseError, "local needs a kind");
                if (kind == "src") {
                    std::string s, e, rest;
                    if (!(ss >> s >> e)) raise(ErrorKind::ParseError, "local src <source> <edge> <matrix>");
                    std::getline(ss, rest);
                    code.set_src(s, e, mat_from_string(code.dom(), rest));
                } else if (kind == "adj") {
                    std::string a, b, rest;
                    if (!(ss >> a >> b)) raise(ErrorKind::ParseError, "local adj <edge> <edge> <matrix>");
                    std::getline(ss, rest);
                    code.set_adj(a, b, mat_from_string(code.dom(), rest));
                } else if (kind == "dec") {
                    std::string e, t, rest;
                    int block;
                    if (!(ss >> e >> t >> block))
                        raise(ErrorKind::ParseError, "local dec <edge> <terminal> <block> <matrix>");
                    std::getline(ss, rest);
                    code.set_dec(e, t, block, mat_from_string(code.dom(), rest));
                } else {
                    raise(ErrorKind::ParseError, "unknown local kind '" + kind + "'");
                }
            } else {
                raise(ErrorKind::ParseError, "unknown keyword '" + kw + "'");
            }
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::ParseError && std::string(e.what()).find("line ") != std::string::npos)
                throw;
            raise(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!have_header) raise(ErrorKind::ParseError, "missing code header");
    return code;
}

VlncCode parse_code_string(const std::string& text) {
    std::istringstream ss(text);
    return parse_code(ss);
}

std::string serialize_code(const VlncCode& code) {
    std::ostringstream out;
    out << "code " << (code.name().empty() ? "unnamed" : code.name()) << " domain="
        << code.dom().name() << " dim=" << code.dim() << "\n";
    for (auto& [k, m] : code.src_locals())
        out << "local src " << k.source << " " << k.edge << " " << m.to_string() << "\n";
    for (auto& [k, m] : code.adj_locals())
        out << "local adj " << k.from << " " << k.to << " " << m.to_string() << "\n";
    for (auto& [k, m] : code.dec_locals())
        out << "local dec " << k.edge << " " << k.terminal << " " << k.block << " "
            << m.to_string() << "\n";
    return out.str();
}

} // namespace vlnc
