#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vlnc/algebra.hpp"
#include "vlnc/network.hpp"

namespace vlnc {

// A vector linear network code: one d x d local coding matrix per coding pair.
// Missing pairs mean the zero matrix. Terminal decoding declares one matrix
// per (in-edge, demand-block), so block j of terminal t computes
//   sum over e in In(t) of dec(e,t,j) * y_e.
class VlncCode {
public:
    VlncCode() = default;
    VlncCode(const Domain& dom, int dim, std::string name = "");

    const Domain& dom() const { return *dom_; }
    const Domain* dom_ptr() const { return dom_; }
    int dim() const { return dim_; }
    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

    void set_src(const std::string& source, const std::string& edge, Mat m);
    void set_adj(const std::string& from_edge, const std::string& to_edge, Mat m);
    void set_dec(const std::string& edge, const std::string& terminal, int block, Mat m);

    // Zero matrix when the pair is absent.
    Mat src(const std::string& source, const std::string& edge) const;
    Mat adj(const std::string& from_edge, const std::string& to_edge) const;
    Mat dec(const std::string& edge, const std::string& terminal, int block) const;

    bool has_dec_for(const std::string& terminal, int block) const;

    struct SrcKey {
        std::string source, edge;
        auto operator<=>(const SrcKey&) const = default;
    };
    struct AdjKey {
        std::string from, to;
        auto operator<=>(const AdjKey&) const = default;
    };
    struct DecKey {
        std::string edge, terminal;
        int block;
        auto operator<=>(const DecKey&) const = default;
    };

    const std::map<SrcKey, Mat>& src_locals() const { return src_; }
    const std::map<AdjKey, Mat>& adj_locals() const { return adj_; }
    const std::map<DecKey, Mat>& dec_locals() const { return dec_; }

private:
    void check_mat(const Mat& m) const;

    const Domain* dom_ = nullptr;
    int dim_ = 0;
    std::string name_;
    std::map<SrcKey, Mat> src_;
    std::map<AdjKey, Mat> adj_;
    std::map<DecKey, Mat> dec_;
};

// Per edge, the matrices G_{e,s} with y_e = sum_s G_{e,s} x_s. Only sources in
// the edge's support appear.
struct GlobalCoding {
    const Domain* dom = nullptr;
    int dim = 0;
    std::map<std::string, std::map<std::string, Mat>> per_edge;

    // Zero matrix when the coefficient is absent.
    Mat coeff(const std::string& edge, const std::string& source) const;
};

// Composes local matrices along the topological order. Throws
// InconsistentCode when a local key does not match the network's adjacency.
GlobalCoding evaluate_global(const Network& net, const VlncCode& code);

struct TerminalResult {
    std::string terminal;
    bool pass = false;
    int failed_block = -1;        // demand index on failure
    std::string mismatched_source; // demanded source whose block is wrong
};

struct VerifyReport {
    bool pass = false;
    std::vector<TerminalResult> terminals;

    const TerminalResult* result_for(const std::string& terminal) const;
};

// Exact identity check: terminal t passes iff for every demand block j the
// declared decode matrices satisfy sum_e dec(e,t,j) G_{e,s} = [s == s_j] I for
// all sources s. Works over fields and rings.
VerifyReport verify_solution(const Network& net, const VlncCode& code);

// Decode matrices keyed by (in-edge, demand block).
using DecodeWitness = std::map<std::pair<std::string, int>, Mat>;

// Field-only existence test: the stacked demand selectors of t must lie in the
// row space of the stacked in-edge global matrices; the witness comes from
// mat_solve_left. Returns nullopt when no decode exists.
std::optional<DecodeWitness> decodable(const Network& net, const GlobalCoding& global,
                                       const std::string& terminal);

// Block-diagonal k-fold repetition; dimension becomes k*d.
VlncCode repeat_code(const VlncCode& code, int k);

// Concrete-message simulation, an oracle independent of evaluate_global:
// assigns explicit source vectors and propagates them edge by edge.
using MessageAssignment = std::map<std::string, std::vector<int>>;

struct SimulationResult {
    std::map<std::string, std::vector<int>> edge_vectors;
    std::map<std::string, std::vector<std::vector<int>>> decoded; // terminal -> blocks
};

SimulationResult simulate(const Network& net, const VlncCode& code,
                          const MessageAssignment& messages);

// Code file format:
//   code <name> domain=<p|p^n|ring:p,k> dim=<d>
//   local src <source> <edge> <matrix>
//   local adj <edge> <edge> <matrix>
//   local dec <edge> <terminal> <block-index> <matrix>
VlncCode parse_code(std::istream& in);
VlncCode parse_code_string(const std::string& text);
std::string serialize_code(const VlncCode& code);

const Domain& domain_from_tag(const std::string& tag);

} // namespace vlnc
