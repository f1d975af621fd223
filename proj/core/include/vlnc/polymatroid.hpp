#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vlnc/code.hpp"

namespace vlnc {

// Integer set function on {0..n-1}; subsets are bitmasks. Candidate rank
// function of a discrete polymatroid.
class RankFunction {
public:
    RankFunction() = default;
    explicit RankFunction(int n) : n_(n), table_((size_t)1 << n, -1) {
        if (n < 0 || n > 24) raise(ErrorKind::InvalidArg, "ground size out of range");
    }

    int ground_size() const { return n_; }
    void set(uint32_t mask, int value);
    int at(uint32_t mask) const;
    bool complete() const;

    bool operator==(const RankFunction& o) const { return n_ == o.n_ && table_ == o.table_; }

private:
    int n_ = 0;
    std::vector<int> table_;
};

struct AxiomReport {
    bool ok = false;
    std::string failed_axiom; // "P1", "P2" or "P3"
    uint32_t witness_a = 0, witness_b = 0;
};

// Checks normalization, monotonicity and submodularity. On a submodularity
// failure the witness pair is (A+{i}, A+{j}) for the first failing triple in
// (A ascending, i < j) order.
AxiomReport check_axioms(const RankFunction& r);

// Exact enumeration of { x >= 0 : |x(A)| <= rank(A) for all A }.
std::vector<std::vector<int>> members(const RankFunction& r);

// One subspace of F^ambient per ground element, as a basis matrix (rows span).
struct SubspaceFamily {
    const Field* field = nullptr;
    int ambient = 0;
    std::vector<Mat> bases;

    int size() const { return (int)bases.size(); }
};

// rank(X) = dim of the sum of the selected subspaces.
RankFunction induced_rank(const SubspaceFamily& fam);

// Map from source/edge identifiers to ground elements.
struct GroundMap {
    std::map<std::string, int> of_source;
    std::map<std::string, int> of_edge;
    int ground_size = 0;
};

struct InducedPolymatroid {
    RankFunction rank;
    GroundMap map;
    SubspaceFamily family;
};

// Builds the subspace family of a verified code: the row space of each
// source's selector and of each edge's stacked global coding matrix. Edges and
// sources with identical row spaces share a ground element, which keeps the
// ground set at desk scale; the induced ranks are unchanged by the sharing.
// Throws NotASolution when verify_solution fails, UnsupportedDomain on rings.
InducedPolymatroid induce_from_code(const Network& net, const VlncCode& code);

struct DpReport {
    bool ok = false;
    std::string failed_condition; // "D1".."D4"
    std::string detail;
};

// The four conditions tying a network and dimension to a rank function and
// ground map: sources injective, the d-uniform source vector is a member,
// source ranks are exactly d and edge ranks at most d, and every non-source
// node's outputs (for terminals: demanded sources) add no rank to its inputs.
DpReport check_dp_map(const Network& net, int d, const RankFunction& r, const GroundMap& f);

// Same four conditions verified directly on the induced subspaces of a
// verified code, computing ranks on demand instead of materializing the 2^n
// table. The membership condition is checked over all source subsets, which
// is equivalent by monotonicity. Usable where the ground set exceeds the
// table scale (large codes).
DpReport check_dp_induced(const Network& net, const VlncCode& code);

// Exhaustive small-instance representability search: one subspace of
// F^ambient per ground element with the prescribed singleton ranks, matching
// the whole rank table. Practical only for n <= 4, ambient <= 4, |F| <= 3.
std::optional<SubspaceFamily> find_representation(const RankFunction& r, const Field& f,
                                                  int ambient);

// Text format: "rank <n>" then one "set <bitmask> <value>" line per subset.
RankFunction parse_rank(std::istream& in);
RankFunction parse_rank_string(const std::string& text);
std::string serialize_rank(const RankFunction& r);

} // namespace vlnc
