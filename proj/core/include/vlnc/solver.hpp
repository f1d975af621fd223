#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vlnc/code.hpp"

namespace vlnc {

// Constraint on the global coefficient G_{edge,source} of the searched code.
// Zero / NonZero gate the coefficient; Fixed pins it to a given matrix.
struct PinConstraint {
    enum class Kind { Zero, NonZero, Fixed };
    std::string source;
    std::string edge;
    Kind kind = Kind::Zero;
    std::optional<Mat> value; // Fixed only
};

struct SearchStats {
    uint64_t assignments = 0; // interior assignments applied
    uint64_t prunes = 0;      // branches cut by a terminal check
    double elapsed_sec = 0;
    double raw_space = 0;     // product of per-node assignment spaces
};

struct SearchConfig {
    const Field* field = nullptr;
    int dim = 1;
    std::vector<PinConstraint> pins;
    // The engine always searches the quotient where source->inner locals are
    // identity (no loss: downstream locals absorb them), which subsumes the
    // single-out-edge normalization; the flag is kept for interface parity.
    bool normalize = false;
    uint64_t max_assignments = 0; // 0 = unlimited; exceeding -> Inconclusive
    double time_budget_sec = 0;   // 0 = unlimited; exceeding -> Inconclusive
    // Work guard: exceeding it (or a single node's local space exceeding it)
    // raises SpaceTooLarge.
    double space_ceiling = 4294967296.0; // 2^32
    int jobs = 1;
    // Default node order completes terminals as early as possible; the
    // lexicographic order is plain topological with identifier tie-breaks.
    bool lexicographic_order = false;
    std::function<void(const SearchStats&)> progress;
};

enum class SolveStatus { Solvable, Unsolvable, Inconclusive };
const char* to_string(SolveStatus s);

struct SearchOutcome {
    SolveStatus status = SolveStatus::Inconclusive;
    std::optional<VlncCode> witness; // passes verify_solution when Solvable
    SearchStats stats;
    std::string note;
};

// Exhaustive two-phase search for a d-dimensional solution over a field.
// Interior coding states are enumerated per inner node in a deterministic
// order with terminal-feasibility pruning; terminal-adjacent edges and decode
// matrices are never enumerated globally, each terminal is decided
// independently against the interior state. Unsolvable only on exhaustion.
SearchOutcome solve(const Network& net, const SearchConfig& cfg);

struct CensusPredicate {
    enum class Kind { GlobalZero, GlobalNonZero, Custom };
    Kind kind = Kind::Custom;
    std::string source, edge; // GlobalZero / GlobalNonZero
    std::function<bool(const VlncCode&, const GlobalCoding&)> fn; // Custom

    std::string describe() const;

    static CensusPredicate global_zero(std::string source, std::string edge);
    static CensusPredicate global_nonzero(std::string source, std::string edge);
};

struct CensusResult {
    bool completed = true;  // false when a user limit stopped the enumeration
    bool all_satisfy = false;
    bool vacuous = false;   // the network has no solution at all
    uint64_t solutions = 0; // distinct interior codings extending to solutions
    std::optional<VlncCode> counterexample;
    SearchStats stats;
    std::string note;
};

// Enumerates every solvable interior coding and evaluates the predicate on a
// materialized solution for each; stops at the first counterexample.
CensusResult census(const Network& net, const SearchConfig& cfg, const CensusPredicate& pred);

struct ProbeEntry {
    SolveStatus status = SolveStatus::Inconclusive;
    std::string error; // non-empty when the per-field search threw
    SearchStats stats;
};

// Independent solve per field; per-field errors are recorded, not fatal.
std::map<std::string, ProbeEntry> probe_characteristics(const Network& net, int d,
                                                        const std::vector<const Field*>& fields,
                                                        const SearchConfig& base);

// Local matrices and decode matrices completing one terminal against fixed
// interior globals.
struct TerminalExtension {
    std::map<std::pair<std::string, std::string>, Mat> adj; // (edge into tail, terminal edge)
    std::map<std::string, Mat> src;                         // terminal edge from a source
    DecodeWitness dec;
};

// Decides whether `terminal` can recover its demands given the globals of all
// non-terminal-adjacent edges, choosing the mixes its incoming edges carry.
std::optional<TerminalExtension> extend_terminal(const Network& net, const GlobalCoding& interior,
                                                 const std::string& terminal);

// Derives a 2-dimensional code for n2(q') over a field whose characteristic
// divides q': the char part is the characteristic-gated code, the m3-part is
// found by searching component-routing assignments of the nine middle edges
// and extending every terminal via extend_terminal. Validated by
// verify_solution before being returned.
VlncCode derive_n2_dim2(int qp, const Field& f);

} // namespace vlnc
