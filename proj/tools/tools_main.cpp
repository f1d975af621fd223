// vlnc: command-line workbench for vector linear network coding.
//
// Subcommands: validate, verify, solve, census, probe, zoo, repro.
// Exit codes: 0 pass/solvable, 1 fail/unsolvable/counterexample,
// 2 usage or input error, 3 inconclusive.
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "vlnc/polymatroid.hpp"
#include "vlnc/repro.hpp"
#include "vlnc/solver.hpp"
#include "vlnc/zoo.hpp"

using nlohmann::json;
using namespace vlnc;

namespace {

using Clock = std::chrono::steady_clock;

// FNV-1a, enough to fingerprint run inputs in the manifest.
uint64_t fnv1a(const std::string& data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct Manifest {
    std::string command;
    std::vector<std::string> parameters;
    std::map<std::string, std::string> input_digests;
    std::string outcome;
    Clock::time_point start = Clock::now();

    void record_file(const std::string& path, const std::string& content) {
        std::ostringstream hex;
        hex << std::hex << fnv1a(content);
        input_digests[path] = hex.str();
    }

    ~Manifest() {
        json j;
        j["command"] = command;
        j["parameters"] = parameters;
        j["inputs"] = input_digests;
        j["outcome"] = outcome;
        j["wall_ms"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
        std::cerr << "manifest " << j.dump() << "\n";
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::InvalidArg, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// A --net argument is either a zoo mnemonic or a file path.
Network load_network(const std::string& spec, Manifest& mf) {
    std::ifstream probe(spec);
    if (probe.good()) {
        std::string content = slurp(spec);
        mf.record_file(spec, content);
        return parse_network_string(content);
    }
    return zoo_network(spec);
}

std::vector<PinConstraint> parse_pins(const std::vector<std::string>& pins, const Field* field,
                                      int dim) {
    std::vector<PinConstraint> out;
    for (auto& p : pins) {
        auto eq = p.find('=');
        auto comma = p.find(',');
        if (eq == std::string::npos || comma == std::string::npos || comma > eq)
            raise(ErrorKind::InvalidArg, "pin must be <source>,<edge>=zero|nonzero|<matrix>: " + p);
        PinConstraint pc;
        pc.source = p.substr(0, comma);
        pc.edge = p.substr(comma + 1, eq - comma - 1);
        std::string rhs = p.substr(eq + 1);
        if (rhs == "zero") {
            pc.kind = PinConstraint::Kind::Zero;
        } else if (rhs == "nonzero") {
            pc.kind = PinConstraint::Kind::NonZero;
        } else {
            pc.kind = PinConstraint::Kind::Fixed;
            if (!field) raise(ErrorKind::InvalidArg, "fixed pins need --field");
            Mat m = mat_from_string(*field, rhs);
            if (m.rows() != dim || m.cols() != dim)
                raise(ErrorKind::InvalidArg, "pin matrix must be dim x dim");
            pc.value = std::move(m);
        }
        out.push_back(std::move(pc));
    }
    return out;
}

const Field& field_from_tag(const std::string& tag) {
    const Domain& d = domain_from_tag(tag);
    if (!d.is_field()) raise(ErrorKind::InvalidArg, "expected a field tag, got " + tag);
    return static_cast<const Field&>(d);
}

json stats_json(const SearchStats& s) {
    return json{{"assignments", s.assignments},
                {"prunes", s.prunes},
                {"elapsed_sec", s.elapsed_sec},
                {"raw_space", s.raw_space}};
}

void print_progress(const SearchStats& s) {
    std::cerr << "progress assignments=" << s.assignments << " prunes=" << s.prunes
              << " elapsed=" << s.elapsed_sec << "\n";
}

void print_progress_json(const SearchStats& s) {
    std::cerr << json{{"event", "progress"},
                      {"assignments", s.assignments},
                      {"prunes", s.prunes},
                      {"elapsed_sec", s.elapsed_sec}}
                     .dump()
              << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vector linear network coding workbench"};
    app.require_subcommand(1);
    // Let global flags like --json appear after the subcommand too.
    app.fallthrough();
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable JSON output");

    // validate ------------------------------------------------------------
    auto* validate_cmd = app.add_subcommand("validate", "check a network file");
    std::string validate_file;
    validate_cmd->add_option("network-file", validate_file)->required();

    // verify --------------------------------------------------------------
    auto* verify_cmd = app.add_subcommand("verify", "verify a code file against a network file");
    std::string verify_net, verify_code;
    bool verify_poly = false;
    std::string rank_out;
    verify_cmd->add_option("network-file", verify_net)->required();
    verify_cmd->add_option("code-file", verify_code)->required();
    verify_cmd->add_flag("--polymatroid", verify_poly,
                         "also check the induced polymatroid conditions");
    verify_cmd->add_option("--emit-rank", rank_out, "write the induced rank table to a file");

    // search family ---------------------------------------------------------
    std::string net_spec, field_tag = "2", fields_list = "2,3";
    int dim = 1, jobs = 1;
    double budget = 0, ceiling = 4294967296.0;
    uint64_t max_assignments = 0;
    bool normalize = false, lexicographic = false, progress = false;
    std::vector<std::string> pin_args;
    std::string predicate;

    auto add_search_options = [&](CLI::App* cmd, bool with_field) {
        cmd->add_option("--net", net_spec, "zoo mnemonic or network file")->required();
        if (with_field) cmd->add_option("--field", field_tag, "field tag, e.g. 2, 2^2, 5");
        cmd->add_option("--dim", dim, "message dimension");
        cmd->add_option("--pin", pin_args, "<source>,<edge>=zero|nonzero|<matrix>");
        cmd->add_flag("--normalize", normalize, "accepted; subsumed by the searched quotient");
        cmd->add_option("--budget", budget, "time budget in seconds");
        cmd->add_option("--max-assignments", max_assignments, "assignment budget");
        cmd->add_option("--ceiling", ceiling, "work guard (default 2^32)");
        cmd->add_option("--jobs", jobs, "parallel workers");
        cmd->add_flag("--lexicographic", lexicographic,
                      "plain topological node order instead of the readiness heuristic");
        cmd->add_flag("--progress", progress, "emit progress lines to stderr");
    };

    auto* solve_cmd = app.add_subcommand("solve", "exhaustive solvability search");
    add_search_options(solve_cmd, true);
    auto* census_cmd = app.add_subcommand("census", "check a predicate over every solution");
    add_search_options(census_cmd, true);
    census_cmd->add_option("--predicate", predicate, "zero(<source>,<edge>) or nonzero(...)")
        ->required();
    auto* probe_cmd = app.add_subcommand("probe", "solvability per field");
    add_search_options(probe_cmd, false);
    probe_cmd->add_option("--fields", fields_list, "comma-separated field tags");

    // zoo -------------------------------------------------------------------
    auto* zoo_cmd = app.add_subcommand("zoo", "stock networks and codes");
    auto* zoo_list = zoo_cmd->add_subcommand("list", "list zoo entries");
    auto* zoo_emit = zoo_cmd->add_subcommand("emit", "emit a network or code file");
    std::string emit_name, emit_out;
    zoo_emit->add_option("name", emit_name)->required();
    zoo_emit->add_option("--field", field_tag, "domain tag for codes");
    zoo_emit->add_option("--dim", dim, "dimension for codes that take one");
    zoo_emit->add_option("-o,--out", emit_out, "output file (default stdout)");

    // repro -------------------------------------------------------------------
    auto* repro_cmd = app.add_subcommand("repro", "run the full reproduction scoreboard");

    CLI11_PARSE(app, argc, argv);

    Manifest mf;
    mf.command = app.get_subcommands().front()->get_name();
    for (int i = 1; i < argc; ++i) mf.parameters.push_back(argv[i]);
    mf.outcome = "error";

    try {
        if (*validate_cmd) {
            std::string content = slurp(validate_file);
            mf.record_file(validate_file, content);
            Network net = parse_network_string(content);
            auto viol = validate(net);
            if (as_json) {
                json j = json::array();
                for (auto& v : viol)
                    j.push_back({{"kind", v.kind}, {"subject", v.subject}, {"detail", v.detail}});
                std::cout << json{{"violations", j}}.dump(2) << "\n";
            } else {
                for (auto& v : viol)
                    std::cout << v.kind << " " << v.subject
                              << (v.detail.empty() ? "" : " (" + v.detail + ")") << "\n";
                if (viol.empty()) std::cout << "OK\n";
            }
            mf.outcome = viol.empty() ? "ok" : "violations";
            return viol.empty() ? 0 : 1;
        }

        if (*verify_cmd) {
            std::string ncontent = slurp(verify_net), ccontent = slurp(verify_code);
            mf.record_file(verify_net, ncontent);
            mf.record_file(verify_code, ccontent);
            Network net = parse_network_string(ncontent);
            VlncCode code = parse_code_string(ccontent);
            auto report = verify_solution(net, code);
            json jterm = json::array();
            for (auto& t : report.terminals) {
                if (as_json)
                    jterm.push_back({{"terminal", t.terminal},
                                     {"pass", t.pass},
                                     {"failed_block", t.failed_block},
                                     {"source", t.mismatched_source}});
                else
                    std::cout << t.terminal << ": " << (t.pass ? "ok" : "FAIL") << "\n";
            }
            int poly_rc = 0;
            std::string poly_msg;
            if (verify_poly && report.pass) {
                if (code.dom().is_field()) {
                    DpReport rep;
                    try {
                        auto ind = induce_from_code(net, code);
                        rep = check_dp_map(net, code.dim(), ind.rank, ind.map);
                        if (!rank_out.empty()) {
                            std::ofstream out(rank_out);
                            out << serialize_rank(ind.rank);
                        }
                    } catch (const Error& e) {
                        if (e.kind() != ErrorKind::InvalidArg) throw;
                        // Ground set past the table scale: check the same
                        // conditions directly on the subspaces.
                        rep = check_dp_induced(net, code);
                        if (!rank_out.empty())
                            poly_msg = "(rank table too large to emit) ";
                    }
                    poly_msg += rep.ok ? "conditions D1-D4 hold"
                                       : rep.failed_condition + " fails at " + rep.detail;
                    if (!rep.ok) poly_rc = 1;
                } else {
                    poly_msg = "polymatroid checks need a field domain; skipped";
                }
            }
            if (as_json) {
                std::cout << json{{"pass", report.pass},
                                  {"terminals", jterm},
                                  {"polymatroid", poly_msg}}
                                 .dump(2)
                          << "\n";
            } else {
                std::cout << (report.pass ? "PASS" : "FAIL") << "\n";
                if (!poly_msg.empty()) std::cout << poly_msg << "\n";
            }
            mf.outcome = report.pass ? "pass" : "fail";
            return report.pass ? poly_rc : 1;
        }

        if (*solve_cmd || *census_cmd || *probe_cmd) {
            Network net = load_network(net_spec, mf);
            SearchConfig cfg;
            cfg.dim = dim;
            cfg.normalize = normalize;
            cfg.max_assignments = max_assignments;
            cfg.time_budget_sec = budget;
            cfg.space_ceiling = ceiling;
            cfg.jobs = jobs;
            cfg.lexicographic_order = lexicographic;
            if (progress) cfg.progress = as_json ? print_progress_json : print_progress;

            if (*probe_cmd) {
                std::vector<const Field*> fields;
                std::stringstream ss(fields_list);
                std::string tok;
                while (std::getline(ss, tok, ',')) fields.push_back(&field_from_tag(tok));
                cfg.pins = parse_pins(pin_args, nullptr, dim);
                auto res = probe_characteristics(net, dim, fields, cfg);
                json jr;
                bool any_bad = false;
                for (auto& [fname, entry] : res) {
                    any_bad |= entry.status == SolveStatus::Inconclusive;
                    if (as_json)
                        jr[fname] = {{"status", to_string(entry.status)},
                                     {"error", entry.error},
                                     {"stats", stats_json(entry.stats)}};
                    else
                        std::cout << fname << ": " << to_string(entry.status)
                                  << (entry.error.empty() ? "" : " (" + entry.error + ")") << "\n";
                }
                if (as_json) std::cout << jr.dump(2) << "\n";
                mf.outcome = any_bad ? "inconclusive" : "ok";
                return any_bad ? 3 : 0;
            }

            cfg.field = &field_from_tag(field_tag);
            cfg.pins = parse_pins(pin_args, cfg.field, dim);

            if (*solve_cmd) {
                auto out = solve(net, cfg);
                if (as_json) {
                    json j = {{"status", to_string(out.status)},
                              {"note", out.note},
                              {"stats", stats_json(out.stats)}};
                    if (out.witness) j["witness"] = serialize_code(*out.witness);
                    std::cout << j.dump(2) << "\n";
                } else {
                    std::cout << (out.status == SolveStatus::Solvable     ? "SOLVABLE"
                                  : out.status == SolveStatus::Unsolvable ? "UNSOLVABLE"
                                                                          : "INCONCLUSIVE")
                              << "\n";
                    if (!out.note.empty()) std::cout << out.note << "\n";
                    std::cout << "assignments=" << out.stats.assignments
                              << " prunes=" << out.stats.prunes
                              << " elapsed=" << out.stats.elapsed_sec
                              << "s raw-space=" << out.stats.raw_space << "\n";
                    if (out.witness) std::cout << serialize_code(*out.witness);
                }
                mf.outcome = to_string(out.status);
                return out.status == SolveStatus::Solvable     ? 0
                       : out.status == SolveStatus::Unsolvable ? 1
                                                               : 3;
            }

            // census
            CensusPredicate pred;
            if (predicate.rfind("zero(", 0) == 0 && predicate.back() == ')') {
                auto body = predicate.substr(5, predicate.size() - 6);
                auto comma = body.find(',');
                if (comma == std::string::npos)
                    raise(ErrorKind::InvalidArg, "predicate needs zero(<source>,<edge>)");
                pred = CensusPredicate::global_zero(body.substr(0, comma), body.substr(comma + 1));
            } else if (predicate.rfind("nonzero(", 0) == 0 && predicate.back() == ')') {
                auto body = predicate.substr(8, predicate.size() - 9);
                auto comma = body.find(',');
                if (comma == std::string::npos)
                    raise(ErrorKind::InvalidArg, "predicate needs nonzero(<source>,<edge>)");
                pred =
                    CensusPredicate::global_nonzero(body.substr(0, comma), body.substr(comma + 1));
            } else {
                raise(ErrorKind::InvalidArg, "unknown predicate '" + predicate + "'");
            }
            auto res = census(net, cfg, pred);
            if (as_json) {
                json j = {{"completed", res.completed}, {"all_satisfy", res.all_satisfy},
                          {"vacuous", res.vacuous},     {"solutions", res.solutions},
                          {"note", res.note},           {"stats", stats_json(res.stats)}};
                if (res.counterexample) j["counterexample"] = serialize_code(*res.counterexample);
                std::cout << j.dump(2) << "\n";
            } else {
                if (!res.completed)
                    std::cout << "INCONCLUSIVE (" << res.note << ")\n";
                else if (res.all_satisfy)
                    std::cout << "ALL-SATISFY" << (res.vacuous ? " (vacuous: no solutions)" : "")
                              << " solutions=" << res.solutions << "\n";
                else
                    std::cout << "COUNTEREXAMPLE after " << res.solutions << " solutions\n"
                              << serialize_code(*res.counterexample);
                std::cout << "assignments=" << res.stats.assignments
                          << " prunes=" << res.stats.prunes << " elapsed=" << res.stats.elapsed_sec
                          << "s\n";
            }
            mf.outcome =
                !res.completed ? "inconclusive" : res.all_satisfy ? "all-satisfy" : "counterexample";
            return !res.completed ? 3 : res.all_satisfy ? 0 : 1;
        }

        if (*zoo_cmd) {
            if (*zoo_list) {
                for (auto& e : zoo_entries()) {
                    std::cout << (e.is_network ? "network " : "code    ") << e.name;
                    if (!e.params_help.empty()) std::cout << "  [" << e.params_help << "]";
                    for (auto& p : e.properties) {
                        std::cout << "  {";
                        if (p.dim_modulus > 0)
                            std::cout << "d % " << p.dim_modulus << " == " << p.dim_remainder;
                        else
                            std::cout << "d == " << p.dim_remainder;
                        std::cout << ": "
                                  << (p.claim == CharClaim::AllPrimes ? "all primes"
                                      : p.claim == CharClaim::NoPrime ? "no prime"
                                                                      : "primes dividing the parameter")
                                  << "}";
                    }
                    std::cout << "\n";
                }
                mf.outcome = "ok";
                return 0;
            }
            if (*zoo_emit) {
                std::string text;
                bool is_net = true;
                try {
                    Network net = zoo_network(emit_name);
                    text = serialize_network(net);
                } catch (const Error&) {
                    is_net = false;
                }
                if (!is_net) {
                    VlncCode code = zoo_code(emit_name, field_tag, dim);
                    text = serialize_code(code);
                }
                if (emit_out.empty()) {
                    std::cout << text;
                } else {
                    std::ofstream out(emit_out);
                    out << text;
                }
                mf.outcome = "ok";
                return 0;
            }
            std::cerr << "zoo needs a subcommand (list or emit)\n";
            return 2;
        }

        if (*repro_cmd) {
            bool all = true;
            json rows = json::array();
            for (auto& row : acceptance_suite()) {
                auto res = row.run();
                all = all && res.pass;
                if (as_json)
                    rows.push_back({{"id", row.id},
                                    {"claim", row.claim},
                                    {"pass", res.pass},
                                    {"detail", res.detail},
                                    {"seconds", res.seconds}});
                else
                    std::printf("%s %-4s %s [%s; %.2fs]\n", res.pass ? "PASS" : "FAIL",
                                row.id.c_str(), row.claim.c_str(), res.detail.c_str(), res.seconds);
                std::fflush(stdout);
            }
            if (as_json) std::cout << json{{"rows", rows}, {"all_pass", all}}.dump(2) << "\n";
            mf.outcome = all ? "pass" : "fail";
            return all ? 0 : 1;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        mf.outcome = std::string("error: ") + to_string(e.kind());
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
