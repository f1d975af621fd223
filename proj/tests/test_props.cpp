// Desk-scale spot checks of the characteristic-set claims recorded in the zoo
// registry: for each claim that fits the solver's guards at d=1 or d=2, probe
// small fields and compare against the claimed set.
#include "doctest.h"
#include "vlnc/solver.hpp"
#include "vlnc/zoo.hpp"

using namespace vlnc;

namespace {

bool claim_admits(CharClaim claim, int p, int param) {
    switch (claim) {
        case CharClaim::AllPrimes: return true;
        case CharClaim::NoPrime: return false;
        case CharClaim::DividesParam: return param % p == 0;
    }
    return false;
}

} // namespace

TEST_CASE("registry claims match probes at desk scale") {
    struct Probe {
        std::string net;
        int param;
        int dim;
        std::vector<int> primes;
    };
    // Instances small enough to decide exhaustively.
    std::vector<Probe> probes = {
        {"m2", 0, 1, {2, 3}},
        {"m2", 0, 2, {2}},
        {"char-m:2", 2, 1, {2, 3, 5}},
        {"char-m:3", 3, 1, {2, 3}},
        {"char-qs:2", 2, 1, {2, 3, 5}},
        {"n1:2", 2, 1, {2}},
    };
    for (auto& pr : probes) {
        Network net = zoo_network(pr.net);
        // Find the registry claim covering this dimension.
        std::string base = pr.net.substr(0, pr.net.find(':'));
        const ZooEntry* entry = nullptr;
        for (auto& e : zoo_entries())
            if (e.is_network && e.name.substr(0, e.name.find(':')) == base) entry = &e;
        REQUIRE(entry != nullptr);
        const ZooProperty* prop = nullptr;
        for (auto& p : entry->properties) {
            if (p.dim_modulus > 0 && pr.dim % p.dim_modulus == p.dim_remainder) prop = &p;
            if (p.dim_modulus == 0 && pr.dim == p.dim_remainder) prop = &p;
        }
        REQUIRE(prop != nullptr);

        std::vector<const Field*> fields;
        for (int p : pr.primes) fields.push_back(&Field::get(p, 1));
        SearchConfig base_cfg;
        auto res = probe_characteristics(net, pr.dim, fields, base_cfg);
        for (int p : pr.primes) {
            bool want = claim_admits(prop->claim, p, pr.param);
            auto status = res[std::to_string(p)].status;
            CHECK_MESSAGE((status == SolveStatus::Solvable) == want,
                          (pr.net + " d=" + std::to_string(pr.dim) + " p=" + std::to_string(p)));
            CHECK(status != SolveStatus::Inconclusive);
        }
    }
}
