#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vlnc/code.hpp"
#include "vlnc/network.hpp"

namespace vlnc {

// Builders for the workbench's stock networks.
//
// m2:        4 sources a,b,x,y; relay pairs u1,u2 -> v1,v2,v3; 4 terminals,
//            each demanding one of {a,b} and one of {x,y}.
// m3:        the 9-source, 27-terminal generalization with triple demands.
// char_m:    m+2 sources, each relay u_j sees every source but x_j; solvable
//            exactly when the characteristic divides m.
// char_qs:   q+2 demanded sources plus a dummy source s that only terminal
//            decoding pressure can force onto edge e1.
// n1:        m2 and char-q-s glued on shared sources a (as x1) and y (as s),
//            plus the extra edge n1->t4.
// n2:        m3 and char-q'-s glued on shared sources a (as x1) and x (as s),
//            plus direct helper edges into twelve of the t-terminals.
Network build_m2();
Network build_m3();
Network build_char_m(int m);
Network build_char_qs(int q);
Network build_n1(int q);
Network build_n2(int qp);

// Addition-only code: e1 = x1 and e_j = sum of x_i (2<=i<=q+2, i != j).
// Verifies over every field and ring domain, any dimension.
VlncCode code_char_qs_additive(int q, const Domain& dom, int d);

// The characteristic-gated code: e1 = x1 + s, every other middle edge mixes s
// in, and the last terminal decodes x1 as the sum of the first q+2 middle
// edges. Verifies iff the field characteristic divides q; otherwise exactly
// the last terminal fails.
VlncCode code_char_qs_charp(int q, const Field& f, int d = 1);

// d=2 component-split code for m2; verifies over every field.
VlncCode code_m2_dim2(const Field& f);

// d=2 code for n1(q): m2 part split as in code_m2_dim2, char part additive
// with e1 carrying a. Verifies over every field.
VlncCode code_n1_dim2(int q, const Field& f);

// Scalar code for n1(q) when the characteristic divides q: char part as
// code_char_qs_charp with x1->a, s->y; t4 recovers y by subtracting a.
VlncCode code_n1_scalar_charp(int q, const Field& f);

// d=3 component-split code for n2(q'); verifies over every field.
VlncCode code_n2_dim3(int qp, const Field& f);

// Scalar code for n1(q) over the 16-element ring of 2x2 matrices over GF(2).
VlncCode code_n1_ring16(int q);

// d=2 code for n2(q') over a field whose characteristic divides q'. Derived
// on demand by a constrained search over component-routing assignments of the
// m3-part middle edges (each edge forwards whole sources or aligned
// components of two sources), validated by verify_solution, then cached.
VlncCode code_n2_dim2(int qp, const Field& f);

// Which characteristics admit a d-dimensional solution, as claimed per entry.
enum class CharClaim { AllPrimes, NoPrime, DividesParam };

struct ZooProperty {
    // Claim applies to dimensions with d % modulus == remainder (modulus 0
    // means exactly dimension `remainder`).
    int dim_modulus = 0;
    int dim_remainder = 0;
    CharClaim claim = CharClaim::AllPrimes;
    std::string note;
};

struct ZooEntry {
    std::string name;        // mnemonic, e.g. "m2", "char-qs:<q>", "n1-dim2:<q>"
    bool is_network = false; // network builder vs code constructor
    std::string params_help;
    std::vector<ZooProperty> properties;
};

const std::vector<ZooEntry>& zoo_entries();

// Resolves mnemonics like "m2", "char-m:3", "char-qs:2", "n1:2", "n2:2".
Network zoo_network(const std::string& mnemonic);

// Resolves code mnemonics: "char-qs-additive:<q>", "char-qs-charp:<q>",
// "m2-dim2", "n1-dim2:<q>", "n1-scalar-charp:<q>", "n2-dim3:<q'>",
// "n1-ring16:<q>", "n2-dim2:<q'>". The domain tag and dimension come from the
// caller where the constructor needs them.
VlncCode zoo_code(const std::string& mnemonic, const std::string& domain_tag, int dim);

// The network a zoo code verifies on.
std::string zoo_code_network(const std::string& mnemonic);

} // namespace vlnc
