#include "doctest.h"
#include "vlnc/zoo.hpp"

using namespace vlnc;

namespace {
const Field& f2 = Field::get(2, 1);
const Field& f3 = Field::get(3, 1);
const Field& f4 = Field::get(2, 2);
const Field& f5 = Field::get(5, 1);
} // namespace

TEST_CASE("additive code verifies over every domain and dimension") {
    for (int q : {2, 3}) {
        Network net = build_char_qs(q);
        for (int d : {1, 2, 3}) {
            CHECK(verify_solution(net, code_char_qs_additive(q, f2, d)).pass);
            CHECK(verify_solution(net, code_char_qs_additive(q, f3, d)).pass);
        }
        CHECK(verify_solution(net, code_char_qs_additive(q, f4, 1)).pass);
        CHECK(verify_solution(net, code_char_qs_additive(q, f5, 2)).pass);
        // Ring alphabet: the code only adds and subtracts.
        CHECK(verify_solution(net, code_char_qs_additive(q, MatrixRing::get(2, 2), 1)).pass);
    }
}

TEST_CASE("charp code verifies exactly when the characteristic divides q") {
    CHECK(verify_solution(build_char_qs(2), code_char_qs_charp(2, f2)).pass);
    CHECK(verify_solution(build_char_qs(2), code_char_qs_charp(2, f4)).pass);
    CHECK(verify_solution(build_char_qs(3), code_char_qs_charp(3, f3)).pass);
    CHECK(verify_solution(build_char_qs(4), code_char_qs_charp(4, f2)).pass);
    CHECK(verify_solution(build_char_qs(6), code_char_qs_charp(6, f2)).pass);
    CHECK(verify_solution(build_char_qs(6), code_char_qs_charp(6, f3)).pass);
    CHECK(!verify_solution(build_char_qs(2), code_char_qs_charp(2, f3)).pass);
    CHECK(!verify_solution(build_char_qs(2), code_char_qs_charp(2, f5)).pass);
    CHECK(!verify_solution(build_char_qs(3), code_char_qs_charp(3, f2)).pass);
    // d=2 block variant.
    CHECK(verify_solution(build_char_qs(2), code_char_qs_charp(2, f2, 2)).pass);
}

TEST_CASE("m2 and n1 dimension-2 codes verify over every field") {
    for (const Field* f : {&f2, &f3, &f5, &f4, &Field::get(7, 1)}) {
        CHECK(verify_solution(build_m2(), code_m2_dim2(*f)).pass);
        CHECK(verify_solution(build_n1(2), code_n1_dim2(2, *f)).pass);
    }
    CHECK(verify_solution(build_n1(3), code_n1_dim2(3, f2)).pass);
}

TEST_CASE("n1 scalar code verifies when the characteristic divides q") {
    CHECK(verify_solution(build_n1(2), code_n1_scalar_charp(2, f2)).pass);
    CHECK(verify_solution(build_n1(3), code_n1_scalar_charp(3, f3)).pass);
    CHECK(!verify_solution(build_n1(2), code_n1_scalar_charp(2, f3)).pass);
}

TEST_CASE("n2 dimension-3 code verifies over every field") {
    for (const Field* f : {&f2, &f3, &f5}) CHECK(verify_solution(build_n2(2), code_n2_dim3(2, *f)).pass);
    CHECK(verify_solution(build_n2(3), code_n2_dim3(3, f2)).pass);
}

TEST_CASE("ring code verifies and its decode factors are order-sensitive") {
    Network n1 = build_n1(2);
    auto code = code_n1_ring16(2);
    CHECK(verify_solution(n1, code).pass);

    // t1 recovers its first demand with left factors selecting rows; swapping
    // the two selectors breaks the identity.
    const MatrixRing& R = MatrixRing::get(2, 2);
    auto unit = [&](int r, int c) {
        std::vector<int> g(4, 0);
        g[r * 2 + c] = 1;
        Mat m(R, 1, 1);
        m.set(0, 0, R.from_grid(g));
        return m;
    };
    CHECK(code.dec("v1->t1", "t1", 0) == unit(0, 0));
    CHECK(code.dec("v3->t1", "t1", 0) == unit(1, 0));
    VlncCode swapped = code;
    swapped.set_dec("v1->t1", "t1", 0, unit(1, 0));
    swapped.set_dec("v3->t1", "t1", 0, unit(0, 0));
    CHECK(!verify_solution(n1, swapped).pass);
}

TEST_CASE("repeating the m2 code gives a verifying d=4 code") {
    auto code = repeat_code(code_m2_dim2(f3), 2);
    CHECK(code.dim() == 4);
    CHECK(verify_solution(build_m2(), code).pass);
}

TEST_CASE("zoo registry covers builders and codes") {
    CHECK(!zoo_entries().empty());
    CHECK(zoo_network("char-m:4").sources().size() == 6);
    CHECK_THROWS_AS(zoo_network("nope"), Error);
    CHECK_THROWS_AS(build_char_qs(1), Error);
    CHECK_THROWS_AS(build_char_m(0), Error);
    CHECK_THROWS_AS(build_n1(1), Error);
    CHECK_THROWS_AS(build_n2(1), Error);

    auto code = zoo_code("char-qs-additive:2", "3", 1);
    CHECK(verify_solution(zoo_network(zoo_code_network("char-qs-additive:2")), code).pass);
    auto ring = zoo_code("n1-ring16:2", "ring:2,2", 1);
    CHECK(verify_solution(build_n1(2), ring).pass);
}

TEST_CASE("every zoo code verifies under its stated preconditions") {
    struct Item {
        std::string code, domain;
        int dim;
    };
    for (auto& it : std::vector<Item>{{"char-qs-additive:2", "5", 2},
                                      {"char-qs-charp:2", "2^2", 1},
                                      {"m2-dim2", "7", 2},
                                      {"n1-dim2:2", "3^2", 2},
                                      {"n1-scalar-charp:2", "2", 1},
                                      {"n2-dim3:2", "2^3", 3},
                                      {"n1-ring16:2", "ring:2,2", 1}}) {
        auto code = zoo_code(it.code, it.domain, it.dim);
        Network net = zoo_network(zoo_code_network(it.code));
        CHECK_MESSAGE(verify_solution(net, code).pass, it.code);
    }
}
