#include "doctest.h"
#include "vlnc/polymatroid.hpp"
#include "vlnc/zoo.hpp"

#include <random>

using namespace vlnc;

namespace {

const Field& f2 = Field::get(2, 1);
const Field& f3 = Field::get(3, 1);

RankFunction three_point_violating() {
    RankFunction r(3);
    r.set(0b000, 0);
    r.set(0b001, 1);
    r.set(0b010, 1);
    r.set(0b011, 1);
    r.set(0b100, 2);
    r.set(0b101, 2);
    r.set(0b110, 3);
    r.set(0b111, 3);
    return r;
}

RankFunction three_point_repaired() {
    RankFunction r = three_point_violating();
    r.set(0b110, 2);
    r.set(0b111, 2);
    return r;
}

// Independent full-pair submodularity oracle, quadratic over all subsets.
bool submodular_all_pairs(const RankFunction& r) {
    const uint32_t full = (1u << r.ground_size()) - 1;
    for (uint32_t a = 0; a <= full; ++a)
        for (uint32_t b = 0; b <= full; ++b) {
            if (r.at(a) + r.at(b) < r.at(a | b) + r.at(a & b)) return false;
            if (a > b && r.at(a) < r.at(b) && (b & a) == b) return false;
        }
    return true;
}

} // namespace

TEST_CASE("axiom checks and the published violation witness") {
    auto bad = check_axioms(three_point_violating());
    CHECK(!bad.ok);
    CHECK(bad.failed_axiom == "P3");
    CHECK(bad.witness_a == 0b011);
    CHECK(bad.witness_b == 0b101);

    CHECK(check_axioms(three_point_repaired()).ok);

    RankFunction zero(3);
    for (uint32_t m = 0; m < 8; ++m) zero.set(m, 0);
    CHECK(check_axioms(zero).ok);

    RankFunction nonzero_empty(1);
    nonzero_empty.set(0, 1);
    nonzero_empty.set(1, 1);
    CHECK(check_axioms(nonzero_empty).failed_axiom == "P1");

    RankFunction drop(1);
    drop.set(0, 0);
    CHECK_THROWS_AS(check_axioms(RankFunction(2)), Error); // incomplete table
}

TEST_CASE("local axiom checks agree with the all-pairs oracle on random ranks") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        RankFunction r(3);
        r.set(0, 0);
        for (uint32_t m = 1; m < 8; ++m) r.set(m, (int)(rng() % 4));
        bool local = check_axioms(r).ok;
        bool monotone = true;
        for (uint32_t a = 0; a < 8; ++a)
            for (uint32_t b = 0; b < 8; ++b)
                if ((a & b) == a && r.at(a) > r.at(b)) monotone = false;
        CHECK(local == (monotone && submodular_all_pairs(r)));
    }
}

TEST_CASE("members enumerates the polymatroid exactly") {
    auto got = members(three_point_repaired());
    std::set<std::vector<int>> want = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                                       {0, 0, 2}, {1, 0, 1}, {0, 1, 1}};
    CHECK(std::set<std::vector<int>>(got.begin(), got.end()) == want);

    RankFunction zero(2);
    for (uint32_t m = 0; m < 4; ++m) zero.set(m, 0);
    CHECK(members(zero) == std::vector<std::vector<int>>{{0, 0}});

    RankFunction single(1);
    single.set(0, 0);
    single.set(1, 2);
    auto ms = members(single);
    CHECK(ms == std::vector<std::vector<int>>{{0}, {1}, {2}});

    CHECK_THROWS_AS(members(three_point_violating()), Error);
}

TEST_CASE("membership agrees with direct inequality testing for small ground sets") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        // Random representable rank on up to 4 elements.
        SubspaceFamily fam;
        fam.field = &f2;
        fam.ambient = 3;
        const int n = 2 + (int)(rng() % 3);
        for (int i = 0; i < n; ++i) {
            Mat b(f2, (int)(rng() % 3), 3);
            for (int r = 0; r < b.rows(); ++r)
                for (int c = 0; c < 3; ++c) b.set(r, c, (int)(rng() % 2));
            fam.bases.push_back(mat_rowspace_canon(b));
        }
        auto rank = induced_rank(fam);
        auto got = members(rank);
        // Double-loop oracle: enumerate the bounding box, test every subset.
        std::set<std::vector<int>> oracle;
        std::vector<int> x(n, 0);
        for (;;) {
            bool ok = true;
            for (uint32_t a = 1; a < (1u << n) && ok; ++a) {
                int sum = 0;
                for (int i = 0; i < n; ++i)
                    if (a & (1u << i)) sum += x[i];
                if (sum > rank.at(a)) ok = false;
            }
            if (ok) oracle.insert(x);
            int i = n - 1;
            while (i >= 0 && x[i] == rank.at(1u << i)) x[i--] = 0;
            if (i < 0) break;
            ++x[i];
        }
        CHECK(std::set<std::vector<int>>(got.begin(), got.end()) == oracle);
    }
}

TEST_CASE("induced ranks from subspaces") {
    SubspaceFamily fam;
    fam.field = &f3;
    fam.ambient = 2;
    fam.bases = {mat_from_string(f3, "[[1,0]]"), mat_from_string(f3, "[[1,0]]"),
                 mat_from_string(f3, "[[1,0],[0,1]]")};
    auto r = induced_rank(fam);
    CHECK(r == [] {
        RankFunction w(3);
        w.set(0b000, 0);
        w.set(0b001, 1);
        w.set(0b010, 1);
        w.set(0b011, 1);
        w.set(0b100, 2);
        w.set(0b101, 2);
        w.set(0b110, 2);
        w.set(0b111, 2);
        return w;
    }());

    SubspaceFamily zero;
    zero.field = &f3;
    zero.ambient = 2;
    zero.bases = {Mat(f3, 0, 2), Mat(f3, 0, 2)};
    auto zr = induced_rank(zero);
    for (uint32_t m = 0; m < 4; ++m) CHECK(zr.at(m) == 0);
}

TEST_CASE("random subspace families induce polymatroids") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        SubspaceFamily fam;
        fam.field = &f3;
        fam.ambient = 3;
        const int n = 3;
        for (int i = 0; i < n; ++i) {
            Mat b(f3, (int)(rng() % 3), 3);
            for (int r = 0; r < b.rows(); ++r)
                for (int c = 0; c < 3; ++c) b.set(r, c, (int)(rng() % 3));
            fam.bases.push_back(b);
        }
        CHECK(check_axioms(induced_rank(fam)).ok);
    }
}

TEST_CASE("induce_from_code on the m2 code satisfies the map conditions") {
    Network m2 = build_m2();
    auto code = code_m2_dim2(f2);
    auto ind = induce_from_code(m2, code);
    CHECK(check_axioms(ind.rank).ok);
    auto rep = check_dp_map(m2, 2, ind.rank, ind.map);
    CHECK_MESSAGE(rep.ok, (rep.failed_condition + " " + rep.detail));
    // Source ranks equal the dimension.
    for (auto& s : m2.sources()) CHECK(ind.rank.at(1u << ind.map.of_source[s]) == 2);
}

TEST_CASE("induce_from_code refuses unverified codes and rings") {
    Network net = build_char_qs(2);
    CHECK_THROWS_AS(induce_from_code(net, code_char_qs_charp(2, f3)), Error);
    try {
        induce_from_code(net, code_char_qs_charp(2, f3));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotASolution);
    }
    CHECK_THROWS_AS(induce_from_code(build_n1(2), code_n1_ring16(2)), Error);
}

TEST_CASE("rank identity on the additive code's induced polymatroid") {
    Network net = build_char_qs(2);
    auto ind = induce_from_code(net, code_char_qs_additive(2, f3, 1));
    uint32_t e1 = 1u << ind.map.of_edge["e1"];
    uint32_t x1 = 1u << ind.map.of_source["x1"];
    CHECK(ind.rank.at(e1) == ind.rank.at(e1 | x1));
    CHECK(ind.rank.at(e1) == 1);
}

TEST_CASE("conditional additivity on verified m2 and n1 codes") {
    struct Item {
        Network net;
        VlncCode code;
        std::string e_ab, e_xy;
    };
    std::vector<Item> items = {{build_m2(), code_m2_dim2(f3), "e11", "e22"},
                               {build_n1(2), code_n1_dim2(2, f3), "e11", "e22"}};
    for (auto& it : items) {
        auto ind = induce_from_code(it.net, it.code);
        auto g = [&](std::initializer_list<std::string> srcs,
                     std::initializer_list<std::string> edges) {
            uint32_t mask = 0;
            for (auto& s : srcs) mask |= 1u << ind.map.of_source[s];
            for (auto& e : edges) mask |= 1u << ind.map.of_edge[e];
            return ind.rank.at(mask);
        };
        // Preconditions: each middle edge adds no rank to its source pair.
        REQUIRE(g({"a", "b"}, {it.e_ab}) == g({"a", "b"}, {}));
        REQUIRE(g({"x", "y"}, {it.e_xy}) == g({"x", "y"}, {}));
        for (auto s1 : std::vector<std::vector<std::string>>{{}, {"a"}, {"b"}, {"a", "b"}})
            for (auto s2 : std::vector<std::vector<std::string>>{{}, {"x"}, {"y"}, {"x", "y"}}) {
                uint32_t m1 = 1u << ind.map.of_edge[it.e_ab];
                uint32_t m2 = 1u << ind.map.of_edge[it.e_xy];
                for (auto& s : s1) m1 |= 1u << ind.map.of_source[s];
                for (auto& s : s2) m2 |= 1u << ind.map.of_source[s];
                CHECK(ind.rank.at(m1) + ind.rank.at(m2) == ind.rank.at(m1 | m2));
            }
    }
}

TEST_CASE("difference inequality holds on induced ranks") {
    std::mt19937 rng(9);
    Network net = build_char_qs(2);
    auto ind = induce_from_code(net, code_char_qs_additive(2, f2, 1));
    const int n = ind.rank.ground_size();
    for (int trial = 0; trial < 300; ++trial) {
        uint32_t a = rng() & ((1u << n) - 1);
        uint32_t b = rng() & ((1u << n) - 1);
        uint32_t c = b & rng(); // c subset of b
        CHECK(ind.rank.at(a | b) - ind.rank.at(a | c) <= ind.rank.at(b) - ind.rank.at(c));
    }
}

TEST_CASE("dp-map failures are detected") {
    Network m2 = build_m2();
    auto code = code_m2_dim2(f2);
    auto ind = induce_from_code(m2, code);
    // Merge two sources onto one element: D1 must fail.
    GroundMap broken = ind.map;
    broken.of_source["b"] = broken.of_source["a"];
    auto rep = check_dp_map(m2, 2, ind.rank, broken);
    CHECK(rep.failed_condition == "D1");
    // Inflated dimension: the uniform source vector leaves the polymatroid.
    auto rep2 = check_dp_map(m2, 3, ind.rank, ind.map);
    CHECK(rep2.failed_condition == "D2");
    // Deflated dimension: membership still holds but source ranks are off.
    auto rep3 = check_dp_map(m2, 1, ind.rank, ind.map);
    CHECK(rep3.failed_condition == "D3");
}

TEST_CASE("direct condition checking covers codes past the table scale") {
    auto rep = check_dp_induced(build_n2(2), code_n2_dim3(2, f2));
    CHECK_MESSAGE(rep.ok, (rep.failed_condition + " " + rep.detail));
    auto rep2 = check_dp_induced(build_n1(2), code_n1_dim2(2, f3));
    CHECK(rep2.ok);
}

TEST_CASE("representability search finds a family for the repaired rank") {
    auto fam = find_representation(three_point_repaired(), f2, 2);
    REQUIRE(fam.has_value());
    CHECK(induced_rank(*fam) == three_point_repaired());
    // A rank demanding too much independence in a small ambient space fails.
    RankFunction big(2);
    big.set(0b00, 0);
    big.set(0b01, 2);
    big.set(0b10, 2);
    big.set(0b11, 4);
    CHECK(!find_representation(big, f2, 2).has_value());
}

TEST_CASE("rank tables serialize and parse") {
    auto r = three_point_repaired();
    auto text = serialize_rank(r);
    CHECK(parse_rank_string(text) == r);
    CHECK_THROWS_AS(parse_rank_string("set 0 0\n"), Error);
}
