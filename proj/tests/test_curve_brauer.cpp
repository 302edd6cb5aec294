#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <vector>

#include "conical/builders.hpp"
#include "conical/curve_brauer.hpp"
#include "conical/forms.hpp"
#include "doctest.h"
#include "support/curves.hpp"

using namespace conical;

namespace {

FieldSpec cubic_F() {
    return FieldSpec::profiled("F", 3,
                               {{Place::real(), {1, 2}}, {Place::finite(23), {1, 2}}},
                               {23}, Poly{-1, -1, 0, 1});
}

/* A split line A and a quaternion-conic component B through a rational
 * point.  The conic branches form a conjugate pair over Q(i), where the
 * conic class dies, so the configuration validates. */
ConicalCurve quaternion_leg() {
    ConicalCurve C;
    Orbit A, B;
    A.name = "A";
    A.members = {0};
    B.name = "B";
    B.members = {1};
    C.components = {A, B};
    C.conics = {ConicLabel::split(), ConicLabel::quaternion(-1, -1)};
    Orbit P;
    P.name = "P";
    P.members = {0};
    C.points = {P};
    Orbit BA, BB;
    BA.name = "BA";
    BA.members = {0};
    BB.name = "BB";
    BB.field = FieldSpec::quadratic(-1);
    BB.members = {1, 2};
    C.branches = {BA, BB};
    C.src = {0, 1, 1};
    C.dst = {0, 0, 0};
    C.galois = galois_from_labels(C);
    return C;
}

TruncationWindow window(long n, std::vector<Place> S) { return {n, std::move(S)}; }

ModSpan span_of(const std::vector<ModVec>& rows, long long n, std::size_t cols) {
    ModSpan s(n, cols);
    for (const ModVec& v : rows) s.add(v);
    return s;
}

void check_subgroup_inside_kernel(const BrauerQuotient& Q) {
    ModSpan ker = span_of(Q.kernel, Q.window.n, Q.layout.domain.size());
    for (const ModVec& g : Q.subgroup) CHECK(ker.contains(g));
}

}  // namespace

TEST_CASE("four-cycle carries exactly one extra class over the small window") {
    ConicalCurve C = testgen::four_cycle();
    auto Q = curve_brauer_quotient(
        C, window(2, {Place::real(), Place::finite(2), Place::finite(5)}));

    CHECK(Q.layout.domain_dim() == 9);
    CHECK(Q.kernel.size() == 3);
    CHECK(Q.dimension == 1);
    CHECK(Q.invariants == std::vector<long long>{2});
    REQUIRE(Q.representatives.size() == 1);
    check_subgroup_inside_kernel(Q);

    // the class ramified at the real place and 2, sitting on component A
    // alone: it dies in Q(i), so it matches zero across both points
    ModVec q(9, 0);
    q[0] = 1;
    q[1] = 1;
    ModSpan ker = span_of(Q.kernel, 2, 9);
    ModSpan sub = span_of(Q.subgroup, 2, 9);
    CHECK(ker.contains(q));
    CHECK_FALSE(sub.contains(q));
    CHECK(ker.contains(Q.representatives[0]));
    CHECK_FALSE(sub.contains(Q.representatives[0]));

    SUBCASE("the minimal window already sees the class") {
        auto Q2 = curve_brauer_quotient(C, window(2, {Place::real(), Place::finite(2)}));
        CHECK(Q2.layout.domain_dim() == 5);
        CHECK(Q2.dimension == 1);
    }

    SUBCASE("an inert prime contributes a second class") {
        auto Q2 = curve_brauer_quotient(
            C, window(2, {Place::real(), Place::finite(2), Place::finite(3),
                          Place::finite(5)}));
        CHECK(Q2.dimension == 2);
        CHECK(Q2.invariants == std::vector<long long>{2, 2});
    }

    SUBCASE("the order-4 window keeps the 2-torsion class visible") {
        auto Q4 = curve_brauer_quotient(
            C, window(4, {Place::real(), Place::finite(2), Place::finite(5)}));
        CHECK(Q4.dimension >= 1);
        for (long long d : Q4.invariants) CHECK(4 % d == 0);
        ModVec q4(Q4.layout.domain_dim(), 0);
        q4[0] = 2;
        q4[1] = 2;
        ModSpan ker4 = span_of(Q4.kernel, 4, Q4.layout.domain.size());
        ModSpan sub4 = span_of(Q4.subgroup, 4, Q4.layout.domain.size());
        CHECK(ker4.contains(q4));
        CHECK_FALSE(sub4.contains(q4));
    }
}

TEST_CASE("conjugate lines trap the classes their field hides from Q") {
    ConicalCurve C = testgen::conjugate_lines();
    auto Q = curve_brauer_quotient(C, make_window(2, 5));
    CHECK(Q.layout.domain_dim() == 10);
    CHECK(Q.kernel.size() == 4);
    CHECK(Q.dimension == 3);
    check_subgroup_inside_kernel(Q);

    auto E = curve_brauer_quotient(C, make_window(2, 5), QuotientPath::EliminatedPoints);
    CHECK(E.invariants == Q.invariants);
    CHECK(E.layout.domain_dim() == 5);
    check_subgroup_inside_kernel(E);
}

TEST_CASE("cone curves have trivial quotient") {
    BinaryForm f = BinaryForm::from_classes({2, 17, 34});
    auto Q = curve_brauer_quotient(build_Cf(f), make_window(2, 17));
    CHECK(Q.window.S.size() == 8);
    CHECK(Q.kernel.size() == 7);
    CHECK(Q.dimension == 0);
    CHECK(Q.invariants.empty());
    CHECK(Q.representatives.empty());
    check_subgroup_inside_kernel(Q);

    CHECK_THROWS_AS(
        curve_brauer_quotient(build_Cf(f), make_window(2, 17), QuotientPath::EliminatedPoints),
        unsupported_operation);

    SUBCASE("a single line is the degenerate case") {
        BinaryForm line({FormFactor::linear(1, 1)});
        ConicalCurve C = build_Cf(line);
        auto G = curve_brauer_quotient(C, make_window(2, 5));
        CHECK(G.layout.domain_dim() == 4);
        CHECK(G.kernel.size() == 3);
        CHECK(G.dimension == 0);
        auto E = curve_brauer_quotient(C, make_window(2, 5), QuotientPath::EliminatedPoints);
        CHECK(E.dimension == 0);
    }
}

TEST_CASE("a quaternion conic feeds the quotient subgroup") {
    ConicalCurve C = quaternion_leg();
    REQUIRE(validate_curve(C).valid);

    auto Q = curve_brauer_quotient(C, window(2, {Place::real(), Place::finite(2)}));
    CHECK(Q.layout.domain_dim() == 6);
    CHECK(Q.kernel.size() == 2);
    REQUIRE(Q.subgroup.size() == 2);
    CHECK(Q.subgroup[0] == ModVec{0, 0, 1, 1, 0, 0});
    CHECK(Q.dimension == 0);
    check_subgroup_inside_kernel(Q);

    // without the conic generator the class on B would survive
    ModMatrix diag_only = {{1, 1, 1, 1, 1, 1}};
    CHECK(quotient_invariants(Q.kernel, diag_only, 2, 6) == std::vector<long long>{2});

    SUBCASE("odd truncation ignores the conic class") {
        auto Q3 = curve_brauer_quotient(
            C, window(3, {Place::real(), Place::finite(2), Place::finite(5)}));
        CHECK(Q3.kernel.size() == 1);
        CHECK(Q3.subgroup.size() == 1);
        CHECK(Q3.dimension == 0);
    }
}

TEST_CASE("the classic sextic arrangement has trivial quotient") {
    BinaryForm f = BinaryForm::from_classes({2, 17, 34});
    ConicalCurve D = build_D(f, FieldSpec::quadratic(5), cubic_F());
    REQUIRE(bipartite_double_structure(D));

    auto Q = curve_brauer_quotient(D, make_window(2, 23));
    CHECK(Q.window.S.size() == 10);
    CHECK(Q.layout.comp_block.size() == 5);
    CHECK(Q.layout.point_block.size() == 6);
    CHECK(Q.layout.branch_block.size() == 12);
    CHECK(Q.kernel.size() == 9);
    CHECK(Q.dimension == 0);
    CHECK(Q.invariants.empty());
    check_subgroup_inside_kernel(Q);

    auto E = curve_brauer_quotient(D, make_window(2, 23), QuotientPath::EliminatedPoints);
    CHECK(E.dimension == 0);
    CHECK(E.invariants == Q.invariants);
    check_subgroup_inside_kernel(E);
}

TEST_CASE("random tree curves have trivial quotient") {
    std::mt19937_64 rng(0x77ee5);
    for (int trial = 0; trial < 20; ++trial) {
        ConicalCurve C = testgen::random_tree_curve(rng, 1 + trial % 6);
        auto Q = curve_brauer_quotient(C, make_window(2, 17));
        INFO("trial ", trial);
        CHECK(Q.dimension == 0);
        check_subgroup_inside_kernel(Q);
    }
}

TEST_CASE("window validation") {
    BinaryForm f = BinaryForm::from_classes({2, 17, 34});
    ConicalCurve D = build_D(f, FieldSpec::quadratic(5), cubic_F());
    CHECK_THROWS_AS(curve_brauer_quotient(D, make_window(2, 5)), std::invalid_argument);

    ConicalCurve C = testgen::four_cycle();
    CHECK_THROWS_AS(curve_brauer_quotient(C, window(2, {Place::real(), Place::finite(5)})),
                    std::invalid_argument);
    CHECK_THROWS_AS(curve_brauer_quotient(C, window(2, {Place::finite(2), Place::finite(5)})),
                    std::invalid_argument);
    CHECK_THROWS_AS(curve_brauer_quotient(C, window(1, {Place::real(), Place::finite(2)})),
                    std::invalid_argument);

    SUBCASE("unsorted windows are canonicalized") {
        auto a = curve_brauer_quotient(
            C, window(2, {Place::finite(5), Place::real(), Place::finite(2),
                          Place::finite(5)}));
        auto b = curve_brauer_quotient(
            C, window(2, {Place::real(), Place::finite(2), Place::finite(5)}));
        CHECK(a.report().dump(2) == b.report().dump(2));
    }

    SUBCASE("reports carry the headline numbers") {
        auto r = curve_brauer_quotient(C, window(2, {Place::real(), Place::finite(2)})).report();
        CHECK(r.at("quotient_dimension") == 1);
        CHECK(r.at("kernel_rank") == 2);
        CHECK(r.at("path") == "general");
        CHECK(r.at("window").at("n") == 2);
        CHECK(r.at("window").at("S").size() == 2);
        CHECK(r.contains("representatives"));
    }
}
