#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "conical/builders.hpp"
#include "conical/errors.hpp"
#include "conical/hasse.hpp"
#include "support/curves.hpp"

using namespace conical;

namespace {

BinaryForm eq2_form() { return BinaryForm::from_classes({Int(2), Int(17), Int(34)}); }

// a single rational cone whose conic has no real points
ConicalCurve quaternion_cone() {
    ConicalCurve C;
    C.components.push_back({"A", FieldSpec::rational(), {0}});
    C.conics = {ConicLabel::quaternion(Rat(-1), Rat(-1))};
    C.galois = galois_from_labels(C);
    return C;
}

/* Two conjugate conic pairs, over Q(sqrt u) and Q(sqrt v), crossing in a
 * single orbit of four points over the biquadratic field.  Each pair
 * covers the other's ramified primes, so the only local failures sit at
 * primes where u and v are both nonresidues. */
ConicalCurve crossed_pairs(long u, long v) {
    FieldSpec Ku = FieldSpec::quadratic(u), Kv = FieldSpec::quadratic(v);
    FieldSpec M = FieldSpec::biquadratic(u, v);
    ConicalCurve C;
    C.components.push_back({"A", Ku, {0, 1}});
    C.components.push_back({"B", Kv, {2, 3}});
    C.conics = {ConicLabel::split(), ConicLabel::split()};
    C.points.push_back({"P", M, {0, 1, 2, 3}});
    C.branches.push_back({"BA", M, {0, 1, 2, 3}});
    C.branches.push_back({"BB", M, {4, 5, 6, 7}});
    for (int j = 0; j < 4; ++j) {
        C.src.push_back(testgen::detail::project_member(Ku, M, j));
        C.dst.push_back(j);
    }
    for (int j = 0; j < 4; ++j) {
        C.src.push_back(2 + testgen::detail::project_member(Kv, M, j));
        C.dst.push_back(j);
    }
    C.galois = galois_from_labels(C);
    return C;
}

/* Conjugate lines over a degree-two field known only through a partial
 * profile: the stored table covers the real place and 2, nothing else,
 * so local questions away from those places cannot be settled. */
ConicalCurve profiled_pair() {
    FieldSpec T = FieldSpec::profiled(
        "T2", 2, {{Place::real(), {1, 1}}, {Place::finite(2), {1, 1}}}, {});
    ConicalCurve C;
    C.components.push_back({"A", T, {0, 1}});
    C.conics = {ConicLabel::split()};
    C.points.push_back({"P", T, {0, 1}});
    C.branches.push_back({"B0", T, {0, 1}});
    C.branches.push_back({"B1", T, {2, 3}});
    C.src = {0, 1, 1, 0};
    C.dst = {0, 1, 0, 1};
    C.galois.group = GaloisGroup::elem2(1);
    C.galois.on_components = {{0, 1}, {1, 0}};
    C.galois.on_points = {{0, 1}, {1, 0}};
    C.galois.on_branches = {{0, 1, 2, 3}, {1, 0, 3, 2}};
    return C;
}

ConicalCurve the_arrangement() {
    return build_D(eq2_form(), FieldSpec::quadratic(5),
                   FieldSpec::profiled("F", 3,
                                       {{Place::real(), {1, 2}}, {Place::finite(23), {1, 2}}},
                                       {23}, Poly{Int(-1), Int(-1), Int(0), Int(1)}));
}

}  // namespace

TEST_CASE("local points follow the degree-one places and the conics") {
    ConicalCurve lines = testgen::conjugate_lines();
    CHECK(curve_local_points(lines, Place::real()));
    CHECK_FALSE(curve_local_points(lines, Place::finite(2)));
    CHECK_FALSE(curve_local_points(lines, Place::finite(5)));
    CHECK(curve_local_points(lines, Place::finite(7)));

    ConicalCurve four = testgen::four_cycle();
    for (long p : {2L, 3L, 5L, 17L}) CHECK(curve_local_points(four, Place::finite(p)));
    CHECK(curve_local_points(four, Place::real()));

    ConicalCurve cone = quaternion_cone();
    CHECK_FALSE(curve_local_points(cone, Place::real()));
    CHECK_FALSE(curve_local_points(cone, Place::finite(2)));
    CHECK(curve_local_points(cone, Place::finite(7)));

    ConicalCurve D = the_arrangement();
    for (long p : {2L, 5L, 17L, 23L}) CHECK(curve_local_points(D, Place::finite(p)));
    CHECK(curve_local_points(D, Place::real()));

    ConicalCurve prof = profiled_pair();
    CHECK(curve_local_points(prof, Place::real()));
    CHECK(curve_local_points(prof, Place::finite(2)));
    CHECK_THROWS_AS(curve_local_points(prof, Place::finite(3)), insufficient_profile);
}

TEST_CASE("adelic certification on the control curves") {
    SUBCASE("a rational singular point settles everything at once") {
        AdelicCertificate c = curve_adelic_points(build_Cf(eq2_form()));
        CHECK(c.certified());
        CHECK(c.checks.empty());
        CHECK(c.status_str() == "certified");
        CHECK(c.summary.find("P.0") != std::string::npos);
    }
    SUBCASE("a rational component plus exceptional checks") {
        AdelicCertificate c = curve_adelic_points(testgen::four_cycle());
        CHECK(c.certified());
        CHECK(c.rank_argument);
        CHECK(c.checks.size() == 2);  // the real place and 2
        for (const DirectCheck& d : c.checks) CHECK(d.soluble);
    }
    SUBCASE("the classic arrangement is certified by the residue pattern argument") {
        AdelicCertificate c = curve_adelic_points(the_arrangement());
        CHECK(c.certified());
        CHECK(c.rank_argument);
        CHECK(c.checks.size() == 5);  // real, 2, 5, 17, 23
        CHECK_FALSE(c.witness.has_value());
    }
    SUBCASE("conjugate lines die at their ramified prime") {
        AdelicCertificate c = curve_adelic_points(testgen::conjugate_lines());
        CHECK(c.status == AdelicCertificate::Status::CertifiedFailure);
        REQUIRE(c.witness.has_value());
        CHECK(*c.witness == Place::finite(2));
        CHECK(c.status_str() == "certified_failure");
    }
    SUBCASE("a real-insoluble conic fails at the first exceptional place") {
        AdelicCertificate c = curve_adelic_points(quaternion_cone());
        CHECK(c.status == AdelicCertificate::Status::CertifiedFailure);
        REQUIRE(c.witness.has_value());
        CHECK(*c.witness == Place::real());
    }
    SUBCASE("the candidate scan finds the common nonresidue prime") {
        AdelicCertificate c = curve_adelic_points(crossed_pairs(17, 13));
        CHECK(c.status == AdelicCertificate::Status::CertifiedFailure);
        REQUIRE(c.witness.has_value());
        CHECK(*c.witness == Place::finite(5));
        // the four exceptional places all passed before the scan ran
        CHECK(c.checks.size() == 5);
        CHECK_FALSE(c.checks.back().soluble);
    }
    SUBCASE("a short scan leaves the same curve uncertified") {
        AdelicCertificate c = curve_adelic_points(crossed_pairs(17, 13), 4);
        CHECK(c.status == AdelicCertificate::Status::Uncertified);
        CHECK(c.scanned_bound == 4);
        CHECK_FALSE(c.witness.has_value());
    }
    SUBCASE("a partial profile cannot be certified at any bound") {
        AdelicCertificate c = curve_adelic_points(profiled_pair(), 60);
        CHECK(c.status == AdelicCertificate::Status::Uncertified);
        CHECK(c.checks.size() == 2);
        for (const DirectCheck& d : c.checks) CHECK(d.soluble);
    }
    SUBCASE("random trees are certified through their rational root") {
        std::mt19937_64 rng(0xadde11);
        for (int t = 0; t < 10; ++t) {
            AdelicCertificate c = curve_adelic_points(testgen::random_tree_curve(rng, 4));
            CHECK(c.certified());
        }
    }
}

TEST_CASE("rational points and their witnesses") {
    RationalPointReport cf = curve_rational_points(build_Cf(eq2_form()));
    CHECK(cf.exists);
    REQUIRE(cf.witness.has_value());
    CHECK(cf.witness->kind == PointWitness::Kind::SingularPoint);
    CHECK(cf.witness->orbit == "P");

    RationalPointReport four = curve_rational_points(testgen::four_cycle());
    CHECK(four.exists);
    REQUIRE(four.witness.has_value());
    CHECK(four.witness->kind == PointWitness::Kind::SmoothOnComponent);
    CHECK(four.witness->orbit == "A");
    REQUIRE(four.witness->conic_solution.has_value());
    auto [x, y, z] = *four.witness->conic_solution;
    CHECK(x * x + y * y == z * z);
    CHECK(z != 0);

    SUBCASE("a soluble quaternion conic yields a checked solution") {
        ConicalCurve C;
        C.components.push_back({"A", FieldSpec::rational(), {0}});
        C.conics = {ConicLabel::quaternion(Rat(2), Rat(7))};
        C.galois = galois_from_labels(C);
        RationalPointReport r = curve_rational_points(C);
        CHECK(r.exists);
        REQUIRE(r.witness.has_value());
        auto [a, b, c] = *r.witness->conic_solution;
        CHECK(2 * a * a + 7 * b * b == c * c);
    }
    SUBCASE("an insoluble conic on the only rational component blocks the witness") {
        CHECK_FALSE(curve_rational_points(quaternion_cone()).exists);
    }
    SUBCASE("curves without rational strata have none") {
        CHECK_FALSE(curve_rational_points(the_arrangement()).exists);
        CHECK_FALSE(curve_rational_points(testgen::conjugate_lines()).exists);
        CHECK_FALSE(curve_rational_points(crossed_pairs(17, 13)).exists);
    }
}

TEST_CASE("the tree argument produces rational points") {
    SUBCASE("the cone curve centers on its rational apex") {
        TreeHasseReport r = verify_tree_hasse(build_Cf(eq2_form()));
        CHECK(r.is_tree);
        CHECK(r.adelic.certified());
        REQUIRE(r.center.has_value());
        CHECK(r.center->is_point);
        CHECK(r.verified);
        REQUIRE(r.witness.has_value());
        CHECK(r.witness->kind == PointWitness::Kind::SingularPoint);
        CHECK(r.witness->orbit == "P");
        CHECK(r.defects.empty());
    }
    SUBCASE("a single line centers on itself") {
        TreeHasseReport r =
            verify_tree_hasse(build_Cf(BinaryForm({FormFactor::linear(Int(1), Int(1))})));
        CHECK(r.is_tree);
        CHECK(r.verified);
        REQUIRE(r.center.has_value());
        CHECK_FALSE(r.center->is_point);
        REQUIRE(r.witness.has_value());
        CHECK(r.witness->kind == PointWitness::Kind::SmoothOnComponent);
    }
    SUBCASE("cycles are declined") {
        TreeHasseReport r = verify_tree_hasse(testgen::four_cycle());
        CHECK_FALSE(r.is_tree);
        CHECK_FALSE(r.verified);
        CHECK_FALSE(r.note.empty());
    }
    SUBCASE("a tree without adelic points is not pushed through") {
        TreeHasseReport r = verify_tree_hasse(quaternion_cone());
        CHECK(r.is_tree);
        CHECK_FALSE(r.verified);
        CHECK(r.adelic.status_str() == "certified_failure");
        CHECK_FALSE(r.note.empty());
    }
    SUBCASE("random trees verify end to end") {
        std::mt19937_64 rng(0x7ee5a1);
        for (int t = 0; t < 20; ++t) {
            TreeHasseReport r = verify_tree_hasse(testgen::random_tree_curve(rng, 5));
            CHECK(r.is_tree);
            CHECK(r.verified);
            CHECK(r.defects.empty());
            CHECK(r.witness.has_value());
        }
    }
}

TEST_CASE("local evaluation of window classes") {
    ConicalCurve C = testgen::four_cycle();
    TruncationWindow W{2, {Place::real(), Place::finite(2), Place::finite(5)}};
    BrauerQuotient Q = curve_brauer_quotient(C, W);
    REQUIRE(Q.layout.domain_dim() == 9);

    // the kernel class supported on component A at the real place and 2
    ModVec q = {1, 1, 0, 0, 0, 0, 0, 0, 0};
    auto sets = achievable_invariants(C, Q, q);
    REQUIRE(sets.size() == 3);
    CHECK(sets[0] == std::set<long long>{0, 1});  // real: A gives 1, B gives 0
    CHECK(sets[1] == std::set<long long>{0, 1});  // 2: likewise, P has no degree-one place
    CHECK(sets[2] == std::set<long long>{0});     // 5: every orbit evaluates to 0
    CHECK_FALSE(element_obstructs(C, Q, q));

    // forcing value 1 at the real place alone would obstruct
    ModVec forced = {1, 0, 0, 1, 0, 0, 0, 0, 0};
    auto fsets = achievable_invariants(C, Q, forced);
    CHECK(fsets[0] == std::set<long long>{1});
    CHECK(fsets[1] == std::set<long long>{0});
    CHECK(element_obstructs(C, Q, forced));

    SUBCASE("the eliminated layout cannot be evaluated") {
        BrauerQuotient E = curve_brauer_quotient(C, W, QuotientPath::EliminatedPoints);
        CHECK_THROWS_AS(achievable_invariants(C, E, ModVec(E.layout.domain_dim(), 0)),
                        std::invalid_argument);
    }
    SUBCASE("length mismatches are rejected") {
        CHECK_THROWS_AS(achievable_invariants(C, Q, ModVec(3, 0)), std::invalid_argument);
    }
}

TEST_CASE("classification of the control curves") {
    SUBCASE("curves with points are recognized before any window analysis") {
        CounterexampleReport r =
            counterexample_report(build_Cf(eq2_form()), make_window(2, 17));
        CHECK(r.classification == CurveClassification::HasRationalPoints);
        CHECK(r.classification_str() == "has_rational_points");
        CHECK(r.rational.exists);
        CHECK_FALSE(r.quotient.has_value());

        CounterexampleReport f =
            counterexample_report(testgen::four_cycle(), make_window(2, 5));
        CHECK(f.classification == CurveClassification::HasRationalPoints);
    }
    SUBCASE("local obstructions are reported with their witness") {
        CounterexampleReport r =
            counterexample_report(testgen::conjugate_lines(), make_window(2, 5));
        CHECK(r.classification == CurveClassification::LocallyObstructed);
        CHECK(r.classification_str() == "locally_obstructed");
        REQUIRE(r.adelic.witness.has_value());
        CHECK(*r.adelic.witness == Place::finite(2));

        CounterexampleReport s = counterexample_report(
            crossed_pairs(17, 13), make_window(2, 3, {13L, 17L}));
        CHECK(s.classification == CurveClassification::LocallyObstructed);
        REQUIRE(s.adelic.witness.has_value());
        CHECK(*s.adelic.witness == Place::finite(5));
    }
    SUBCASE("the arrangement survives every test the window can apply") {
        CounterexampleReport r =
            counterexample_report(the_arrangement(), make_window(2, 23));
        CHECK(r.classification == CurveClassification::CounterexampleTrivialBrauer);
        CHECK(r.classification_str() == "counterexample_with_trivial_truncated_Brauer");
        CHECK_FALSE(r.rational.exists);
        CHECK(r.adelic.certified());
        REQUIRE(r.quotient.has_value());
        CHECK(r.quotient->dimension == 0);
        CHECK(r.elements_checked == 0);
        CHECK_FALSE(r.caveat.empty());
        nlohmann::json j = r.to_json();
        CHECK(j["classification"] == "counterexample_with_trivial_truncated_Brauer");
        CHECK(j["quotient_dimension"] == 0);
    }
    SUBCASE("a window class can obstruct even when the scan is inconclusive") {
        CounterexampleReport r =
            counterexample_report(profiled_pair(), make_window(2, 2), 60);
        CHECK(r.classification == CurveClassification::BrauerObstructed);
        CHECK(r.classification_str() == "BM_obstructed");
        CHECK(r.adelic.status == AdelicCertificate::Status::Uncertified);
        REQUIRE(r.quotient.has_value());
        CHECK(r.quotient->dimension == 2);
        REQUIRE(r.obstruction_witness.has_value());
        CHECK(element_obstructs(profiled_pair(), *r.quotient, *r.obstruction_witness));
        CHECK(r.elements_checked >= 1);
    }
    SUBCASE("a window the profile cannot fill leaves the adelic question open") {
        CounterexampleReport r =
            counterexample_report(profiled_pair(), make_window(2, 3), 60);
        CHECK(r.classification == CurveClassification::AdelicUndecided);
        CHECK(r.classification_str() == "adelic_points_undecided");
        CHECK_FALSE(r.quotient.has_value());
        CHECK(r.adelic.status == AdelicCertificate::Status::Uncertified);
    }
}

TEST_CASE("local samples of the binary form") {
    BinaryForm f = eq2_form();

    SUBCASE("an odd prime uses a square root of the first residue class") {
        nlohmann::json s = sample_adelic_point(f, {Place::finite(17)}, 5);
        REQUIRE(s.size() == 1);
        CHECK(s[0]["place"] == "17");
        CHECK(s[0]["modulus"] == "17^5");
        Int r(s[0]["xy_ratio"].get<std::string>());
        Int mod(1419857);  // 17^5
        CHECK((r * r - 2) % mod == 0);
        Int rm = r % 17;
        CHECK((rm == 6 || rm == 11));
        CHECK(sample_adelic_point(f, {Place::finite(17)}, 5) == s);
    }
    SUBCASE("the real sample is the double square root of the first positive class") {
        nlohmann::json s = sample_adelic_point(f, {Place::real()}, 3);
        CHECK(s[0]["precision"] == "double");
        CHECK(s[0]["xy_ratio"].get<double>() == std::sqrt(2.0));
    }
    SUBCASE("at 2 only the residue 1 mod 8 class lifts") {
        nlohmann::json s = sample_adelic_point(f, {Place::finite(2)}, 4);
        CHECK(s[0]["modulus"] == "2^4");
        CHECK(s[0]["factor"] == FormFactor::quadratic(Int(17)).str());
        Int r(s[0]["xy_ratio"].get<std::string>());
        CHECK((r * r - 17) % 16 == 0);
    }
    SUBCASE("dyadic precision is raised to the minimum the lift needs") {
        nlohmann::json s = sample_adelic_point(f, {Place::finite(2)}, 2);
        CHECK(s[0]["modulus"] == "2^3");
    }
    SUBCASE("places are visited in canonical order") {
        nlohmann::json s =
            sample_adelic_point(f, {Place::finite(17), Place::real(), Place::finite(2)}, 3);
        REQUIRE(s.size() == 3);
        CHECK(s[0]["place"] == "real");
        CHECK(s[1]["place"] == "2");
        CHECK(s[2]["place"] == "17");
    }
    SUBCASE("linear factors give exact residues") {
        BinaryForm g({FormFactor::linear(Int(1), Int(3)), FormFactor::quadratic(Int(2))});
        nlohmann::json s = sample_adelic_point(g, {Place::finite(5)}, 3);
        Int r(s[0]["xy_ratio"].get<std::string>());
        CHECK((3 * r - 1) % 125 == 0);
    }
    SUBCASE("the root at infinity is reported through the inverse ratio") {
        BinaryForm g({FormFactor::linear(Int(1), Int(0)), FormFactor::quadratic(Int(-1))});
        nlohmann::json s = sample_adelic_point(g, {Place::finite(7)}, 2);
        CHECK(s[0].contains("yx_ratio"));
        CHECK(Int(s[0]["yx_ratio"].get<std::string>()) == 0);
        nlohmann::json t = sample_adelic_point(g, {Place::real()}, 2);
        CHECK(t[0]["at_infinity"] == true);
    }
    SUBCASE("insoluble places are refused") {
        BinaryForm g = BinaryForm::from_classes({Int(-1)});
        CHECK_THROWS_AS(sample_adelic_point(g, {Place::real()}, 3), std::invalid_argument);
        CHECK_THROWS_AS(sample_adelic_point(g, {Place::finite(7)}, 3), std::invalid_argument);
        nlohmann::json ok = sample_adelic_point(g, {Place::finite(5)}, 2);
        Int r(ok[0]["xy_ratio"].get<std::string>());
        CHECK((r * r + 1) % 25 == 0);
    }
}
