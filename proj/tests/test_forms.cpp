#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "conical/forms.hpp"
#include "support/oracles.hpp"

using namespace conical;

namespace {

// local solubility of the zero scheme at v, from first principles: a linear
// factor always has a local root, a quadratic one exactly when d is a square
bool locally_soluble_brute(const BinaryForm& f, const Place& v) {
    for (const auto& fac : f.factors()) {
        if (fac.kind == FormFactor::Kind::Linear) return true;
        if (oracles::local_square_brute(Rat(fac.d), v)) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("factors normalize roots and reject degenerate data") {
    auto f = FormFactor::linear(Int(-4), Int(-6));
    CHECK(f.p == 2);
    CHECK(f.q == 3);
    CHECK(factor_equal(f, FormFactor::linear(Rat(2, 3))));
    CHECK(!factor_equal(f, FormFactor::linear(Rat(2))));

    auto inf = FormFactor::linear(Int(-5), Int(0));
    CHECK(inf.p == 1);
    CHECK(inf.q == 0);
    CHECK(inf.str() == "(y)");
    CHECK(FormFactor::linear(Int(0), Int(7)).str() == "(x)");
    CHECK(FormFactor::linear(Int(-1), Int(1)).str() == "(x+y)");
    CHECK(FormFactor::linear(Int(3), Int(2)).str() == "(2x-3y)");
    CHECK(FormFactor::quadratic(Int(-1)).str() == "(x^2+y^2)");
    CHECK(FormFactor::quadratic(Int(34)).str() == "(x^2-34y^2)");

    CHECK_THROWS_AS(FormFactor::linear(Int(0), Int(0)), std::invalid_argument);
    CHECK_THROWS_AS(FormFactor::quadratic(Int(0)), std::invalid_argument);
    CHECK_THROWS_AS(FormFactor::quadratic(Int(1)), std::invalid_argument);
    CHECK_THROWS_AS(FormFactor::quadratic(Int(12)), std::invalid_argument);
}

TEST_CASE("forms multiply out, keep degree bookkeeping, and demand separability") {
    auto f = BinaryForm::from_classes({2, 17, 34});
    CHECK(f.degree() == 6);
    CHECK(f.str() == "(x^2-2y^2)(x^2-17y^2)(x^2-34y^2)");
    CHECK(f.coeffs() == Poly{-1156, 0, 680, 0, -53, 0, 1});

    BinaryForm g({FormFactor::linear(Rat(1)), FormFactor::linear(Int(1), Int(0)),
                  FormFactor::quadratic(Int(2))});
    CHECK(g.degree() == 4);
    // (x - y) * y * (x^2 - 2 y^2) dehomogenized at y = 1
    CHECK(g.coeffs() == Poly{2, -2, -1, 1});

    auto alg = g.algebra();
    REQUIRE(alg.size() == 3);
    CHECK(alg[0].kind() == FieldKind::Rational);
    CHECK(alg[2].kind() == FieldKind::Quadratic);
    CHECK(alg[2].quad_class() == 2);

    CHECK_THROWS_AS(BinaryForm::from_classes({2, 17, 2}), std::invalid_argument);
    CHECK_THROWS_AS(BinaryForm({FormFactor::linear(Rat(1, 2)),
                                FormFactor::linear(Int(-2), Int(-4))}),
                    std::invalid_argument);
    CHECK_THROWS_AS(BinaryForm({}), std::invalid_argument);
}

TEST_CASE("the classic sextic violates the Hasse principle") {
    auto r = analyze_form(BinaryForm::from_classes({2, 17, 34}));
    CHECK(r.verdict == HasseReport::Verdict::Counterexample);
    CHECK(r.verdict_str() == "counterexample");
    CHECK(!r.globally_soluble);
    CHECK(!r.rational_root.has_value());
    CHECK(r.locally_soluble_everywhere);
    CHECK(r.certificate.used_rank_argument);
    for (const auto& c : r.certificate.checks) CHECK(c.soluble);
}

TEST_CASE("single quadratic classes are locally obstructed with a witness") {
    auto r = analyze_form(BinaryForm::from_classes({2}));
    CHECK(r.verdict == HasseReport::Verdict::LocallyObstructed);
    CHECK(!r.globally_soluble);
    CHECK(!r.locally_soluble_everywhere);
    REQUIRE(r.certificate.witness.has_value());
    CHECK(*r.certificate.witness == Place::finite(2));
    CHECK(!locally_soluble_brute(BinaryForm::from_classes({2}), Place::finite(2)));
    CHECK(!locally_soluble_brute(BinaryForm::from_classes({2}), Place::finite(5)));

    auto s = analyze_form(BinaryForm::from_classes({-1, 2, -2}));
    CHECK(s.verdict == HasseReport::Verdict::LocallyObstructed);
    REQUIRE(s.certificate.witness.has_value());
    CHECK(!locally_soluble_brute(BinaryForm::from_classes({-1, 2, -2}),
                                 *s.certificate.witness));
}

TEST_CASE("a linear factor settles solubility outright") {
    BinaryForm f({FormFactor::linear(Rat(1)), FormFactor::quadratic(Int(2))});
    auto r = analyze_form(f);
    CHECK(r.verdict == HasseReport::Verdict::Soluble);
    CHECK(r.globally_soluble);
    REQUIRE(r.rational_root.has_value());
    CHECK(r.rational_root->first == 1);
    CHECK(r.rational_root->second == 1);
    CHECK(r.locally_soluble_everywhere);

    BinaryForm inf({FormFactor::linear(Int(1), Int(0))});
    auto s = analyze_form(inf);
    CHECK(s.verdict == HasseReport::Verdict::Soluble);
    CHECK(s.rational_root->second == 0);
}

TEST_CASE("local verdicts agree with brute residue checks place by place") {
    std::mt19937_64 rng(0xf0a735);
    std::uniform_int_distribution<long> cls(-40, 40);
    std::vector<Place> places = {Place::real()};
    for (long p = 2; p < 60; ++p)
        if (is_prime(Int(p))) places.push_back(Place::finite(p));

    int done = 0;
    for (int trial = 0; trial < 200 && done < 60; ++trial) {
        std::set<Int> ds;
        int want = 1 + (int)(trial % 3);
        while ((int)ds.size() < want) {
            long d = cls(rng);
            if (d != 0 && d != 1 && is_squarefree(Int(d))) ds.insert(d);
        }
        auto f = BinaryForm::from_classes({ds.begin(), ds.end()});
        auto r = analyze_form(f);
        bool brute_all = true;
        for (const auto& v : places) brute_all &= locally_soluble_brute(f, v);
        if (r.locally_soluble_everywhere) {
            CHECK(brute_all);
        } else {
            REQUIRE(r.certificate.witness.has_value());
            CHECK(!locally_soluble_brute(f, *r.certificate.witness));
        }
        ++done;
    }
    CHECK(done == 60);
}

TEST_CASE("construct_form pins: the documented c values") {
    auto f = construct_form(Int(2), Int(5));
    REQUIRE(f.factors().size() == 4);
    CHECK(f.degree() == 8);
    CHECK(f.factors()[0].d == 2);
    CHECK(f.factors()[1].d == 5);
    CHECK(f.factors()[2].d == 10);
    CHECK(f.factors()[3].d == 41);

    auto g = construct_form(Int(3), Int(-1));
    CHECK(g.factors()[2].d == -3);
    Int c = g.factors()[3].d;
    CHECK(c == 73);
    CHECK(c > 0);
    CHECK(c % 8 == 1);
    CHECK(legendre_symbol(c, Int(3)) == 1);

    CHECK_THROWS_AS(construct_form(Int(2), Int(2)), std::invalid_argument);
    CHECK_THROWS_AS(construct_form(Int(1), Int(5)), std::invalid_argument);
    CHECK_THROWS_AS(construct_form(Int(4), Int(5)), std::invalid_argument);
}

TEST_CASE("construct_form output self-certifies for random valid inputs") {
    std::mt19937_64 rng(0x8f0e9);
    std::uniform_int_distribution<long> cls(-50, 50);
    int done = 0;
    while (done < 50) {
        long a = cls(rng), b = cls(rng);
        if (a == 0 || a == 1 || !is_squarefree(Int(a))) continue;
        if (b == 0 || b == 1 || a == b || !is_squarefree(Int(b))) continue;
        auto f = construct_form(Int(a), Int(b));
        CHECK(f.degree() == 8);
        Int c = f.factors()[3].d;
        CHECK(c > 0);
        CHECK(c % 8 == 1);
        CHECK(is_squarefree(c));
        for (const auto& [p, e] : factorize(Int(a) * Int(b)))
            if (p != 2) CHECK(legendre_symbol(c, p) == 1);
        CHECK(analyze_form(f).verdict == HasseReport::Verdict::Counterexample);
        ++done;
    }
}
