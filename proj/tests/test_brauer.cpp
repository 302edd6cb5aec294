#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "conical/brauer.hpp"
#include "support/oracles.hpp"

using namespace conical;

namespace {

bool everywhere_unobstructed(const Rat& a, const Rat& b) {
    for (const Place& v : hilbert_support(a, b))
        if (!hilbert_invariant(a, b, v).is_zero()) return false;
    return true;
}

void check_on_conic(const std::array<Int, 3>& p, const Rat& a, const Rat& b) {
    CHECK(Rat(p[2]) * Rat(p[2]) == a * Rat(p[0]) * Rat(p[0]) + b * Rat(p[1]) * Rat(p[1]));
    CHECK((p[0] != 0 || p[1] != 0 || p[2] != 0));
    Int g = gcd(gcd(p[0], p[1]), p[2]);
    CHECK(g == 1);
    if (p[2] != 0)
        CHECK(p[2] > 0);
    else if (p[0] != 0)
        CHECK(p[0] > 0);
    else
        CHECK(p[1] > 0);
}

}  // namespace

TEST_CASE("conic labels map to quaternion classes with the right support") {
    CHECK(conic_class(ConicLabel::split()).is_zero());
    CHECK(conic_class(ConicLabel::quaternion(1, 7)).is_zero());
    CHECK(conic_class(ConicLabel::quaternion(2, 17)).is_zero());
    CHECK(conic_class(ConicLabel::quaternion(5, 4)).is_zero());
    CHECK_THROWS_AS(ConicLabel::quaternion(0, 3), std::invalid_argument);

    auto h = conic_class(ConicLabel::quaternion(-1, -1));
    CHECK(h.support().size() == 2);
    CHECK(h.invariant(Place::real(), 0) == QQZ::half());
    CHECK(h.invariant(Place::finite(2), 0) == QQZ::half());
    CHECK(h.invariant(Place::finite(7), 0).is_zero());

    auto g = conic_class(ConicLabel::quaternion(-1, -2));
    CHECK(g.support().size() == 2);
    CHECK(g.invariant(Place::real(), 0) == QQZ::half());
    CHECK(g.invariant(Place::finite(2), 0) == QQZ::half());

    auto t = conic_class(ConicLabel::quaternion(3, -1));
    CHECK(t.invariant(Place::finite(3), 0) == QQZ::half());
    CHECK(reciprocity_check(t).is_zero());
}

TEST_CASE("restriction to a quadratic field multiplies by local degrees") {
    auto h = conic_class(ConicLabel::quaternion(-1, -1));

    // the complex place swallows the real invariant, ramification at 2 kills
    // the rest
    CHECK(restrict_class(h, FieldSpec::quadratic(-1)).is_zero());

    auto r17 = restrict_class(h, FieldSpec::quadratic(17));
    CHECK(r17.support().size() == 4);
    CHECK(r17.invariant(Place::real(), 0) == QQZ::half());
    CHECK(r17.invariant(Place::real(), 1) == QQZ::half());
    CHECK(r17.invariant(Place::finite(2), 0) == QQZ::half());
    CHECK(r17.invariant(Place::finite(2), 1) == QQZ::half());

    auto r2 = restrict_class(h, FieldSpec::quadratic(2));
    CHECK(r2.support().size() == 2);
    CHECK(r2.invariant(Place::real(), 0) == QQZ::half());
    CHECK(r2.invariant(Place::real(), 1) == QQZ::half());
    CHECK(r2.invariant(Place::finite(2), 0).is_zero());

    auto rb = restrict_class(h, FieldSpec::biquadratic(2, 17));
    CHECK(rb.support().size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(rb.invariant(Place::real(), i) == QQZ::half());

    CHECK_THROWS_AS(restrict_class(r17, FieldSpec::quadratic(5)), unsupported_operation);
}

TEST_CASE("class arithmetic stays within one field and cancels") {
    auto h = conic_class(ConicLabel::quaternion(-1, -1));
    CHECK((h + h).is_zero());
    CHECK((h + (-h)).is_zero());
    CHECK(!(-h).is_zero());

    BrauerClass over5(FieldSpec::quadratic(5));
    CHECK_THROWS_AS(h + over5, unsupported_operation);
    CHECK_THROWS_AS(over5.set_invariant(Place::real(), -1, QQZ::half()),
                    std::invalid_argument);

    over5.add_invariant(Place::finite(3), 1, QQZ(1, 3));
    over5.add_invariant(Place::finite(3), 1, QQZ(2, 3));
    CHECK(over5.is_zero());
}

TEST_CASE("reciprocity vanishes for random quaternion classes and restrictions") {
    std::mt19937_64 rng(0x5eed6a11);
    std::uniform_int_distribution<long> coef(-150, 150);
    std::uniform_int_distribution<long> disc(-60, 60);
    int restricted = 0;
    for (int trial = 0; trial < 150; ++trial) {
        long a = coef(rng), b = coef(rng);
        if (a == 0 || b == 0) continue;
        auto x = conic_class(ConicLabel::quaternion(a, b));
        CHECK(reciprocity_check(x).is_zero());

        long d = disc(rng);
        if (d == 0 || d == 1 || !is_squarefree(Int(d))) continue;
        auto y = restrict_class(x, FieldSpec::quadratic(d));
        CHECK(reciprocity_check(y).is_zero());
        ++restricted;
    }
    CHECK(restricted >= 60);
}

TEST_CASE("conic points: pinned examples") {
    auto p = conic_point(1, 1);
    REQUIRE(p.has_value());
    check_on_conic(*p, 1, 1);

    auto q = conic_point(5, 4);
    REQUIRE(q.has_value());
    check_on_conic(*q, 5, 4);

    CHECK(!conic_point(-1, -1).has_value());
    CHECK(!conic_point(3, -1).has_value());
    CHECK(!conic_point(Rat(2), Rat(3)).has_value());

    auto r = conic_point(Rat(5, 9), Rat(4));
    REQUIRE(r.has_value());
    check_on_conic(*r, Rat(5, 9), Rat(4));

    auto s = conic_point(Rat(-7), Rat(8));
    REQUIRE(s.has_value());  // 1 = -7 + 8
    check_on_conic(*s, Rat(-7), Rat(8));

    CHECK_THROWS_AS(conic_point(Rat(0), Rat(3)), std::invalid_argument);
}

TEST_CASE("conic points exist exactly when no local invariant obstructs") {
    std::mt19937_64 rng(0xc0111c);
    std::uniform_int_distribution<long> coef(-300, 300);
    int soluble = 0, insoluble = 0;
    for (int trial = 0; trial < 150; ++trial) {
        long a = coef(rng), b = coef(rng);
        if (a == 0 || b == 0) continue;
        auto pt = conic_point(Rat(a), Rat(b));
        CHECK(pt.has_value() == everywhere_unobstructed(a, b));
        if (pt) {
            check_on_conic(*pt, Rat(a), Rat(b));
            ++soluble;
        } else {
            CHECK(!oracles::conic_small_point_brute(a, b, 40));
            ++insoluble;
        }
    }
    CHECK(soluble >= 20);
    CHECK(insoluble >= 20);
}

TEST_CASE("descent handles planted solutions with large coefficients") {
    std::mt19937_64 rng(0xb16c0ef5);
    std::uniform_int_distribution<long> big(1'000, 30'000);
    std::uniform_int_distribution<int> sign(0, 1);
    for (int trial = 0; trial < 30; ++trial) {
        Int a = Int(big(rng)) * (sign(rng) ? 1 : -1);
        Int x = big(rng), z = big(rng);
        Int b = z * z - a * x * x;  // (x, 1, z) lies on the conic
        if (b == 0) continue;
        auto pt = conic_point(Rat(a), Rat(b));
        REQUIRE(pt.has_value());
        check_on_conic(*pt, Rat(a), Rat(b));
    }
}

TEST_CASE("truncation windows enumerate small places once") {
    auto w = make_window(2, 13);
    CHECK(w.n == 2);
    CHECK(w.S.size() == 7);
    CHECK(w.contains(Place::real()));
    CHECK(w.contains(Place::finite(13)));
    CHECK(!w.contains(Place::finite(17)));
    CHECK(w.str() == "n=2 S={real,2,3,5,7,11,13}");

    auto v = make_window(4, 10, {13, 2, 29});
    CHECK(v.S.size() == 7);  // real, 2, 3, 5, 7, plus 13 and 29, no duplicates
    CHECK(v.contains(Place::finite(29)));

    auto tiny = make_window(6, 0);
    CHECK(tiny.S.size() == 2);
    CHECK(tiny.contains(Place::finite(2)));

    CHECK_THROWS_AS(make_window(0, 10), std::invalid_argument);
}
