#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conical/arith.hpp"
#include "conical/errors.hpp"
#include "conical/fields.hpp"
#include "conical/place.hpp"
#include "conical/qqz.hpp"

namespace conical {

/* What the conic bundle structure of a component is: a split line, or a
 * smooth conic z^2 = a x^2 + b y^2 with rational coefficients (conics on
 * non-rational components are base changes of these). */
struct ConicLabel {
    enum class Kind { Split, Quaternion };
    Kind kind = Kind::Split;
    Rat a = 1, b = 1;

    static ConicLabel split() { return {}; }
    static ConicLabel quaternion(const Rat& a, const Rat& b) {
        if (a == 0 || b == 0)
            throw std::invalid_argument("quaternion label needs nonzero coefficients");
        return {Kind::Quaternion, a, b};
    }
    bool is_split() const { return kind == Kind::Split; }
};

/* A Brauer element of a field K in local-invariant form: a finitely
 * supported map (place v of Q, index of a place of K over v) -> Q/Z.
 * Indices follow local_places(K, v).  Nothing here assumes the class is
 * global; reciprocity_check measures that. */
class BrauerClass {
public:
    BrauerClass() : field_(FieldSpec::rational()) {}
    explicit BrauerClass(FieldSpec field) : field_(std::move(field)) {}

    const FieldSpec& field() const { return field_; }

    QQZ invariant(const Place& v, int branch) const {
        auto it = inv_.find({v, branch});
        return it == inv_.end() ? QQZ::zero() : it->second;
    }
    void set_invariant(const Place& v, int branch, const QQZ& val) {
        if (branch < 0) throw std::invalid_argument("negative branch index");
        if (val.is_zero())
            inv_.erase({v, branch});
        else
            inv_[{v, branch}] = val;
    }
    void add_invariant(const Place& v, int branch, const QQZ& val) {
        set_invariant(v, branch, invariant(v, branch) + val);
    }

    const std::map<std::pair<Place, int>, QQZ>& support() const { return inv_; }
    bool is_zero() const { return inv_.empty(); }

    BrauerClass operator+(const BrauerClass& o) const {
        if (!spec_equal(field_, o.field_))
            throw unsupported_operation("adding classes over different fields");
        BrauerClass r = *this;
        for (const auto& [k, q] : o.inv_) r.add_invariant(k.first, k.second, q);
        return r;
    }
    BrauerClass operator-() const {
        BrauerClass r(field_);
        for (const auto& [k, q] : inv_) r.set_invariant(k.first, k.second, -q);
        return r;
    }

    std::string str() const;

private:
    FieldSpec field_;
    std::map<std::pair<Place, int>, QQZ> inv_;
};

// the quaternion class of a conic label, as a Brauer element over Q
BrauerClass conic_class(const ConicLabel& c);

// restriction along Q -> K: multiply each local invariant by the local
// degree of the place of K above it; complex places die
BrauerClass restrict_class(const BrauerClass& x, const FieldSpec& K);

// sum of all local invariants; zero characterizes global classes
QQZ reciprocity_check(const BrauerClass& x);

/* A nonzero point on z^2 = a x^2 + b y^2 as a primitive integer triple
 * (x, y, z), or nothing when the conic has no rational point.  Existence
 * matches the vanishing of every Hilbert invariant; the point is verified
 * exactly before being returned. */
std::optional<std::array<Int, 3>> conic_point(const Rat& a, const Rat& b);

/* The finite box in which Brauer computations happen: classes of order
 * dividing n, supported over the places in S. */
struct TruncationWindow {
    long n = 2;
    std::vector<Place> S;

    bool contains(const Place& v) const;
    std::string str() const;
};

// S = {real, 2, primes <= places_max} plus the listed extra primes
TruncationWindow make_window(long n, long places_max,
                             const std::vector<long>& extra_primes = {});

}  // namespace conical
