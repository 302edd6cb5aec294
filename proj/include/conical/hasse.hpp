#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "conical/brauer.hpp"
#include "conical/curve.hpp"
#include "conical/curve_brauer.hpp"
#include "conical/fields.hpp"
#include "conical/forms.hpp"

namespace conical {

/* Is there a Q_v-point: a singular point whose field has a degree-one
 * place at v, or a component whose field does and whose conic is
 * v-soluble.  Throws insufficient_profile when that cannot be decided
 * from the stored field data. */
bool curve_local_points(const ConicalCurve& C, const Place& v);

/* Everywhere-local solubility, decided by finitely many direct checks
 * plus a residue-pattern argument for the remaining places.  When the
 * pattern argument does not apply, candidate primes are scanned up to a
 * bound; a clean scan leaves the answer uncertified. */
struct AdelicCertificate {
    enum class Status { Certified, CertifiedFailure, Uncertified };

    Status status = Status::Uncertified;
    std::optional<Place> witness;     // a place with no local point
    std::vector<DirectCheck> checks;  // every direct local check performed
    bool rank_argument = false;       // generic places settled by the pattern system
    long scanned_bound = 0;
    std::string summary;

    bool certified() const { return status == Status::Certified; }
    std::string status_str() const;
    nlohmann::json to_json() const;
};

AdelicCertificate curve_adelic_points(const ConicalCurve& C, long scan_bound = 1000);

struct PointWitness {
    enum class Kind { SingularPoint, SmoothOnComponent };

    Kind kind = Kind::SingularPoint;
    std::string orbit;
    std::optional<std::array<Int, 3>> conic_solution;
    std::string description;

    nlohmann::json to_json() const;
};

/* Rational points on a conical curve come from rational singular points
 * or from rational components whose conic has a rational point, so the
 * decision below is complete for this class of curves. */
struct RationalPointReport {
    bool exists = false;
    std::optional<PointWitness> witness;

    nlohmann::json to_json() const;
};

RationalPointReport curve_rational_points(const ConicalCurve& C);

/* For a tree-shaped curve with certified adelic points, produce the
 * rational point promised by the fixed vertex of the incidence graph.
 * A center whose conic refuses to yield a point is reported as a defect:
 * it would contradict the tree argument, not refute it. */
struct TreeHasseReport {
    bool is_tree = false;
    AdelicCertificate adelic;
    bool verified = false;
    std::optional<GraphVertex> center;
    std::optional<PointWitness> witness;
    std::vector<std::string> defects;
    std::string note;

    nlohmann::json to_json() const;
};

TreeHasseReport verify_tree_hasse(const ConicalCurve& C);

/* Values a kernel vector can take at Q_v-points, one set per window
 * place; evaluation picks the coordinate at a degree-one place of an
 * orbit that is locally inhabited.  Needs the general layout. */
std::vector<std::set<long long>> achievable_invariants(const ConicalCurve& C,
                                                       const BrauerQuotient& Q,
                                                       const ModVec& x);

// no combination of local evaluations of x sums to zero
bool element_obstructs(const ConicalCurve& C, const BrauerQuotient& Q, const ModVec& x);

enum class CurveClassification {
    HasRationalPoints,
    LocallyObstructed,
    BrauerObstructed,
    CounterexampleTrivialBrauer,
    UnexplainedNoObstruction,
    AdelicUndecided,
    WindowUndecided,
};

struct CounterexampleReport {
    CurveClassification classification = CurveClassification::WindowUndecided;
    RationalPointReport rational;
    AdelicCertificate adelic;
    std::optional<Place> window_failure;  // window place with no local point
    std::optional<BrauerQuotient> quotient;
    std::optional<ModVec> obstruction_witness;
    int elements_checked = 0;
    std::string caveat;

    std::string classification_str() const;
    nlohmann::json to_json() const;
};

CounterexampleReport counterexample_report(const ConicalCurve& C, const TruncationWindow& W,
                                           long scan_bound = 1000);

/* One local root of the form per requested place: an exact residue to
 * the requested p-adic precision, or a double at the real place.  The
 * corresponding curve point sits on the line z = 0 at (x : y : 0). */
nlohmann::json sample_adelic_point(const BinaryForm& f, const std::vector<Place>& S,
                                   int precision);

}  // namespace conical
