#pragma once

#include <map>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "conical/brauer.hpp"
#include "conical/curve.hpp"
#include "conical/modlin.hpp"

namespace conical {

/* One coordinate of the truncated adelic lattice of a curve: a place of
 * the field of one orbit, lying over a place of Q inside the window.
 * Complex places carry no invariants and get no coordinate. */
struct BrauerCoord {
    int family = 0;  // 0 component orbit, 1 point orbit, 2 branch orbit
    int orbit = 0;
    Place v = Place::real();
    int w = 0;  // index into local_places(field, v)
    int deg = 1;
};

/* Coordinate frames for the difference-of-restrictions map.  The domain
 * stacks one block per component orbit, then one per point orbit (the
 * point blocks are absent on the eliminated path); the target stacks one
 * block per branch orbit.  Places run through the window in order, and
 * within a place follow local_places of the orbit field. */
struct BrauerLayout {
    TruncationWindow window;
    std::vector<BrauerCoord> domain;
    std::vector<BrauerCoord> target;
    std::vector<int> comp_block;
    std::vector<int> point_block;
    std::vector<int> branch_block;
    std::map<std::tuple<int, int, Place, int>, int> col;

    int domain_dim() const { return (int)domain.size(); }
    int col_of(int family, int orbit, const Place& v, int w) const;
};

BrauerLayout brauer_layout(const ConicalCurve& C, const TruncationWindow& W);

/* Whether to carry the point blocks explicitly or substitute them away.
 * The substitution needs every point orbit to meet exactly two branch
 * orbits of its own size whose fields equal the point field; then the
 * point coordinates are determined by the component ones and the two
 * computations give the same quotient. */
enum class QuotientPath { General, EliminatedPoints };

bool bipartite_double_structure(const ConicalCurve& C);

/* The defining rows of the kernel against a full frame (point blocks
 * present): agreement along every branch orbit followed by the
 * global-class conditions on each orbit block.  Exposed so diagnostics
 * can re-derive the kernel with independent linear algebra. */
ModMatrix brauer_constraint_rows(const ConicalCurve& C, const BrauerLayout& L);

/* The truncated vertical Brauer quotient of a conical curve: collections
 * of global classes on the orbit fields that agree along every branch,
 * taken modulo the conic classes of the components and the diagonal image
 * of the rational Brauer classes supported in the window. */
struct BrauerQuotient {
    TruncationWindow window;
    BrauerLayout layout;
    QuotientPath path = QuotientPath::General;
    std::vector<ModVec> kernel;
    std::vector<ModVec> subgroup;
    std::vector<long long> invariants;
    int dimension = 0;
    std::vector<ModVec> representatives;  // filled when the quotient is small

    nlohmann::json report() const;
};

BrauerQuotient curve_brauer_quotient(const ConicalCurve& C, const TruncationWindow& W,
                                     QuotientPath path = QuotientPath::General);

}  // namespace conical
