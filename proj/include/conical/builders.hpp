#pragma once

#include <string>
#include <utility>
#include <vector>

#include "conical/curve.hpp"
#include "conical/forms.hpp"

namespace conical {

/* The cone curve of a binary form: one split line per geometric root,
 * all passing through a single rational point (the cone vertex), which
 * is singular as soon as there are two or more roots. */
ConicalCurve build_Cf(const BinaryForm& f);

/* The vertical-horizontal line arrangement on P1 x P1: vertical lines at
 * the roots of f, horizontal lines at the points of Spec L and Spec F,
 * singular exactly at the crossings.  Requires deg f >= 5, the degrees
 * of L and F to be (d/2 - 1, d/2) for even d and ((d-1)/2, (d+1)/2) for
 * odd d, and L, F to stay fields over every quadratic root field of f. */
ConicalCurve build_D(const BinaryForm& f, const FieldSpec& L, const FieldSpec& F);

struct ClassCheck {
    std::pair<int, int> r_class;
    std::pair<int, int> s_class;
    bool equal = false;
};

struct IntersectionEntry {
    std::string c_component;
    std::string d_orbit;
    int count = 0;            // geometric intersection points
    bool simple = false;      // every intersection is a transverse single point
    bool misses_singular = false;  // none of them lies on a crossing of D
};

struct TransversalityReport {
    bool base_point_off_D = false;
    bool members_irreducible = false;
    std::vector<IntersectionEntry> entries;
    long total = 0;
    bool all_ok = false;
};

/* A pencil member configuration C complementary to D: rational (1,1)
 * curves through one common rational point, plus the vertical tangent
 * line when the degree is even, chosen so the total class matches r and
 * every member meets D transversally away from its crossings. */
struct PencilReport {
    ConicalCurve curve_C;
    std::string r_equation;
    std::string s_equation;
    std::string pencil;
    std::string base_point;  // the common point of the members
    std::string tangent;     // their common tangent there
    ClassCheck class_check;
    TransversalityReport transversality;
};

PencilReport build_pencil(const BinaryForm& f, const FieldSpec& L, const FieldSpec& F);

}  // namespace conical
