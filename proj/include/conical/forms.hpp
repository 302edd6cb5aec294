#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conical/arith.hpp"
#include "conical/errors.hpp"
#include "conical/fields.hpp"
#include "conical/place.hpp"
#include "conical/polyz.hpp"

namespace conical {

/* One factor of a separable binary form: either a linear factor through a
 * rational point (p : q) of the projective line, stored in lowest terms,
 * or an irreducible quadratic x^2 - d y^2 with d a nontrivial squarefree
 * class.  The point (1 : 0) gives the factor y. */
struct FormFactor {
    enum class Kind { Linear, Quadratic };
    Kind kind = Kind::Linear;
    Int p = 0, q = 1;  // linear root (p : q)
    Int d = 0;         // quadratic discriminant class

    static FormFactor linear(Int p, Int q);
    static FormFactor linear(const Rat& root);
    static FormFactor quadratic(Int d);

    // the factor as a polynomial in x with y set to 1, lowest degree first
    Poly coeffs() const;
    std::string str() const;
};

bool factor_equal(const FormFactor& a, const FormFactor& b);

/* A separable product of linear and quadratic factors.  Construction
 * rejects repeated roots and repeated (or reducible) quadratic classes. */
class BinaryForm {
public:
    explicit BinaryForm(std::vector<FormFactor> factors);

    const std::vector<FormFactor>& factors() const { return factors_; }
    int degree() const;

    // coefficient of x^i y^(degree - i) at index i
    Poly coeffs() const;

    // the factor fields: Q per linear factor, Q(sqrt(d)) per quadratic one
    EtaleAlgebra algebra() const;

    std::string str() const;

    // shorthand for a product of quadratic factors only
    static BinaryForm from_classes(const std::vector<Int>& ds);

private:
    std::vector<FormFactor> factors_;
};

/* Where the zero scheme of a form stands with respect to the local-global
 * principle.  Exactly one of the three verdicts holds, and it is determined
 * by the two booleans: rational roots come only from linear factors, and
 * local solubility is inherited from the factor algebra. */
struct HasseReport {
    enum class Verdict { Soluble, LocallyObstructed, Counterexample };

    bool globally_soluble = false;
    std::optional<std::pair<Int, Int>> rational_root;

    bool locally_soluble_everywhere = false;
    SolubilityCertificate certificate;

    Verdict verdict = Verdict::Soluble;
    std::string verdict_str() const;
};

HasseReport analyze_form(const BinaryForm& f);

/* The degree-8 counterexample recipe: given squarefree a, b with a, b, ab
 * all nontrivial classes, return
 *     (x^2 - a y^2)(x^2 - b y^2)(x^2 - ab y^2)(x^2 - c y^2)
 * with c > 0, c = 1 mod 8, c squarefree, c a square unit at every odd
 * prime dividing ab, and c not in the class of 1, a, b or ab.  The first
 * three factors cover every other place, so the form fails the Hasse
 * principle; this is re-verified before returning.  c is the smallest
 * candidate below the bound, which is scanned in increasing order. */
BinaryForm construct_form(const Int& a, const Int& b, long search_bound = 1000000);

}  // namespace conical
