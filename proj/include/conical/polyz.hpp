#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "conical/arith.hpp"

namespace conical {

/* Dense integer polynomials, ascending coefficients: p[i] is the x^i term.
 * Also reused for homogeneous binary forms, where index i holds the y^i
 * coefficient and the x-power is degree - i; products are convolutions
 * either way. */
using Poly = std::vector<Int>;

Poly poly_trim(Poly p);
int poly_deg(const Poly& p);  // -1 for zero
Poly poly_add(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, const Int& c);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_deriv(const Poly& a);
Int poly_eval(const Poly& a, const Int& x);
Rat poly_eval(const Poly& a, const Rat& x);

/* resultant over Z via Bareiss elimination on the Sylvester matrix */
Int resultant(const Poly& a, const Poly& b);
Int discriminant(const Poly& a);

/* is the polynomial squarefree over Q? (gcd with derivative trivial) */
bool poly_squarefree_q(const Poly& a);

/* ---- arithmetic mod p (p an odd prime or 2, p < 2^31) ------------------- */

using PolyP = std::vector<uint64_t>;

PolyP poly_mod_p(const Poly& a, long p);
bool polyp_squarefree(const PolyP& a, long p);

/* multiset of irreducible-factor degrees of a mod p; requires a mod p to be
 * squarefree of full degree.  Distinct-degree factorization is enough since
 * only degrees are wanted. */
std::vector<int> polyp_factor_degrees(const PolyP& a, long p);

}  // namespace conical
