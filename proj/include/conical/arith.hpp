#pragma once

#include <gmpxx.h>

#include <optional>
#include <vector>

#include "conical/place.hpp"
#include "conical/qqz.hpp"

namespace conical {

using Int = mpz_class;
using Rat = mpq_class;

/* ---- integer helpers ---------------------------------------------------- */

bool is_prime(const Int& n);

/* prime -> exponent, ascending; sign ignored; throws on 0 */
std::vector<std::pair<Int, int>> factorize(const Int& n);

/* the squarefree integer in the same square class (sign preserved) */
Int squarefree_part(const Int& n);
bool is_squarefree(const Int& n);

/* squarefree integer representing the square class of a nonzero rational */
Int square_class(const Rat& a);

long valuation(const Int& n, long p);
long valuation(const Rat& a, long p);

/* x with x^2 = a mod p (p odd prime, a a residue), via Tonelli-Shanks */
std::optional<Int> sqrt_mod_p(const Int& a, const Int& p);

/* Hensel lift of a square root of the p-adic unit a to x^2 = a mod p^k.
 * For p = 2 requires a = 1 mod 8 and k >= 3. */
std::optional<Int> sqrt_mod_prime_power(const Int& a, long p, int k);

/* ---- symbols and local squares ------------------------------------------ */

/* Legendre symbol (a|p) in {-1,0,+1}; p must be an odd prime */
int legendre_symbol(const Int& a, const Int& p);

/* does the nonzero rational a become a square in the completion at v? */
bool is_local_square(const Rat& a, const Place& v);

/* local invariant of the quaternion algebra (a,b) at v: 0 or 1/2 in Q/Z */
QQZ hilbert_invariant(const Rat& a, const Rat& b, const Place& v);

/* every place where hilbert_invariant(a,b,-) could be nonzero:
 * real, 2, and the odd primes dividing numerator or denominator of a or b */
std::vector<Place> hilbert_support(const Rat& a, const Rat& b);

}  // namespace conical
