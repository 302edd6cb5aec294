#include "conical/arith.hpp"

#include <algorithm>
#include <stdexcept>

namespace conical {

bool is_prime(const Int& n) {
    return mpz_probab_prime_p(n.get_mpz_t(), 32) != 0;
}

std::vector<std::pair<Int, int>> factorize(const Int& n) {
    if (n == 0) throw std::invalid_argument("factorize(0)");
    Int m = abs(n);
    std::vector<std::pair<Int, int>> out;
    auto strip = [&](const Int& p) {
        int e = 0;
        while (mpz_divisible_p(m.get_mpz_t(), p.get_mpz_t())) {
            m /= p;
            ++e;
        }
        if (e) out.emplace_back(p, e);
    };
    strip(2);
    strip(3);
    /* trial division by 6k+-1; desk-scale inputs keep this comfortably fast */
    for (Int p = 5; p * p <= m;) {
        strip(p);
        p += 2;
        strip(p);
        p += 4;
    }
    if (m > 1) {
        if (!is_prime(m)) throw std::runtime_error("factorize: composite cofactor beyond trial bound");
        out.emplace_back(m, 1);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Int squarefree_part(const Int& n) {
    if (n == 0) return 0;
    Int r = n < 0 ? -1 : 1;
    for (auto& [p, e] : factorize(n))
        if (e % 2) r *= p;
    return r;
}

bool is_squarefree(const Int& n) {
    if (n == 0) return false;
    for (auto& [p, e] : factorize(n))
        if (e > 1) return false;
    return true;
}

Int square_class(const Rat& a) {
    if (a == 0) throw std::invalid_argument("square_class(0)");
    return squarefree_part(a.get_num() * a.get_den());
}

long valuation(const Int& n, long p) {
    if (n == 0) throw std::invalid_argument("valuation of 0");
    Int m = n;
    Int pp = p;
    long v = 0;
    while (mpz_divisible_p(m.get_mpz_t(), pp.get_mpz_t())) {
        m /= pp;
        ++v;
    }
    return v;
}

long valuation(const Rat& a, long p) {
    if (a == 0) throw std::invalid_argument("valuation of 0");
    return valuation(Int(a.get_num()), p) - valuation(Int(a.get_den()), p);
}

std::optional<Int> sqrt_mod_p(const Int& a, const Int& p) {
    Int r = a % p;
    if (r < 0) r += p;
    if (r == 0) return Int(0);
    if (legendre_symbol(r, p) != 1) return std::nullopt;
    /* Tonelli-Shanks.  Shortcut for p = 3 mod 4. */
    if (p % 4 == 3) {
        Int e = (p + 1) / 4, x;
        mpz_powm(x.get_mpz_t(), r.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
        return x;
    }
    Int q = p - 1;
    long s = 0;
    while (q % 2 == 0) {
        q /= 2;
        ++s;
    }
    Int z = 2;
    while (legendre_symbol(z, p) != -1) ++z;
    Int c, x, t, e = (q + 1) / 2;
    mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    mpz_powm(x.get_mpz_t(), r.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    mpz_powm(t.get_mpz_t(), r.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    long m = s;
    while (t != 1) {
        Int tt = t;
        long i = 0;
        while (tt != 1) {
            tt = tt * tt % p;
            ++i;
            if (i == m) return std::nullopt;  // unreachable for residues
        }
        Int b = c;
        for (long j = 0; j < m - i - 1; ++j) b = b * b % p;
        x = x * b % p;
        c = b * b % p;
        t = t * c % p;
        m = i;
    }
    return x;
}

std::optional<Int> sqrt_mod_prime_power(const Int& a, long p, int k) {
    Int pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), p, k);
    Int am = a % pk;
    if (am < 0) am += pk;
    if (p == 2) {
        if (am % 8 != 1) return std::nullopt;
        /* lift from mod 8 upward: if x^2 = a mod 2^j then one of x, x + 2^(j-1)
         * works mod 2^(j+1) */
        Int x = 1, mod = 8;
        for (int j = 3; j < k; ++j) {
            Int next = mod * 2;
            if ((x * x - am) % next != 0) x += mod / 2;
            mod = next;
        }
        if ((x * x - am) % pk != 0) return std::nullopt;
        return x;
    }
    if (am % p == 0) return std::nullopt;  // units only
    auto x0 = sqrt_mod_p(am, Int(p));
    if (!x0) return std::nullopt;
    Int x = *x0, mod = p;
    while (mod < pk) {
        /* Newton: x <- x - (x^2 - a) / (2x), doubling the precision */
        Int next = mod * mod;
        if (next > pk) next = pk;
        Int inv;
        Int two_x = 2 * x % next;
        if (mpz_invert(inv.get_mpz_t(), two_x.get_mpz_t(), next.get_mpz_t()) == 0) return std::nullopt;
        x = (x - (x * x - am) % next * inv) % next;
        if (x < 0) x += next;
        mod = next;
    }
    if ((x * x - am) % pk != 0) return std::nullopt;
    return x;
}

int legendre_symbol(const Int& a, const Int& p) {
    if (p == 2 || !is_prime(p)) throw std::invalid_argument("legendre_symbol: p must be an odd prime");
    return mpz_legendre(a.get_mpz_t(), p.get_mpz_t());
}

namespace {

/* num*den mod m after stripping all factors of p from both.  This equals the
 * unit part num/den mod 8 exactly (den^2 = 1 mod 8 for odd den), and for odd
 * prime m it differs from num/den by the square den^2, so it represents the
 * same square class; both uses below only need that much. */
Int unit_times_unit_mod(const Rat& a, long p, const Int& m) {
    Int num = a.get_num(), den = a.get_den();
    Int pp = p;
    while (mpz_divisible_p(num.get_mpz_t(), pp.get_mpz_t())) num /= pp;
    while (mpz_divisible_p(den.get_mpz_t(), pp.get_mpz_t())) den /= pp;
    Int r = num * den % m;
    if (r < 0) r += m;
    return r;
}

}  // namespace

bool is_local_square(const Rat& a, const Place& v) {
    if (a == 0) throw std::invalid_argument("is_local_square(0)");
    if (v.is_real()) return a > 0;
    long p = v.prime();
    if (valuation(a, p) % 2 != 0) return false;
    if (p == 2) return unit_times_unit_mod(a, 2, Int(8)) == 1;
    Int u = unit_times_unit_mod(a, p, Int(p));
    return legendre_symbol(u, Int(p)) == 1;
}

QQZ hilbert_invariant(const Rat& a, const Rat& b, const Place& v) {
    if (a == 0 || b == 0) throw std::invalid_argument("hilbert_invariant: arguments must be nonzero");
    if (v.is_real()) return (a < 0 && b < 0) ? QQZ::half() : QQZ::zero();
    long p = v.prime();
    long alpha = valuation(a, p), beta = valuation(b, p);
    if (p == 2) {
        /* (a,b)_2 = (-1)^( eps(u) eps(w) + alpha omega(w) + beta omega(u) )
         * with u, w the unit parts, eps = (u-1)/2, omega = (u^2-1)/8 mod 2 */
        long u = unit_times_unit_mod(a, 2, Int(8)).get_si();
        long w = unit_times_unit_mod(b, 2, Int(8)).get_si();
        auto eps = [](long x) { return (x % 4 == 3) ? 1 : 0; };
        auto omega = [](long x) { return (x == 3 || x == 5) ? 1 : 0; };
        long e = eps(u) * eps(w) + alpha * omega(w) + beta * omega(u);
        return e % 2 ? QQZ::half() : QQZ::zero();
    }
    Int u = unit_times_unit_mod(a, p, Int(p));
    Int w = unit_times_unit_mod(b, p, Int(p));
    long e = 0;
    if (alpha % 2 && beta % 2 && (p - 1) / 2 % 2) e ^= 1;
    if (beta % 2 && legendre_symbol(u, Int(p)) == -1) e ^= 1;
    if (alpha % 2 && legendre_symbol(w, Int(p)) == -1) e ^= 1;
    return e ? QQZ::half() : QQZ::zero();
}

std::vector<Place> hilbert_support(const Rat& a, const Rat& b) {
    std::vector<Place> out{Place::real(), Place::finite(2)};
    Int prod = a.get_num() * a.get_den() * b.get_num() * b.get_den();
    for (auto& [p, e] : factorize(prod))
        if (p > 2) out.push_back(Place::finite(p.get_si()));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace conical
