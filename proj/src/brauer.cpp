#include "conical/brauer.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>

namespace conical {

std::string BrauerClass::str() const {
    std::ostringstream os;
    os << field_.str() << "{";
    bool first = true;
    for (const auto& [k, q] : inv_) {
        if (!first) os << ", ";
        first = false;
        os << k.first.str() << "." << k.second << ": " << q.str();
    }
    os << "}";
    return os.str();
}

BrauerClass conic_class(const ConicLabel& c) {
    BrauerClass out(FieldSpec::rational());
    if (c.is_split()) return out;
    for (const Place& v : hilbert_support(c.a, c.b))
        out.set_invariant(v, 0, hilbert_invariant(c.a, c.b, v));
    return out;
}

BrauerClass restrict_class(const BrauerClass& x, const FieldSpec& K) {
    if (x.field().kind() != FieldKind::Rational)
        throw unsupported_operation("restrict_class starts from a class over Q");
    BrauerClass out(K);
    for (const auto& [key, q] : x.support()) {
        const Place& v = key.first;
        auto places = local_places(K, v);
        for (int idx = 0; idx < (int)places.size(); ++idx) {
            if (places[idx].complex_) continue;
            out.add_invariant(v, idx, q.times(places[idx].deg));
        }
    }
    return out;
}

QQZ reciprocity_check(const BrauerClass& x) {
    QQZ total;
    for (const auto& [k, q] : x.support()) total = total + q;
    return total;
}

namespace {

// exact square root of a rational that is a perfect square
Rat rat_sqrt(const Rat& r) {
    if (r <= 0) throw std::invalid_argument("rat_sqrt of a non-positive value");
    Int n = r.get_num(), d = r.get_den();
    if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t()))
        throw std::invalid_argument("rat_sqrt of a non-square");
    Int sn, sd;
    mpz_sqrt(sn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(sd.get_mpz_t(), d.get_mpz_t());
    return Rat(sn, sd);
}

// square root of a mod squarefree m, via the Chinese remainder theorem;
// requires a to be a square modulo every prime dividing m
Int sqrt_mod_squarefree(const Int& a, const Int& m) {
    Int x = 0, mod = 1;
    for (const auto& [p, e] : factorize(m)) {
        assert(e == 1);
        Int r;
        if (p == 2) {
            r = ((a % 2) + 2) % 2;
        } else {
            Int ap = a % p;
            if (ap < 0) ap += p;
            if (ap == 0) {
                r = 0;
            } else {
                auto rt = sqrt_mod_p(ap, p);
                if (!rt) throw model_error("descent expected a square residue");
                r = *rt;
            }
        }
        // combine x mod `mod` with r mod p
        Int g, s, t;
        mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), mod.get_mpz_t(),
                   p.get_mpz_t());
        Int next = mod * p;
        x = (x + mod * s % next * (r - x)) % next;
        if (x < 0) x += next;
        mod = next;
    }
    return x;
}

// nontrivial integer solution of z^2 = A x^2 + B y^2 for squarefree A, B;
// the caller has already established solubility
std::array<Int, 3> legendre_solve(const Int& A, const Int& B) {
    if (A == 1) return {1, 0, 1};
    if (B == 1) return {0, 1, 1};
    if (abs(A) > abs(B)) {
        auto [y, x, z] = legendre_solve(B, A);
        return {x, y, z};
    }
    if (abs(B) <= 2) {
        for (long z = 0; z <= 12; ++z)
            for (long x = 0; x <= 12; ++x)
                for (long y = 0; y <= 12; ++y) {
                    if (x == 0 && y == 0 && z == 0) continue;
                    if (Int(z) * z == A * x * x + B * y * y) return {x, y, z};
                }
        throw model_error("descent base case found no point on a soluble conic");
    }
    Int m = abs(B);
    Int am = A % m;
    if (am < 0) am += m;
    Int k = sqrt_mod_squarefree(am, m);
    if (k > m / 2) k = m - k;
    Int t = (k * k - A) / B;
    if (t == 0) throw model_error("descent degeneracy: A is a square");
    Int B1 = squarefree_part(t);
    Int h;
    mpz_sqrt(h.get_mpz_t(), Int(t / B1).get_mpz_t());
    auto [x1, y1, z1] = legendre_solve(A, B1);
    // norm identity: (k z1 + A x1)^2 - A (z1 + k x1)^2 = B (B1 h y1)^2
    Int X = z1 + k * x1;
    Int Y = B1 * h * y1;
    Int Z = k * z1 + A * x1;
    assert(Z * Z == A * X * X + B * Y * Y);
    return {X, Y, Z};
}

void canonicalize_triple(std::array<Int, 3>& p) {
    Int g = gcd(gcd(p[0], p[1]), p[2]);
    if (g != 0)
        for (Int& c : p) c /= g;
    Int lead = p[2] != 0 ? p[2] : (p[0] != 0 ? p[0] : p[1]);
    if (lead < 0)
        for (Int& c : p) c = -c;
}

}  // namespace

std::optional<std::array<Int, 3>> conic_point(const Rat& a, const Rat& b) {
    if (a == 0 || b == 0)
        throw std::invalid_argument("conic_point needs nonzero coefficients");
    for (const Place& v : hilbert_support(a, b))
        if (!hilbert_invariant(a, b, v).is_zero()) return std::nullopt;

    Int A = square_class(a), B = square_class(b);
    Rat sa = rat_sqrt(a / Rat(A));
    Rat sb = rat_sqrt(b / Rat(B));
    auto [x0, y0, z0] = legendre_solve(A, B);

    // z^2 = A x0^2 + B y0^2 pulls back along x = x0/sa, y = y0/sb
    Rat X = Rat(x0) / sa, Y = Rat(y0) / sb, Z = Rat(z0);
    Int l = lcm(lcm(X.get_den(), Y.get_den()), Z.get_den());
    Rat Xs = X * l, Ys = Y * l, Zs = Z * l;
    std::array<Int, 3> out = {Xs.get_num(), Ys.get_num(), Zs.get_num()};
    canonicalize_triple(out);

    Rat lhs = Rat(out[2]) * Rat(out[2]);
    Rat rhs = a * Rat(out[0]) * Rat(out[0]) + b * Rat(out[1]) * Rat(out[1]);
    if (lhs != rhs) throw model_error("conic point failed exact verification");
    return out;
}

bool TruncationWindow::contains(const Place& v) const {
    return std::binary_search(S.begin(), S.end(), v);
}

std::string TruncationWindow::str() const {
    std::ostringstream os;
    os << "n=" << n << " S={";
    bool first = true;
    for (const Place& v : S) {
        if (!first) os << ",";
        first = false;
        os << v.str();
    }
    os << "}";
    return os.str();
}

TruncationWindow make_window(long n, long places_max,
                             const std::vector<long>& extra_primes) {
    if (n < 1) throw std::invalid_argument("window torsion bound must be positive");
    std::set<Place> s = {Place::real(), Place::finite(2)};
    for (long p = 2; p <= places_max; ++p)
        if (is_prime(p)) s.insert(Place::finite(p));
    for (long p : extra_primes) s.insert(Place::finite(p));
    return {n, std::vector<Place>(s.begin(), s.end())};
}

}  // namespace conical
