#include "conical/polyz.hpp"

#include <stdexcept>

namespace conical {

Poly poly_trim(Poly p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
    return p;
}

int poly_deg(const Poly& p) {
    for (int i = (int)p.size() - 1; i >= 0; --i)
        if (p[i] != 0) return i;
    return -1;
}

Poly poly_add(const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()), Int(0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return poly_trim(r);
}

Poly poly_scale(const Poly& a, const Int& c) {
    Poly r = a;
    for (auto& x : r) x *= c;
    return poly_trim(r);
}

Poly poly_mul(const Poly& a, const Poly& b) {
    if (poly_deg(a) < 0 || poly_deg(b) < 0) return {};
    Poly r(a.size() + b.size() - 1, Int(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return poly_trim(r);
}

Poly poly_deriv(const Poly& a) {
    Poly r;
    for (size_t i = 1; i < a.size(); ++i) r.push_back(a[i] * (long)i);
    return poly_trim(r);
}

Int poly_eval(const Poly& a, const Int& x) {
    Int r = 0;
    for (int i = (int)a.size() - 1; i >= 0; --i) r = r * x + a[i];
    return r;
}

Rat poly_eval(const Poly& a, const Rat& x) {
    Rat r = 0;
    for (int i = (int)a.size() - 1; i >= 0; --i) r = r * x + a[i];
    return r;
}

Int resultant(const Poly& pa, const Poly& pb) {
    Poly a = poly_trim(pa), b = poly_trim(pb);
    int m = poly_deg(a), n = poly_deg(b);
    if (m < 0 || n < 0) return 0;
    if (m == 0 && n == 0) return 1;
    int size = m + n;
    std::vector<std::vector<Int>> s(size, std::vector<Int>(size, Int(0)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= m; ++j) s[i][i + j] = a[m - j];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= n; ++j) s[n + i][i + j] = b[n - j];
    /* Bareiss fraction-free determinant */
    Int sign = 1, prev = 1;
    for (int k = 0; k < size - 1; ++k) {
        if (s[k][k] == 0) {
            int piv = -1;
            for (int i = k + 1; i < size; ++i)
                if (s[i][k] != 0) {
                    piv = i;
                    break;
                }
            if (piv < 0) return 0;
            std::swap(s[k], s[piv]);
            sign = -sign;
        }
        for (int i = k + 1; i < size; ++i)
            for (int j = k + 1; j < size; ++j) {
                Int t = s[i][j] * s[k][k] - s[i][k] * s[k][j];
                s[i][j] = t / prev;  // exact by Bareiss
            }
        prev = s[k][k];
    }
    return sign * s[size - 1][size - 1];
}

Int discriminant(const Poly& pa) {
    Poly a = poly_trim(pa);
    int n = poly_deg(a);
    if (n < 1) throw std::invalid_argument("discriminant needs degree >= 1");
    Int r = resultant(a, poly_deriv(a));
    Int lc = a[n];
    Int d = r / lc;
    if ((long)n * (n - 1) / 2 % 2) d = -d;
    return d;
}

bool poly_squarefree_q(const Poly& a) {
    if (poly_deg(a) < 1) return poly_deg(a) == 0;
    return resultant(a, poly_deriv(a)) != 0;
}

/* ---- mod p ---------------------------------------------------------------*/

namespace {

PolyP trim_p(PolyP a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

PolyP mul_p(const PolyP& a, const PolyP& b, long p) {
    if (a.empty() || b.empty()) return {};
    PolyP r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    return trim_p(r);
}

PolyP mod_p(PolyP a, const PolyP& f, long p) {
    long n = (long)f.size() - 1;  // f monic-normalized by caller
    while ((long)a.size() - 1 >= n) {
        uint64_t c = a.back();
        size_t shift = a.size() - 1 - n;
        for (long i = 0; i <= n; ++i) {
            uint64_t sub = c * f[i] % p;
            a[shift + i] = (a[shift + i] + p - sub) % p;
        }
        a = trim_p(std::move(a));
        if (a.empty()) break;
    }
    return a;
}

uint64_t inv_p(uint64_t a, long p) {
    /* Fermat */
    uint64_t r = 1, b = a % p, e = p - 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

PolyP monic_p(PolyP a, long p) {
    a = trim_p(std::move(a));
    if (a.empty()) return a;
    uint64_t inv = inv_p(a.back(), p);
    for (auto& c : a) c = c * inv % p;
    return a;
}

PolyP gcd_p(PolyP a, PolyP b, long p) {
    a = monic_p(std::move(a), p);
    b = monic_p(std::move(b), p);
    while (!b.empty()) {
        PolyP r = mod_p(a, b, p);
        a = std::move(b);
        b = monic_p(std::move(r), p);
    }
    return a;
}

PolyP powmod_x_p(const PolyP& base, const Int& e, const PolyP& f, long p) {
    PolyP r{1}, b = base;
    for (long i = mpz_sizeinbase(e.get_mpz_t(), 2) - 1; i >= 0; --i) {
        r = mod_p(mul_p(r, r, p), f, p);
        if (mpz_tstbit(e.get_mpz_t(), i)) r = mod_p(mul_p(r, b, p), f, p);
    }
    return r;
}

PolyP deriv_p(const PolyP& a, long p) {
    PolyP r;
    for (size_t i = 1; i < a.size(); ++i) r.push_back(a[i] * (i % p) % p);
    return trim_p(r);
}

PolyP quot_p(PolyP a, const PolyP& f, long p) {
    /* exact division by the monic f */
    long n = (long)f.size() - 1;
    if ((long)a.size() - 1 < n) return {};
    PolyP q((long)a.size() - n, 0);
    while ((long)a.size() - 1 >= n && !a.empty()) {
        uint64_t c = a.back();
        size_t shift = a.size() - 1 - n;
        q[shift] = c;
        for (long i = 0; i <= n; ++i) {
            uint64_t sub = c * f[i] % p;
            a[shift + i] = (a[shift + i] + p - sub) % p;
        }
        a = trim_p(std::move(a));
    }
    return trim_p(std::move(q));
}

}  // namespace

PolyP poly_mod_p(const Poly& a, long p) {
    PolyP r;
    for (auto& c : a) {
        Int m = c % p;
        if (m < 0) m += p;
        r.push_back(m.get_ui());
    }
    return trim_p(std::move(r));
}

bool polyp_squarefree(const PolyP& a, long p) {
    PolyP m = monic_p(a, p);
    if (m.size() < 2) return false;
    PolyP d = deriv_p(m, p);
    if (d.empty()) return false;  // p-th power pattern
    return gcd_p(m, d, p).size() == 1;
}

std::vector<int> polyp_factor_degrees(const PolyP& pa, long p) {
    PolyP f = monic_p(pa, p);
    if (!polyp_squarefree(f, p)) throw std::invalid_argument("polyp_factor_degrees: not squarefree mod p");
    std::vector<int> degs;
    /* distinct-degree: h_k = x^(p^k) mod f; degree-k part is gcd(h_k - x, f) */
    PolyP x{0, 1};
    PolyP h = mod_p(x, f, p);
    int k = 0;
    while ((long)f.size() - 1 > 0) {
        ++k;
        h = powmod_x_p(h, Int(p), f, p);
        if (2 * k > (long)f.size() - 1) {
            /* what's left is a single irreducible factor */
            degs.push_back((int)f.size() - 1);
            break;
        }
        PolyP diff = h;
        if (diff.size() < 2) diff.resize(2, 0);
        diff[1] = (diff[1] + p - 1) % p;
        diff = trim_p(std::move(diff));
        PolyP g = diff.empty() ? f : gcd_p(f, diff, p);
        int gd = (int)g.size() - 1;
        if (gd > 0) {
            for (int i = 0; i < gd / k; ++i) degs.push_back(k);
            f = quot_p(std::move(f), g, p);
            h = mod_p(h, f, p);
        }
    }
    std::sort(degs.begin(), degs.end());
    return degs;
}

}  // namespace conical
