#include "conical/modlin.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace conical {

namespace {

long long norm_mod(long long x, long long n) {
    x %= n;
    return x < 0 ? x + n : x;
}

long long mul_mod(long long a, long long b, long long n) {
    return (long long)((__int128)a * b % n);
}

// g = s a + t b with g = gcd(a, b) >= 0
std::tuple<long long, long long, long long> egcd(long long a, long long b) {
    long long s0 = 1, t0 = 0, s1 = 0, t1 = 1;
    while (b != 0) {
        long long q = a / b;
        std::tie(a, b) = std::tuple(b, a - q * b);
        std::tie(s0, s1) = std::tuple(s1, s0 - q * s1);
        std::tie(t0, t1) = std::tuple(t1, t0 - q * t1);
    }
    if (a < 0) return {-a, -s0, -t0};
    return {a, s0, t0};
}

long long inv_mod(long long a, long long n) {
    auto [g, s, t] = egcd(norm_mod(a, n), n);
    (void)t;
    if (g != 1) throw std::invalid_argument("inv_mod of a non-unit");
    return norm_mod(s, n);
}

void check_args(const ModMatrix& M, long long n, std::size_t cols) {
    if (n < 2) throw std::invalid_argument("modulus must be at least 2");
    if (n > 1'000'000) throw std::invalid_argument("modulus beyond supported range");
    for (const auto& r : M)
        if (r.size() != cols) throw std::invalid_argument("ragged matrix row");
}

/* replace (u, w) by unimodular combinations so that u[j] becomes
 * gcd(u[j], w[j]) and w[j] becomes zero */
void combine_at(ModVec& u, ModVec& w, std::size_t j, long long n) {
    long long a = u[j], b = w[j];
    if (b == 0) return;
    if (a == 0) {
        std::swap(u, w);
        return;
    }
    auto [g, s, t] = egcd(a, b);
    long long ag = a / g, bg = b / g;
    for (std::size_t c = 0; c < u.size(); ++c) {
        long long nu = norm_mod(mul_mod(s, u[c], n) + mul_mod(t, w[c], n), n);
        long long nw = norm_mod(mul_mod(ag, w[c], n) - mul_mod(bg, u[c], n), n);
        u[c] = nu;
        w[c] = nw;
    }
}

std::size_t leading(const ModVec& v) {
    for (std::size_t j = 0; j < v.size(); ++j)
        if (v[j] != 0) return j;
    return v.size();
}

}  // namespace

ModSpan::ModSpan(long long n, std::size_t cols) : n_(n), cols_(cols) {
    check_args({}, n, cols);
}

bool ModSpan::add(ModVec v) {
    if (v.size() != cols_) throw std::invalid_argument("vector size mismatch");
    for (auto& x : v) x = norm_mod(x, n_);
    bool grew = false;
    for (;;) {
        std::size_t j = leading(v);
        if (j == cols_) return grew;
        auto it = std::lower_bound(rows_.begin(), rows_.end(), j,
                                   [](const ModVec& r, std::size_t col) {
                                       return leading(r) < col;
                                   });
        if (it == rows_.end() || leading(*it) != j) {
            long long g = std::gcd(v[j], n_);
            ModVec ann(cols_);
            for (std::size_t c = 0; c < cols_; ++c) ann[c] = mul_mod(n_ / g, v[c], n_);
            rows_.insert(it, v);
            grew = true;
            if (n_ / g != n_) add(std::move(ann));
            return true;
        }
        long long d = std::gcd((*it)[j], n_);
        if (v[j] % d == 0) {
            long long c = mul_mod(v[j] / d, inv_mod((*it)[j] / d, n_ / d), n_);
            for (std::size_t col = j; col < cols_; ++col)
                v[col] = norm_mod(v[col] - mul_mod(c, (*it)[col], n_), n_);
            continue;
        }
        // the new vector refines this pivot; absorb and keep reducing the rest
        combine_at(*it, v, j, n_);
        grew = true;
        long long g = std::gcd((*it)[j], n_);
        if (n_ / g != n_) {
            ModVec ann(cols_);
            for (std::size_t c = 0; c < cols_; ++c)
                ann[c] = mul_mod(n_ / g, (*it)[c], n_);
            ModVec keep = std::move(v);
            add(std::move(ann));
            v = std::move(keep);
            for (auto& x : v) x = norm_mod(x, n_);
        }
    }
}

bool ModSpan::contains(ModVec v) const {
    if (v.size() != cols_) throw std::invalid_argument("vector size mismatch");
    for (auto& x : v) x = norm_mod(x, n_);
    for (const auto& row : rows_) {
        std::size_t j = leading(row);
        if (v[j] == 0) continue;
        long long d = std::gcd(row[j], n_);
        if (v[j] % d != 0) return false;
        long long c = mul_mod(v[j] / d, inv_mod(row[j] / d, n_ / d), n_);
        for (std::size_t col = j; col < cols_; ++col)
            v[col] = norm_mod(v[col] - mul_mod(c, row[col], n_), n_);
    }
    return leading(v) == cols_;
}

ModMatrix kernel_mod(const ModMatrix& M, long long n, std::size_t cols) {
    check_args(M, n, cols);
    std::size_t R = M.size();
    /* rows of the working matrix pair the i-th column of M with e_i; any
     * combination with vanishing left half is a kernel member, and pivot
     * multiples that die mod n are fed back so nothing is missed */
    std::vector<ModVec> rows(cols, ModVec(R + cols, 0));
    for (std::size_t i = 0; i < cols; ++i) {
        for (std::size_t r = 0; r < R; ++r) rows[i][r] = norm_mod(M[r][i], n);
        rows[i][R + i] = 1;
    }
    std::size_t rank = 0;
    for (std::size_t j = 0; j < R && rank < rows.size(); ++j) {
        for (std::size_t i = rank + 1; i < rows.size(); ++i)
            combine_at(rows[rank], rows[i], j, n);
        if (rows[rank][j] == 0) continue;
        long long g = std::gcd(rows[rank][j], n);
        if (n / g != n) {
            ModVec ann(rows[rank].size());
            for (std::size_t c = 0; c < ann.size(); ++c)
                ann[c] = mul_mod(n / g, rows[rank][c], n);
            rows.push_back(std::move(ann));
        }
        ++rank;
    }
    ModMatrix out;
    for (std::size_t i = rank; i < rows.size(); ++i) {
        ModVec x(rows[i].begin() + R, rows[i].end());
        if (leading(x) != cols) out.push_back(std::move(x));
    }
    return out;
}

namespace {

using ZMat = std::vector<std::vector<mpz_class>>;

// diagonal of the Smith form, length = number of columns
std::vector<mpz_class> snf_diagonal(ZMat A, std::size_t cols) {
    std::vector<mpz_class> diag;
    std::size_t top = 0;
    while (top < cols) {
        // locate the smallest nonzero entry in the remaining block
        std::size_t pr = A.size(), pc = 0;
        for (std::size_t i = top; i < A.size(); ++i)
            for (std::size_t j = top; j < cols; ++j)
                if (A[i][j] != 0 &&
                    (pr == A.size() || abs(A[i][j]) < abs(A[pr][pc]))) {
                    pr = i;
                    pc = j;
                }
        if (pr == A.size()) break;
        std::swap(A[top], A[pr]);
        for (auto& row : A) std::swap(row[top], row[pc]);

        bool dirty = true;
        while (dirty) {
            dirty = false;
            for (std::size_t i = top + 1; i < A.size(); ++i) {
                if (A[i][top] == 0) continue;
                mpz_class q = A[i][top] / A[top][top];
                for (std::size_t j = top; j < cols; ++j) A[i][j] -= q * A[top][j];
                if (A[i][top] != 0) {
                    std::swap(A[top], A[i]);
                    dirty = true;
                }
            }
            for (std::size_t j = top + 1; j < cols; ++j) {
                if (A[top][j] == 0) continue;
                mpz_class q = A[top][j] / A[top][top];
                for (auto& row : A) row[j] -= q * row[top];
                if (A[top][j] != 0) {
                    for (auto& row : A) std::swap(row[top], row[j]);
                    dirty = true;
                }
            }
        }
        if (A[top][top] < 0) A[top][top] = -A[top][top];

        // keep the divisibility chain: fold in any entry the pivot misses
        bool redo = false;
        for (std::size_t i = top + 1; i < A.size() && !redo; ++i)
            for (std::size_t j = top + 1; j < cols && !redo; ++j)
                if (A[i][j] % A[top][top] != 0) {
                    for (std::size_t c = top; c < cols; ++c) A[top][c] += A[i][c];
                    redo = true;
                }
        if (redo) continue;
        diag.push_back(A[top][top]);
        ++top;
    }
    diag.resize(cols, 0);
    return diag;
}

}  // namespace

std::vector<long long> quotient_invariants(const ModMatrix& K, const ModMatrix& H,
                                           long long n, std::size_t cols) {
    check_args(K, n, cols);
    check_args(H, n, cols);

    ModSpan kspan(n, cols);
    for (const auto& k : K) kspan.add(k);
    for (const auto& h : H)
        if (!kspan.contains(h))
            throw model_error("quotient_invariants: subgroup row outside the span");

    std::size_t s = K.size();
    if (s == 0) return {};

    /* relations among the K generators: coefficient vectors c with
     * sum c_i K_i in span H mod n, found as the left kernel of the stacked
     * matrix -- kernel_mod wants columns, so feed it the transpose */
    ModMatrix stacked_t(cols, ModVec(s + H.size(), 0));
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < cols; ++j) stacked_t[j][i] = norm_mod(K[i][j], n);
    for (std::size_t i = 0; i < H.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j)
            stacked_t[j][s + i] = norm_mod(H[i][j], n);
    ModMatrix rel = kernel_mod(stacked_t, n, s + H.size());

    ZMat R;
    for (const auto& r : rel) {
        std::vector<mpz_class> row(s);
        for (std::size_t i = 0; i < s; ++i) row[i] = (long)r[i];
        R.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < s; ++i) {
        std::vector<mpz_class> row(s, 0);
        row[i] = (long)n;
        R.push_back(std::move(row));
    }

    auto diag = snf_diagonal(std::move(R), s);
    std::vector<long long> out;
    for (const auto& d : diag)
        if (d > 1) out.push_back(d.get_si());
    return out;
}

ModMatrix quotient_representatives(const ModMatrix& K, const ModMatrix& H,
                                   long long n, std::size_t cols) {
    check_args(K, n, cols);
    check_args(H, n, cols);
    ModSpan span(n, cols);
    for (const auto& h : H) span.add(h);
    ModMatrix reps;
    for (const auto& k : K)
        if (!span.contains(k)) {
            reps.push_back(k);
            for (auto& x : reps.back()) x = norm_mod(x, n);
            span.add(k);
        }
    return reps;
}

}  // namespace conical
