#pragma once

#include <cstddef>
#include <vector>

#include "conical/errors.hpp"

namespace conical {

using ModVec = std::vector<long long>;
using ModMatrix = std::vector<ModVec>;

/* A row space inside (Z/n)^cols kept in staircase form.  Composite n needs
 * care: pivots are gcds rather than units, and for every pivot row the
 * multiple that kills its pivot is folded back in, so membership can be
 * decided by straight reduction. */
class ModSpan {
public:
    ModSpan(long long n, std::size_t cols);

    long long modulus() const { return n_; }
    std::size_t cols() const { return cols_; }
    const std::vector<ModVec>& rows() const { return rows_; }

    // true when v was outside the span (which now absorbs it)
    bool add(ModVec v);
    bool contains(ModVec v) const;

private:
    long long n_;
    std::size_t cols_;
    std::vector<ModVec> rows_;  // strictly increasing leading columns
};

// generators of { x in (Z/n)^cols : M x = 0 }; every row of M has cols entries
ModMatrix kernel_mod(const ModMatrix& M, long long n, std::size_t cols);

/* The nontrivial invariant factors d_1 | d_2 | ... (all dividing n) of the
 * finite group (span K + n Z^cols) / (span H + n Z^cols).  Every row of H
 * must already lie in span K mod n.  The length of the result is the
 * minimal number of generators of the quotient. */
std::vector<long long> quotient_invariants(const ModMatrix& K, const ModMatrix& H,
                                           long long n, std::size_t cols);

inline long long quotient_dimension(const ModMatrix& K, const ModMatrix& H,
                                    long long n, std::size_t cols) {
    return (long long)quotient_invariants(K, H, n, cols).size();
}

// rows of K that successively enlarge span H; spans the quotient
ModMatrix quotient_representatives(const ModMatrix& K, const ModMatrix& H,
                                   long long n, std::size_t cols);

}  // namespace conical
