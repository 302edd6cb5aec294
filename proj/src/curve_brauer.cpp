#include "conical/curve_brauer.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include "conical/arith.hpp"
#include "conical/errors.hpp"
#include "conical/fields.hpp"

namespace conical {

using nlohmann::json;

namespace {

std::vector<Place> canonical_places(const TruncationWindow& W) {
    std::vector<Place> S = W.S;
    std::sort(S.begin(), S.end());
    S.erase(std::unique(S.begin(), S.end()), S.end());
    return S;
}

void check_window(const ConicalCurve& C, long long n, const std::vector<Place>& S) {
    if (n < 2) throw std::invalid_argument("truncation window needs n >= 2");
    auto has = [&](const Place& v) { return std::binary_search(S.begin(), S.end(), v); };
    if (!has(Place::real()) || !has(Place::finite(2)))
        throw std::invalid_argument("truncation window must contain the real place and 2");
    auto need_field = [&](const FieldSpec& K, const std::string& where) {
        for (long p : K.ramified_primes())
            if (!has(Place::finite(p)))
                throw std::invalid_argument("window is missing the prime " + std::to_string(p) +
                                            " where the field of " + where + " ramifies");
    };
    for (const Orbit& o : C.components) need_field(o.field, "component orbit " + o.name);
    for (const Orbit& o : C.points) need_field(o.field, "point orbit " + o.name);
    for (const Orbit& o : C.branches) need_field(o.field, "branch orbit " + o.name);
    for (size_t i = 0; i < C.conics.size(); ++i) {
        if (C.conics[i].is_split()) continue;
        for (const Place& v : hilbert_support(C.conics[i].a, C.conics[i].b))
            if (!has(v))
                throw std::invalid_argument("window is missing the place " + v.str() +
                                            " from the conic support of component orbit " +
                                            C.components[i].name);
    }
}

BrauerLayout make_layout(const ConicalCurve& C, const TruncationWindow& W, bool with_points) {
    BrauerLayout L;
    L.window.n = W.n;
    L.window.S = canonical_places(W);
    check_window(C, W.n, L.window.S);

    auto add_family = [&](const std::vector<Orbit>& fam, int family, std::vector<int>& starts,
                          std::vector<BrauerCoord>& coords) {
        for (int oi = 0; oi < (int)fam.size(); ++oi) {
            starts.push_back((int)coords.size());
            for (const Place& v : L.window.S) {
                auto lp = local_places(fam[oi].field, v);
                for (int w = 0; w < (int)lp.size(); ++w) {
                    if (lp[w].complex_) continue;
                    coords.push_back({family, oi, v, w, lp[w].deg});
                }
            }
        }
    };
    add_family(C.components, 0, L.comp_block, L.domain);
    if (with_points) add_family(C.points, 1, L.point_block, L.domain);
    add_family(C.branches, 2, L.branch_block, L.target);

    for (int i = 0; i < (int)L.domain.size(); ++i) {
        const BrauerCoord& c = L.domain[i];
        L.col[{c.family, c.orbit, c.v, c.w}] = i;
    }
    return L;
}

// endpoints of a branch orbit, as orbit indices
std::pair<int, int> branch_ends(const ConicalCurve& C, int bi) {
    int b0 = C.branches[bi].members.at(0);
    return {C.component_orbit_of(C.src[b0]), C.point_orbit_of(C.dst[b0])};
}

void accumulate(ModVec& row, int col, long long x, long long n) {
    row[col] = ((row[col] + x) % n + n) % n;
}

ModMatrix agreement_rows_general(const ConicalCurve& C, const BrauerLayout& L) {
    long long n = L.window.n;
    ModMatrix rows;
    for (int bi = 0; bi < (int)C.branches.size(); ++bi) {
        auto [si, pi] = branch_ends(C, bi);
        const FieldSpec& Lf = C.branches[bi].field;
        for (const Place& v : L.window.S) {
            auto lw = local_places(Lf, v);
            auto fs = fibration_over(Lf, C.components[si].field, v);
            auto fp = fibration_over(Lf, C.points[pi].field, v);
            for (int k = 0; k < (int)lw.size(); ++k) {
                if (lw[k].complex_) continue;
                ModVec row(L.domain.size(), 0);
                accumulate(row, L.col_of(0, si, v, fs[k].first), fs[k].second, n);
                accumulate(row, L.col_of(1, pi, v, fp[k].first), -fp[k].second, n);
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

/* With the point blocks substituted away, each point orbit contributes
 * the condition that its two branch restrictions agree; both land in the
 * Brauer group of the shared branch field. */
ModMatrix agreement_rows_eliminated(const ConicalCurve& C, const BrauerLayout& L) {
    long long n = L.window.n;
    ModMatrix rows;
    for (int pi = 0; pi < (int)C.points.size(); ++pi) {
        std::vector<int> inc;
        for (int bi = 0; bi < (int)C.branches.size(); ++bi)
            if (branch_ends(C, bi).second == pi) inc.push_back(bi);
        int s1 = branch_ends(C, inc[0]).first;
        int s2 = branch_ends(C, inc[1]).first;
        const FieldSpec& Lf = C.points[pi].field;
        for (const Place& v : L.window.S) {
            auto lw = local_places(Lf, v);
            auto f1 = fibration_over(Lf, C.components[s1].field, v);
            auto f2 = fibration_over(Lf, C.components[s2].field, v);
            for (int k = 0; k < (int)lw.size(); ++k) {
                if (lw[k].complex_) continue;
                ModVec row(L.domain.size(), 0);
                accumulate(row, L.col_of(0, s1, v, f1[k].first), f1[k].second, n);
                accumulate(row, L.col_of(0, s2, v, f2[k].first), -f2[k].second, n);
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

/* Cut the blocks down to global classes: invariants sum to zero in each
 * block, and real invariants are 2-torsion. */
void add_global_class_rows(const BrauerLayout& L, ModMatrix& rows) {
    long long n = L.window.n;
    std::map<std::pair<int, int>, ModVec> rec;
    for (int i = 0; i < (int)L.domain.size(); ++i) {
        const BrauerCoord& c = L.domain[i];
        auto& row =
            rec.try_emplace({c.family, c.orbit}, ModVec(L.domain.size(), 0)).first->second;
        row[i] = 1 % n;
        if (c.v.is_real()) {
            ModVec two(L.domain.size(), 0);
            two[i] = 2 % n;
            rows.push_back(std::move(two));
        }
    }
    for (auto& [key, row] : rec) rows.push_back(std::move(row));
}

void write_class(const BrauerLayout& L, int family, int orbit, const BrauerClass& r,
                 ModVec& g) {
    long long n = L.window.n;
    for (const auto& [key, q] : r.support()) {
        long long x = (q.num() * (n / q.den())) % n;
        accumulate(g, L.col_of(family, orbit, key.first, key.second), x, n);
    }
}

bool fits_window(const BrauerClass& r, long long n) {
    for (const auto& [key, q] : r.support())
        if (!q.denominator_divides(n)) return false;
    return true;
}

ModMatrix subgroup_generators(const ConicalCurve& C, const BrauerLayout& L,
                              bool with_points) {
    long long n = L.window.n;
    ModMatrix H;
    for (int ci = 0; ci < (int)C.components.size(); ++ci) {
        if (C.conics[ci].is_split()) continue;
        BrauerClass r = restrict_class(conic_class(C.conics[ci]), C.components[ci].field);
        if (r.is_zero() || !fits_window(r, n)) continue;
        ModVec g(L.domain.size(), 0);
        write_class(L, 0, ci, r, g);
        H.push_back(std::move(g));
    }

    Place v0 = Place::finite(2);
    std::vector<BrauerClass> diag;
    for (const Place& v : L.window.S) {
        if (v == v0) continue;
        BrauerClass y(FieldSpec::rational());
        if (v.is_real()) {
            if (n % 2) continue;
            y.set_invariant(v, 0, QQZ::half());
            y.set_invariant(v0, 0, QQZ::half());
        } else {
            y.set_invariant(v, 0, QQZ(1, n));
            y.set_invariant(v0, 0, QQZ(-1, n));
        }
        diag.push_back(std::move(y));
    }
    for (const BrauerClass& y : diag) {
        ModVec g(L.domain.size(), 0);
        for (int ci = 0; ci < (int)C.components.size(); ++ci)
            write_class(L, 0, ci, restrict_class(y, C.components[ci].field), g);
        if (with_points)
            for (int pi = 0; pi < (int)C.points.size(); ++pi)
                write_class(L, 1, pi, restrict_class(y, C.points[pi].field), g);
        H.push_back(std::move(g));
    }
    return H;
}

}  // namespace

int BrauerLayout::col_of(int family, int orbit, const Place& v, int w) const {
    auto it = col.find({family, orbit, v, w});
    if (it == col.end()) {
        std::string fam = family == 0 ? "component" : family == 1 ? "point" : "branch";
        throw model_error("no coordinate for a local place of " + fam + " orbit " +
                          std::to_string(orbit) + " at " + v.str());
    }
    return it->second;
}

BrauerLayout brauer_layout(const ConicalCurve& C, const TruncationWindow& W) {
    return make_layout(C, W, true);
}

bool bipartite_double_structure(const ConicalCurve& C) {
    for (int pi = 0; pi < (int)C.points.size(); ++pi) {
        std::vector<int> inc;
        for (int bi = 0; bi < (int)C.branches.size(); ++bi)
            if (branch_ends(C, bi).second == pi) inc.push_back(bi);
        if (inc.size() != 2) return false;
        for (int bi : inc) {
            if (C.branches[bi].members.size() != C.points[pi].members.size()) return false;
            if (!spec_equal(C.branches[bi].field, C.points[pi].field)) return false;
        }
    }
    return true;
}

ModMatrix brauer_constraint_rows(const ConicalCurve& C, const BrauerLayout& L) {
    ModMatrix rows = agreement_rows_general(C, L);
    add_global_class_rows(L, rows);
    return rows;
}

BrauerQuotient curve_brauer_quotient(const ConicalCurve& C, const TruncationWindow& W,
                                     QuotientPath path) {
    ValidationReport vr = validate_curve(C);
    if (!vr.valid) throw std::invalid_argument("curve fails validation: " + vr.str());
    bool with_points = (path == QuotientPath::General);
    if (!with_points && !bipartite_double_structure(C))
        throw unsupported_operation(
            "point blocks can only be eliminated when every point orbit meets exactly two "
            "branch orbits of its own size and field");

    BrauerQuotient Q;
    Q.path = path;
    Q.layout = make_layout(C, W, with_points);
    Q.window = Q.layout.window;
    long long n = Q.window.n;

    ModMatrix rows = with_points ? agreement_rows_general(C, Q.layout)
                                 : agreement_rows_eliminated(C, Q.layout);
    add_global_class_rows(Q.layout, rows);

    std::size_t cols = Q.layout.domain.size();
    Q.kernel = kernel_mod(rows, n, cols);
    Q.subgroup = subgroup_generators(C, Q.layout, with_points);
    Q.invariants = quotient_invariants(Q.kernel, Q.subgroup, n, cols);
    Q.dimension = (int)Q.invariants.size();
    if (Q.dimension > 0 && Q.dimension <= 8)
        Q.representatives = quotient_representatives(Q.kernel, Q.subgroup, n, cols);
    return Q;
}

json BrauerQuotient::report() const {
    json win;
    win["n"] = window.n;
    json S = json::array();
    for (const Place& v : window.S) S.push_back(v.str());
    win["S"] = S;

    json j;
    j["window"] = win;
    j["path"] = path == QuotientPath::General ? "general" : "eliminated_points";
    j["domain_dimension"] = layout.domain_dim();
    j["kernel_rank"] = (int)kernel.size();
    j["quotient_invariants"] = invariants;
    j["quotient_dimension"] = dimension;
    if (!representatives.empty()) j["representatives"] = representatives;
    return j;
}

}  // namespace conical
