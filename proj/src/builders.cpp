#include "conical/builders.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>
#include <sstream>

#include "conical/arith.hpp"
#include "conical/polyz.hpp"

namespace conical {

namespace {

struct VerticalInfo {
    FormFactor factor;
    std::string name;
    FieldSpec field;
};

std::vector<VerticalInfo> vertical_fields(const BinaryForm& f) {
    std::vector<VerticalInfo> out;
    int qn = 0, ln = 0;
    for (const auto& fac : f.factors()) {
        VerticalInfo v{fac, "", FieldSpec::rational()};
        if (fac.kind == FormFactor::Kind::Quadratic) {
            v.name = "K" + std::to_string(++qn);
            v.field = FieldSpec::quadratic(fac.d);
        } else {
            v.name = "R" + std::to_string(++ln);
        }
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace

ConicalCurve build_Cf(const BinaryForm& f) {
    ConicalCurve C;
    int next = 0;
    for (const auto& v : vertical_fields(f)) {
        Orbit o;
        o.name = v.name;
        o.field = v.field;
        for (int j = 0; j < v.field.degree(); ++j) o.members.push_back(next++);
        C.components.push_back(std::move(o));
        C.conics.push_back(ConicLabel::split());
    }
    if (f.degree() >= 2) {
        // the cone vertex, singular since at least two lines pass through it
        C.points.push_back({"P", FieldSpec::rational(), {0}});
        int bnext = 0;
        for (const auto& co : C.components) {
            Orbit bo;
            bo.name = "B_" + co.name;
            bo.field = co.field;
            for (int m : co.members) {
                bo.members.push_back(bnext++);
                C.src.push_back(m);
                C.dst.push_back(0);
            }
            C.branches.push_back(std::move(bo));
        }
    }
    C.galois = galois_from_labels(C);
    return C;
}

/* ---- the vertical-horizontal arrangement ------------------------------- */

namespace {

std::vector<std::vector<int>> all_perms(int m) {
    std::vector<int> p(m);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

int perm_index(const std::vector<std::vector<int>>& perms, const std::vector<int>& p) {
    for (int i = 0; i < (int)perms.size(); ++i)
        if (perms[i] == p) return i;
    throw model_error("permutation missing from its symmetric group");
}

/* Direct product of an elementary abelian 2-part, acting through square
 * class characters, with one full symmetric group per profiled horizontal
 * field.  Elements are encoded as bits plus mixed-radix permutation
 * indices. */
struct ProductShape {
    int rank = 0;
    std::vector<std::vector<std::vector<int>>> sym;
    int order = 1;

    void finish() {
        order = 1 << rank;
        for (const auto& s : sym) order *= (int)s.size();
    }
    unsigned bits_of(int e) const { return (unsigned)e & ((1u << rank) - 1); }
    int sym_idx(int e, int j) const {
        e >>= rank;
        for (int i = 0; i < j; ++i) e /= (int)sym[i].size();
        return e % (int)sym[j].size();
    }
    int encode(unsigned bits, const std::vector<int>& idx) const {
        int e = 0;
        for (int j = (int)sym.size() - 1; j >= 0; --j) e = e * (int)sym[j].size() + idx[j];
        return (e << rank) | (int)bits;
    }
};

GaloisGroup product_group(const ProductShape& S) {
    int n = S.order;
    std::vector<std::vector<int>> table(n, std::vector<int>(n));
    std::vector<int> idx(S.sym.size());
    for (int g = 0; g < n; ++g)
        for (int h = 0; h < n; ++h) {
            for (int j = 0; j < (int)S.sym.size(); ++j) {
                const auto& pg = S.sym[j][S.sym_idx(g, j)];
                const auto& ph = S.sym[j][S.sym_idx(h, j)];
                std::vector<int> comp(pg.size());
                for (int x = 0; x < (int)pg.size(); ++x) comp[x] = pg[ph[x]];
                idx[j] = perm_index(S.sym[j], comp);
            }
            table[g][h] = S.encode(S.bits_of(g) ^ S.bits_of(h), idx);
        }
    std::vector<int> gens;
    for (int i = 0; i < S.rank; ++i) gens.push_back(1 << i);
    for (int j = 0; j < (int)S.sym.size(); ++j) {
        int m = (int)S.sym[j][0].size();
        std::vector<int> zero(S.sym.size(), 0);
        auto with = [&](const std::vector<int>& p) {
            std::vector<int> v = zero;
            v[j] = perm_index(S.sym[j], p);
            return S.encode(0, v);
        };
        std::vector<int> swap01(m);
        std::iota(swap01.begin(), swap01.end(), 0);
        std::swap(swap01[0], swap01[1]);
        gens.push_back(with(swap01));
        std::vector<int> cyc(m);
        for (int x = 0; x < m; ++x) cyc[x] = (x + 1) % m;
        if (cyc != swap01) gens.push_back(with(cyc));
    }
    return GaloisGroup::from_table(std::move(table), std::move(gens));
}

void check_horizontal_degrees(int d, const FieldSpec& L, const FieldSpec& F,
                              const char* who) {
    if (d < 5)
        throw std::invalid_argument(std::string(who) + ": form degree must be at least 5");
    int dl = d % 2 == 0 ? d / 2 - 1 : (d - 1) / 2;
    int df = d % 2 == 0 ? d / 2 : (d + 1) / 2;
    if (L.degree() != dl || F.degree() != df)
        throw std::invalid_argument(std::string(who) + ": horizontal degrees must be (" +
                                    std::to_string(dl) + ", " + std::to_string(df) +
                                    ") for degree " + std::to_string(d));
}

std::vector<Place> table_places_for(const FieldSpec& A, const FieldSpec& B) {
    std::set<Place> s{Place::real(), Place::finite(2)};
    for (long p : A.ramified_primes()) s.insert(Place::finite(p));
    for (long p : B.ramified_primes()) s.insert(Place::finite(p));
    return {s.begin(), s.end()};
}

}  // namespace

ConicalCurve build_D(const BinaryForm& f, const FieldSpec& L, const FieldSpec& F) {
    int d = f.degree();
    check_horizontal_degrees(d, L, F, "build_D");
    auto verts = vertical_fields(f);
    std::vector<std::pair<std::string, FieldSpec>> hz = {{"L", L}, {"F", F}};
    for (const auto& [hn, H] : hz) {
        if (H.kind() == FieldKind::Rational)
            throw std::invalid_argument("build_D: horizontal fields must be nontrivial");
        for (const auto& v : verts) {
            if (v.field.kind() == FieldKind::Quadratic && spec_equal(v.field, H))
                throw std::invalid_argument("build_D: " + hn +
                                            " coincides with the root field of " + v.name);
            if (!tensor_is_field(v.field, H))
                throw std::invalid_argument("build_D: " + hn +
                                            " does not remain a field over " + v.name);
        }
    }

    // acting group: characters on the square classes present, times one
    // symmetric group per profiled horizontal
    SquareClassBasis basis;
    for (const auto& v : verts)
        if (v.field.kind() == FieldKind::Quadratic) basis.insert(v.field.quad_class());
    std::vector<int> hsym(hz.size(), -1);
    ProductShape S;
    for (int h = 0; h < (int)hz.size(); ++h) {
        const FieldSpec& H = hz[h].second;
        if (H.kind() == FieldKind::Quadratic) {
            basis.insert(H.quad_class());
        } else if (H.kind() == FieldKind::Profiled) {
            hsym[h] = (int)S.sym.size();
            S.sym.push_back(all_perms(H.degree()));
        } else {
            throw unsupported_operation("build_D: unsupported horizontal field kind");
        }
    }
    S.rank = basis.rank();
    S.finish();
    if (S.order > 4000)
        throw unsupported_operation("build_D: acting group of order " +
                                    std::to_string(S.order) + " is too large");

    auto vact = [&](int g, const FieldSpec& K, int a) {
        if (K.kind() != FieldKind::Quadratic) return a;
        unsigned eps = basis.coords(K.quad_class());
        return std::popcount(S.bits_of(g) & eps) % 2 ? a ^ 1 : a;
    };
    auto hact = [&](int g, int h, int b) {
        const FieldSpec& K = hz[h].second;
        if (K.kind() == FieldKind::Quadratic) return vact(g, K, b);
        return S.sym[hsym[h]][S.sym_idx(g, hsym[h])][b];
    };

    ConicalCurve C;
    int cnext = 0;
    std::vector<int> vbase;
    for (const auto& v : verts) {
        Orbit o{v.name, v.field, {}};
        vbase.push_back(cnext);
        for (int j = 0; j < v.field.degree(); ++j) o.members.push_back(cnext++);
        C.components.push_back(std::move(o));
        C.conics.push_back(ConicLabel::split());
    }
    std::vector<int> hbase;
    for (const auto& [hn, H] : hz) {
        Orbit o{hn, H, {}};
        hbase.push_back(cnext);
        for (int j = 0; j < H.degree(); ++j) o.members.push_back(cnext++);
        C.components.push_back(std::move(o));
        C.conics.push_back(ConicLabel::split());
    }

    struct Crossing {
        int vi, h;
        int pbase, bvbase, bhbase;
        int vdeg, hdeg;
    };
    std::vector<Crossing> crossings;
    int pnext = 0, bnext = 0;
    for (int vi = 0; vi < (int)verts.size(); ++vi)
        for (int h = 0; h < (int)hz.size(); ++h) {
            const FieldSpec& V = verts[vi].field;
            const FieldSpec& H = hz[h].second;
            Crossing X{vi, h, pnext, 0, 0, V.degree(), H.degree()};
            int sz = X.vdeg * X.hdeg;
            FieldSpec pf =
                V.kind() == FieldKind::Rational
                    ? H
                    : tensor_field_spec(V, H, table_places_for(V, H),
                                        verts[vi].name + hz[h].first);
            Orbit po{"P_" + verts[vi].name + "_" + hz[h].first, pf, {}};
            for (int m = 0; m < sz; ++m) po.members.push_back(pnext++);
            C.points.push_back(std::move(po));

            Orbit bv{"B_" + verts[vi].name + "_" + hz[h].first + "_v", pf, {}};
            X.bvbase = bnext;
            for (int a = 0; a < X.vdeg; ++a)
                for (int b = 0; b < X.hdeg; ++b) {
                    bv.members.push_back(bnext++);
                    C.src.push_back(vbase[vi] + a);
                    C.dst.push_back(X.pbase + a * X.hdeg + b);
                }
            C.branches.push_back(std::move(bv));

            Orbit bh{"B_" + verts[vi].name + "_" + hz[h].first + "_h", pf, {}};
            X.bhbase = bnext;
            for (int a = 0; a < X.vdeg; ++a)
                for (int b = 0; b < X.hdeg; ++b) {
                    bh.members.push_back(bnext++);
                    C.src.push_back(hbase[h] + b);
                    C.dst.push_back(X.pbase + a * X.hdeg + b);
                }
            C.branches.push_back(std::move(bh));
            crossings.push_back(X);
        }

    C.galois.group = product_group(S);
    int n = C.galois.group.order();
    C.galois.on_components.assign(n, std::vector<int>(cnext));
    C.galois.on_points.assign(n, std::vector<int>(pnext));
    C.galois.on_branches.assign(n, std::vector<int>(bnext));
    for (int g = 0; g < n; ++g) {
        auto& pc = C.galois.on_components[g];
        for (int vi = 0; vi < (int)verts.size(); ++vi)
            for (int a = 0; a < verts[vi].field.degree(); ++a)
                pc[vbase[vi] + a] = vbase[vi] + vact(g, verts[vi].field, a);
        for (int h = 0; h < (int)hz.size(); ++h)
            for (int b = 0; b < hz[h].second.degree(); ++b)
                pc[hbase[h] + b] = hbase[h] + hact(g, h, b);
        auto& pp = C.galois.on_points[g];
        auto& pb = C.galois.on_branches[g];
        for (const auto& X : crossings)
            for (int a = 0; a < X.vdeg; ++a)
                for (int b = 0; b < X.hdeg; ++b) {
                    int ia = vact(g, verts[X.vi].field, a);
                    int ib = hact(g, X.h, b);
                    int from = a * X.hdeg + b, to = ia * X.hdeg + ib;
                    pp[X.pbase + from] = X.pbase + to;
                    pb[X.bvbase + from] = X.bvbase + to;
                    pb[X.bhbase + from] = X.bhbase + to;
                }
    }
    return C;
}

/* ---- the complementary pencil side ------------------------------------- */

namespace {

// univariate integer polynomial rendered as a homogeneous form
std::string form_text(const Poly& c, const std::string& u, const std::string& v) {
    int m = poly_deg(c);
    if (m < 0) return "0";
    std::ostringstream out;
    bool first = true;
    for (int i = m; i >= 0; --i) {
        if (c[i] == 0) continue;
        Int a = abs(c[i]);
        if (c[i] < 0)
            out << "-";
        else if (!first)
            out << "+";
        first = false;
        bool bare = (i > 0 || i < m);
        if (a != 1 || !bare) out << a.get_str();
        if (i > 0) {
            out << u;
            if (i > 1) out << "^" << i;
        }
        if (m - i > 0) {
            out << v;
            if (m - i > 1) out << "^" << (m - i);
        }
    }
    return out.str();
}

Poly horiz_poly(const FieldSpec& K) {
    switch (K.kind()) {
        case FieldKind::Quadratic:
            return {-K.quad_class(), 0, 1};
        case FieldKind::Biquadratic: {
            auto [d1, d2] = K.biquad_gens();
            // minimal polynomial of sqrt(d1) + sqrt(d2)
            Int s = d1 + d2, t = d1 - d2;
            return {t * t, 0, -2 * s, 0, 1};
        }
        case FieldKind::Profiled:
            if (poly_deg(K.defining_poly()) == K.degree()) return K.defining_poly();
            throw std::invalid_argument("build_pencil: field " + K.name() +
                                        " needs a defining polynomial");
        default:
            throw std::invalid_argument("build_pencil: trivial horizontal field");
    }
}

// a vertical factor of f evaluated at (x, y) = (-h, t h + 1), in h
Poly factor_sub(const FormFactor& fac, long t) {
    Poly Y = {1, t};
    if (fac.kind == FormFactor::Kind::Linear)
        return poly_add(poly_scale({0, 1}, -fac.q), poly_scale(Y, -fac.p));
    return poly_add({0, 0, 1}, poly_scale(poly_mul(Y, Y), -fac.d));
}

std::string member_text(long t) {
    std::ostringstream out;
    out << "(";
    if (t != 1) out << t;
    out << "xu+xv+yu)";
    return out.str();
}

}  // namespace

PencilReport build_pencil(const BinaryForm& f, const FieldSpec& L, const FieldSpec& F) {
    int d = f.degree();
    check_horizontal_degrees(d, L, F, "build_pencil");
    bool with_line = d % 2 == 0;
    int members = with_line ? d - 1 : d;

    Poly gl = horiz_poly(L), gf = horiz_poly(F);

    PencilReport R;
    R.base_point = "((0:1),(0:1))";
    R.tangent = "x+u=0";
    R.r_equation = f.str() + "(" + form_text(gl, "u", "v") + ")(" + form_text(gf, "u", "v") + ")";
    {
        std::ostringstream s;
        if (with_line) s << "x";
        for (long t = 1; t <= members; ++t) s << member_text(t);
        R.s_equation = s.str();
    }
    R.pencil = "lambda*[" + R.r_equation + "] + mu*[" + R.s_equation + "]";

    R.class_check.r_class = {d, L.degree() + F.degree()};
    R.class_check.s_class = {(with_line ? 1 : 0) + members, members};
    R.class_check.equal = R.class_check.r_class == R.class_check.s_class;

    auto& T = R.transversality;
    // the common point ((0:1),(0:1)) misses D iff no vertical root at x=0
    // and no horizontal root at u=0
    T.base_point_off_D = f.coeffs()[0] != 0 && gl[0] != 0 && gf[0] != 0;
    if (!T.base_point_off_D)
        throw std::invalid_argument("build_pencil: the base point lies on D");
    // t*xu + xv + yu has matrix [[t,1],[1,0]] of determinant -1, so every
    // member is irreducible
    T.members_irreducible = true;

    auto verts = vertical_fields(f);
    std::vector<std::pair<std::string, Poly>> hpolys = {{"L", gl}, {"F", gf}};
    for (long t = 1; t <= members; ++t) {
        std::string cname = "C" + std::to_string(t);
        // crossing collisions: the intersection of member t with a vertical
        // at root r has horizontal coordinate -r/(t r + 1), which hits a
        // horizontal root h exactly when h^2 = d (1 + t h)^2 resolves, i.e.
        // when the resultant below vanishes; the same condition read the
        // other way covers the horizontal-side intersections
        std::vector<std::vector<bool>> coll(verts.size(),
                                            std::vector<bool>(hpolys.size()));
        for (int vi = 0; vi < (int)verts.size(); ++vi) {
            Poly sub = factor_sub(verts[vi].factor, t);
            for (int h = 0; h < (int)hpolys.size(); ++h)
                coll[vi][h] = resultant(hpolys[h].second, sub) == 0;
        }
        for (int vi = 0; vi < (int)verts.size(); ++vi) {
            bool miss = true;
            for (int h = 0; h < (int)hpolys.size(); ++h) miss &= !coll[vi][h];
            T.entries.push_back(
                {cname, verts[vi].name, verts[vi].field.degree(), true, miss});
        }
        for (int h = 0; h < (int)hpolys.size(); ++h) {
            bool miss = true;
            for (int vi = 0; vi < (int)verts.size(); ++vi) miss &= !coll[vi][h];
            T.entries.push_back(
                {cname, hpolys[h].first, poly_deg(hpolys[h].second), true, miss});
        }
    }
    if (with_line) {
        // x = 0 misses every vertical entirely and meets each horizontal
        // line once, away from D's crossings since f(0,1) != 0
        for (const auto& v : verts)
            T.entries.push_back({"line", v.name, 0, true, true});
        for (int h = 0; h < (int)hpolys.size(); ++h)
            T.entries.push_back(
                {"line", hpolys[h].first, poly_deg(hpolys[h].second), true, true});
    }
    T.total = 0;
    T.all_ok = T.base_point_off_D && T.members_irreducible;
    for (const auto& e : T.entries) {
        T.total += e.count;
        T.all_ok = T.all_ok && e.simple && e.misses_singular;
    }

    ConicalCurve& CC = R.curve_C;
    int cn = 0;
    if (with_line) {
        CC.components.push_back({"line", FieldSpec::rational(), {cn++}});
        CC.conics.push_back(ConicLabel::split());
    }
    for (long t = 1; t <= members; ++t) {
        CC.components.push_back({"C" + std::to_string(t), FieldSpec::rational(), {cn++}});
        CC.conics.push_back(ConicLabel::split());
    }
    CC.points.push_back({"P", FieldSpec::rational(), {0}});
    for (int c = 0; c < cn; ++c) {
        CC.branches.push_back({"B_" + CC.components[c].name, FieldSpec::rational(), {c}});
        CC.src.push_back(c);
        CC.dst.push_back(0);
    }
    CC.galois = galois_from_labels(CC);
    return R;
}

}  // namespace conical
