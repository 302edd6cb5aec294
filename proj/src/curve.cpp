#include "conical/curve.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "conical/arith.hpp"

namespace conical {

GaloisGroup GaloisGroup::elem2(int rank) {
    if (rank < 0 || rank > 12)
        throw std::invalid_argument("elem2: rank out of range");
    GaloisGroup G;
    int n = 1 << rank;
    G.table_.assign(n, std::vector<int>(n));
    for (int g = 0; g < n; ++g)
        for (int h = 0; h < n; ++h) G.table_[g][h] = g ^ h;
    for (int i = 0; i < rank; ++i) G.gens_.push_back(1 << i);
    G.rank_ = rank;
    return G;
}

GaloisGroup GaloisGroup::from_table(std::vector<std::vector<int>> table,
                                    std::vector<int> generators) {
    GaloisGroup G;
    G.table_ = std::move(table);
    G.gens_ = std::move(generators);
    G.rank_.reset();
    G.validate();
    return G;
}

int GaloisGroup::inverse(int g) const {
    for (int h = 0; h < order(); ++h)
        if (table_[g][h] == 0) return h;
    throw model_error("group element without inverse");
}

void GaloisGroup::validate() const {
    int n = order();
    if (n < 1) throw model_error("group: empty table");
    for (const auto& row : table_) {
        if ((int)row.size() != n) throw model_error("group: ragged table");
        for (int x : row)
            if (x < 0 || x >= n) throw model_error("group: entry out of range");
    }
    for (int g = 0; g < n; ++g)
        if (table_[0][g] != g || table_[g][0] != g)
            throw model_error("group: 0 is not an identity");
    for (int g = 0; g < n; ++g) {
        bool has_inverse = false;
        for (int h = 0; h < n; ++h) has_inverse |= (table_[g][h] == 0);
        if (!has_inverse) throw model_error("group: missing inverse");
    }
    for (int g : gens_)
        if (g < 0 || g >= n) throw model_error("group: generator out of range");
    // (ab)s = a(bs) for generators s extends to all triples by induction
    // on the word length of the third factor, given closure below
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int s : gens_)
                if (table_[table_[a][b]][s] != table_[a][table_[b][s]])
                    throw model_error("group: not associative");
    std::vector<char> seen(n, 0);
    seen[0] = 1;
    std::queue<int> work;
    work.push(0);
    while (!work.empty()) {
        int g = work.front();
        work.pop();
        for (int s : gens_) {
            int h = table_[g][s];
            if (!seen[h]) {
                seen[h] = 1;
                work.push(h);
            }
        }
    }
    if (std::count(seen.begin(), seen.end(), 1) != n)
        throw model_error("group: generators do not generate");
}

namespace {

int orbit_total(const std::vector<Orbit>& orbits) {
    int n = 0;
    for (const auto& o : orbits) n += (int)o.members.size();
    return n;
}

int orbit_of(const std::vector<Orbit>& orbits, int x) {
    for (int i = 0; i < (int)orbits.size(); ++i)
        for (int m : orbits[i].members)
            if (m == x) return i;
    return -1;
}

std::string label_in(const std::vector<Orbit>& orbits, int x) {
    for (const auto& o : orbits)
        for (int j = 0; j < (int)o.members.size(); ++j)
            if (o.members[j] == x) return o.name + "." + std::to_string(j);
    return "?" + std::to_string(x);
}

}  // namespace

int ConicalCurve::n_components() const { return orbit_total(components); }
int ConicalCurve::n_points() const { return orbit_total(points); }
int ConicalCurve::n_branches() const { return (int)src.size(); }

int ConicalCurve::component_orbit_of(int c) const { return orbit_of(components, c); }
int ConicalCurve::point_orbit_of(int p) const { return orbit_of(points, p); }
int ConicalCurve::branch_orbit_of(int b) const { return orbit_of(branches, b); }

std::string ConicalCurve::component_label(int c) const { return label_in(components, c); }
std::string ConicalCurve::point_label(int p) const { return label_in(points, p); }
std::string ConicalCurve::branch_label(int b) const { return label_in(branches, b); }

std::string ValidationReport::str() const {
    if (valid) return "valid";
    std::ostringstream out;
    out << "invalid (" << issues.size() << " issue" << (issues.size() == 1 ? "" : "s") << ")";
    for (const auto& i : issues) out << "\n  " << i.where << ": " << i.what;
    return out.str();
}

namespace {

// members of every orbit together hit 0..total-1 exactly once
bool check_partition(const std::vector<Orbit>& orbits, const std::string& family,
                     ValidationReport& R) {
    std::vector<int> all;
    for (const auto& o : orbits) {
        if (o.members.empty())
            R.issues.push_back({family + " orbit " + o.name, "empty orbit"});
        for (int m : o.members) all.push_back(m);
    }
    std::vector<int> sorted = all;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < (int)sorted.size(); ++i)
        if (sorted[i] != i) {
            R.issues.push_back({family + " orbits",
                                "members do not partition 0.." +
                                    std::to_string((int)sorted.size() - 1)});
            return false;
        }
    return true;
}

bool is_perm(const std::vector<int>& p, int n) {
    if ((int)p.size() != n) return false;
    std::vector<char> hit(n, 0);
    for (int x : p) {
        if (x < 0 || x >= n || hit[x]) return false;
        hit[x] = 1;
    }
    return true;
}

bool check_action(const GaloisGroup& G, const std::vector<std::vector<int>>& act,
                  int set_size, const std::string& family, ValidationReport& R) {
    if ((int)act.size() != G.order()) {
        R.issues.push_back({family + " action", "one permutation per group element required"});
        return false;
    }
    for (int g = 0; g < G.order(); ++g)
        if (!is_perm(act[g], set_size)) {
            R.issues.push_back({family + " action", "element " + std::to_string(g) +
                                                        " is not a permutation"});
            return false;
        }
    for (int x = 0; x < set_size; ++x)
        if (act[0][x] != x) {
            R.issues.push_back({family + " action", "identity does not act trivially"});
            return false;
        }
    for (int g = 0; g < G.order(); ++g)
        for (int h = 0; h < G.order(); ++h) {
            int gh = G.mult(g, h);
            for (int x = 0; x < set_size; ++x)
                if (act[gh][x] != act[g][act[h][x]]) {
                    R.issues.push_back({family + " action", "not a homomorphism at (" +
                                                                std::to_string(g) + "," +
                                                                std::to_string(h) + ")"});
                    return false;
                }
        }
    return true;
}

void check_orbits_match(const GaloisGroup& G, const std::vector<std::vector<int>>& act,
                        const std::vector<Orbit>& orbits, const std::string& family,
                        ValidationReport& R) {
    for (const auto& o : orbits) {
        if (o.members.empty()) continue;
        std::set<int> claimed(o.members.begin(), o.members.end());
        std::set<int> actual;
        for (int g = 0; g < G.order(); ++g) actual.insert(act[g][o.members[0]]);
        if (claimed != actual)
            R.issues.push_back({family + " orbit " + o.name,
                                "members are not a single group orbit"});
    }
}

}  // namespace

ValidationReport validate_curve(const ConicalCurve& C) {
    ValidationReport R;
    auto fail = [&R] { R.valid = false; return R; };

    if (C.components.empty()) {
        R.issues.push_back({"components", "curve has no components"});
        return fail();
    }
    if (C.conics.size() != C.components.size()) {
        R.issues.push_back({"conics", "one conic label per component orbit required"});
        return fail();
    }

    bool parts_ok = check_partition(C.components, "component", R) &
                    check_partition(C.points, "point", R) &
                    check_partition(C.branches, "branch", R);
    int nc = C.n_components(), np = C.n_points(), nb = orbit_total(C.branches);
    if ((int)C.src.size() != nb || (int)C.dst.size() != nb) {
        R.issues.push_back({"branches", "src/dst length disagrees with branch count"});
        return fail();
    }
    for (int b = 0; b < nb; ++b) {
        if (C.src[b] < 0 || C.src[b] >= nc) {
            R.issues.push_back({"branch " + std::to_string(b), "src out of range"});
            return fail();
        }
        if (C.dst[b] < 0 || C.dst[b] >= np) {
            R.issues.push_back({"branch " + std::to_string(b), "dst out of range"});
            return fail();
        }
    }
    if (!parts_ok || !R.issues.empty()) return fail();

    try {
        C.galois.group.validate();
    } catch (const model_error& e) {
        R.issues.push_back({"group", e.what()});
        return fail();
    }
    const auto& G = C.galois.group;
    bool acts_ok = check_action(G, C.galois.on_components, nc, "component", R) &&
                   check_action(G, C.galois.on_points, np, "point", R) &&
                   check_action(G, C.galois.on_branches, nb, "branch", R);
    if (!acts_ok) return fail();

    for (int g = 0; g < G.order(); ++g)
        for (int b = 0; b < nb; ++b) {
            if (C.src[C.galois.on_branches[g][b]] != C.galois.on_components[g][C.src[b]]) {
                R.issues.push_back({"branch " + std::to_string(b),
                                    "action does not commute with the source map"});
                return fail();
            }
            if (C.dst[C.galois.on_branches[g][b]] != C.galois.on_points[g][C.dst[b]]) {
                R.issues.push_back({"branch " + std::to_string(b),
                                    "action does not commute with the target map"});
                return fail();
            }
        }

    check_orbits_match(G, C.galois.on_components, C.components, "component", R);
    check_orbits_match(G, C.galois.on_points, C.points, "point", R);
    check_orbits_match(G, C.galois.on_branches, C.branches, "branch", R);

    auto check_degrees = [&R](const std::vector<Orbit>& orbits, const std::string& family) {
        for (const auto& o : orbits)
            if (o.field.degree() != (int)o.members.size())
                R.issues.push_back({family + " orbit " + o.name,
                                    "field degree " + std::to_string(o.field.degree()) +
                                        " differs from orbit size " +
                                        std::to_string((int)o.members.size())});
    };
    check_degrees(C.components, "component");
    check_degrees(C.points, "point");
    check_degrees(C.branches, "branch");

    // a singular point with fewer than two branches is not a singular point
    std::vector<int> point_deg(np, 0);
    for (int b = 0; b < nb; ++b) ++point_deg[C.dst[b]];
    for (int p = 0; p < np; ++p)
        if (point_deg[p] < 2)
            R.issues.push_back({"point " + C.point_label(p),
                                "only " + std::to_string(point_deg[p]) +
                                    " incident branch(es)"});

    for (const auto& bo : C.branches) {
        if (bo.members.empty()) continue;
        int b = bo.members[0];
        int co = C.component_orbit_of(C.src[b]);
        int po = C.point_orbit_of(C.dst[b]);
        if (co >= 0 && bo.field.degree() % C.components[co].field.degree() != 0)
            R.issues.push_back({"branch orbit " + bo.name,
                                "field degree not divisible by source orbit degree"});
        if (po >= 0 && bo.field.degree() % C.points[po].field.degree() != 0)
            R.issues.push_back({"branch orbit " + bo.name,
                                "field degree not divisible by target orbit degree"});
    }

    // incidence graph connectivity
    {
        std::vector<std::vector<int>> adj(nc + np);
        for (int b = 0; b < nb; ++b) {
            adj[C.src[b]].push_back(nc + C.dst[b]);
            adj[nc + C.dst[b]].push_back(C.src[b]);
        }
        std::vector<char> seen(nc + np, 0);
        std::queue<int> work;
        work.push(0);
        seen[0] = 1;
        int reached = 1;
        while (!work.empty()) {
            int v = work.front();
            work.pop();
            for (int w : adj[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    ++reached;
                    work.push(w);
                }
        }
        if (reached != nc + np)
            R.issues.push_back({"incidence graph", "not connected"});
    }

    // a quaternion conic class must die in every incident branch field,
    // otherwise restriction to the branches is not defined on the quotient
    for (int oi = 0; oi < (int)C.components.size(); ++oi) {
        if (C.conics[oi].is_split()) continue;
        BrauerClass cls = conic_class(C.conics[oi]);
        for (const auto& bo : C.branches) {
            if (bo.members.empty()) continue;
            if (C.component_orbit_of(C.src[bo.members[0]]) != oi) continue;
            try {
                if (!restrict_class(cls, bo.field).is_zero())
                    R.issues.push_back({"component orbit " + C.components[oi].name,
                                        "conic class survives in branch field of " + bo.name});
            } catch (const std::exception& e) {
                R.issues.push_back({"component orbit " + C.components[oi].name,
                                    std::string("cannot verify conic splitting: ") + e.what()});
            }
        }
    }

    R.valid = R.issues.empty();
    return R;
}

GraphInvariants graph_invariants(const ConicalCurve& C) {
    GraphInvariants I;
    int nc = C.n_components(), np = C.n_points(), nb = C.n_branches();
    int V = nc + np;
    std::vector<std::vector<int>> adj(V);
    for (int b = 0; b < nb; ++b) {
        adj[C.src[b]].push_back(nc + C.dst[b]);
        adj[nc + C.dst[b]].push_back(C.src[b]);
    }
    std::vector<char> seen(V, 0);
    int pieces = 0;
    for (int start = 0; start < V; ++start) {
        if (seen[start]) continue;
        ++pieces;
        std::queue<int> work;
        work.push(start);
        seen[start] = 1;
        while (!work.empty()) {
            int v = work.front();
            work.pop();
            for (int w : adj[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    work.push(w);
                }
        }
    }
    I.connected = (pieces == 1) && V > 0;
    I.bipartite_ok = true;  // edges always run component-side to point-side
    I.h1_rank = (long)nb - V + pieces;
    I.is_tree = I.connected && I.h1_rank == 0;
    return I;
}

namespace {

struct TreeData {
    int V = 0;
    std::vector<int> parent;       // parent vertex, -1 at roots
    std::vector<int> parent_edge;  // branch index to the parent, -1 at roots
    std::vector<int> depth;
    std::vector<char> is_tree_edge;
};

TreeData spanning_forest(const ConicalCurve& C) {
    int nc = C.n_components(), np = C.n_points(), nb = C.n_branches();
    TreeData T;
    T.V = nc + np;
    T.parent.assign(T.V, -1);
    T.parent_edge.assign(T.V, -1);
    T.depth.assign(T.V, 0);
    T.is_tree_edge.assign(nb, 0);
    std::vector<std::vector<std::pair<int, int>>> adj(T.V);  // (neighbour, branch)
    for (int b = 0; b < nb; ++b) {
        adj[C.src[b]].push_back({nc + C.dst[b], b});
        adj[nc + C.dst[b]].push_back({C.src[b], b});
    }
    std::vector<char> seen(T.V, 0);
    for (int start = 0; start < T.V; ++start) {
        if (seen[start]) continue;
        seen[start] = 1;
        std::queue<int> work;
        work.push(start);
        while (!work.empty()) {
            int v = work.front();
            work.pop();
            for (auto [w, b] : adj[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    T.parent[w] = v;
                    T.parent_edge[w] = b;
                    T.depth[w] = T.depth[v] + 1;
                    T.is_tree_edge[b] = 1;
                    work.push(w);
                }
        }
    }
    return T;
}

// edge coefficients of the cycle: chord + tree path back, oriented along
// the branch direction (component -> point)
std::vector<long> chord_cycle(const ConicalCurve& C, const TreeData& T, int chord) {
    int nc = C.n_components();
    std::vector<long> z(C.n_branches(), 0);
    z[chord] = 1;
    int u = C.src[chord];            // cycle runs u -> point -> ... -> u
    int w = nc + C.dst[chord];
    // walk w up and u up to their common ancestor; a climb from x to
    // parent(x) follows the parent edge's own direction iff x is its
    // component end, and the u-side edges enter the cycle reversed
    int a = w, b = u;
    auto climb = [&](int x, long sgn) {
        int e = T.parent_edge[x];
        bool x_is_source = (x == C.src[e]);
        z[e] += x_is_source ? sgn : -sgn;
        return T.parent[x];
    };
    while (T.depth[a] > T.depth[b]) a = climb(a, +1);
    while (T.depth[b] > T.depth[a]) b = climb(b, -1);
    while (a != b) {
        a = climb(a, +1);
        b = climb(b, -1);
    }
    return z;
}

std::vector<int> chord_list(const ConicalCurve& C, const TreeData& T) {
    std::vector<int> chords;
    for (int b = 0; b < C.n_branches(); ++b)
        if (!T.is_tree_edge[b]) chords.push_back(b);
    return chords;
}

// boundary of a 1-chain must vanish for a cycle
void assert_cycle(const ConicalCurve& C, const std::vector<long>& z) {
    int nc = C.n_components();
    std::vector<long> boundary(nc + C.n_points(), 0);
    for (int b = 0; b < C.n_branches(); ++b) {
        boundary[C.src[b]] -= z[b];
        boundary[nc + C.dst[b]] += z[b];
    }
    for (long x : boundary)
        if (x != 0) throw model_error("internal: chord cycle is not a cycle");
}

}  // namespace

IntMat homology_matrix_of(const ConicalCurve& C, int g) {
    TreeData T = spanning_forest(C);
    std::vector<int> chords = chord_list(C, T);
    int m = (int)chords.size();
    std::vector<std::vector<long>> basis;
    for (int c : chords) {
        basis.push_back(chord_cycle(C, T, c));
        assert_cycle(C, basis.back());
    }
    int ginv = C.galois.group.inverse(g);
    const auto& act = C.galois.on_branches[ginv];
    IntMat M(m, std::vector<long>(m, 0));
    for (int col = 0; col < m; ++col)
        for (int row = 0; row < m; ++row)
            M[row][col] = basis[col][act[chords[row]]];
    return M;
}

std::vector<IntMat> homology_action(const ConicalCurve& C) {
    std::vector<IntMat> out;
    for (int g : C.galois.group.generators()) out.push_back(homology_matrix_of(C, g));
    return out;
}

GraphVertex tree_fixed_vertex(const ConicalCurve& C) {
    GraphInvariants I = graph_invariants(C);
    if (!I.is_tree)
        throw std::invalid_argument("tree_fixed_vertex: incidence graph is not a tree");
    int nc = C.n_components(), np = C.n_points();
    int V = nc + np;
    std::vector<std::vector<int>> adj(V);
    for (int b = 0; b < C.n_branches(); ++b) {
        adj[C.src[b]].push_back(nc + C.dst[b]);
        adj[nc + C.dst[b]].push_back(C.src[b]);
    }
    std::vector<int> deg(V);
    for (int v = 0; v < V; ++v) deg[v] = (int)adj[v].size();
    std::vector<char> removed(V, 0);
    int remaining = V;
    std::vector<int> layer;
    for (int v = 0; v < V; ++v)
        if (deg[v] <= 1) layer.push_back(v);
    while (remaining > 2) {
        std::vector<int> next;
        for (int v : layer) {
            removed[v] = 1;
            --remaining;
            for (int w : adj[v])
                if (!removed[w] && --deg[w] == 1) next.push_back(w);
        }
        layer = std::move(next);
    }
    std::vector<int> center;
    for (int v = 0; v < V; ++v)
        if (!removed[v]) center.push_back(v);

    // a 2-vertex center is an edge, which crosses the bipartition, so the
    // action fixes both ends; report the singular-point end
    int chosen = center[0];
    for (int v : center)
        if (v >= nc) chosen = v;
    GraphVertex out;
    out.is_point = chosen >= nc;
    out.index = out.is_point ? chosen - nc : chosen;
    const auto& acts = out.is_point ? C.galois.on_points : C.galois.on_components;
    for (int g = 0; g < C.galois.group.order(); ++g)
        if (acts[g][out.index] != out.index)
            throw model_error("tree center moved by the action");
    return out;
}

namespace {

// square-class signature over F_2: one marker per odd-multiplicity prime,
// with -1 marking a negative sign
using ClassSig = std::set<long>;

ClassSig signature_of(const Int& d) {
    ClassSig sig;
    if (d < 0) sig.insert(-1);
    Int a = abs(d);
    for (const auto& [p, e] : factorize(a))
        if (e % 2 == 1) sig.insert(p.get_si());
    return sig;
}

ClassSig sym_diff(const ClassSig& a, const ClassSig& b) {
    ClassSig out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::inserter(out, out.begin()));
    return out;
}

unsigned reduce_sig(const std::vector<ClassSig>& basis, ClassSig& r) {
    unsigned mask = 0;
    for (int i = 0; i < (int)basis.size(); ++i)
        if (r.count(*basis[i].begin())) {
            r = sym_diff(r, basis[i]);
            mask ^= 1u << i;
        }
    return mask;
}

}  // namespace

void SquareClassBasis::insert(const Int& d) {
    ClassSig r = signature_of(d);
    reduce_sig(basis_, r);
    if (r.empty()) return;
    if (basis_.size() >= 24) throw model_error("square class basis too large");
    long lead = *r.begin();
    for (auto& b : basis_)
        if (b.count(lead)) b = sym_diff(b, r);
    basis_.push_back(r);
    std::sort(basis_.begin(), basis_.end(), [](const ClassSig& a, const ClassSig& b) {
        return *a.begin() < *b.begin();
    });
}

unsigned SquareClassBasis::coords(const Int& d) const {
    ClassSig r = signature_of(d);
    unsigned mask = reduce_sig(basis_, r);
    if (!r.empty())
        throw model_error("square class " + d.get_str() + " outside the basis");
    return mask;
}

GaloisData galois_from_labels(const ConicalCurve& C) {
    // gather classes in a fixed order so generator numbering is stable
    SquareClassBasis basis;
    auto absorb = [&basis](const FieldSpec& K) {
        switch (K.kind()) {
            case FieldKind::Rational:
                break;
            case FieldKind::Quadratic:
                basis.insert(K.quad_class());
                break;
            case FieldKind::Biquadratic: {
                auto [d1, d2] = K.biquad_gens();
                basis.insert(d1);
                basis.insert(d2);
                break;
            }
            case FieldKind::Profiled:
                throw unsupported_operation(
                    "galois_from_labels: profiled field " + K.name() +
                    " needs explicitly supplied actions");
        }
    };
    for (const auto& o : C.components) absorb(o.field);
    for (const auto& o : C.points) absorb(o.field);
    for (const auto& o : C.branches) absorb(o.field);

    int rank = basis.rank();
    GaloisData data;
    data.group = GaloisGroup::elem2(rank);
    int order = data.group.order();

    auto act_on = [&](const std::vector<Orbit>& orbits, int total) {
        std::vector<std::vector<int>> act(order, std::vector<int>(total));
        for (int g = 0; g < order; ++g) {
            std::iota(act[g].begin(), act[g].end(), 0);
            for (const auto& o : orbits) {
                switch (o.field.kind()) {
                    case FieldKind::Rational:
                        break;
                    case FieldKind::Quadratic: {
                        if (o.members.size() != 2)
                            throw std::invalid_argument(
                                "galois_from_labels: quadratic orbit " + o.name +
                                " must have two members");
                        unsigned eps = basis.coords(o.field.quad_class());
                        if (std::popcount((unsigned)g & eps) % 2 == 1) {
                            act[g][o.members[0]] = o.members[1];
                            act[g][o.members[1]] = o.members[0];
                        }
                        break;
                    }
                    case FieldKind::Biquadratic: {
                        if (o.members.size() != 4)
                            throw std::invalid_argument(
                                "galois_from_labels: biquadratic orbit " + o.name +
                                " must have four members");
                        auto [d1, d2] = o.field.biquad_gens();
                        unsigned e1 = basis.coords(d1);
                        unsigned e2 = basis.coords(d2);
                        int p1 = std::popcount((unsigned)g & e1) % 2;
                        int p2 = std::popcount((unsigned)g & e2) % 2;
                        int shift = 2 * p1 + p2;
                        for (int m = 0; m < 4; ++m)
                            act[g][o.members[m]] = o.members[m ^ shift];
                        break;
                    }
                    case FieldKind::Profiled:
                        throw unsupported_operation("galois_from_labels: profiled orbit");
                }
            }
        }
        return act;
    };
    data.on_components = act_on(C.components, C.n_components());
    data.on_points = act_on(C.points, C.n_points());
    data.on_branches = act_on(C.branches, C.n_branches());
    return data;
}

}  // namespace conical
