#pragma once

#include <random>
#include <vector>

#include "conical/curve.hpp"

/* Hand-built control curves and a random generator for valid tree-shaped
 * curves with multiquadratic orbit fields. */
namespace testgen {

using namespace conical;

// two rational lines through a pair of conjugate points over Q(i):
// the incidence graph is a 4-cycle
inline ConicalCurve four_cycle() {
    ConicalCurve C;
    C.components.push_back({"A", FieldSpec::rational(), {0}});
    C.components.push_back({"B", FieldSpec::rational(), {1}});
    C.conics = {ConicLabel::split(), ConicLabel::split()};
    C.points.push_back({"P", FieldSpec::quadratic(-1), {0, 1}});
    C.branches.push_back({"BA", FieldSpec::quadratic(-1), {0, 1}});
    C.branches.push_back({"BB", FieldSpec::quadratic(-1), {2, 3}});
    C.src = {0, 0, 1, 1};
    C.dst = {0, 1, 0, 1};
    C.galois = galois_from_labels(C);
    return C;
}

// two conjugate lines over Q(sqrt 2) crossing in two conjugate points:
// everything has field Q(sqrt 2), the graph is again a 4-cycle
inline ConicalCurve conjugate_lines() {
    ConicalCurve C;
    C.components.push_back({"A", FieldSpec::quadratic(2), {0, 1}});
    C.conics = {ConicLabel::split()};
    C.points.push_back({"P", FieldSpec::quadratic(2), {0, 1}});
    // branch (i, j): point i on line j; conjugation flips both coordinates
    C.branches.push_back({"B0", FieldSpec::quadratic(2), {0, 1}});
    C.branches.push_back({"B1", FieldSpec::quadratic(2), {2, 3}});
    C.src = {0, 1, 1, 0};
    C.dst = {0, 1, 0, 1};
    C.galois = galois_from_labels(C);
    return C;
}

namespace detail {

// index projection from the members of a field's orbit onto the members
// of a subfield's orbit, following the 2a+b convention for biquadratics
inline int project_member(const FieldSpec& sub, const FieldSpec& big, int j) {
    if (sub.kind() == FieldKind::Rational) return 0;
    if (big.kind() == FieldKind::Quadratic) return j;  // sub == big
    auto [g1, g2] = big.biquad_gens();
    int a = j >> 1, b = j & 1;
    if (sub.kind() == FieldKind::Biquadratic) return j;
    const Int& c = sub.quad_class();
    if (c == g1) return a;
    if (c == g2) return b;
    return a ^ b;  // the third quadratic subfield
}

inline bool field_contains(const FieldSpec& sub, const FieldSpec& big) {
    if (sub.kind() == FieldKind::Rational) return true;
    if (spec_equal(sub, big)) return true;
    if (sub.kind() == FieldKind::Quadratic && big.kind() == FieldKind::Biquadratic) {
        auto [g1, g2] = big.biquad_gens();
        const Int& c = sub.quad_class();
        return c == g1 || c == g2 || c == squarefree_part(g1 * g2);
    }
    return false;
}

}  // namespace detail

/* Random connected tree-shaped curve: grown orbit by orbit from a rational
 * root component, each new orbit's field containing its parent's so the
 * geometric expansion stays a tree; dangling singular points then receive
 * an extra component so every point has two branches. */
inline ConicalCurve random_tree_curve(std::mt19937_64& rng, int extra_orbits) {
    std::vector<FieldSpec> pool = {
        FieldSpec::rational(),        FieldSpec::quadratic(2),
        FieldSpec::quadratic(5),      FieldSpec::quadratic(-1),
        FieldSpec::quadratic(17),     FieldSpec::biquadratic(2, 5),
        FieldSpec::biquadratic(-1, 2)};

    struct Node {
        bool is_point;
        FieldSpec field;
        std::vector<int> members;
    };
    std::vector<Node> nodes;
    nodes.push_back({false, FieldSpec::rational(), {0}});
    int ncomp = 1, npoint = 0;
    struct Edge {
        int parent, child;  // node indices
        std::vector<std::pair<int, int>> links;  // (parent member, child member)
    };
    std::vector<Edge> edges;

    auto attach = [&](int parent, const FieldSpec& K) {
        Node child{!nodes[parent].is_point, K, {}};
        int base = child.is_point ? npoint : ncomp;
        for (int j = 0; j < K.degree(); ++j) child.members.push_back(base + j);
        (child.is_point ? npoint : ncomp) += K.degree();
        Edge e{parent, (int)nodes.size(), {}};
        for (int j = 0; j < K.degree(); ++j) {
            int pj = detail::project_member(nodes[parent].field, K, j);
            e.links.push_back({nodes[parent].members[pj], child.members[j]});
        }
        nodes.push_back(std::move(child));
        edges.push_back(std::move(e));
    };

    for (int step = 0; step < extra_orbits; ++step) {
        int parent = (int)(rng() % nodes.size());
        std::vector<FieldSpec> ok;
        for (const auto& K : pool)
            if (detail::field_contains(nodes[parent].field, K)) ok.push_back(K);
        attach(parent, ok[rng() % ok.size()]);
    }
    // give every singular point a second branch
    int n_nodes = (int)nodes.size();
    for (int i = 0; i < n_nodes; ++i) {
        if (!nodes[i].is_point) continue;
        int deg = 0;
        for (const auto& e : edges) deg += (e.parent == i) + (e.child == i);
        if (deg < 2) attach(i, nodes[i].field);
    }

    ConicalCurve C;
    int bnext = 0;
    for (int i = 0; i < (int)nodes.size(); ++i) {
        Orbit o{(nodes[i].is_point ? "P" : "C") + std::to_string(i), nodes[i].field,
                nodes[i].members};
        if (nodes[i].is_point) {
            C.points.push_back(std::move(o));
        } else {
            C.components.push_back(std::move(o));
            C.conics.push_back(ConicLabel::split());
        }
    }
    for (int ei = 0; ei < (int)edges.size(); ++ei) {
        const Edge& e = edges[ei];
        const Node& pn = nodes[e.parent];
        const Node& cn = nodes[e.child];
        Orbit bo{"B" + std::to_string(ei), cn.field, {}};
        for (auto [pm, cm] : e.links) {
            bo.members.push_back(bnext++);
            if (cn.is_point) {
                C.src.push_back(pm);
                C.dst.push_back(cm);
            } else {
                C.src.push_back(cm);
                C.dst.push_back(pm);
            }
        }
        C.branches.push_back(std::move(bo));
    }
    C.galois = galois_from_labels(C);
    return C;
}

}  // namespace testgen
