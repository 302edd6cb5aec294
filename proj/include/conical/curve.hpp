#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "conical/brauer.hpp"
#include "conical/errors.hpp"
#include "conical/fields.hpp"

namespace conical {

/* A finite group as a multiplication table over element indices 0..order-1
 * with 0 the identity, plus a distinguished generating set.  Elementary
 * abelian 2-groups remember their rank so they can be serialized compactly
 * and have their actions rebuilt from field labels. */
class GaloisGroup {
public:
    GaloisGroup() : table_{{0}}, rank_(0) {}  // the trivial group

    static GaloisGroup trivial() { return elem2(0); }
    static GaloisGroup elem2(int rank);
    static GaloisGroup from_table(std::vector<std::vector<int>> table,
                                  std::vector<int> generators);

    int order() const { return (int)table_.size(); }
    int mult(int g, int h) const { return table_[g][h]; }
    int inverse(int g) const;
    const std::vector<int>& generators() const { return gens_; }
    const std::vector<std::vector<int>>& table() const { return table_; }
    std::optional<int> elem2_rank() const { return rank_; }

    // group axioms, identity at 0, generators generating; throws on failure
    void validate() const;

private:
    std::vector<std::vector<int>> table_;
    std::vector<int> gens_;
    std::optional<int> rank_;
};

/* Permutation actions of every group element on the three geometric sets
 * of a curve (components, singular points, branches). */
struct GaloisData {
    GaloisGroup group;
    std::vector<std::vector<int>> on_components;
    std::vector<std::vector<int>> on_points;
    std::vector<std::vector<int>> on_branches;
};

/* One Galois orbit of geometric objects: a name for reports, the field of
 * the orbit (degree = orbit size), and the member indices into the
 * geometric set, whose order fixes the meaning of "NAME.i" labels. */
struct Orbit {
    std::string name;
    FieldSpec field = FieldSpec::rational();
    std::vector<int> members;
};

/* The combinatorial model of a reduced curve whose components are conics:
 * components, singular points, and branches with their incidences
 * (a branch runs from the component it lies on to the singular point it
 * passes through), Galois orbits with fields, and a conic label per
 * component orbit.  Only incidence-level data is kept; that determines
 * rational points and Brauer groups for such curves. */
struct ConicalCurve {
    std::vector<Orbit> components;
    std::vector<ConicLabel> conics;  // parallel to components
    std::vector<Orbit> points;
    std::vector<Orbit> branches;
    std::vector<int> src;  // geometric branch -> geometric component
    std::vector<int> dst;  // geometric branch -> geometric point
    GaloisData galois;

    int n_components() const;
    int n_points() const;
    int n_branches() const;

    // orbit index of a geometric element, or -1 if unassigned
    int component_orbit_of(int c) const;
    int point_orbit_of(int p) const;
    int branch_orbit_of(int b) const;

    std::string component_label(int c) const;  // "K1.0"
    std::string point_label(int p) const;
    std::string branch_label(int b) const;
};

struct ValidationIssue {
    std::string where;
    std::string what;
};

struct ValidationReport {
    bool valid = true;
    std::vector<ValidationIssue> issues;
    std::string str() const;
};

ValidationReport validate_curve(const ConicalCurve& C);

struct GraphInvariants {
    bool connected = false;
    bool bipartite_ok = false;
    bool is_tree = false;
    long h1_rank = 0;
};

GraphInvariants graph_invariants(const ConicalCurve& C);

using IntMat = std::vector<std::vector<long>>;

/* Action of each group generator on a cycle basis of the incidence graph's
 * first homology.  The basis comes from a spanning tree: one cycle per
 * chord, oriented along the branch direction. */
std::vector<IntMat> homology_action(const ConicalCurve& C);

// the matrix of a single group element in the same basis
IntMat homology_matrix_of(const ConicalCurve& C, int g);

struct GraphVertex {
    bool is_point = false;
    int index = 0;  // geometric index within its family
    friend bool operator==(const GraphVertex&, const GraphVertex&) = default;
};

/* The canonical center vertex of a tree-shaped incidence graph.  Leaf
 * stripping yields a 1- or 2-vertex center; a 2-vertex center spans the
 * bipartition, so the action cannot swap it and both vertices are fixed,
 * in which case the singular-point one is returned. */
GraphVertex tree_fixed_vertex(const ConicalCurve& C);

/* F_2 basis for a collection of square classes, kept in reduced echelon
 * form (by smallest prime marker, with -1 marking the sign), so the basis
 * depends only on the set of classes inserted, not their order.  Bit i of
 * coords(d) says whether basis element i occurs in d's class. */
class SquareClassBasis {
public:
    void insert(const Int& d);
    int rank() const { return (int)basis_.size(); }
    unsigned coords(const Int& d) const;  // throws model_error outside the span

private:
    std::vector<std::set<long>> basis_;
};

/* Derives the acting group and all three actions from the orbit fields,
 * which must all be rational, quadratic, or biquadratic: the group is
 * elementary abelian 2 on the independent square classes present, member
 * i of a quadratic orbit is flipped by exactly the generators appearing
 * in its class, and member 2*i+j of a biquadratic orbit is indexed by the
 * signs of the two displayed generators. */
GaloisData galois_from_labels(const ConicalCurve& C);

}  // namespace conical
