#include "conical/hasse.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>

#include "conical/arith.hpp"
#include "conical/errors.hpp"

namespace conical {

namespace {

bool has_degree_one_place(const FieldSpec& K, const Place& v) {
    auto degs = K.local_degrees(v);
    return std::find(degs.begin(), degs.end(), 1) != degs.end();
}

bool conic_soluble_at(const ConicLabel& c, const Place& v) {
    if (c.is_split()) return true;
    return hilbert_invariant(c.a, c.b, v).is_zero();
}

/* Places where the generic degree-one argument does not apply: the real
 * place, 2, ramified primes of the component and point fields, and the
 * support of every quaternion conic. */
std::set<Place> exceptional_places(const ConicalCurve& C) {
    std::set<Place> E = {Place::real(), Place::finite(2)};
    auto absorb = [&](const FieldSpec& K) {
        for (long p : K.ramified_primes()) E.insert(Place::finite(p));
    };
    for (const Orbit& o : C.components) absorb(o.field);
    for (const Orbit& o : C.points) absorb(o.field);
    for (const ConicLabel& c : C.conics)
        if (!c.is_split())
            for (const Place& v : hilbert_support(c.a, c.b)) E.insert(v);
    return E;
}

/* Is there a character assignment making every listed square class a
 * nonresidue at once?  Rows are coordinate masks over a common basis. */
bool simultaneous_nonresidue_possible(const std::vector<unsigned>& masks) {
    std::map<int, std::pair<unsigned, int>> pivots;  // lowest bit -> reduced row
    for (unsigned m0 : masks) {
        unsigned m = m0;
        int r = 1;
        for (const auto& [b, row] : pivots)
            if ((m >> b) & 1u) {
                m ^= row.first;
                r ^= row.second;
            }
        if (m == 0) {
            if (r == 1) return false;
            continue;
        }
        pivots[std::countr_zero(m)] = {m, r};
    }
    return true;
}

PointWitness singular_witness(const std::string& orbit) {
    PointWitness w;
    w.kind = PointWitness::Kind::SingularPoint;
    w.orbit = orbit;
    w.description = "the rational singular point " + orbit + ".0";
    return w;
}

std::optional<PointWitness> smooth_witness(const std::string& orbit, const ConicLabel& c) {
    auto sol = c.is_split() ? conic_point(Rat(1), Rat(1)) : conic_point(c.a, c.b);
    if (!sol) return std::nullopt;
    PointWitness w;
    w.kind = PointWitness::Kind::SmoothOnComponent;
    w.orbit = orbit;
    w.conic_solution = *sol;
    std::ostringstream os;
    os << "a rational point on the component " << orbit
       << ".0, movable along the fibration to avoid the branch points; the conic solution is ("
       << (*sol)[0] << " : " << (*sol)[1] << " : " << (*sol)[2] << ")";
    w.description = os.str();
    return w;
}

void require_valid(const ConicalCurve& C) {
    ValidationReport vr = validate_curve(C);
    if (!vr.valid) throw std::invalid_argument("curve fails validation: " + vr.str());
}

}  // namespace

bool curve_local_points(const ConicalCurve& C, const Place& v) {
    bool undecided = false;
    for (const Orbit& o : C.points) {
        try {
            if (has_degree_one_place(o.field, v)) return true;
        } catch (const insufficient_profile&) {
            undecided = true;
        }
    }
    for (size_t i = 0; i < C.components.size(); ++i) {
        if (!conic_soluble_at(C.conics[i], v)) continue;
        try {
            if (has_degree_one_place(C.components[i].field, v)) return true;
        } catch (const insufficient_profile&) {
            undecided = true;
        }
    }
    if (undecided)
        throw insufficient_profile("cannot decide local points at " + v.str() +
                                   ": a field profile does not cover that place");
    return false;
}

std::string AdelicCertificate::status_str() const {
    switch (status) {
        case Status::Certified: return "certified";
        case Status::CertifiedFailure: return "certified_failure";
        case Status::Uncertified: return "uncertified";
    }
    return "uncertified";
}

nlohmann::json AdelicCertificate::to_json() const {
    nlohmann::json j;
    j["status"] = status_str();
    if (witness) j["witness"] = witness->str();
    nlohmann::json cs = nlohmann::json::array();
    for (const DirectCheck& c : checks) cs.push_back({{"place", c.v.str()}, {"soluble", c.soluble}});
    j["checks"] = cs;
    j["rank_argument"] = rank_argument;
    if (scanned_bound > 0) j["scanned_bound"] = scanned_bound;
    j["summary"] = summary;
    return j;
}

AdelicCertificate curve_adelic_points(const ConicalCurve& C, long scan_bound) {
    require_valid(C);
    AdelicCertificate cert;

    for (const Orbit& o : C.points)
        if (o.field.kind() == FieldKind::Rational) {
            cert.status = AdelicCertificate::Status::Certified;
            cert.summary = "the rational singular point " + o.name + ".0 meets every completion";
            return cert;
        }

    std::set<Place> E = exceptional_places(C);
    bool undecided_check = false;
    for (const Place& v : E) {
        try {
            bool ok = curve_local_points(C, v);
            cert.checks.push_back({v, ok});
            if (!ok) {
                cert.status = AdelicCertificate::Status::CertifiedFailure;
                cert.witness = v;
                cert.summary = "no local point at " + v.str();
                return cert;
            }
        } catch (const insufficient_profile&) {
            undecided_check = true;
        }
    }

    bool rational_component = false;
    for (const Orbit& o : C.components)
        if (o.field.kind() == FieldKind::Rational) rational_component = true;

    std::vector<Int> quad_classes;
    auto collect = [&](const Orbit& o) {
        if (o.field.kind() == FieldKind::Quadratic) quad_classes.push_back(o.field.quad_class());
    };
    for (const Orbit& o : C.components) collect(o);
    for (const Orbit& o : C.points) collect(o);

    bool generic_ok = false;
    if (rational_component) {
        generic_ok = true;
        cert.rank_argument = true;
        cert.summary = "a rational component has a point in every unchecked completion";
    } else if (!quad_classes.empty()) {
        SquareClassBasis basis;
        for (const Int& d : quad_classes) basis.insert(d);
        std::vector<unsigned> rows;
        for (const Int& d : quad_classes) rows.push_back(basis.coords(d));
        if (!simultaneous_nonresidue_possible(rows)) {
            generic_ok = true;
            cert.rank_argument = true;
            cert.summary =
                "the square classes cannot all be nonresidues at once, so every unchecked "
                "completion keeps a degree-one orbit";
        }
    }

    if (generic_ok && !undecided_check) {
        cert.status = AdelicCertificate::Status::Certified;
        return cert;
    }

    if (!generic_ok) {
        for (long p = 3; p <= scan_bound; p += 2) {
            if (!is_prime(Int(p))) continue;
            Place v = Place::finite(p);
            if (E.count(v)) continue;
            bool all_fail = true;
            for (const Int& d : quad_classes)
                if (is_local_square(Rat(d), v)) {
                    all_fail = false;
                    break;
                }
            if (!all_fail) continue;
            try {
                bool ok = curve_local_points(C, v);
                cert.checks.push_back({v, ok});
                if (!ok) {
                    cert.status = AdelicCertificate::Status::CertifiedFailure;
                    cert.witness = v;
                    cert.summary = "no local point at " + v.str();
                    return cert;
                }
            } catch (const insufficient_profile&) {
                continue;
            }
        }
    }

    cert.status = AdelicCertificate::Status::Uncertified;
    cert.scanned_bound = scan_bound;
    cert.summary = undecided_check
                       ? "an exceptional place could not be decided from the stored field data"
                       : "candidate places beyond the scan bound remain unchecked";
    return cert;
}

nlohmann::json PointWitness::to_json() const {
    nlohmann::json j;
    j["kind"] = kind == Kind::SingularPoint ? "singular_point" : "smooth_on_component";
    j["orbit"] = orbit;
    if (conic_solution) {
        nlohmann::json s = nlohmann::json::array();
        for (const Int& c : *conic_solution) s.push_back(c.get_str());
        j["conic_solution"] = s;
    }
    j["description"] = description;
    return j;
}

nlohmann::json RationalPointReport::to_json() const {
    nlohmann::json j;
    j["exists"] = exists;
    if (witness) j["witness"] = witness->to_json();
    return j;
}

RationalPointReport curve_rational_points(const ConicalCurve& C) {
    require_valid(C);
    RationalPointReport R;
    for (const Orbit& o : C.points)
        if (o.field.kind() == FieldKind::Rational) {
            R.exists = true;
            R.witness = singular_witness(o.name);
            return R;
        }
    for (size_t i = 0; i < C.components.size(); ++i) {
        if (C.components[i].field.kind() != FieldKind::Rational) continue;
        auto w = smooth_witness(C.components[i].name, C.conics[i]);
        if (w) {
            R.exists = true;
            R.witness = std::move(w);
            return R;
        }
    }
    return R;
}

nlohmann::json TreeHasseReport::to_json() const {
    nlohmann::json j;
    j["is_tree"] = is_tree;
    j["adelic"] = adelic.to_json();
    j["verified"] = verified;
    if (center)
        j["center"] = {{"kind", center->is_point ? "point" : "component"},
                       {"index", center->index}};
    if (witness) j["witness"] = witness->to_json();
    j["defects"] = defects;
    if (!note.empty()) j["note"] = note;
    return j;
}

TreeHasseReport verify_tree_hasse(const ConicalCurve& C) {
    require_valid(C);
    TreeHasseReport R;
    R.is_tree = graph_invariants(C).is_tree;
    if (!R.is_tree) {
        R.note = "the incidence graph is not a tree";
        return R;
    }
    R.adelic = curve_adelic_points(C);
    if (!R.adelic.certified()) {
        R.note = "adelic points are not certified, so the tree argument does not start";
        return R;
    }
    GraphVertex c = tree_fixed_vertex(C);
    R.center = c;
    if (c.is_point) {
        int oi = C.point_orbit_of(c.index);
        if (oi < 0 || C.points[oi].field.kind() != FieldKind::Rational)
            R.defects.push_back("the fixed point vertex is not rational");
        else
            R.witness = singular_witness(C.points[oi].name);
    } else {
        int oi = C.component_orbit_of(c.index);
        if (oi < 0 || C.components[oi].field.kind() != FieldKind::Rational) {
            R.defects.push_back("the fixed component vertex is not rational");
        } else {
            auto w = smooth_witness(C.components[oi].name, C.conics[oi]);
            if (!w)
                R.defects.push_back("the conic on " + C.components[oi].name +
                                    " has certified local points everywhere yet no rational "
                                    "point was found");
            else
                R.witness = std::move(w);
        }
    }
    R.verified = R.witness.has_value() && R.defects.empty();
    return R;
}

std::vector<std::set<long long>> achievable_invariants(const ConicalCurve& C,
                                                       const BrauerQuotient& Q,
                                                       const ModVec& x) {
    if (Q.path != QuotientPath::General)
        throw std::invalid_argument("local evaluation needs the general layout");
    if ((int)x.size() != Q.layout.domain_dim())
        throw std::invalid_argument("vector length does not match the layout");
    std::vector<std::set<long long>> out;
    for (const Place& v : Q.window.S) {
        std::set<long long> A;
        for (size_t pi = 0; pi < C.points.size(); ++pi) {
            auto lw = local_places(C.points[pi].field, v);
            for (size_t w = 0; w < lw.size(); ++w)
                if (lw[w].deg == 1) A.insert(x[Q.layout.col_of(1, (int)pi, v, (int)w)]);
        }
        for (size_t ci = 0; ci < C.components.size(); ++ci) {
            if (!conic_soluble_at(C.conics[ci], v)) continue;
            auto lw = local_places(C.components[ci].field, v);
            for (size_t w = 0; w < lw.size(); ++w)
                if (lw[w].deg == 1) A.insert(x[Q.layout.col_of(0, (int)ci, v, (int)w)]);
        }
        out.push_back(std::move(A));
    }
    return out;
}

bool element_obstructs(const ConicalCurve& C, const BrauerQuotient& Q, const ModVec& x) {
    auto sets = achievable_invariants(C, Q, x);
    long long n = Q.window.n;
    std::set<long long> acc = {0};
    for (const auto& A : sets) {
        if (A.empty()) return true;  // no visible local point at that place
        std::set<long long> next;
        for (long long s : acc)
            for (long long a : A) next.insert((s + a) % n);
        acc = std::move(next);
    }
    return acc.count(0) == 0;
}

std::string CounterexampleReport::classification_str() const {
    switch (classification) {
        case CurveClassification::HasRationalPoints: return "has_rational_points";
        case CurveClassification::LocallyObstructed: return "locally_obstructed";
        case CurveClassification::BrauerObstructed: return "BM_obstructed";
        case CurveClassification::CounterexampleTrivialBrauer:
            return "counterexample_with_trivial_truncated_Brauer";
        case CurveClassification::UnexplainedNoObstruction:
            return "counterexample_no_truncated_obstruction";
        case CurveClassification::AdelicUndecided: return "adelic_points_undecided";
        case CurveClassification::WindowUndecided: return "window_analysis_undecided";
    }
    return "window_analysis_undecided";
}

nlohmann::json CounterexampleReport::to_json() const {
    nlohmann::json j;
    j["classification"] = classification_str();
    j["rational_points"] = rational.to_json();
    j["adelic"] = adelic.to_json();
    if (window_failure) j["window_failure"] = window_failure->str();
    if (quotient) {
        j["quotient_dimension"] = quotient->dimension;
        j["quotient_invariants"] = quotient->invariants;
    }
    if (obstruction_witness) j["obstruction_witness"] = *obstruction_witness;
    j["elements_checked"] = elements_checked;
    if (!caveat.empty()) j["caveat"] = caveat;
    return j;
}

CounterexampleReport counterexample_report(const ConicalCurve& C, const TruncationWindow& W,
                                           long scan_bound) {
    CounterexampleReport R;
    R.rational = curve_rational_points(C);
    R.adelic = curve_adelic_points(C, scan_bound);
    if (R.rational.exists) {
        R.classification = CurveClassification::HasRationalPoints;
        return R;
    }
    if (R.adelic.status == AdelicCertificate::Status::CertifiedFailure) {
        R.classification = CurveClassification::LocallyObstructed;
        return R;
    }

    try {
        BrauerQuotient Q = curve_brauer_quotient(C, W);
        for (const Place& v : Q.window.S)
            if (!curve_local_points(C, v)) {
                R.window_failure = v;
                break;
            }
        R.quotient = std::move(Q);
    } catch (const insufficient_profile&) {
        // the window analysis stays empty
    }
    if (R.window_failure) {
        R.classification = CurveClassification::LocallyObstructed;
        return R;
    }

    if (R.quotient && R.quotient->dimension > 0 &&
        (int)R.quotient->representatives.size() == R.quotient->dimension) {
        long long total = 1;
        for (long long d : R.quotient->invariants) {
            total *= d;
            if (total > 4096) break;
        }
        if (total <= 4096) {
            int k = R.quotient->dimension;
            long long n = R.quotient->window.n;
            std::vector<long long> c(k, 0);
            while (true) {
                int i = 0;
                while (i < k && ++c[i] == R.quotient->invariants[i]) c[i++] = 0;
                if (i == k) break;
                ModVec x(R.quotient->layout.domain_dim(), 0);
                for (int t = 0; t < k; ++t)
                    for (size_t col = 0; col < x.size(); ++col)
                        x[col] = (x[col] + c[t] * R.quotient->representatives[t][col]) % n;
                ++R.elements_checked;
                if (element_obstructs(C, *R.quotient, x)) {
                    R.classification = CurveClassification::BrauerObstructed;
                    R.obstruction_witness = std::move(x);
                    R.caveat =
                        "the obstruction uses only classes visible in the chosen window";
                    return R;
                }
            }
        } else {
            for (const ModVec& x : R.quotient->representatives) {
                ++R.elements_checked;
                if (element_obstructs(C, *R.quotient, x)) {
                    R.classification = CurveClassification::BrauerObstructed;
                    R.obstruction_witness = x;
                    R.caveat =
                        "the obstruction uses only classes visible in the chosen window";
                    return R;
                }
            }
            R.caveat = "the quotient is too large to enumerate; only generators were evaluated";
        }
    }

    if (R.adelic.status == AdelicCertificate::Status::Uncertified) {
        R.classification = CurveClassification::AdelicUndecided;
        return R;
    }
    if (!R.quotient) {
        R.classification = CurveClassification::WindowUndecided;
        return R;
    }
    if (R.quotient->dimension == 0) {
        R.classification = CurveClassification::CounterexampleTrivialBrauer;
        R.caveat =
            "no rational points, certified adelic points, and a trivial quotient for classes "
            "of order dividing " +
            std::to_string(W.n) + " supported in the window; classes outside it are unexamined";
    } else {
        R.classification = CurveClassification::UnexplainedNoObstruction;
        R.caveat = (R.caveat.empty() ? std::string() : R.caveat + "; ") +
                   "no element of the window quotient obstructs, and classes outside the window "
                   "are unexamined";
    }
    return R;
}

nlohmann::json sample_adelic_point(const BinaryForm& f, const std::vector<Place>& S,
                                   int precision) {
    if (precision < 1) throw std::invalid_argument("precision must be positive");
    std::vector<Place> places = S;
    std::sort(places.begin(), places.end());
    places.erase(std::unique(places.begin(), places.end()), places.end());

    nlohmann::json out = nlohmann::json::array();
    for (const Place& v : places) {
        nlohmann::json e;
        e["place"] = v.str();
        if (v.is_real()) {
            const FormFactor* pick = nullptr;
            for (const FormFactor& fac : f.factors())
                if (fac.kind == FormFactor::Kind::Linear || fac.d > 0) {
                    pick = &fac;
                    break;
                }
            if (!pick)
                throw std::invalid_argument("the form has no real root");
            e["precision"] = "double";
            if (pick->kind == FormFactor::Kind::Linear && pick->q == 0) {
                e["at_infinity"] = true;
            } else if (pick->kind == FormFactor::Kind::Linear) {
                e["xy_ratio"] = Rat(pick->p, pick->q).get_d();
            } else {
                e["xy_ratio"] = std::sqrt(pick->d.get_d());
            }
            e["factor"] = pick->str();
        } else {
            long p = v.prime();
            int k = precision;
            if (p == 2 && k < 3) k = 3;
            Int modulus;
            mpz_pow_ui(modulus.get_mpz_t(), Int(p).get_mpz_t(), (unsigned long)k);
            std::optional<Int> root;
            bool inverted = false;  // the root reduces to (1 : 0); report y/x instead
            std::string factor_str;
            for (const FormFactor& fac : f.factors()) {
                if (fac.kind == FormFactor::Kind::Linear) {
                    Int num = fac.p, den = fac.q, inv;
                    Int dm = ((den % modulus) + modulus) % modulus;
                    if (mpz_invert(inv.get_mpz_t(), dm.get_mpz_t(), modulus.get_mpz_t()) == 0) {
                        std::swap(num, den);
                        inverted = true;
                        Int dm2 = ((den % modulus) + modulus) % modulus;
                        mpz_invert(inv.get_mpz_t(), dm2.get_mpz_t(), modulus.get_mpz_t());
                    }
                    Int val = ((num % modulus) * inv) % modulus;
                    root = ((val % modulus) + modulus) % modulus;
                    factor_str = fac.str();
                    break;
                }
                const Int& d = fac.d;
                if (p == 2) {
                    Int m8 = ((d % 8) + 8) % 8;
                    if (m8 != 1) continue;
                } else {
                    if (d % p == 0) continue;
                    if (legendre_symbol(d, Int(p)) != 1) continue;
                }
                root = sqrt_mod_prime_power(((d % modulus) + modulus) % modulus, p, k);
                if (!root) continue;
                factor_str = fac.str();
                break;
            }
            if (!root)
                throw std::invalid_argument("the form has no usable root over Q_" +
                                            std::to_string(p));
            e["modulus"] = std::to_string(p) + "^" + std::to_string(k);
            e[inverted ? "yx_ratio" : "xy_ratio"] = root->get_str();
            e["factor"] = factor_str;
        }
        out.push_back(e);
    }
    return out;
}

}  // namespace conical
