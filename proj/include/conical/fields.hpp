#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conical/arith.hpp"
#include "conical/errors.hpp"
#include "conical/place.hpp"
#include "conical/polyz.hpp"

namespace conical {

enum class FieldKind { Rational, Quadratic, Biquadratic, Profiled };

/*
 * A number field described by the data this library actually needs:
 * its degree, where it ramifies, and how it decomposes over each
 * completion of Q.  Quadratic and biquadratic fields are handled
 * exactly from their square classes.  Everything else is "profiled":
 * a declared degree together with a table of local splitting types,
 * optionally backed by a defining polynomial that lets the table be
 * extended on the fly at unramified primes.
 */
class FieldSpec {
public:
    static FieldSpec rational();

    // d must be squarefree and not 0 or 1
    static FieldSpec quadratic(const Int& d);

    // distinct squarefree d1, d2 (neither 0 nor 1); stored with a
    // canonical generator pair so equal fields compare equal
    static FieldSpec biquadratic(const Int& d1, const Int& d2);

    static FieldSpec profiled(std::string name, int degree,
                              std::map<Place, std::vector<int>> table,
                              std::vector<long> ramified,
                              Poly defining = {});

    FieldKind kind() const { return kind_; }
    int degree() const { return degree_; }

    // Quadratic only
    const Int& quad_class() const;

    // Biquadratic only: the canonical generator pair
    std::pair<Int, Int> biquad_gens() const;

    const std::string& name() const { return name_; }
    const Poly& defining_poly() const { return defining_; }
    const std::map<Place, std::vector<int>>& profile_table() const { return table_; }

    // primes (including 2) that ramify in the field
    std::vector<long> ramified_primes() const;

    // multiset of local degrees [K_w : Q_v] over v, ascending.
    // Throws insufficient_profile when the stored data cannot decide.
    std::vector<int> local_degrees(const Place& v) const;

    // the ordered pair this field was built from, if it came from
    // tensor_field_spec; empty otherwise
    const std::shared_ptr<const std::pair<FieldSpec, FieldSpec>>& tensor_of() const {
        return tensor_of_;
    }

    std::string str() const;

private:
    FieldSpec() = default;

    FieldKind kind_ = FieldKind::Rational;
    int degree_ = 1;
    Int d_ = 0;          // Quadratic
    Int d1_ = 0, d2_ = 0;  // Biquadratic (canonical)
    std::string name_ = "Q";
    std::map<Place, std::vector<int>> table_;
    std::vector<long> ramified_;
    Poly defining_;
    std::shared_ptr<const std::pair<FieldSpec, FieldSpec>> tensor_of_;

    friend FieldSpec tensor_field_spec(const FieldSpec&, const FieldSpec&,
                                       const std::vector<Place>&, const std::string&);
};

// structural equality (profiled fields compare by name and degree)
bool spec_equal(const FieldSpec& a, const FieldSpec& b);

/* One place of a field K over a place v of Q, in the canonical order
 * used for all coordinate vectors.  For fields with tensor provenance
 * the order is the structured pair enumeration; otherwise places are
 * listed by ascending degree.  (i, j, t) record the pair provenance:
 * i indexes the place of the first factor, j the second, t the copy
 * when a pair splits. */
struct LocalPlace {
    int deg = 1;
    bool complex_ = false;  // the archimedean completion is C
    int i = 0, j = 0, t = 0;
};

std::vector<LocalPlace> local_places(const FieldSpec& K, const Place& v);

/* Places of K (x) F over v, K rational or quadratic, enumerated i-major
 * with split copies adjacent.  rel_k and rel_f are the local degrees of
 * the tensor place over the contributing places of K and F. */
struct TensorPlace {
    int i = 0, j = 0, t = 0;
    int deg = 1;
    int rel_k = 1;
    int rel_f = 1;
};

std::vector<TensorPlace> tensor_places(const FieldSpec& K, const FieldSpec& F,
                                       const Place& v);

// true iff K (x) F is a single field; throws unsupported_operation when
// the stored data cannot decide
bool tensor_is_field(const FieldSpec& K, const FieldSpec& F);

/* Build a FieldSpec for the compositum K.F (pre: tensor_is_field).
 * Quadratic pairs become Biquadratic; a quadratic against a profiled
 * field becomes a new profiled field whose table covers the given
 * places and whose defining polynomial is derived when possible. */
FieldSpec tensor_field_spec(const FieldSpec& K, const FieldSpec& F,
                            const std::vector<Place>& table_places,
                            const std::string& name);

/* For each local place W of M at v (canonical order), the index of the
 * place of K under W and the relative degree [M_W : K_w].  Supported:
 * K rational, K == M, and quadratic K inside a biquadratic or
 * tensor-provenanced M containing it. */
std::vector<std::pair<int, int>> fibration_over(const FieldSpec& M,
                                                const FieldSpec& K,
                                                const Place& v);

using EtaleAlgebra = std::vector<FieldSpec>;

// does some factor of A have a degree-one place over v
bool has_local_point(const EtaleAlgebra& A, const Place& v);

struct DirectCheck {
    Place v;
    bool soluble;
};

/* Outcome of the everywhere-local decision procedure for an algebra
 * whose factors are rational or quadratic.  Finitely many places are
 * checked directly; the remaining places are handled at once by a rank
 * computation over F_2, which either proves solubility or produces an
 * explicit insoluble place. */
struct SolubilityCertificate {
    bool everywhere_soluble = false;
    std::optional<Place> witness;
    std::vector<DirectCheck> checks;
    bool used_rank_argument = false;
    std::string summary;
};

SolubilityCertificate certify_everywhere_local(const EtaleAlgebra& A);

}  // namespace conical
