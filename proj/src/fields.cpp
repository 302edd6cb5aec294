#include "conical/fields.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <sstream>

namespace conical {

namespace {

// order square classes by magnitude, positive before negative
bool class_less(const Int& a, const Int& b) {
    Int aa = abs(a), ab = abs(b);
    if (aa != ab) return aa < ab;
    return a > b;
}

std::vector<long> odd_primes_of(const Int& n) {
    std::vector<long> out;
    for (const auto& [p, e] : factorize(abs(n)))
        if (p != 2) out.push_back(p.get_si());
    return out;
}

bool quad_ramifies_at_2(const Int& d) {
    Int r = d % 4;
    if (r < 0) r += 4;
    return r != 1;
}

long mod8(const Int& d) {
    Int r = d % 8;
    if (r < 0) r += 8;
    return r.get_si();
}

}  // namespace

FieldSpec FieldSpec::rational() { return FieldSpec(); }

FieldSpec FieldSpec::quadratic(const Int& d) {
    if (d == 0 || d == 1 || !is_squarefree(d))
        throw std::invalid_argument("quadratic field needs squarefree d, d != 0, 1");
    FieldSpec f;
    f.kind_ = FieldKind::Quadratic;
    f.degree_ = 2;
    f.d_ = d;
    std::ostringstream os;
    os << "Q(sqrt(" << d << "))";
    f.name_ = os.str();
    return f;
}

FieldSpec FieldSpec::biquadratic(const Int& d1, const Int& d2) {
    if (d1 == 0 || d1 == 1 || !is_squarefree(d1) || d2 == 0 || d2 == 1 ||
        !is_squarefree(d2) || d1 == d2)
        throw std::invalid_argument("biquadratic field needs distinct squarefree d1, d2");
    std::vector<Int> cls = {d1, d2, squarefree_part(d1 * d2)};
    std::sort(cls.begin(), cls.end(), class_less);
    FieldSpec f;
    f.kind_ = FieldKind::Biquadratic;
    f.degree_ = 4;
    f.d1_ = cls[0];
    f.d2_ = cls[1];
    std::ostringstream os;
    os << "Q(sqrt(" << f.d1_ << "),sqrt(" << f.d2_ << "))";
    f.name_ = os.str();
    return f;
}

FieldSpec FieldSpec::profiled(std::string name, int degree,
                              std::map<Place, std::vector<int>> table,
                              std::vector<long> ramified, Poly defining) {
    if (name.empty() || degree < 1)
        throw std::invalid_argument("profiled field needs a name and degree >= 1");
    for (auto& [v, degs] : table) {
        if (degs.empty()) throw std::invalid_argument("empty local degree list");
        int sum = 0;
        for (int m : degs) {
            if (m < 1) throw std::invalid_argument("local degree < 1");
            if (v.is_real() && m > 2)
                throw std::invalid_argument("archimedean local degree must be 1 or 2");
            sum += m;
        }
        if (sum != degree)
            throw std::invalid_argument("local degrees do not sum to the field degree");
        std::sort(degs.begin(), degs.end());
    }
    std::sort(ramified.begin(), ramified.end());
    ramified.erase(std::unique(ramified.begin(), ramified.end()), ramified.end());
    for (long p : ramified)
        if (p < 2 || !is_prime(p)) throw std::invalid_argument("bad ramified prime");
    defining = poly_trim(std::move(defining));
    if (!defining.empty()) {
        if (poly_deg(defining) != degree)
            throw std::invalid_argument("defining polynomial degree mismatch");
        if (defining.back() != 1)
            throw std::invalid_argument("defining polynomial must be monic");
        if (!poly_squarefree_q(defining))
            throw std::invalid_argument("defining polynomial must be squarefree");
    }
    FieldSpec f;
    f.kind_ = FieldKind::Profiled;
    f.degree_ = degree;
    f.name_ = std::move(name);
    f.table_ = std::move(table);
    f.ramified_ = std::move(ramified);
    f.defining_ = std::move(defining);
    return f;
}

const Int& FieldSpec::quad_class() const {
    if (kind_ != FieldKind::Quadratic)
        throw unsupported_operation("quad_class on non-quadratic field");
    return d_;
}

std::pair<Int, Int> FieldSpec::biquad_gens() const {
    if (kind_ != FieldKind::Biquadratic)
        throw unsupported_operation("biquad_gens on non-biquadratic field");
    return {d1_, d2_};
}

std::vector<long> FieldSpec::ramified_primes() const {
    switch (kind_) {
        case FieldKind::Rational:
            return {};
        case FieldKind::Quadratic: {
            std::vector<long> out = odd_primes_of(d_);
            if (quad_ramifies_at_2(d_)) out.push_back(2);
            std::sort(out.begin(), out.end());
            return out;
        }
        case FieldKind::Biquadratic: {
            std::set<long> acc;
            for (const Int& c : {d1_, d2_, squarefree_part(d1_ * d2_)}) {
                for (long p : odd_primes_of(c)) acc.insert(p);
                if (quad_ramifies_at_2(c)) acc.insert(2);
            }
            return {acc.begin(), acc.end()};
        }
        case FieldKind::Profiled:
            return ramified_;
    }
    return {};
}

std::vector<int> FieldSpec::local_degrees(const Place& v) const {
    switch (kind_) {
        case FieldKind::Rational:
            return {1};
        case FieldKind::Quadratic:
            return is_local_square(Rat(d_), v) ? std::vector<int>{1, 1}
                                               : std::vector<int>{2};
        case FieldKind::Biquadratic: {
            int s = 0;
            for (const Int& c : {d1_, d2_, squarefree_part(d1_ * d2_)})
                if (is_local_square(Rat(c), v)) ++s;
            if (s == 3) return {1, 1, 1, 1};
            if (s == 1) return {2, 2};
            if (s == 0) return {4};
            throw model_error("split classes of a biquadratic field do not form a subgroup");
        }
        case FieldKind::Profiled: {
            auto it = table_.find(v);
            if (it != table_.end()) return it->second;
            if (tensor_of_) {
                try {
                    std::vector<int> degs;
                    for (const auto& t :
                         tensor_places(tensor_of_->first, tensor_of_->second, v))
                        degs.push_back(t.deg);
                    std::sort(degs.begin(), degs.end());
                    return degs;
                } catch (const insufficient_profile&) {
                }
            }
            if (v.is_finite() && !defining_.empty()) {
                PolyP fp = poly_mod_p(defining_, v.prime());
                if (poly_deg(defining_) == (long)fp.size() - 1 && polyp_squarefree(fp, v.prime())) {
                    auto degs = polyp_factor_degrees(fp, v.prime());
                    std::sort(degs.begin(), degs.end());
                    return degs;
                }
            }
            throw insufficient_profile("no local data for " + name_ + " at " + v.str());
        }
    }
    throw model_error("unreachable field kind");
}

std::string FieldSpec::str() const { return name_; }

bool spec_equal(const FieldSpec& a, const FieldSpec& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case FieldKind::Rational:
            return true;
        case FieldKind::Quadratic:
            return a.quad_class() == b.quad_class();
        case FieldKind::Biquadratic:
            return a.biquad_gens() == b.biquad_gens();
        case FieldKind::Profiled:
            return a.name() == b.name() && a.degree() == b.degree();
    }
    return false;
}

namespace {

/* Does sqrt(d) lie in the completion F_u, for finite v where F_u has
 * even degree m and d is not a square in Q_v.  Exact for multiquadratic
 * F; rule-based for profiled F, throwing when the profile cannot say. */
bool quad_splits_in_completion(const Int& d, const FieldSpec& F, const Place& v,
                               int m) {
    if (F.kind() == FieldKind::Quadratic) {
        return is_local_square(Rat(d * F.quad_class()), v);
    }
    if (F.kind() == FieldKind::Biquadratic) {
        auto [e1, e2] = F.biquad_gens();
        Int e3 = squarefree_part(e1 * e2);
        if (m == 2) {
            for (const Int& g : {e1, e2, e3})
                if (!is_local_square(Rat(g), v))
                    return is_local_square(Rat(d * g), v);
            throw model_error("degree-2 completion of a totally split biquadratic field");
        }
        for (const Int& g : {e1, e2, e3})
            if (is_local_square(Rat(d * g), v)) return true;
        return false;
    }
    if (F.kind() == FieldKind::Profiled) {
        long p = v.prime();
        auto ram = F.ramified_primes();
        bool ramified = std::binary_search(ram.begin(), ram.end(), p);
        if (!ramified) {
            // unramified completion of even degree: the only nonsquare
            // class it kills is the unramified quadratic one
            if (p != 2) return !mpz_divisible_ui_p(d.get_mpz_t(), p);
            return mpz_odd_p(d.get_mpz_t()) && mod8(d) == 5;
        }
        // ramified prime: decidable when the profile forces this place
        // to carry all the ramification as a quadratic with e = 2
        auto degs = F.local_degrees(v);
        int evens = 0;
        bool others_trivial = true;
        for (int md : degs) {
            if (md % 2 == 0) ++evens;
            else if (md != 1) others_trivial = false;
        }
        if (m == 2 && evens == 1 && others_trivial) {
            bool d_unit = !mpz_divisible_ui_p(d.get_mpz_t(), p);
            if (d_unit && p != 2) return false;
            if (d_unit && p == 2 && mod8(d) == 5) return false;
        }
        throw insufficient_profile("cannot decide sqrt(" + d.get_str() + ") in " +
                                   F.name() + " at " + v.str());
    }
    throw unsupported_operation("quadratic splitting in this field kind");
}

}  // namespace

std::vector<TensorPlace> tensor_places(const FieldSpec& K, const FieldSpec& F,
                                       const Place& v) {
    if (K.kind() != FieldKind::Rational && K.kind() != FieldKind::Quadratic)
        throw unsupported_operation("tensor_places: left factor must be rational or quadratic");
    std::vector<TensorPlace> out;
    auto fplaces = local_places(F, v);
    if (K.kind() == FieldKind::Rational) {
        for (int j = 0; j < (int)fplaces.size(); ++j)
            out.push_back({0, j, 0, fplaces[j].deg, fplaces[j].deg, 1});
        return out;
    }
    const Int& d = K.quad_class();
    bool ksplit = is_local_square(Rat(d), v);
    int nk = ksplit ? 2 : 1;
    for (int i = 0; i < nk; ++i) {
        for (int j = 0; j < (int)fplaces.size(); ++j) {
            int m = fplaces[j].deg;
            if (ksplit) {
                out.push_back({i, j, 0, m, m, 1});
                continue;
            }
            bool split;
            if (v.is_real())
                split = (m == 2);
            else if (m % 2 == 1)
                split = false;
            else
                split = quad_splits_in_completion(d, F, v, m);
            if (split) {
                out.push_back({i, j, 0, m, m / 2, 1});
                out.push_back({i, j, 1, m, m / 2, 1});
            } else {
                out.push_back({i, j, 0, 2 * m, m, 2});
            }
        }
    }
    int total = 0;
    for (const auto& t : out) total += t.deg;
    if (total != K.degree() * F.degree())
        throw model_error("tensor place degrees do not sum to the product degree");
    return out;
}

std::vector<LocalPlace> local_places(const FieldSpec& K, const Place& v) {
    std::vector<LocalPlace> out;
    auto push_tensor = [&](const FieldSpec& A, const FieldSpec& B) {
        for (const auto& t : tensor_places(A, B, v))
            out.push_back({t.deg, v.is_real() && t.deg == 2, t.i, t.j, t.t});
    };
    switch (K.kind()) {
        case FieldKind::Rational:
            out.push_back({1, false, 0, 0, 0});
            return out;
        case FieldKind::Quadratic:
            if (is_local_square(Rat(K.quad_class()), v)) {
                out.push_back({1, false, 0, 0, 0});
                out.push_back({1, false, 1, 0, 0});
            } else {
                out.push_back({2, v.is_real(), 0, 0, 0});
            }
            return out;
        case FieldKind::Biquadratic: {
            auto [d1, d2] = K.biquad_gens();
            push_tensor(FieldSpec::quadratic(d1), FieldSpec::quadratic(d2));
            return out;
        }
        case FieldKind::Profiled: {
            if (K.tensor_of()) {
                push_tensor(K.tensor_of()->first, K.tensor_of()->second);
                return out;
            }
            int idx = 0;
            for (int m : K.local_degrees(v))
                out.push_back({m, v.is_real() && m == 2, idx++, 0, 0});
            return out;
        }
    }
    throw model_error("unreachable field kind");
}

bool tensor_is_field(const FieldSpec& K0, const FieldSpec& F0) {
    const FieldSpec* K = &K0;
    const FieldSpec* F = &F0;
    if (K->kind() == FieldKind::Rational || F->kind() == FieldKind::Rational)
        return true;
    if (K->kind() != FieldKind::Quadratic) std::swap(K, F);
    if (K->kind() != FieldKind::Quadratic)
        throw unsupported_operation("tensor_is_field: need a rational or quadratic factor");
    const Int& d = K->quad_class();
    switch (F->kind()) {
        case FieldKind::Quadratic:
            return d != F->quad_class();
        case FieldKind::Biquadratic: {
            auto [e1, e2] = F->biquad_gens();
            return d != e1 && d != e2 && d != squarefree_part(e1 * e2);
        }
        case FieldKind::Profiled: {
            if (F->degree() % 2 == 1) return true;
            // sqrt(d) in F would land in every completion; an odd-degree
            // completion at a place where d is not a square rules it out
            std::vector<Place> probe;
            for (const auto& [v, degs] : F->profile_table()) probe.push_back(v);
            if (!F->defining_poly().empty())
                for (long p = 3; p < 500; p += 2)
                    if (is_prime(p)) probe.push_back(Place::finite(p));
            for (const Place& v : probe) {
                if (is_local_square(Rat(d), v)) continue;
                try {
                    for (int m : F->local_degrees(v))
                        if (m % 2 == 1) return true;
                } catch (const insufficient_profile&) {
                }
            }
            throw unsupported_operation("cannot decide whether the tensor is a field");
        }
        default:
            throw unsupported_operation("tensor_is_field: unsupported combination");
    }
}

namespace {

// integer polynomial through the given points, via divided differences
Poly interpolate_integer(const std::vector<long>& xs, const std::vector<Int>& ys) {
    size_t n = xs.size();
    std::vector<Rat> dd;
    dd.reserve(n);
    for (const Int& y : ys) dd.emplace_back(y);
    for (size_t k = 1; k < n; ++k)
        for (size_t i = n - 1; i >= k; --i)
            dd[i] = (dd[i] - dd[i - 1]) / Rat(xs[i] - xs[i - k]);
    std::vector<Rat> acc = {dd[n - 1]};
    for (size_t k = n - 1; k-- > 0;) {
        acc.insert(acc.begin(), Rat(0));
        for (size_t i = 0; i + 1 < acc.size(); ++i)
            acc[i] -= Rat(xs[k]) * acc[i + 1];
        acc[0] += dd[k];
    }
    Poly out;
    for (const Rat& c : acc) {
        if (c.get_den() != 1)
            throw model_error("interpolation produced a non-integer coefficient");
        out.push_back(c.get_num());
    }
    return poly_trim(std::move(out));
}

/* Monic polynomial whose roots are theta + k*sqrt(d) over the roots
 * theta of monic g; squarefree for all but finitely many k, giving a
 * defining polynomial of the compositum. */
Poly compose_with_sqrt(const Poly& g, const Int& d) {
    long n = poly_deg(g);
    for (long k = 1; k <= 8; ++k) {
        std::vector<long> xs;
        std::vector<Int> ys;
        for (long t = 0; (long)xs.size() < 2 * n + 1; ++t) {
            long x0 = (t % 2 == 0) ? t / 2 : -(t / 2 + 1);
            Poly q = {Int(x0) * x0 - Int(k) * k * d, Int(-2) * x0, 1};
            xs.push_back(x0);
            ys.push_back(resultant(g, q));
        }
        Poly p = interpolate_integer(xs, ys);
        if (poly_deg(p) == 2 * n && poly_squarefree_q(p)) return p;
    }
    throw search_exhausted("no primitive element of the form theta + k*sqrt(d)");
}

}  // namespace

FieldSpec tensor_field_spec(const FieldSpec& K, const FieldSpec& F,
                            const std::vector<Place>& table_places,
                            const std::string& name) {
    if (!tensor_is_field(K, F))
        throw unsupported_operation("tensor_field_spec: tensor product is not a field");
    if (K.kind() == FieldKind::Rational) return F;
    if (F.kind() == FieldKind::Rational) return K;
    if (K.kind() != FieldKind::Quadratic)
        throw unsupported_operation("tensor_field_spec: left factor must be rational or quadratic");
    if (F.kind() == FieldKind::Quadratic)
        return FieldSpec::biquadratic(K.quad_class(), F.quad_class());
    if (F.kind() != FieldKind::Profiled)
        throw unsupported_operation("tensor_field_spec: unsupported right factor");

    FieldSpec out;
    out.kind_ = FieldKind::Profiled;
    out.degree_ = 2 * F.degree();
    out.name_ = name;
    std::set<long> ram;
    for (long p : K.ramified_primes()) ram.insert(p);
    for (long p : F.ramified_primes()) ram.insert(p);
    out.ramified_.assign(ram.begin(), ram.end());
    if (!F.defining_poly().empty())
        out.defining_ = compose_with_sqrt(F.defining_poly(), K.quad_class());
    for (const Place& v : table_places) {
        std::vector<int> degs;
        for (const auto& t : tensor_places(K, F, v)) degs.push_back(t.deg);
        std::sort(degs.begin(), degs.end());
        out.table_[v] = degs;
    }
    out.tensor_of_ = std::make_shared<const std::pair<FieldSpec, FieldSpec>>(K, F);
    return out;
}

std::vector<std::pair<int, int>> fibration_over(const FieldSpec& M,
                                                const FieldSpec& K,
                                                const Place& v) {
    std::vector<std::pair<int, int>> out;
    if (K.kind() == FieldKind::Rational) {
        for (const auto& w : local_places(M, v)) out.push_back({0, w.deg});
        return out;
    }
    if (spec_equal(M, K)) {
        int idx = 0;
        for (const auto& w : local_places(M, v)) {
            out.push_back({idx++, 1});
            (void)w;
        }
        return out;
    }
    if (M.kind() == FieldKind::Profiled && M.tensor_of()) {
        const auto& [tk, tf] = *M.tensor_of();
        if (spec_equal(tk, K)) {
            for (const auto& w : tensor_places(tk, tf, v)) out.push_back({w.i, w.rel_k});
            return out;
        }
        if (spec_equal(tf, K)) {
            for (const auto& w : tensor_places(tk, tf, v)) out.push_back({w.j, w.rel_f});
            return out;
        }
        throw unsupported_operation("fibration_over: field is not a tensor slot");
    }
    if (K.kind() != FieldKind::Quadratic)
        throw unsupported_operation("fibration_over: base must be rational, quadratic, or the field itself");
    const Int& e = K.quad_class();
    bool esplit = is_local_square(Rat(e), v);

    if (M.kind() == FieldKind::Biquadratic) {
        auto [d1, d2] = M.biquad_gens();
        Int d3 = squarefree_part(d1 * d2);
        if (e != d1 && e != d2 && e != d3)
            throw unsupported_operation("fibration_over: quadratic is not a subfield");
        auto t = tensor_places(FieldSpec::quadratic(d1), FieldSpec::quadratic(d2), v);
        if (!esplit) {
            for (const auto& w : t) out.push_back({0, w.deg / 2});
            return out;
        }
        for (const auto& w : t) {
            int kw;
            if (e == d1) kw = w.i;
            else if (e == d2) kw = w.j;
            else {
                bool s1 = is_local_square(Rat(d1), v);
                // e = d1*d2 split: either both generators split (place
                // determined by the sign product) or neither does and the
                // pair splits into two copies indexed by t
                kw = s1 ? (w.i ^ w.j) : w.t;
            }
            out.push_back({kw, w.deg});
        }
        return out;
    }
    throw unsupported_operation("fibration_over: unsupported pair of fields");
}

bool has_local_point(const EtaleAlgebra& A, const Place& v) {
    for (const FieldSpec& f : A) {
        auto degs = f.local_degrees(v);
        if (std::find(degs.begin(), degs.end(), 1) != degs.end()) return true;
    }
    return false;
}

namespace {

// Gaussian elimination over F_2 for rows (mask, rhs); true iff solvable
bool f2_system_solvable(std::vector<std::pair<uint64_t, int>> rows) {
    size_t r = 0;
    for (int bit = 0; bit < 64 && r < rows.size(); ++bit) {
        size_t piv = r;
        while (piv < rows.size() && !(rows[piv].first >> bit & 1)) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[r], rows[piv]);
        for (size_t i = 0; i < rows.size(); ++i) {
            if (i != r && (rows[i].first >> bit & 1)) {
                rows[i].first ^= rows[r].first;
                rows[i].second ^= rows[r].second;
            }
        }
        ++r;
    }
    for (const auto& [mask, rhs] : rows)
        if (mask == 0 && rhs == 1) return false;
    return true;
}

}  // namespace

SolubilityCertificate certify_everywhere_local(const EtaleAlgebra& A) {
    if (A.empty()) throw unsupported_operation("empty etale algebra");
    for (const FieldSpec& f : A)
        if (f.kind() != FieldKind::Rational && f.kind() != FieldKind::Quadratic)
            throw unsupported_operation(
                "everywhere-local certificate needs rational or quadratic factors");

    SolubilityCertificate cert;
    for (const FieldSpec& f : A) {
        if (f.kind() == FieldKind::Rational) {
            cert.everywhere_soluble = true;
            cert.summary = "a rational factor has points over every completion";
            return cert;
        }
    }

    std::vector<Int> classes;
    for (const FieldSpec& f : A) classes.push_back(f.quad_class());

    std::set<long> odd;
    for (const Int& c : classes)
        for (long p : odd_primes_of(c)) odd.insert(p);
    std::vector<Place> direct = {Place::real(), Place::finite(2)};
    for (long p : odd) direct.push_back(Place::finite(p));

    for (const Place& v : direct) {
        bool ok = false;
        for (const Int& c : classes)
            if (is_local_square(Rat(c), v)) {
                ok = true;
                break;
            }
        cert.checks.push_back({v, ok});
        if (!ok) {
            cert.witness = v;
            cert.summary = "no factor splits at " + v.str();
            return cert;
        }
    }

    // remaining places: a prime where every factor stays inert exists
    // exactly when the all-ones system over the class exponents solves
    cert.used_rank_argument = true;
    std::vector<long> basis(odd.begin(), odd.end());
    std::vector<std::pair<uint64_t, int>> rows;
    if (basis.size() + 2 > 64) throw unsupported_operation("too many primes in play");
    for (const Int& c : classes) {
        uint64_t mask = 0;
        if (c < 0) mask |= 1;
        if (mpz_even_p(c.get_mpz_t())) mask |= 2;
        for (size_t b = 0; b < basis.size(); ++b)
            if (mpz_divisible_ui_p(c.get_mpz_t(), basis[b])) mask |= uint64_t(1) << (b + 2);
        rows.push_back({mask, 1});
    }
    if (!f2_system_solvable(rows)) {
        cert.everywhere_soluble = true;
        cert.summary = "direct checks passed and no character avoids every factor";
        return cert;
    }

    Int avoid = 2;
    for (const Int& c : classes) avoid *= c;
    for (long p = 3;; p += 2) {
        if (p > 2'000'000)
            throw search_exhausted("no inert witness prime below the search bound");
        if (!is_prime(p) || mpz_divisible_ui_p(avoid.get_mpz_t(), p)) continue;
        bool all_inert = true;
        for (const Int& c : classes)
            if (legendre_symbol(c, p) != -1) {
                all_inert = false;
                break;
            }
        if (all_inert) {
            Place w = Place::finite(p);
            cert.checks.push_back({w, false});
            cert.witness = w;
            cert.summary = "every factor is inert at " + w.str();
            return cert;
        }
    }
}

}  // namespace conical
