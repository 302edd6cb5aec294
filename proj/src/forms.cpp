#include "conical/forms.hpp"

#include <set>
#include <sstream>

namespace conical {

FormFactor FormFactor::linear(Int p, Int q) {
    if (p == 0 && q == 0) throw std::invalid_argument("(0 : 0) is not a point");
    Int g = gcd(p, q);
    p /= g;
    q /= g;
    if (q < 0 || (q == 0 && p < 0)) {
        p = -p;
        q = -q;
    }
    FormFactor f;
    f.kind = Kind::Linear;
    f.p = std::move(p);
    f.q = std::move(q);
    return f;
}

FormFactor FormFactor::linear(const Rat& root) {
    return linear(root.get_num(), root.get_den());
}

FormFactor FormFactor::quadratic(Int d) {
    if (d == 0 || d == 1 || !is_squarefree(d))
        throw std::invalid_argument("quadratic factor needs a nontrivial squarefree class");
    FormFactor f;
    f.kind = Kind::Quadratic;
    f.d = std::move(d);
    return f;
}

Poly FormFactor::coeffs() const {
    if (kind == Kind::Quadratic) return {-d, 0, 1};
    if (q == 0) return {1};  // the factor y itself, evaluated at y = 1
    return {-p, q};
}

std::string FormFactor::str() const {
    std::ostringstream os;
    auto coef = [](const Int& c) {
        Int m = abs(c);
        return m == 1 ? std::string() : m.get_str();
    };
    if (kind == Kind::Quadratic) {
        os << "(x^2" << (d > 0 ? "-" : "+") << coef(d) << "y^2)";
        return os.str();
    }
    if (q == 0) return "(y)";
    os << "(" << coef(q) << "x";
    if (p != 0) os << (p > 0 ? "-" : "+") << coef(p) << "y";
    os << ")";
    return os.str();
}

bool factor_equal(const FormFactor& a, const FormFactor& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == FormFactor::Kind::Quadratic) return a.d == b.d;
    return a.p == b.p && a.q == b.q;
}

BinaryForm::BinaryForm(std::vector<FormFactor> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw std::invalid_argument("a form needs at least one factor");
    for (size_t i = 0; i < factors_.size(); ++i)
        for (size_t j = i + 1; j < factors_.size(); ++j)
            if (factor_equal(factors_[i], factors_[j]))
                throw std::invalid_argument("inseparable form: repeated factor " +
                                            factors_[i].str());
}

int BinaryForm::degree() const {
    int d = 0;
    for (const auto& f : factors_) d += f.kind == FormFactor::Kind::Linear ? 1 : 2;
    return d;
}

Poly BinaryForm::coeffs() const {
    Poly out = {1};
    for (const auto& f : factors_) out = poly_mul(out, f.coeffs());
    return out;
}

EtaleAlgebra BinaryForm::algebra() const {
    EtaleAlgebra a;
    for (const auto& f : factors_)
        a.push_back(f.kind == FormFactor::Kind::Linear ? FieldSpec::rational()
                                                       : FieldSpec::quadratic(f.d));
    return a;
}

std::string BinaryForm::str() const {
    std::string s;
    for (const auto& f : factors_) s += f.str();
    return s;
}

BinaryForm BinaryForm::from_classes(const std::vector<Int>& ds) {
    std::vector<FormFactor> fs;
    fs.reserve(ds.size());
    for (const Int& d : ds) fs.push_back(FormFactor::quadratic(d));
    return BinaryForm(std::move(fs));
}

std::string HasseReport::verdict_str() const {
    switch (verdict) {
        case Verdict::Soluble: return "soluble";
        case Verdict::LocallyObstructed: return "locally_obstructed";
        case Verdict::Counterexample: return "counterexample";
    }
    return "";
}

HasseReport analyze_form(const BinaryForm& f) {
    HasseReport r;
    for (const auto& fac : f.factors())
        if (fac.kind == FormFactor::Kind::Linear) {
            r.globally_soluble = true;
            r.rational_root = std::pair<Int, Int>{fac.p, fac.q};
            break;
        }
    r.certificate = certify_everywhere_local(f.algebra());
    r.locally_soluble_everywhere = r.certificate.everywhere_soluble;
    r.verdict = r.globally_soluble            ? HasseReport::Verdict::Soluble
                : r.locally_soluble_everywhere ? HasseReport::Verdict::Counterexample
                                               : HasseReport::Verdict::LocallyObstructed;
    return r;
}

BinaryForm construct_form(const Int& a, const Int& b, long search_bound) {
    if (!is_squarefree(a) || !is_squarefree(b))
        throw std::invalid_argument("construct_form needs squarefree a and b");
    if (a == 1 || b == 1 || a == b)
        throw std::invalid_argument("construct_form needs a, b and ab nontrivial");
    Int ab = squarefree_part(a * b);

    std::set<Int> odd;
    for (const auto& [p, e] : factorize(a))
        if (p != 2) odd.insert(p);
    for (const auto& [p, e] : factorize(b))
        if (p != 2) odd.insert(p);

    for (long c = 1; c <= search_bound; c += 8) {
        Int C = c;
        if (C == a || C == b || C == ab || C == 1) continue;
        if (!is_squarefree(C)) continue;
        bool residue_ok = true;
        for (const Int& p : odd)
            if (legendre_symbol(C, p) != 1) {
                residue_ok = false;
                break;
            }
        if (!residue_ok) continue;
        BinaryForm f = BinaryForm::from_classes({a, b, ab, C});
        if (analyze_form(f).verdict == HasseReport::Verdict::Counterexample) return f;
    }
    throw search_exhausted("no admissible c at or below " + std::to_string(search_bound));
}

}  // namespace conical
