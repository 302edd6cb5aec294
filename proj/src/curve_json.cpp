#include "conical/curve_json.hpp"

#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "conical/errors.hpp"

namespace conical {

using nlohmann::json;

namespace {

Int parse_int(const json& j) {
    if (!j.is_string()) throw std::invalid_argument("expected a decimal string");
    return Int(j.get<std::string>());
}

Rat parse_rat(const json& j) {
    if (!j.is_string()) throw std::invalid_argument("expected a rational string");
    Rat q(j.get<std::string>());
    q.canonicalize();
    return q;
}

json conic_to_json(const ConicLabel& c) {
    if (c.is_split()) return json("split");
    json j;
    j["a"] = c.a.get_str();
    j["b"] = c.b.get_str();
    return j;
}

ConicLabel conic_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() != "split")
            throw std::invalid_argument("unknown conic label: " + j.get<std::string>());
        return ConicLabel::split();
    }
    return ConicLabel::quaternion(parse_rat(j.at("a")), parse_rat(j.at("b")));
}

json orbit_to_json(const Orbit& o) {
    json j;
    j["orbit"] = o.name;
    j["field"] = field_to_json(o.field);
    j["members"] = o.members;
    return j;
}

Orbit orbit_from_json(const json& j) {
    Orbit o;
    o.name = j.at("orbit").get<std::string>();
    o.field = field_from_json(j.at("field"));
    o.members = j.at("members").get<std::vector<int>>();
    return o;
}

json actions_to_json(const GaloisData& g) {
    json a;
    a["components"] = g.on_components;
    a["points"] = g.on_points;
    a["branches"] = g.on_branches;
    return a;
}

void actions_from_json(const json& a, GaloisData& g) {
    g.on_components = a.at("components").get<std::vector<std::vector<int>>>();
    g.on_points = a.at("points").get<std::vector<std::vector<int>>>();
    g.on_branches = a.at("branches").get<std::vector<std::vector<int>>>();
}

bool same_actions(const GaloisData& a, const GaloisData& b) {
    return a.on_components == b.on_components && a.on_points == b.on_points &&
           a.on_branches == b.on_branches;
}

json group_to_json(const ConicalCurve& C) {
    json j;
    const GaloisGroup& G = C.galois.group;
    if (auto rank = G.elem2_rank()) {
        j["kind"] = "elem2";
        j["rank"] = *rank;
        bool derivable = false;
        try {
            GaloisData derived = galois_from_labels(C);
            derivable = derived.group.order() == G.order() &&
                        same_actions(derived, C.galois);
        } catch (const std::exception&) {
        }
        if (!derivable) j["actions"] = actions_to_json(C.galois);
        return j;
    }
    j["kind"] = "table";
    j["table"] = G.table();
    j["generators"] = G.generators();
    j["actions"] = actions_to_json(C.galois);
    return j;
}

// label -> individual index, for one orbit family
std::map<std::string, int> label_index(const std::vector<Orbit>& family) {
    std::map<std::string, int> out;
    for (const Orbit& o : family)
        for (size_t k = 0; k < o.members.size(); ++k)
            out[o.name + "." + std::to_string(k)] = o.members[k];
    return out;
}

int resolve(const std::map<std::string, int>& idx, const json& label) {
    auto it = idx.find(label.get<std::string>());
    if (it == idx.end())
        throw std::invalid_argument("unknown label: " + label.get<std::string>());
    return it->second;
}

}  // namespace

json field_to_json(const FieldSpec& K) {
    json j;
    switch (K.kind()) {
        case FieldKind::Rational:
            j["kind"] = "rational";
            break;
        case FieldKind::Quadratic:
            j["kind"] = "quadratic";
            j["d"] = K.quad_class().get_str();
            break;
        case FieldKind::Biquadratic: {
            auto [d1, d2] = K.biquad_gens();
            j["kind"] = "biquadratic";
            j["d1"] = d1.get_str();
            j["d2"] = d2.get_str();
            break;
        }
        case FieldKind::Profiled: {
            j["kind"] = "profiled";
            j["name"] = K.name();
            j["degree"] = K.degree();
            j["ramified"] = K.ramified_primes();
            json table = json::object();
            for (const auto& [v, degs] : K.profile_table()) table[v.str()] = degs;
            j["table"] = table;
            if (!K.defining_poly().empty()) {
                json poly = json::array();
                for (const Int& c : K.defining_poly()) poly.push_back(c.get_str());
                j["poly"] = poly;
            }
            if (K.tensor_of())
                j["tensor_of"] = json::array({field_to_json(K.tensor_of()->first),
                                              field_to_json(K.tensor_of()->second)});
            break;
        }
    }
    return j;
}

FieldSpec field_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "rational") return FieldSpec::rational();
    if (kind == "quadratic") return FieldSpec::quadratic(parse_int(j.at("d")));
    if (kind == "biquadratic")
        return FieldSpec::biquadratic(parse_int(j.at("d1")), parse_int(j.at("d2")));
    if (kind != "profiled") throw std::invalid_argument("unknown field kind: " + kind);

    std::map<Place, std::vector<int>> table;
    for (const auto& [key, degs] : j.at("table").items())
        table[Place::parse(key)] = degs.get<std::vector<int>>();

    if (j.contains("tensor_of")) {
        // rebuilt through the tensor constructor so the place enumeration
        // of the parsed field matches the one that was serialized
        FieldSpec left = field_from_json(j.at("tensor_of").at(0));
        FieldSpec right = field_from_json(j.at("tensor_of").at(1));
        std::vector<Place> places;
        for (const auto& [v, degs] : table) places.push_back(v);
        FieldSpec out = tensor_field_spec(left, right, places, j.at("name").get<std::string>());
        if (out.degree() != j.at("degree").get<int>())
            throw std::invalid_argument("tensor field degree does not match its factors");
        if (out.profile_table() != table)
            throw std::invalid_argument("tensor field table does not match its factors");
        return out;
    }

    Poly defining;
    if (j.contains("poly"))
        for (const auto& c : j.at("poly")) defining.push_back(parse_int(c));
    return FieldSpec::profiled(j.at("name").get<std::string>(), j.at("degree").get<int>(),
                               std::move(table), j.at("ramified").get<std::vector<long>>(),
                               std::move(defining));
}

json curve_to_json(const ConicalCurve& C) {
    json j;
    json comps = json::array();
    for (size_t i = 0; i < C.components.size(); ++i) {
        json e = orbit_to_json(C.components[i]);
        e["conic"] = conic_to_json(C.conics[i]);
        comps.push_back(std::move(e));
    }
    j["components"] = std::move(comps);

    json pts = json::array();
    for (const Orbit& o : C.points) pts.push_back(orbit_to_json(o));
    j["sing_points"] = std::move(pts);

    json brs = json::array();
    for (const Orbit& o : C.branches) {
        json e = orbit_to_json(o);
        json src = json::array(), dst = json::array();
        for (int b : o.members) {
            src.push_back(C.component_label(C.src.at(b)));
            dst.push_back(C.point_label(C.dst.at(b)));
        }
        e["src"] = std::move(src);
        e["dst"] = std::move(dst);
        brs.push_back(std::move(e));
    }
    j["branches"] = std::move(brs);

    j["group"] = group_to_json(C);
    return j;
}

ConicalCurve curve_from_json(const json& j) {
    ConicalCurve C;
    for (const auto& e : j.at("components")) {
        C.components.push_back(orbit_from_json(e));
        C.conics.push_back(conic_from_json(e.at("conic")));
    }
    for (const auto& e : j.at("sing_points")) C.points.push_back(orbit_from_json(e));

    auto comp_idx = label_index(C.components);
    auto point_idx = label_index(C.points);

    int total = 0;
    for (const auto& e : j.at("branches"))
        total += (int)e.at("members").size();
    C.src.assign(total, -1);
    C.dst.assign(total, -1);
    for (const auto& e : j.at("branches")) {
        Orbit o = orbit_from_json(e);
        const json& src = e.at("src");
        const json& dst = e.at("dst");
        if ((int)src.size() != (int)o.members.size() || (int)dst.size() != (int)o.members.size())
            throw std::invalid_argument("branch orbit " + o.name +
                                        ": src/dst length differs from the member count");
        for (size_t k = 0; k < o.members.size(); ++k) {
            int b = o.members[k];
            if (b < 0 || b >= total)
                throw std::invalid_argument("branch index out of range in orbit " + o.name);
            C.src[b] = resolve(comp_idx, src.at(k));
            C.dst[b] = resolve(point_idx, dst.at(k));
        }
        C.branches.push_back(std::move(o));
    }

    const json& gj = j.at("group");
    const std::string gkind = gj.at("kind").get<std::string>();
    if (gkind == "elem2") {
        GaloisGroup G = GaloisGroup::elem2(gj.at("rank").get<int>());
        if (gj.contains("actions")) {
            C.galois.group = std::move(G);
            actions_from_json(gj.at("actions"), C.galois);
        } else {
            C.galois = galois_from_labels(C);
            if (C.galois.group.order() != G.order())
                throw std::invalid_argument("declared rank does not match the field labels");
        }
    } else if (gkind == "table") {
        C.galois.group =
            GaloisGroup::from_table(gj.at("table").get<std::vector<std::vector<int>>>(),
                                    gj.at("generators").get<std::vector<int>>());
        actions_from_json(gj.at("actions"), C.galois);
    } else {
        throw std::invalid_argument("unknown group kind: " + gkind);
    }
    return C;
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

std::string curve_to_dot(const ConicalCurve& C) {
    std::ostringstream os;
    os << "graph curve {\n";
    os << "  graph [rankdir=LR];\n";
    os << "  node [fontname=\"Helvetica\"];\n";
    for (size_t oi = 0; oi < C.components.size(); ++oi) {
        const Orbit& o = C.components[oi];
        for (size_t k = 0; k < o.members.size(); ++k) {
            std::string lbl = o.name + "." + std::to_string(k);
            os << "  \"" << lbl << "\" [shape=box, label=\"" << lbl << "\\n"
               << o.field.str();
            if (!C.conics[oi].is_split())
                os << "\\nconic (" << C.conics[oi].a.get_str() << ","
                   << C.conics[oi].b.get_str() << ")";
            os << "\"];\n";
        }
    }
    for (const Orbit& o : C.points)
        for (size_t k = 0; k < o.members.size(); ++k) {
            std::string lbl = o.name + "." + std::to_string(k);
            os << "  \"" << lbl << "\" [shape=ellipse, label=\"" << lbl << "\\n"
               << o.field.str() << "\"];\n";
        }
    for (const Orbit& o : C.branches)
        for (size_t k = 0; k < o.members.size(); ++k) {
            int b = o.members[k];
            os << "  \"" << C.component_label(C.src.at(b)) << "\" -- \""
               << C.point_label(C.dst.at(b)) << "\" [label=\"" << o.name << "." << k
               << "\"];\n";
        }
    os << "}\n";
    return os.str();
}

}  // namespace conical
