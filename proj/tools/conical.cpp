#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "conical/builders.hpp"
#include "conical/curve_json.hpp"
#include "conical/errors.hpp"
#include "conical/forms.hpp"
#include "conical/hasse.hpp"

using nlohmann::json;
using namespace conical;

namespace {

Int int_from_json(const json& j) {
    if (j.is_string()) return Int(j.get<std::string>());
    if (j.is_number_integer()) return Int((long)j.get<long long>());
    throw std::invalid_argument("expected an integer or a decimal string");
}

BinaryForm form_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("form input must be a JSON object");
    if (j.contains("classes")) {
        std::vector<Int> ds;
        for (const json& e : j.at("classes")) ds.push_back(int_from_json(e));
        return BinaryForm::from_classes(ds);
    }
    std::vector<FormFactor> fs;
    for (const json& e : j.at("factors")) {
        std::string kind = e.at("kind").get<std::string>();
        if (kind == "linear") {
            const json& r = e.at("root");
            fs.push_back(FormFactor::linear(int_from_json(r.at(0)), int_from_json(r.at(1))));
        } else if (kind == "quadratic") {
            fs.push_back(FormFactor::quadratic(int_from_json(e.at("d"))));
        } else {
            throw std::invalid_argument("unknown factor kind \"" + kind + "\"");
        }
    }
    return BinaryForm(std::move(fs));
}

json form_to_json(const BinaryForm& f) {
    json fsj = json::array();
    for (const FormFactor& fac : f.factors()) {
        if (fac.kind == FormFactor::Kind::Linear)
            fsj.push_back({{"kind", "linear"}, {"root", {fac.p.get_str(), fac.q.get_str()}}});
        else
            fsj.push_back({{"kind", "quadratic"}, {"d", fac.d.get_str()}});
    }
    json j;
    j["degree"] = f.degree();
    j["factors"] = std::move(fsj);
    j["text"] = f.str();
    return j;
}

json certificate_to_json(const SolubilityCertificate& c) {
    json j;
    j["everywhere_soluble"] = c.everywhere_soluble;
    if (c.witness) j["witness"] = c.witness->str();
    json cs = json::array();
    for (const DirectCheck& d : c.checks)
        cs.push_back({{"place", d.v.str()}, {"soluble", d.soluble}});
    j["checks"] = std::move(cs);
    j["rank_argument"] = c.used_rank_argument;
    j["summary"] = c.summary;
    return j;
}

json form_report_to_json(const BinaryForm& f, const HasseReport& r) {
    json j;
    j["form"] = form_to_json(f);
    j["verdict"] = r.verdict_str();
    j["globally_soluble"] = r.globally_soluble;
    if (r.rational_root)
        j["rational_root"] = {r.rational_root->first.get_str(), r.rational_root->second.get_str()};
    j["locally_soluble_everywhere"] = r.locally_soluble_everywhere;
    j["certificate"] = certificate_to_json(r.certificate);
    return j;
}

json validation_to_json(const ValidationReport& vr) {
    json j;
    j["valid"] = vr.valid;
    json is = json::array();
    for (const ValidationIssue& i : vr.issues)
        is.push_back({{"where", i.where}, {"what", i.what}});
    j["issues"] = std::move(is);
    return j;
}

json read_input(const std::string& path) {
    if (path.empty() || path == "-") return json::parse(std::cin);
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open input file " + path);
    return json::parse(in);
}

int emit(const json& j, int code) {
    std::cout << json_text(j);
    return code;
}

int emit_error(const std::string& type, const std::string& message) {
    json j;
    j["error"] = {{"type", type}, {"message", message}};
    return emit(j, 2);
}

// the demonstration form and the fields of the demonstration arrangement
BinaryForm demo_form() { return BinaryForm::from_classes({Int(2), Int(17), Int(34)}); }

FieldSpec demo_cubic() {
    return FieldSpec::profiled("F", 3,
                               {{Place::real(), {1, 2}}, {Place::finite(23), {1, 2}}}, {23},
                               Poly{Int(-1), Int(-1), Int(0), Int(1)});
}

std::vector<Place> parse_places(const std::string& s) {
    std::vector<Place> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(Place::parse(tok));
    }
    if (out.empty()) throw std::invalid_argument("empty place list");
    return out;
}

std::vector<long> parse_primes(const std::string& s) {
    std::vector<long> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stol(tok));
    }
    return out;
}

struct WindowChoice {
    long n = 0;     // 0 = not given
    long smax = 0;  // 0 = not given
    std::string extra;

    TruncationWindow resolve() const {
        long rn = n, rs = smax;
        if (rn == 0 || rs == 0) {
            if (const char* env = std::getenv("CONICAL_WINDOW")) {
                long en = 0, es = 0;
                if (std::sscanf(env, "%ld:%ld", &en, &es) != 2 || en < 2 || es < 2)
                    throw std::invalid_argument(
                        "CONICAL_WINDOW must look like \"n:places_max\", e.g. \"2:50\"");
                if (rn == 0) rn = en;
                if (rs == 0) rs = es;
            }
        }
        if (rn == 0) rn = 2;
        if (rs == 0) rs = 50;
        return make_window(rn, rs, parse_primes(extra));
    }
};

void add_window_flags(CLI::App* cmd, WindowChoice& w) {
    cmd->add_option("--window-n,--n", w.n, "order bound of the truncation window");
    cmd->add_option("--places-max,--smax", w.smax,
                    "include the real place and all primes up to this bound");
    cmd->add_option("--extra-primes", w.extra,
                    "comma-separated primes to add to the window");
}

int run_check_form(const std::string& input) {
    BinaryForm f = form_from_json(read_input(input));
    HasseReport r = analyze_form(f);
    return emit(form_report_to_json(f, r), r.verdict == HasseReport::Verdict::Soluble ? 0 : 1);
}

int run_construct_form(const std::string& a, const std::string& b, long bound) {
    BinaryForm f = construct_form(Int(a), Int(b), bound);
    HasseReport r = analyze_form(f);
    json j = form_report_to_json(f, r);
    return emit(j, r.verdict == HasseReport::Verdict::Soluble ? 0 : 1);
}

int run_curve_validate(const std::string& input) {
    ConicalCurve C = curve_from_json(read_input(input));
    ValidationReport vr = validate_curve(C);
    return emit(validation_to_json(vr), vr.valid ? 0 : 1);
}

int run_curve_graph(const std::string& input, const std::string& out_mode) {
    ConicalCurve C = curve_from_json(read_input(input));
    ValidationReport vr = validate_curve(C);
    if (!vr.valid) return emit(validation_to_json(vr), 1);
    if (out_mode == "dot") {
        std::cout << curve_to_dot(C);
        return 0;
    }
    GraphInvariants g = graph_invariants(C);
    json j;
    j["connected"] = g.connected;
    j["bipartite_ok"] = g.bipartite_ok;
    j["is_tree"] = g.is_tree;
    j["h1_rank"] = g.h1_rank;
    return emit(j, 0);
}

int run_curve_brauer(const std::string& input, const WindowChoice& w, const std::string& path) {
    ConicalCurve C = curve_from_json(read_input(input));
    QuotientPath qp = QuotientPath::General;
    if (path == "eliminated")
        qp = QuotientPath::EliminatedPoints;
    else if (path != "general")
        throw std::invalid_argument("--path must be general or eliminated");
    BrauerQuotient Q = curve_brauer_quotient(C, w.resolve(), qp);
    return emit(Q.report(), Q.dimension == 0 ? 0 : 1);
}

int run_curve_hasse(const std::string& input, const WindowChoice& w, long scan_bound) {
    ConicalCurve C = curve_from_json(read_input(input));
    CounterexampleReport r = counterexample_report(C, w.resolve(), scan_bound);
    json j = r.to_json();
    if (graph_invariants(C).is_tree) j["tree"] = verify_tree_hasse(C).to_json();
    return emit(j, r.classification == CurveClassification::HasRationalPoints ? 0 : 1);
}

int run_demo_e1() {
    BinaryForm f = demo_form();
    HasseReport r = analyze_form(f);
    if (r.verdict != HasseReport::Verdict::Counterexample || !r.locally_soluble_everywhere)
        return emit_error("self_check",
                          "the demonstration form no longer analyzes as a counterexample");
    json j = form_report_to_json(f, r);
    j["demo"] = "e1";
    return emit(j, 1);
}

int run_demo_cf(const std::string& places, int precision) {
    BinaryForm f = demo_form();
    ConicalCurve C = build_Cf(f);
    TreeHasseReport t = verify_tree_hasse(C);
    if (!t.verified || !t.witness || t.witness->orbit != "P")
        return emit_error("self_check",
                          "the cone curve no longer verifies through its apex");
    json j;
    j["demo"] = "Cf";
    j["tree"] = t.to_json();
    j["precision"] = precision;
    j["samples"] = sample_adelic_point(f, parse_places(places), precision);
    return emit(j, 0);
}

int run_demo_d(const WindowChoice& w, long scan_bound) {
    ConicalCurve C = build_D(demo_form(), FieldSpec::quadratic(5), demo_cubic());
    CounterexampleReport r = counterexample_report(C, w.resolve(), scan_bound);
    if (r.classification != CurveClassification::CounterexampleTrivialBrauer)
        return emit_error("self_check",
                          "the arrangement no longer classifies as a counterexample with "
                          "trivial truncated quotient; got " + r.classification_str());
    json j = r.to_json();
    j["demo"] = "D";
    return emit(j, 1);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"arithmetic of conical curves over Q"};
    app.require_subcommand(1);

    std::string input = "-";
    std::string out_mode = "json";
    std::string ca, cb;
    long bound = 1000000;
    long scan_bound = 1000;
    std::string demo_name;
    std::string places = "real,2,17";
    int precision = 5;
    WindowChoice wbrauer, whasse, wdemo;
    std::string path = "general";

    CLI::App* cf = app.add_subcommand("check-form",
                                      "decide the local-global verdict of a binary form");
    cf->add_option("input", input, "form JSON file, - for standard input");

    CLI::App* cons = app.add_subcommand(
        "construct-form", "build a locally soluble form with no rational zero from a, b");
    cons->add_option("--a", ca, "first squarefree class")->required();
    cons->add_option("--b", cb, "second squarefree class")->required();
    cons->add_option("--bound", bound, "search bound for the covering class");

    CLI::App* cv = app.add_subcommand("curve-validate", "validate a curve model");
    cv->add_option("input", input, "curve JSON file, - for standard input");

    CLI::App* cg = app.add_subcommand("curve-graph",
                                      "incidence graph invariants or a DOT rendering");
    cg->add_option("input", input, "curve JSON file, - for standard input");
    cg->add_option("--out", out_mode, "output format: json or dot")
        ->check(CLI::IsMember({"json", "dot"}));

    CLI::App* cbr = app.add_subcommand("curve-brauer",
                                       "truncated vertical Brauer quotient of a curve");
    cbr->add_option("input", input, "curve JSON file, - for standard input");
    add_window_flags(cbr, wbrauer);
    cbr->add_option("--path", path, "layout: general or eliminated");

    CLI::App* ch = app.add_subcommand("curve-hasse",
                                      "rational points, adelic points, and classification");
    ch->add_option("input", input, "curve JSON file, - for standard input");
    add_window_flags(ch, whasse);
    ch->add_option("--scan-bound", scan_bound, "prime bound for the candidate scan");

    CLI::App* pd = app.add_subcommand("paper-demo", "run a bundled demonstration");
    pd->add_option("name", demo_name, "one of e1, Cf, D")->required();
    add_window_flags(pd, wdemo);
    pd->add_option("--places", places, "comma-separated places to sample (Cf)");
    pd->add_option("--precision", precision, "p-adic precision for samples (Cf)");
    pd->add_option("--scan-bound", scan_bound, "prime bound for the candidate scan (D)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(cf)) return run_check_form(input);
        if (app.got_subcommand(cons)) return run_construct_form(ca, cb, bound);
        if (app.got_subcommand(cv)) return run_curve_validate(input);
        if (app.got_subcommand(cg)) return run_curve_graph(input, out_mode);
        if (app.got_subcommand(cbr)) return run_curve_brauer(input, wbrauer, path);
        if (app.got_subcommand(ch)) return run_curve_hasse(input, whasse, scan_bound);
        if (app.got_subcommand(pd)) {
            if (demo_name == "e1") return run_demo_e1();
            if (demo_name == "Cf") return run_demo_cf(places, precision);
            if (demo_name == "D") return run_demo_d(wdemo, scan_bound);
            throw std::invalid_argument("unknown demo \"" + demo_name +
                                        "\"; expected e1, Cf, or D");
        }
    } catch (const insufficient_profile& e) {
        return emit_error("insufficient_profile", e.what());
    } catch (const unsupported_operation& e) {
        return emit_error("unsupported_operation", e.what());
    } catch (const model_error& e) {
        return emit_error("model_error", e.what());
    } catch (const search_exhausted& e) {
        return emit_error("search_exhausted", e.what());
    } catch (const json::exception& e) {
        return emit_error("parse_error", e.what());
    } catch (const std::invalid_argument& e) {
        return emit_error("invalid_input", e.what());
    } catch (const std::exception& e) {
        return emit_error("internal", e.what());
    }
    return emit_error("internal", "no subcommand dispatched");
}
