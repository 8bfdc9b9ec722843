#pragma once

#include "intersection.hpp"
#include "problem.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <iterator>

namespace fta::cli {

using json = nlohmann::ordered_json;

enum Exit : int { ok = 0, negative = 1, parse_error = 2, budget_exhausted = 3, failure = 4 };

// Integers that fit in 64 bits become JSON numbers, larger ones decimal strings.
inline json to_json(const Int& x) {
    if (x >= Int(std::numeric_limits<long long>::min()) && x <= Int(std::numeric_limits<long long>::max()))
        return static_cast<long long>(x);
    return x.str();
}

inline json to_json(const Vec& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(to_json(x));
    return a;
}

inline json to_json(const Matrix& m) {
    json a = json::array();
    for (const auto& r : m.row_list()) a.push_back(to_json(r));
    return a;
}

inline json to_json(const Index& i) { return i.finite() ? to_json(i.value()) : json("inf"); }

inline json to_json(const AbelianSpec& s) {
    json t = json::array();
    for (const auto& d : s.torsion) t.push_back(to_json(d));
    return json{{"m_free", s.m_free}, {"torsion", t}};
}

inline json elements_json(const std::vector<GroupElement>& xs) {
    json a = json::array();
    for (const auto& x : xs) a.push_back(format_element(x));
    return a;
}

inline json abelian_json(const AbelianSubgroup& l) {
    json gens = json::array();
    for (const auto& [v, order] : l.invariant_generators())
        gens.push_back(json{{"generator", to_json(v)}, {"order", order == 0 ? json("inf") : to_json(order)}});
    return json{{"lattice", to_json(l.lattice_basis())}, {"generators", gens}};
}

inline json basis_json(const SubgroupBasis& b) {
    return json{{"free_part", elements_json(b.free_part)}, {"abelian_part", abelian_json(b.abelian_part)},
                {"rank", b.rank()}};
}

inline json report_json(const IntersectionReport& r) {
    json words = json::array();
    for (const auto& w : r.petal_words) words.push_back(format_word(w));
    return json{{"r", r.r},
                {"s", r.s},
                {"deltas", to_json(r.deltas)},
                {"petal_words", words},
                {"A1", to_json(r.a1)},
                {"A2", to_json(r.a2)},
                {"B1", to_json(r.b1)},
                {"B2", to_json(r.b2)},
                {"D", to_json(r.d)},
                {"M", to_json(r.m)},
                {"P", to_json(r.p)},
                {"Q", to_json(r.q)},
                {"S", to_json(r.smith)},
                {"verdict", to_string(r.verdict)},
                {"trivial_projection", r.trivial_projection},
                {"free_rank", to_json(r.free_rank)},
                {"rank", to_json(r.rank)},
                {"abelian_part", abelian_json(r.base_intersection)}};
}

// "x2,x2^-1,x1,x1^-1"
inline LetterOrder parse_order(const std::string& text, std::size_t n) {
    std::vector<Letter> letters;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        auto w = parse_word(std::string_view(text).substr(start, comma - start), n);
        if (w.size() != 1) throw WordParseError("each order entry must be a single signed letter", start + 1);
        letters.push_back(w[0]);
        start = comma + 1;
    }
    return LetterOrder(letters);
}

struct Options {
    std::string command;
    std::string problem_path;
    std::vector<std::string> names;
    std::string element;
    std::string order;
    std::string tree = "order";
    bool json_out = false;
    bool dot_out = false;
    bool strict = false;
    std::size_t limit = 10;
    std::size_t max_radius = 8;
};

class Runner {
public:
    Runner(Options opt, std::ostream& out, std::ostream& err) : opt_(std::move(opt)), out_(out), err_(err) {}

    int run() {
        std::string text;
        if (opt_.problem_path == "-") {
            text.assign(std::istreambuf_iterator<char>(std::cin), {});
        } else {
            std::ifstream in(opt_.problem_path, std::ios::binary);
            if (!in) {
                err_ << "error: cannot read " << opt_.problem_path << "\n";
                return parse_error;
            }
            text.assign(std::istreambuf_iterator<char>(in), {});
        }
        try {
            pf_ = parse_problem(text);
        } catch (const ParseError& e) {
            err_ << opt_.problem_path << ": " << e.what() << "\n";
            return parse_error;
        }
        try {
            if (!opt_.order.empty()) policy_.order = parse_order(opt_.order, pf_.group.n);
        } catch (const std::exception& e) {
            err_ << "error: --order: " << e.what() << "\n";
            return parse_error;
        }
        policy_.rule = opt_.tree == "first-seen" ? TreeRule::first_seen : TreeRule::order;

        const auto& c = opt_.command;
        if (c == "basis") return basis_cmd();
        if (c == "member") return member_cmd();
        if (c == "intersect") return intersect_cmd();
        if (c == "index") return index_cmd();
        if (c == "transversal") return transversal_cmd();
        if (c == "cayley") return cayley_cmd();
        if (c == "dot") return dot_cmd();
        err_ << "error: unknown command " << c << "\n";
        return parse_error;
    }

private:
    std::optional<EnrichedAutomaton> load(const std::string& name) {
        const auto* sg = pf_.find(name);
        if (!sg) {
            err_ << "error: no subgroup named " << name << "\n";
            return std::nullopt;
        }
        return stallings(pf_.group, sg->generators, policy_);
    }

    json header() const {
        json names = json::array();
        for (const auto& n : opt_.names) names.push_back(n);
        return json{{"schema", 1}, {"command", opt_.command}, {"group", format_group(pf_.group)},
                    {"abelian_spec", to_json(pf_.group.spec)}, {"subgroups", names}};
    }

    void emit(const json& j) { out_ << j.dump(2) << "\n"; }

    int basis_cmd() {
        auto e = load(opt_.names.at(0));
        if (!e) return parse_error;
        json j = header();
        j.update(basis_json(basis(*e, tree_of(*e, policy_))));
        emit(j);
        return ok;
    }

    int member_cmd() {
        auto e = load(opt_.names.at(0));
        if (!e) return parse_error;
        GroupElement g;
        try {
            g = parse_element(opt_.element, pf_.group);
        } catch (const std::exception& ex) {
            err_ << "error: element: " << ex.what() << "\n";
            return parse_error;
        }
        bool in = member(*e, g);
        if (opt_.json_out) {
            json j = header();
            j["element"] = format_element(g);
            j["member"] = in;
            emit(j);
        } else {
            out_ << (in ? "true" : "false") << "\n";
        }
        return in ? ok : negative;
    }

    int intersect_cmd() {
        auto e1 = load(opt_.names.at(0)), e2 = load(opt_.names.at(1));
        if (!e1 || !e2) return parse_error;
        IntersectionProblem prob(*e1, *e2, policy_);
        const auto& rep = prob.report();
        json j = header();
        j.update(report_json(rep));
        bool truncated = false;
        std::string dot;
        if (rep.verdict == Verdict::finitely_generated) {
            auto x = intersect_fg(prob);
            j["basis"] = elements_json(basis(x, tree_of(x, policy_)).free_part);
            j["truncated"] = false;
            dot = to_dot(x, "intersection");
        } else {
            IntersectionStream stream(prob);
            auto step = stream.at_radius(opt_.max_radius);
            truncated = !step.complete;
            j["basis_prefix"] = elements_json(step.basis);
            j["radius"] = opt_.max_radius;
            j["truncated"] = truncated;
            dot = to_dot(step.automaton, "partial_intersection");
        }
        if (opt_.dot_out)
            out_ << dot;
        else
            emit(j);
        return truncated && opt_.strict ? budget_exhausted : ok;
    }

    int index_cmd() {
        auto e = load(opt_.names.at(0));
        if (!e) return parse_error;
        auto r = index_report(*e);
        json j = header();
        j["free_index"] = to_json(r.free_index);
        j["abelian_index"] = to_json(r.abelian_index);
        j["total"] = to_json(r.total);
        emit(j);
        return ok;
    }

    int transversal_cmd() {
        auto e = load(opt_.names.at(0));
        if (!e) return parse_error;
        auto reps = transversal_stream(*e, opt_.limit, policy_.order_for(pf_.group.n));
        auto total = index_report(*e).total;
        bool truncated = !total.finite() || total.value() > Int(reps.size());
        if (opt_.json_out) {
            json j = header();
            j["limit"] = opt_.limit;
            j["transversal"] = elements_json(reps);
            j["truncated"] = truncated;
            emit(j);
        } else {
            for (const auto& g : reps) out_ << format_element(g) << "\n";
        }
        return truncated && opt_.strict ? budget_exhausted : ok;
    }

    int cayley_cmd() {
        auto e1 = load(opt_.names.at(0)), e2 = load(opt_.names.at(1));
        if (!e1 || !e2) return parse_error;
        IntersectionProblem prob(*e1, *e2, policy_);
        const auto& rep = prob.report();
        bool infinite = std::any_of(rep.deltas.begin(), rep.deltas.end(), [](const Int& d) { return d == 0; });
        auto g = cayley_for(rep, infinite ? std::optional<std::size_t>(opt_.max_radius) : std::nullopt);
        std::ostringstream os;
        os << "digraph cayley {\n  rankdir=LR;\n  node [shape=circle];\n";
        for (std::size_t v = 0; v < g.elements.size(); ++v)
            os << "  " << v << " [label=\"" << to_string(g.elements[v]) << "\"" << (v == 0 ? ", shape=doublecircle" : "")
               << "];\n";
        for (const auto& a : g.automaton.arcs())
            os << "  " << a.from << " -> " << a.to << " [label=\"w" << a.gen + 1 << "\"];\n";
        os << "}\n";
        out_ << os.str();
        return !g.complete && opt_.strict ? budget_exhausted : ok;
    }

    int dot_cmd() {
        auto e = load(opt_.names.at(0));
        if (!e) return parse_error;
        out_ << to_dot(*e, opt_.names.at(0));
        return ok;
    }

    Options opt_;
    std::ostream& out_;
    std::ostream& err_;
    ProblemFile pf_;
    TreePolicy policy_;
};

// Entry point shared by the executable and the tests. args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Subgroups of free-times-abelian groups via enriched Stallings automata", "fta"};
    app.require_subcommand(1);
    Options opt;
    std::string first, second;
    auto add_common = [&](CLI::App* sc) {
        sc->add_option("problem", opt.problem_path, "problem file ('-' for stdin)")->required();
        sc->add_option("--order", opt.order, "letter order, e.g. x2,x2^-1,x1,x1^-1");
        sc->add_option("--tree", opt.tree, "spanning tree rule")->check(CLI::IsMember({"order", "first-seen"}));
        sc->add_flag("--json", opt.json_out, "JSON output where text is the default");
        sc->add_flag("--dot", opt.dot_out, "DOT output of the resulting automaton");
        sc->add_flag("--strict", opt.strict, "exit 3 when a budget truncates the output");
        sc->add_option("--limit", opt.limit, "number of elements to emit");
        sc->add_option("--max-radius", opt.max_radius, "ball radius for infinite Cayley graphs");
    };
    struct Spec {
        const char* name;
        const char* help;
        int subgroups;
        bool element;
    };
    const Spec specs[] = {
        {"basis", "basis of a subgroup (JSON)", 1, false},
        {"member", "membership test; exit 0 if member, 1 otherwise", 1, true},
        {"intersect", "intersection report and basis (JSON)", 2, false},
        {"index", "free, abelian and total index (JSON)", 1, false},
        {"transversal", "right transversal, graded", 1, false},
        {"cayley", "Cayley multidigraph of the projected intersection (DOT)", 2, false},
        {"dot", "Stallings automaton (DOT)", 1, false},
    };
    for (const auto& s : specs) {
        auto* sc = app.add_subcommand(s.name, s.help);
        add_common(sc);
        // One scalar positional per name; a vector positional would swallow the element argument.
        sc->add_option("H1", first, "subgroup name")->required();
        if (s.subgroups == 2) sc->add_option("H2", second, "second subgroup name")->required();
        if (s.element) sc->add_option("g", opt.element, "group element")->required();
        sc->callback([&opt, name = std::string(s.name)] { opt.command = name; });
    }
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return parse_error;
    }
    opt.names = {first};
    if (!second.empty()) opt.names.push_back(second);
    try {
        return Runner(opt, out, err).run();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return failure;
    }
}

}  // namespace fta::cli
