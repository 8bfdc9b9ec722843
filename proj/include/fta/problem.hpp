#pragma once

#include "enriched.hpp"

namespace fta {

// Problem files:
//
//   problem   := { line }
//   line      := comment | group | subgroup | blank
//   comment   := '#' anything
//   group     := 'group' 'F' N { 'x' factor }        (exactly one, before any subgroup)
//   factor    := 'Z' [ '^' K ] | 'Z/' D               (free factors before torsion factors)
//   subgroup  := NAME ':' [ element { ',' element } ]
//   element   := { 'x' I [ '^' E ] | 't^(' a1 ',' ... ')' | '1' }
struct NamedSubgroup {
    std::string name;
    std::vector<GroupElement> generators;
    friend bool operator==(const NamedSubgroup&, const NamedSubgroup&) = default;
};

struct ProblemFile {
    AmbientGroup group;
    std::vector<NamedSubgroup> subgroups;

    const NamedSubgroup* find(const std::string& name) const {
        for (const auto& s : subgroups)
            if (s.name == name) return &s;
        return nullptr;
    }
    friend bool operator==(const ProblemFile&, const ProblemFile&) = default;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
          line_(line),
          column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_, column_;
};

namespace detail {

inline AmbientGroup parse_group_line(std::string_view body, std::size_t line, std::size_t col0) {
    Cursor c{body, 0, col0};
    auto fail = [&](const std::string& msg) { throw ParseError(line, c.column(), msg); };
    c.skip_ws();
    if (c.peek() != 'F') fail("expected F<n>");
    ++c.pos;
    std::size_t n = 0;
    try {
        n = std::stoul(c.integer(false));
    } catch (const WordParseError&) {
        fail("expected the free rank after F");
    }
    std::size_t free_rank = 0;
    std::vector<Int> torsion;
    while (!c.done()) {
        if (c.peek() != 'x') fail("expected 'x' between factors");
        ++c.pos;
        c.skip_ws();
        if (c.peek() != 'Z') fail("expected a factor Z, Z^k or Z/d");
        std::size_t factor_at = c.column();
        ++c.pos;
        if (c.peek() == '/') {
            ++c.pos;
            std::size_t at = c.column();
            Int d;
            try {
                d = Int(c.integer(false));
            } catch (const WordParseError&) {
                fail("expected a torsion coefficient");
            }
            if (d < 2) throw ParseError(line, at, "torsion coefficient must be at least 2");
            if (!torsion.empty() && d % torsion.back() != 0)
                throw ParseError(line, at, "torsion coefficients must divide each other in order");
            torsion.push_back(d);
        } else {
            if (!torsion.empty()) throw ParseError(line, factor_at, "free factors must precede torsion factors");
            std::size_t k = 1;
            if (c.peek() == '^') {
                ++c.pos;
                try {
                    k = std::stoul(c.integer(false));
                } catch (const WordParseError&) {
                    fail("expected an exponent after Z^");
                }
            }
            free_rank += k;
        }
    }
    return {n, AbelianSpec(free_rank, torsion)};
}

inline std::vector<std::pair<std::string_view, std::size_t>> split_commas(std::string_view s) {
    std::vector<std::pair<std::string_view, std::size_t>> parts;
    std::size_t depth = 0, start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || (s[i] == ',' && depth == 0)) {
            parts.emplace_back(s.substr(start, i - start), start);
            start = i + 1;
        } else if (s[i] == '(') {
            ++depth;
        } else if (s[i] == ')' && depth > 0) {
            --depth;
        }
    }
    return parts;
}

inline bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); });
}

}  // namespace detail

inline ProblemFile parse_problem(std::string_view text) {
    ProblemFile pf;
    bool have_group = false;
    std::size_t line_no = 0, pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        ++line_no;
        pos = end + 1;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (detail::blank(line)) {
            if (end == text.size()) break;
            continue;
        }
        std::size_t first = 0;
        while (std::isspace(static_cast<unsigned char>(line[first]))) ++first;
        if (line.substr(first, 5) == "group" &&
            (first + 5 == line.size() || std::isspace(static_cast<unsigned char>(line[first + 5])))) {
            if (have_group) throw ParseError(line_no, first + 1, "duplicate group declaration");
            pf.group = detail::parse_group_line(line.substr(first + 5), line_no, first + 6);
            have_group = true;
        } else {
            auto colon = line.find(':');
            if (colon == std::string_view::npos) throw ParseError(line_no, first + 1, "expected 'NAME: elements'");
            if (!have_group) throw ParseError(line_no, first + 1, "subgroup declared before the group line");
            std::string name(line.substr(first, colon - first));
            while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
            bool ok = !name.empty() && std::all_of(name.begin(), name.end(), [](char ch) {
                return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-';
            });
            if (!ok) throw ParseError(line_no, first + 1, "invalid subgroup name");
            if (pf.find(name)) throw ParseError(line_no, first + 1, "duplicate subgroup name " + name);
            NamedSubgroup sg{name, {}};
            std::string_view rest = line.substr(colon + 1);
            if (!detail::blank(rest)) {
                for (auto [part, off] : detail::split_commas(rest)) {
                    std::size_t col = colon + 2 + off;
                    if (detail::blank(part)) throw ParseError(line_no, col, "empty element");
                    try {
                        sg.generators.push_back(parse_element(part, pf.group, col));
                    } catch (const WordParseError& e) {
                        throw ParseError(line_no, e.column(), e.what());
                    } catch (const std::out_of_range& e) {
                        throw ParseError(line_no, col, e.what());
                    }
                }
            }
            pf.subgroups.push_back(std::move(sg));
        }
        if (end == text.size()) break;
    }
    if (!have_group) throw ParseError(line_no == 0 ? 1 : line_no, 1, "missing group declaration");
    return pf;
}

inline std::string format_group(const AmbientGroup& g) {
    std::string s = "group F" + std::to_string(g.n);
    if (g.spec.m_free == 1) s += " x Z";
    if (g.spec.m_free > 1) s += " x Z^" + std::to_string(g.spec.m_free);
    for (const auto& d : g.spec.torsion) s += " x Z/" + d.str();
    return s;
}

inline std::string format_problem(const ProblemFile& pf) {
    std::string s = format_group(pf.group) + "\n";
    for (const auto& sg : pf.subgroups) {
        s += sg.name + ":";
        for (std::size_t i = 0; i < sg.generators.size(); ++i)
            s += (i ? ", " : " ") + format_element(sg.generators[i]);
        s += "\n";
    }
    return s;
}

}  // namespace fta
