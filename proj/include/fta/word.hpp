#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fta {

// A signed letter x_{gen+1}^{±1}, encoded as 2*gen + (inverse ? 1 : 0).
// The code is also the "direction" of a half-edge in an automaton.
class Letter {
public:
    constexpr Letter() = default;
    constexpr Letter(std::size_t gen, bool inverse) : code_(2 * gen + (inverse ? 1 : 0)) {}
    static constexpr Letter from_code(std::size_t code) {
        Letter l;
        l.code_ = code;
        return l;
    }

    constexpr std::size_t gen() const { return code_ / 2; }
    constexpr bool inverse() const { return code_ % 2 == 1; }
    constexpr std::size_t code() const { return code_; }
    constexpr Letter inv() const { return from_code(code_ ^ 1); }

    friend constexpr bool operator==(Letter, Letter) = default;
    friend constexpr auto operator<=>(Letter, Letter) = default;

private:
    std::size_t code_ = 0;
};

// A total order on the 2n signed letters; default x1 < x1^-1 < x2 < ...
class LetterOrder {
public:
    explicit LetterOrder(std::size_t n = 0) : seq_(2 * n) {
        std::iota(seq_.begin(), seq_.end(), std::size_t{0});
        build_rank();
    }
    explicit LetterOrder(std::vector<Letter> letters) {
        for (auto l : letters) seq_.push_back(l.code());
        auto sorted = seq_;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i)
            if (sorted[i] != i) throw std::invalid_argument("letter order is not a permutation of all signed letters");
        build_rank();
    }

    std::size_t alphabet() const { return seq_.size() / 2; }
    std::size_t rank(Letter l) const { return rank_.at(l.code()); }
    std::vector<Letter> letters() const {
        std::vector<Letter> out;
        for (auto c : seq_) out.push_back(Letter::from_code(c));
        return out;
    }

    friend bool operator==(const LetterOrder& a, const LetterOrder& b) { return a.seq_ == b.seq_; }

private:
    void build_rank() {
        rank_.assign(seq_.size(), 0);
        for (std::size_t i = 0; i < seq_.size(); ++i) rank_[seq_[i]] = i;
    }
    std::vector<std::size_t> seq_;
    std::vector<std::size_t> rank_;
};

class WordParseError : public std::runtime_error {
public:
    WordParseError(const std::string& msg, std::size_t column)
        : std::runtime_error(msg), column_(column) {}
    std::size_t column() const { return column_; }

private:
    std::size_t column_;
};

// Freely reduced word.
class Word {
public:
    Word() = default;
    explicit Word(const std::vector<Letter>& letters) {
        for (auto l : letters) push(l);
    }

    static Word letter(std::size_t gen, bool inverse = false) { return Word({Letter(gen, inverse)}); }
    static Word power(std::size_t gen, long long k) {
        Word w;
        for (long long i = 0; i < (k < 0 ? -k : k); ++i) w.push(Letter(gen, k < 0));
        return w;
    }

    const std::vector<Letter>& letters() const { return letters_; }
    std::size_t size() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }
    Letter operator[](std::size_t i) const { return letters_[i]; }

    // Largest generator index used, plus one.
    std::size_t alphabet_needed() const {
        std::size_t n = 0;
        for (auto l : letters_) n = std::max(n, l.gen() + 1);
        return n;
    }

    Word inverse() const {
        Word w;
        for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.letters_.push_back(it->inv());
        return w;
    }

    friend Word operator*(Word a, const Word& b) {
        for (auto l : b.letters_) a.push(l);
        return a;
    }

    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word&, const Word&) = default;

private:
    void push(Letter l) {
        if (!letters_.empty() && letters_.back() == l.inv())
            letters_.pop_back();
        else
            letters_.push_back(l);
    }
    std::vector<Letter> letters_;
};

inline Word free_reduce(const std::vector<Letter>& letters) { return Word(letters); }
inline Word multiply(const Word& u, const Word& v) { return u * v; }
inline Word invert(const Word& u) { return u.inverse(); }

inline void require_alphabet(const Word& w, std::size_t n) {
    if (w.alphabet_needed() > n)
        throw std::out_of_range("letter x" + std::to_string(w.alphabet_needed()) + " outside alphabet of size " +
                                std::to_string(n));
}

// Text form: runs of equal letters collapse to powers, e.g. "x1^3 x2^-1"; empty word is "1".
inline std::string format_word(const Word& w) {
    if (w.empty()) return "1";
    std::string out;
    const auto& ls = w.letters();
    for (std::size_t i = 0; i < ls.size();) {
        std::size_t j = i;
        while (j < ls.size() && ls[j] == ls[i]) ++j;
        long long k = static_cast<long long>(j - i) * (ls[i].inverse() ? -1 : 1);
        if (!out.empty()) out += ' ';
        out += "x" + std::to_string(ls[i].gen() + 1);
        if (k != 1) out += "^" + std::to_string(k);
        i = j;
    }
    return out;
}

inline std::string format_letter(Letter l) {
    return "x" + std::to_string(l.gen() + 1) + (l.inverse() ? "^-1" : "");
}

namespace detail {

struct Cursor {
    std::string_view s;
    std::size_t pos = 0;
    std::size_t base_column = 1;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() const { return pos < s.size() ? s[pos] : '\0'; }
    std::size_t column() const { return base_column + pos; }
    [[noreturn]] void fail(const std::string& msg) const { throw WordParseError(msg, column()); }

    std::string integer(bool allow_sign) {
        std::size_t start = pos;
        if (allow_sign && (peek() == '-' || peek() == '+')) ++pos;
        std::size_t digits = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == digits) {
            pos = start;
            fail("expected an integer");
        }
        std::string t(s.substr(start, pos - start));
        if (!t.empty() && t[0] == '+') t.erase(0, 1);
        return t;
    }
};

// Parse "x<k>[^<int>]" at the cursor; appends to letters.
inline void parse_letter_token(Cursor& c, std::size_t n, std::vector<Letter>& out) {
    std::size_t col = c.column();
    if (c.peek() != 'x') c.fail("expected a generator x<k>");
    ++c.pos;
    std::string idx = c.integer(false);
    long long k = std::stoll(idx);
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw WordParseError("unknown generator x" + idx, col);
    long long e = 1;
    if (c.peek() == '^') {
        ++c.pos;
        bool paren = c.peek() == '(';
        if (paren) ++c.pos;
        e = std::stoll(c.integer(true));
        if (paren) {
            if (c.peek() != ')') c.fail("expected ')'");
            ++c.pos;
        }
    }
    for (long long i = 0; i < (e < 0 ? -e : e); ++i) out.push_back(Letter(static_cast<std::size_t>(k - 1), e < 0));
}

}  // namespace detail

inline Word parse_word(std::string_view text, std::size_t n) {
    detail::Cursor c{text};
    std::vector<Letter> letters;
    while (!c.done()) {
        if (c.peek() == '1') {
            ++c.pos;
            continue;
        }
        detail::parse_letter_token(c, n, letters);
    }
    return Word(letters);
}

}  // namespace fta
