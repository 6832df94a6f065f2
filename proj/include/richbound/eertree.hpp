#pragma once

// Incremental palindromic tree (eertree) over an integer alphabet
// {0..q-1}. One node per distinct non-empty palindromic factor, so the
// node count *is* the distinct-palindrome count. Pushes are O(1)
// amortized and fully reversible through a delta journal, which is what
// a depth-first search over rich prefixes needs: extend, test, retract.
//
// A word w is rich iff it has |w| distinct non-empty palindromic
// factors. Each push adds at most one new palindrome (the longest
// palindromic suffix of the extended word, if unseen), so w is rich iff
// every push reports a creation.

#include <cstddef>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace richbound {

using Letter = std::uint32_t;
using Word = std::vector<Letter>;

// Textual alphabet used at the CLI boundary: 'a'..'z' then '0'..'9'.
// The library itself accepts any q; only rendering is capped at 36.
inline char letter_to_char(Letter v) {
    if (v < 26) return static_cast<char>('a' + v);
    if (v < 36) return static_cast<char>('0' + (v - 26));
    throw std::invalid_argument("letter " + std::to_string(v) +
                                " has no textual form (alphabet larger than 36)");
}

inline Letter char_to_letter(char c) {
    if (c >= 'a' && c <= 'z') return static_cast<Letter>(c - 'a');
    if (c >= '0' && c <= '9') return static_cast<Letter>(26 + (c - '0'));
    throw std::invalid_argument(std::string("invalid letter '") + c +
                                "' (expected a-z or 0-9)");
}

inline Word word_from_string(const std::string& s) {
    Word w;
    w.reserve(s.size());
    for (char c : s) w.push_back(char_to_letter(c));
    return w;
}

inline std::string word_to_string(const Word& w) {
    std::string s;
    s.reserve(w.size());
    for (Letter c : w) s.push_back(letter_to_char(c));
    return s;
}

class Eertree {
public:
    static constexpr std::uint32_t kNone = 0xffffffffu;
    static constexpr std::uint32_t kRootNeg = 0;   // imaginary root, len -1
    static constexpr std::uint32_t kRootZero = 1;  // empty-word root, len 0

    explicit Eertree(unsigned q) : q_(q) {
        if (q == 0) throw std::invalid_argument("alphabet size must be at least 1");
        nodes_.push_back(Node{-1, kRootNeg, {}});
        nodes_.push_back(Node{0, kRootNeg, {}});
    }

    unsigned alphabet_size() const { return q_; }
    std::size_t length() const { return word_.size(); }
    const Word& word() const { return word_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::uint32_t last_node() const { return last_; }

    // Number of distinct non-empty palindromic factors of the current word.
    std::size_t pal_count() const { return nodes_.size() - 2; }

    // Appends c. Returns true iff a new distinct palindromic factor appeared.
    bool push(Letter c) {
        if (c >= q_) {
            throw std::invalid_argument("letter " + std::to_string(c) +
                                        " out of range for alphabet of size " +
                                        std::to_string(q_));
        }
        word_.push_back(c);
        const std::uint32_t x = extendable_suffix(last_, c);
        if (const std::uint32_t t = edge_target(x, c); t != kNone) {
            journal_.push_back(Delta{last_, kNone});
            last_ = t;
            return false;
        }
        const std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
        const int len = nodes_[x].len + 2;
        std::uint32_t link = kRootZero;
        if (len > 1) {
            // Longest proper palindromic suffix of the new palindrome: found
            // one suffix-link step further; its node exists already.
            const std::uint32_t y = extendable_suffix(nodes_[x].link, c);
            link = edge_target(y, c);
        }
        nodes_.push_back(Node{len, link, {}});
        nodes_[x].edges.emplace_back(c, id);
        journal_.push_back(Delta{last_, x});
        last_ = id;
        return true;
    }

    // Reverts the latest push: word, node table, edges and `last` are
    // restored. Node ids are allocated stack-like, so undo is a pop_back.
    void pop() {
        if (journal_.empty()) throw std::logic_error("pop without a matching push");
        const Delta d = journal_.back();
        journal_.pop_back();
        word_.pop_back();
        if (d.edge_src != kNone) {
            nodes_[d.edge_src].edges.pop_back();
            nodes_.pop_back();
        }
        last_ = d.prev_last;
    }

    std::size_t journal_depth() const { return journal_.size(); }

    // Test hook: redirects a node's suffix link. Exists so verification
    // harnesses can prove they detect a broken tree; never called from
    // library code.
    void corrupt_suffix_link_for_testing(std::uint32_t node, std::uint32_t target) {
        nodes_.at(node).link = target;
    }

private:
    struct Node {
        int len;
        std::uint32_t link;
        std::vector<std::pair<Letter, std::uint32_t>> edges;
    };

    struct Delta {
        std::uint32_t prev_last;
        std::uint32_t edge_src;  // kNone when the push created nothing
    };

    // First node in the suffix-link chain from v whose palindrome, extended
    // by c on both sides, is a suffix of the current word. The len -1 root
    // always matches, so the walk terminates.
    std::uint32_t extendable_suffix(std::uint32_t v, Letter c) const {
        const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(word_.size()) - 1;
        for (;;) {
            const std::ptrdiff_t j = i - nodes_[v].len - 1;
            if (j >= 0 && word_[static_cast<std::size_t>(j)] == c) return v;
            v = nodes_[v].link;
        }
    }

    std::uint32_t edge_target(std::uint32_t v, Letter c) const {
        for (const auto& [letter, target] : nodes_[v].edges)
            if (letter == c) return target;
        return kNone;
    }

    unsigned q_;
    std::vector<Node> nodes_;
    std::vector<Delta> journal_;
    Word word_;
    std::uint32_t last_ = kRootZero;
};

// True iff w contains |w| distinct non-empty palindromic factors.
// The empty word is rich (vacuously).
inline bool is_rich(const Word& w) {
    Letter maxc = 0;
    for (Letter c : w) maxc = c > maxc ? c : maxc;
    Eertree t(w.empty() ? 1u : maxc + 1u);
    for (Letter c : w) {
        if (!t.push(c)) return false;
    }
    return true;
}

// Independent oracle for the same definition: checks every substring for
// palindromicity. O(n^3); meant for words small enough that this is fine.
inline std::set<Word> palindromic_factors_naive(const Word& w) {
    std::set<Word> out;
    const std::size_t n = w.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            bool pal = true;
            for (std::size_t a = i, b = j; a < b; ++a, --b) {
                if (w[a] != w[b]) {
                    pal = false;
                    break;
                }
            }
            if (pal) out.insert(Word(w.begin() + static_cast<std::ptrdiff_t>(i),
                                     w.begin() + static_cast<std::ptrdiff_t>(j) + 1));
        }
    }
    return out;
}

}  // namespace richbound
