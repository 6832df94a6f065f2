#pragma once

// Exact counting and enumeration of rich words over a q-letter alphabet.
//
// The engine walks the tree of rich prefixes: a push that creates no new
// palindrome cannot start a rich word (per-push increments are at most
// one, so a length-n word is rich iff all n pushes create, and every
// prefix of a rich word is rich). That prefix closure is the pruning
// rule; everything below a non-creating push is skipped.
//
// Parallel runs split the tree by fixed-depth prefixes. Each task owns a
// private tree seeded by replaying its prefix, and aggregation is plain
// integer addition, so results are independent of the worker count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <istream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "eertree.hpp"

namespace richbound {

using BigInt = boost::multiprecision::cpp_int;

struct CountTable {
    unsigned q = 0;
    std::vector<BigInt> counts;  // counts[i] = R_q(i + 1)

    int n_max() const { return static_cast<int>(counts.size()); }

    const BigInt& r(int n) const {
        if (n < 1 || n > n_max()) throw std::out_of_range("CountTable row " + std::to_string(n));
        return counts[static_cast<std::size_t>(n - 1)];
    }

    std::string to_csv() const {
        std::ostringstream out;
        out << "n,R\n";
        for (int n = 1; n <= n_max(); ++n) out << n << ',' << r(n).str() << '\n';
        return out.str();
    }

    std::string to_json() const {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (int n = 1; n <= n_max(); ++n)
            rows.push_back({{"n", n}, {"R", r(n).str()}});
        return rows.dump(2) + "\n";
    }

    // Reads the CSV form back ("n,R" header, rows in ascending n).
    static CountTable from_csv(std::istream& in, unsigned q = 0) {
        CountTable t;
        t.q = q;
        std::string line;
        if (!std::getline(in, line) || line.substr(0, 3) != "n,R")
            throw std::invalid_argument("count table CSV must start with an 'n,R' header");
        int expect = 1;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos)
                throw std::invalid_argument("bad count table row: " + line);
            if (std::stoi(line.substr(0, comma)) != expect)
                throw std::invalid_argument("count table rows must be 1,2,... without gaps");
            t.counts.emplace_back(line.substr(comma + 1));
            ++expect;
        }
        return t;
    }
};

struct SearchLimits {
    unsigned threads = 1;
    std::uint64_t node_budget = 50'000'000;
};

// Search aborted after exhausting the node budget. `partial` holds the
// rows aggregated so far (lower bounds, possibly incomplete).
struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(std::string what, CountTable partial_table = {})
        : std::runtime_error(std::move(what)), partial(std::move(partial_table)) {}
    CountTable partial;
};

namespace detail {

struct BudgetStop {};  // internal unwind, converted to BudgetExceeded at the API edge

class BudgetGauge {
public:
    explicit BudgetGauge(std::uint64_t budget) : left_(static_cast<std::int64_t>(budget)) {}
    void charge() {
        if (left_.fetch_sub(1, std::memory_order_relaxed) <= 0) throw BudgetStop{};
    }

private:
    std::atomic<std::int64_t> left_;
};

// Visits every rich word extending the tree's current word, up to depth
// n_max; on_node is called with the tree positioned at each rich word.
template <typename F>
void dfs_rich(Eertree& t, int n_max, BudgetGauge& budget, F&& on_node) {
    const unsigned q = t.alphabet_size();
    const int depth = static_cast<int>(t.length());
    if (depth >= n_max) return;
    for (Letter c = 0; c < q; ++c) {
        budget.charge();
        const bool created = t.push(c);
        if (created) {
            on_node(t);
            dfs_rich(t, n_max, budget, on_node);
        }
        t.pop();
    }
}

// Runs fn(0..n_tasks-1) on `threads` workers; rethrows the first failure.
inline void run_tasks(std::size_t n_tasks, unsigned threads,
                      const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n_tasks <= 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n_tasks) return;
            if (error) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned n = std::min<std::size_t>(threads, n_tasks);
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// Rich words of length exactly `depth`, in lexicographic order, plus the
// number of rich words at every length 1..depth (the enumeration visits
// the whole rich-prefix tree above them).
inline std::vector<Word> rich_prefixes(unsigned q, int depth, BudgetGauge& budget,
                                       std::vector<std::uint64_t>& counts_upto) {
    counts_upto.assign(static_cast<std::size_t>(depth) + 1, 0);
    std::vector<Word> out;
    Eertree t(q);
    dfs_rich(t, depth, budget, [&](Eertree& tree) {
        ++counts_upto[tree.length()];
        if (static_cast<int>(tree.length()) == depth) out.push_back(tree.word());
    });
    return out;
}

inline CountTable table_from_u64(unsigned q, const std::vector<std::uint64_t>& counts) {
    CountTable t;
    t.q = q;
    for (std::size_t i = 1; i < counts.size(); ++i) t.counts.emplace_back(counts[i]);
    return t;
}

}  // namespace detail

// Exact R_q(n) for n = 1..n_max.
inline CountTable count_rich(unsigned q, int n_max, SearchLimits limits = {}) {
    if (q == 0) throw std::invalid_argument("alphabet size must be at least 1");
    if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
    const unsigned threads = std::max(1u, limits.threads);
    detail::BudgetGauge budget(limits.node_budget);

    if (threads == 1) {
        std::vector<std::uint64_t> counts(static_cast<std::size_t>(n_max) + 1, 0);
        Eertree t(q);
        try {
            detail::dfs_rich(t, n_max, budget,
                             [&](Eertree& tree) { ++counts[tree.length()]; });
        } catch (detail::BudgetStop&) {
            throw BudgetExceeded("node budget exhausted during search",
                                 detail::table_from_u64(q, counts));
        }
        return detail::table_from_u64(q, counts);
    }

    // Split depth: grow until there are enough prefixes to keep the pool
    // busy (or the whole range is covered by the prefix enumeration).
    std::vector<std::uint64_t> head_counts;
    std::vector<Word> prefixes;
    int depth = 0;
    try {
        for (;;) {
            ++depth;
            prefixes = detail::rich_prefixes(q, depth, budget, head_counts);
            if (depth >= n_max || prefixes.size() >= 8ull * threads) break;
        }
    } catch (detail::BudgetStop&) {
        throw BudgetExceeded("node budget exhausted while splitting the search");
    }
    if (depth >= n_max) return detail::table_from_u64(q, head_counts);

    std::vector<std::vector<std::uint64_t>> task_counts(
        prefixes.size(), std::vector<std::uint64_t>(static_cast<std::size_t>(n_max) + 1, 0));
    std::atomic<bool> out_of_budget{false};
    detail::run_tasks(prefixes.size(), threads, [&](std::size_t i) {
        Eertree t(q);
        for (Letter c : prefixes[i]) t.push(c);
        try {
            detail::dfs_rich(t, n_max, budget,
                             [&](Eertree& tree) { ++task_counts[i][tree.length()]; });
        } catch (detail::BudgetStop&) {
            out_of_budget.store(true);
        }
    });

    std::vector<std::uint64_t> totals = head_counts;
    totals.resize(static_cast<std::size_t>(n_max) + 1, 0);
    CountTable table;
    table.q = q;
    for (int n = 1; n <= n_max; ++n) {
        BigInt sum = totals[static_cast<std::size_t>(n)];
        if (n > depth)
            for (const auto& tc : task_counts) sum += tc[static_cast<std::size_t>(n)];
        table.counts.push_back(std::move(sum));
    }
    if (out_of_budget.load())
        throw BudgetExceeded("node budget exhausted during search", std::move(table));
    return table;
}

// Independent oracle: enumerates all q^n words and counts those whose
// distinct palindromic factor set (per the naive substring check) has
// size n. Guarded by a word budget since the work is q^n * n^3-ish.
inline BigInt count_rich_naive(unsigned q, int n, std::uint64_t word_budget = 10'000'000) {
    if (q == 0) throw std::invalid_argument("alphabet size must be at least 1");
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    double total_words = 1.0;
    for (int i = 0; i < n; ++i) total_words *= q;
    if (total_words > static_cast<double>(word_budget))
        throw BudgetExceeded("q^n exceeds the naive enumeration budget (" +
                             std::to_string(word_budget) + " words)");

    BigInt rich = 0;
    Word w(static_cast<std::size_t>(n), 0);
    for (;;) {
        if (palindromic_factors_naive(w).size() == static_cast<std::size_t>(n)) ++rich;
        int pos = n - 1;
        while (pos >= 0 && w[static_cast<std::size_t>(pos)] == q - 1) {
            w[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++w[static_cast<std::size_t>(pos)];
    }
    return rich;
}

// Emits every rich word of length exactly n once; returns how many.
// Single-threaded runs emit in lexicographic order. With threads > 1 the
// order is unspecified and the sink must tolerate concurrent calls.
inline std::uint64_t enumerate_rich(unsigned q, int n,
                                    const std::function<void(const Word&)>& sink,
                                    SearchLimits limits = {}) {
    if (q == 0) throw std::invalid_argument("alphabet size must be at least 1");
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    const unsigned threads = std::max(1u, limits.threads);
    detail::BudgetGauge budget(limits.node_budget);

    try {
        if (threads == 1) {
            std::uint64_t emitted = 0;
            Eertree t(q);
            detail::dfs_rich(t, n, budget, [&](Eertree& tree) {
                if (static_cast<int>(tree.length()) == n) {
                    sink(tree.word());
                    ++emitted;
                }
            });
            return emitted;
        }
        std::vector<std::uint64_t> head;
        int depth = 0;
        std::vector<Word> prefixes;
        for (;;) {
            ++depth;
            prefixes = detail::rich_prefixes(q, depth, budget, head);
            if (depth >= n || prefixes.size() >= 8ull * threads) break;
        }
        if (depth >= n) {
            for (const Word& w : prefixes) sink(w);
            return prefixes.size();
        }
        std::atomic<std::uint64_t> emitted{0};
        detail::run_tasks(prefixes.size(), threads, [&](std::size_t i) {
            Eertree t(q);
            for (Letter c : prefixes[i]) t.push(c);
            std::uint64_t local = 0;
            detail::dfs_rich(t, n, budget, [&](Eertree& tree) {
                if (static_cast<int>(tree.length()) == n) {
                    sink(tree.word());
                    ++local;
                }
            });
            emitted.fetch_add(local, std::memory_order_relaxed);
        });
        return emitted.load();
    } catch (detail::BudgetStop&) {
        throw BudgetExceeded("node budget exhausted during enumeration");
    }
}

// A rich word of length n found by seeded random descent with
// backtracking. Deterministic for a fixed seed; not uniform over the
// rich words of length n (branches are chosen by shallow dice rolls, not
// by subtree sizes).
inline Word sample_rich(unsigned q, int n, std::uint64_t seed,
                        std::uint64_t node_budget = 10'000'000) {
    if (q == 0) throw std::invalid_argument("alphabet size must be at least 1");
    if (n < 0) throw std::invalid_argument("n must be nonnegative");
    detail::BudgetGauge budget(node_budget);
    std::mt19937_64 rng(seed);
    Eertree t(q);

    // explicit Fisher-Yates so the draw sequence is pinned by the seed
    const auto shuffled_letters = [&] {
        std::vector<Letter> order(q);
        for (unsigned i = 0; i < q; ++i) order[i] = i;
        for (unsigned i = q; i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng() % i);
            std::swap(order[i - 1], order[j]);
        }
        return order;
    };

    std::function<bool()> descend = [&]() -> bool {
        if (static_cast<int>(t.length()) == n) return true;
        for (Letter c : shuffled_letters()) {
            try {
                budget.charge();
            } catch (detail::BudgetStop&) {
                throw BudgetExceeded("node budget exhausted while sampling");
            }
            if (t.push(c)) {
                if (descend()) return true;
            }
            t.pop();
        }
        return false;
    };

    if (!descend())
        throw std::runtime_error("no rich word of length " + std::to_string(n) +
                                 " over alphabet of size " + std::to_string(q));
    return t.word();
}

}  // namespace richbound
