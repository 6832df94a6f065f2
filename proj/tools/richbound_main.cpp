// Command-line front end: richness checks, exact counting/enumeration,
// bound evaluation and the built-in verification suites, with CSV/JSON
// output for batch runs.
//
// Exit codes: 0 success, 1 verification or richness failure, 2 usage or
// configuration error, 3 resource budget exceeded.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "richbound/bounds.hpp"
#include "richbound/eertree.hpp"
#include "richbound/richcount.hpp"
#include "richbound/tower.hpp"

namespace {

using namespace richbound;
using bounds::BoundConfig;
using bounds::PhiSpec;
using tower::Cmp3;
using tower::TowerReal;

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

void write_output(const std::string& path, const std::string& payload) {
    if (path.empty() || path == "-") {
        std::cout << payload;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << payload;
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> grid;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size() || !(v >= 1.0))
            throw CLI::ValidationError("--grid", "bad grid value '" + item + "'");
        grid.push_back(v);
    }
    if (grid.empty()) throw CLI::ValidationError("--grid", "empty grid");
    return grid;
}

// Shared bound-config flags; every subcommand that evaluates bounds takes
// the same set, merged over defaults(q) after parsing.
struct ConfigFlags {
    double lambda = -1.0, delta = -1.0, gamma = -1.0, c2 = -1.0, c = -1.0;
    double c6 = -1.0;
    long long n0 = -1;
    int k1_exp = -1;
    std::string phi;

    void attach(CLI::App* cmd) {
        cmd->add_option("--lambda", lambda, "lambda in (1/2,1), default 0.75");
        cmd->add_option("--delta", delta, "delta > 1, default 2");
        cmd->add_option("--gamma", gamma, "gamma > 1, default 2");
        cmd->add_option("--c2", c2, "c2 >= 1, default 1");
        cmd->add_option("--c", c, "c > 0, default 1");
        cmd->add_option("--c6", c6, "c6 >= 1 (normally produced by fit-c6)");
        cmd->add_option("--n0", n0, "n0 override (default: smallest valid n)");
        cmd->add_option("--k1-exp", k1_exp, "K1 = q^this, default 4");
        cmd->add_option("--phi", phi, "phi family: sqrt|pow:EPS|logshift|overlog");
    }

    BoundConfig build(unsigned q) const {
        PhiSpec ps = phi.empty() ? PhiSpec{} : PhiSpec::parse(phi);
        BoundConfig cfg = BoundConfig::defaults(q, ps);
        if (lambda >= 0) cfg.lambda = lambda;
        if (delta >= 0) cfg.delta = delta;
        if (gamma >= 0) cfg.gamma = gamma;
        if (c2 >= 0) cfg.c2 = c2;
        if (c >= 0) cfg.c = c;
        if (c6 >= 0) cfg.c6 = c6;
        if (k1_exp >= 0)
            cfg.k1 = TowerReal::from_real(std::pow(static_cast<double>(q), k1_exp));
        if (n0 >= 0) cfg.n0 = n0;
        cfg.validate();
        return cfg;
    }
};

int cmd_check(const std::string& text, unsigned q) {
    const Word w = word_from_string(text);
    unsigned maxc = 0;
    for (Letter c : w) maxc = std::max(maxc, c + 1);
    if (q == 0) q = std::max(1u, maxc);
    if (maxc > q)
        throw CLI::ValidationError("word", "letters exceed the declared alphabet size");

    Eertree t(q);
    std::size_t created = 0;
    for (Letter c : w) created += t.push(c) ? 1 : 0;
    const bool rich = created == w.size();
    std::cout << (rich ? "rich " : "not-rich ") << t.pal_count() << '/' << w.size() << '\n';
    return rich ? kExitOk : kExitFail;
}

int cmd_count(unsigned q, int n, unsigned threads, std::uint64_t budget,
              const std::string& format, const std::string& out) {
    const CountTable t = count_rich(q, n, {threads, budget});
    write_output(out, format == "json" ? t.to_json() : t.to_csv());
    return kExitOk;
}

int cmd_enumerate(unsigned q, int n, unsigned threads, std::uint64_t budget,
                  const std::string& out) {
    if (q > 36) throw CLI::ValidationError("--q", "textual output supports q <= 36");
    std::ostringstream buf;
    std::mutex mu;
    enumerate_rich(q, n, [&](const Word& w) {
        const std::string line = word_to_string(w);
        std::lock_guard<std::mutex> lock(mu);
        buf << line << '\n';
    }, {threads, budget});
    write_output(out, buf.str());
    return kExitOk;
}

int cmd_sample(unsigned q, int n, std::uint64_t seed, std::uint64_t budget,
               const std::string& out) {
    if (q > 36) throw CLI::ValidationError("--q", "textual output supports q <= 36");
    write_output(out, word_to_string(sample_rich(q, n, seed, budget)) + "\n");
    return kExitOk;
}

int cmd_bound(unsigned q, const std::string& grid_spec, const ConfigFlags& flags,
              const std::string& counts_path, const std::string& format,
              const std::string& out, const std::string& plot_out) {
    const BoundConfig cfg = flags.build(q);
    const std::vector<double> grid = parse_grid(grid_spec);

    CountTable counts;
    bool have_counts = false;
    if (!counts_path.empty()) {
        std::ifstream in(counts_path);
        if (!in) throw std::runtime_error("cannot read counts file '" + counts_path + "'");
        counts = CountTable::from_csv(in, q);
        have_counts = true;
    }

    const bounds::BoundReport rep =
        bounds::report(grid, cfg, have_counts ? &counts : nullptr);
    std::cerr << "note: " << bounds::BoundReport::kConditionalNote << '\n';
    write_output(out, format == "json" ? rep.to_json() : rep.to_csv());
    if (!plot_out.empty()) write_output(plot_out, rep.to_plot());
    return kExitOk;
}

int cmd_table(unsigned q, int n, unsigned threads, std::uint64_t budget,
              const ConfigFlags& flags, const std::string& format, const std::string& out) {
    const BoundConfig cfg = flags.build(q);
    const CountTable counts = count_rich(q, n, {threads, budget});
    std::vector<double> grid;
    for (int i = 1; i <= n; ++i) grid.push_back(i);
    const bounds::BoundReport rep = bounds::report(grid, cfg, &counts);
    std::cerr << "note: " << bounds::BoundReport::kConditionalNote << '\n';
    write_output(out, format == "json" ? rep.to_json() : rep.to_csv());
    return kExitOk;
}

int cmd_fit_c6(unsigned q, int j_max, const ConfigFlags& flags, const std::string& format,
               const std::string& out) {
    const BoundConfig cfg = flags.build(q);
    const double c6 = bounds::fit_c6(j_max, cfg);
    bounds::KSequence ks(cfg);
    if (format == "json") {
        nlohmann::ordered_json obj;
        obj["c6"] = c6;
        auto rows = nlohmann::ordered_json::array();
        for (int j = 1; j <= j_max; ++j)
            rows.push_back({{"j", j}, {"lnstar_K", *tower::iter_log(ks.k(j))}});
        obj["rows"] = std::move(rows);
        write_output(out, obj.dump(2) + "\n");
    } else {
        std::ostringstream buf;
        buf << "j,lnstar_K\n";
        for (int j = 1; j <= j_max; ++j)
            buf << j << ',' << *tower::iter_log(ks.k(j)) << '\n';
        buf << "c6," << tower::detail::fmt_double(c6) << '\n';
        write_output(out, buf.str());
    }
    return kExitOk;
}

// ---- verify ---------------------------------------------------------------

struct SuiteResult {
    bool failed = false;
    std::vector<std::string> warnings;
};

void suite_line(const char* name, bool ok, const std::string& detail) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name;
    if (!detail.empty()) std::cout << ": " << detail;
    std::cout << '\n';
}

// Engine-vs-oracle equality on every length up to n_max. The engine side
// is a plain DFS over one Eertree here (count_rich cross-checks it), so a
// fault injected into that tree must surface as a count mismatch.
bool verify_counts(unsigned q, int n_max, unsigned threads, bool inject_fault,
                   SuiteResult& res) {
    std::vector<std::uint64_t> engine(static_cast<std::size_t>(n_max) + 1, 0);
    Eertree t(q);
    bool fault_armed = inject_fault;
    const std::function<void(int)> dfs = [&](int depth) {
        if (depth == n_max) return;
        for (Letter c = 0; c < q; ++c) {
            const bool created = t.push(c);
            if (created) {
                ++engine[static_cast<std::size_t>(depth) + 1];
                if (fault_armed && t.length() == 2 && t.word()[0] == 0 && t.word()[1] == 0) {
                    t.corrupt_suffix_link_for_testing(t.last_node(), Eertree::kRootZero);
                    fault_armed = false;
                }
                dfs(depth + 1);
            }
            t.pop();
        }
    };
    dfs(0);

    const CountTable api = count_rich(q, n_max, {threads, 2'000'000'000ull});
    bool ok = true;
    std::string detail;
    for (int n = 1; n <= n_max; ++n) {
        const BigInt naive = count_rich_naive(q, n);
        const BigInt dfs_count = engine[static_cast<std::size_t>(n)];
        if (naive != dfs_count || (!inject_fault && api.r(n) != naive)) {
            ok = false;
            detail = "mismatch at n=" + std::to_string(n) + ": naive=" + naive.str() +
                     " engine=" + dfs_count.str() + " count_rich=" + api.r(n).str();
            break;
        }
    }
    if (ok) detail = "R_" + std::to_string(q) + "(1.." + std::to_string(n_max) + ") agree";
    suite_line("oracle-equivalence", ok, detail);
    res.failed |= !ok;
    return ok;
}

bool verify_tower(SuiteResult& res) {
    std::mt19937_64 rng(0x51c8u);  // fixed seed
    std::uniform_real_distribution<double> unif(1e-6, 1.0 - 1e-9);
    auto random_point = [&](std::uint32_t hmin, std::uint32_t hmax) {
        const auto h = hmin + static_cast<std::uint32_t>(rng() % (hmax - hmin + 1));
        const tower::detail::LevelIndex li{h, unif(rng)};
        return TowerReal::from_endpoints(li, li);
    };

    int violations = 0, indeterminate = 0, total = 0;
    for (std::uint32_t n = 0; n <= 6; ++n)
        if (tower::iter_log(tower::tetrate(TowerReal::euler(), n)) !=
            static_cast<long long>(n))
            ++violations;

    for (int i = 0; i < 1000; ++i) {
        const TowerReal x = random_point(1, 4);
        const auto ls = tower::iter_log(x);
        if (!ls) {
            ++indeterminate;
            continue;
        }
        const auto k = static_cast<std::uint32_t>(*ls);
        if (tower::cmp(tower::tetrate(TowerReal::euler(), k - 1), x) != Cmp3::Less)
            ++violations;
        const Cmp3 up = tower::cmp(x, tower::tetrate(TowerReal::euler(), k));
        if (up == Cmp3::Greater) ++violations;
        if (up == Cmp3::Indeterminate) ++indeterminate;
        total += 2;

        const auto after = tower::iter_log(tower::exp(x));
        if (!after || *after > *ls + 1) ++violations;
        ++total;

        const auto y = static_cast<std::uint32_t>(*ls + (rng() % 3));
        if (tower::cmp(x, tower::tetrate(TowerReal::euler(), y)) == Cmp3::Greater)
            ++violations;
        ++total;
    }
    for (int i = 0; i < 1000; ++i) {
        const TowerReal x = random_point(1, 3);
        const TowerReal y = random_point(1, 3);
        const auto lx = tower::iter_log(x), ly = tower::iter_log(y);
        if (!lx || !ly) {
            ++indeterminate;
            continue;
        }
        const TowerReal cap =
            tower::tetrate(TowerReal::euler(), static_cast<std::uint32_t>(*lx + *ly));
        for (const TowerReal& v : {tower::add(x, y), tower::mul(x, y), tower::pow(x, y)}) {
            const Cmp3 verdict = tower::cmp(v, cap);
            if (verdict == Cmp3::Greater) ++violations;
            if (verdict == Cmp3::Indeterminate) ++indeterminate;
            ++total;
        }
    }

    const bool ok = violations == 0;
    std::ostringstream detail;
    detail << violations << " violations, " << indeterminate << " indeterminate over "
           << total << " checks";
    if (indeterminate > 0)
        res.warnings.push_back("tower-properties: " + std::to_string(indeterminate) +
                               " indeterminate comparisons (counted as pass)");
    suite_line("tower-properties", ok, detail.str());
    res.failed |= !ok;
    return ok;
}

bool verify_lemma1(const BoundConfig& cfg, SuiteResult& res) {
    std::mt19937_64 rng(0x10adull);
    std::uniform_real_distribution<double> log_n(std::log(2.0), std::log(1e6));
    std::uniform_real_distribution<double> unif_alpha(1.0, 10.0);
    std::uniform_real_distribution<double> log_k(0.0, std::log(1e4));
    int disagreements = 0, determinate = 0;
    for (int i = 0; i < 150; ++i) {
        const auto v = bounds::lemma1_equivalence_check(
            std::exp(log_n(rng)), unif_alpha(rng), std::exp(log_k(rng)), cfg);
        if (v.tower_side == Cmp3::Indeterminate || v.scalar_side == Cmp3::Indeterminate)
            continue;
        ++determinate;
        if (v.tower_side != v.scalar_side) ++disagreements;
    }
    const bool ok = disagreements == 0 && determinate >= 100;
    suite_line("log-equivalence", ok,
               std::to_string(determinate) + " determinate pairs, " +
                   std::to_string(disagreements) + " disagreements");
    res.failed |= !ok;
    return ok;
}

bool verify_domination(unsigned q, int n_max, const BoundConfig& cfg, unsigned threads,
                       SuiteResult& res) {
    const CountTable counts = count_rich(q, n_max, {threads, 2'000'000'000ull});
    int greater = 0, indeterminate = 0;
    for (int n = 1; n <= n_max; ++n) {
        const TowerReal r = TowerReal::from_real(counts.r(n).convert_to<double>());
        const Cmp3 vg = tower::cmp(r, bounds::bound_G(n, cfg));
        if (vg == Cmp3::Greater) ++greater;
        if (vg == Cmp3::Indeterminate) ++indeterminate;
        if (n > cfg.n0) {
            const Cmp3 vb = tower::cmp(r, bounds::bound_B(n, cfg));
            if (vb == Cmp3::Greater) ++greater;
            if (vb == Cmp3::Indeterminate) ++indeterminate;
        }
    }
    const bool ok = greater == 0;
    if (indeterminate > 0)
        res.warnings.push_back("bound-domination: " + std::to_string(indeterminate) +
                               " indeterminate verdicts (counted as pass)");
    suite_line("bound-domination", ok,
               "R <= G and R <= B checked for n <= " + std::to_string(n_max) + ", " +
                   std::to_string(greater) + " violations");
    res.failed |= !ok;
    return ok;
}

int cmd_verify(unsigned q, int n_max, unsigned threads, bool force, bool inject_fault,
               const ConfigFlags& flags) {
    const BoundConfig cfg = flags.build(q);
    double words = 1.0;
    for (int i = 0; i < n_max; ++i) words *= q;
    if (words > 1e7 && !force) {
        std::cerr << "error: q^n = " << words
                  << " exceeds the naive-oracle budget (1e7 words); pass --force to override\n";
        return kExitBudget;
    }
    SuiteResult res;
    verify_counts(q, n_max, threads, inject_fault, res);
    verify_tower(res);
    verify_lemma1(cfg, res);
    verify_domination(q, n_max, cfg, threads, res);
    for (const std::string& w : res.warnings) std::cout << "[WARN] " << w << '\n';
    std::cout << (res.failed ? "FAILED\n" : "OK\n");
    return res.failed ? kExitFail : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rich-word counting and subexponential bound toolkit"};
    app.require_subcommand(1);
    // key=value file with one [subcommand] section per command; flags win
    app.set_config("--config", "", "config file, overridden by flags");

    std::string word;
    unsigned check_q = 0;
    auto* check = app.add_subcommand("check", "test a word for richness");
    check->fallthrough();
    check->add_option("word", word, "word over a-z0-9 (may be empty)");
    check->add_option("--q", check_q, "alphabet size (default: inferred)");

    unsigned q = 2, threads = 1;
    int n = 8;
    std::uint64_t budget = 50'000'000, seed = 0;
    std::string format = "csv", out, plot_out, grid_spec, counts_path;

    auto add_common = [&](CLI::App* cmd, bool with_format = true) {
        cmd->add_option("--q", q, "alphabet size");
        cmd->add_option("--threads", threads, "worker threads (default 1)");
        cmd->add_option("--budget", budget, "node budget");
        cmd->add_option("--out", out, "output path (default stdout)");
        cmd->fallthrough();
        if (with_format)
            cmd->add_option("--format", format, "csv|json")
                ->check(CLI::IsMember({"csv", "json"}));
    };

    auto* count = app.add_subcommand("count", "exact R_q(n) for n = 1..N");
    count->add_option("--n", n, "maximum length")->required();
    add_common(count);

    auto* enumerate = app.add_subcommand("enumerate", "list rich words of length n");
    enumerate->add_option("--n", n, "word length")->required();
    add_common(enumerate, false);

    auto* sample = app.add_subcommand("sample", "random rich word (seeded descent)");
    sample->add_option("--n", n, "word length")->required();
    sample->add_option("--seed", seed, "RNG seed");
    add_common(sample, false);

    ConfigFlags bound_flags;
    auto* bound = app.add_subcommand("bound", "evaluate bound columns over an n grid");
    bound->add_option("--grid", grid_spec, "comma list of n values (e.g. 1e3,1e6,1e12)")
        ->required();
    bound->add_option("--counts", counts_path, "CSV count table to fill the R column");
    bound->add_option("--plot-out", plot_out, "write gnuplot-style n vs e(n)/n data");
    add_common(bound);
    bound_flags.attach(bound);

    ConfigFlags table_flags;
    auto* table = app.add_subcommand("table", "exact counts merged with bound columns");
    table->add_option("--n", n, "maximum length")->required();
    add_common(table);
    table_flags.attach(table);

    ConfigFlags fit_flags;
    int j_max = 5;
    auto* fit = app.add_subcommand("fit-c6", "fit the tower-exponent constant");
    fit->add_option("--j", j_max, "ladder depth (default 5)");
    add_common(fit);
    fit_flags.attach(fit);

    ConfigFlags verify_flags;
    bool force = false, inject_fault = false;
    auto* verify = app.add_subcommand("verify", "run the verification suites");
    verify->add_option("--n", n, "oracle-equivalence depth (default 8)");
    verify->add_flag("--force", force, "override the naive-oracle budget guard");
    auto* fault = verify->add_flag("--inject-fault", inject_fault,
                                   "corrupt the search tree (self-test of the harness)");
    fault->group("");  // hidden
    add_common(verify, false);
    verify_flags.attach(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (check->parsed()) return cmd_check(word, check_q);
        if (count->parsed()) return cmd_count(q, n, threads, budget, format, out);
        if (enumerate->parsed()) return cmd_enumerate(q, n, threads, budget, out);
        if (sample->parsed()) return cmd_sample(q, n, seed, budget, out);
        if (bound->parsed())
            return cmd_bound(q, grid_spec, bound_flags, counts_path, format, out, plot_out);
        if (table->parsed()) return cmd_table(q, n, threads, budget, table_flags, format, out);
        if (fit->parsed()) return cmd_fit_c6(q, j_max, fit_flags, format, out);
        if (verify->parsed())
            return cmd_verify(q, n, threads, force, inject_fault, verify_flags);
        return kExitUsage;
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBudget;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFail;
    }
}
