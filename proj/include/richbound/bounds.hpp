#pragma once

// The bound machinery: sigma_n and the recursion step, the log-domain
// equivalence check, the alpha/beta/K ladders, tau, G(n), f(n), B(n) and
// the tower-exponent fit. Everything that can leave double range is
// evaluated over TowerReal intervals; every verdict is a sound Cmp3.
//
// The constants here (lambda, delta, gamma, c2, c, K1, n0) are
// configuration with documented defaults: the inequalities they feed are
// checked against exact counts at desk scale, but the constants
// themselves are assumptions, not derived values.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "richcount.hpp"
#include "tower.hpp"

namespace richbound::bounds {

using tower::Cmp3;
using tower::DInterval;
using tower::TowerReal;

// phi families: positive, diverging, with x/phi(x) diverging too.
// Values are clamped to >= 1 so each family maps [1, inf) into [1, inf)
// (x/ln(e+x) dips below 1 near x = 1 otherwise).
struct PhiSpec {
    enum class Family { Sqrt, PowerEps, LogShift, OverLog };

    Family family = Family::Sqrt;
    double eps = 0.5;  // PowerEps exponent, in (0,1)

    double operator()(double x) const {
        double v;
        switch (family) {
            case Family::Sqrt: v = std::sqrt(x); break;
            case Family::PowerEps: v = std::pow(x, eps); break;
            case Family::LogShift: v = std::log(std::numbers::e + x); break;
            case Family::OverLog: v = x / std::log(std::numbers::e + x); break;
            default: v = std::sqrt(x); break;
        }
        return v < 1.0 ? 1.0 : v;
    }

    DInterval eval(DInterval x) const {
        using namespace tower;
        DInterval v;
        switch (family) {
            case Family::Sqrt: v = di_sqrt(x); break;
            case Family::PowerEps: v = di_pow(x, di_exact(eps)); break;
            case Family::LogShift: v = di_log(di_add(di_exact(std::numbers::e), x)); break;
            case Family::OverLog:
                v = di_div(x, di_log(di_add(di_exact(std::numbers::e), x)));
                break;
            default: v = di_sqrt(x); break;
        }
        if (v.lo < 1.0) v.lo = 1.0;
        if (v.hi < 1.0) v.hi = 1.0;
        return v;
    }

    std::string name() const {
        switch (family) {
            case Family::Sqrt: return "sqrt";
            case Family::PowerEps: {
                std::ostringstream out;
                out << "pow:" << eps;
                return out.str();
            }
            case Family::LogShift: return "logshift";
            case Family::OverLog: return "overlog";
            default: return "sqrt";
        }
    }

    static PhiSpec parse(std::string_view s) {
        if (s == "sqrt") return {Family::Sqrt, 0.5};
        if (s == "logshift") return {Family::LogShift, 0.5};
        if (s == "overlog") return {Family::OverLog, 0.5};
        if (s.substr(0, 4) == "pow:") {
            PhiSpec p{Family::PowerEps, std::stod(std::string(s.substr(4)))};
            if (!(p.eps > 0.0 && p.eps < 1.0))
                throw std::invalid_argument("phi pow exponent must be in (0,1)");
            return p;
        }
        throw std::invalid_argument("unknown phi family '" + std::string(s) +
                                    "' (expected sqrt|pow:EPS|logshift|overlog)");
    }
};

struct BoundConfig {
    unsigned q = 2;
    double lambda = 0.75;  // (1/2, 1)
    double delta = 2.0;    // > 1
    double gamma = 2.0;    // > 1
    double c2 = 1.0;       // >= 1
    double c = 1.0;        // > 0
    TowerReal k1 = TowerReal::from_real(16.0);
    std::optional<double> c6;  // >= 1 when set; fit_c6 produces it
    long long n0 = 3;
    PhiSpec phi{};

    void validate() const {
        auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
        if (q < 2) fail("q must be an integer >= 2");
        if (!(lambda > 0.5 && lambda < 1.0)) fail("lambda must lie in (1/2, 1)");
        if (!(delta > 1.0)) fail("delta must be > 1");
        if (!(gamma > 1.0)) fail("gamma must be > 1");
        if (!(c2 >= 1.0)) fail("c2 must be >= 1");
        if (!(c > 0.0)) fail("c must be > 0");
        if (tower::cmp(k1, TowerReal::one()) != Cmp3::Greater) fail("K1 must be > 1");
        if (c6 && !(*c6 >= 1.0)) fail("c6 must be >= 1");
        if (n0 < 1) fail("n0 must be a positive integer");
        if (phi.family == PhiSpec::Family::PowerEps && !(phi.eps > 0.0 && phi.eps < 1.0))
            fail("phi pow exponent must be in (0,1)");
    }

    // Defaults: K1 = q^4 and n0 = the smallest n with ln*(q^(n/phi(n))) > 1.
    static BoundConfig defaults(unsigned q = 2, PhiSpec phi = {}) {
        BoundConfig cfg;
        cfg.q = q;
        cfg.phi = phi;
        cfg.k1 = TowerReal::from_real(std::pow(static_cast<double>(q), 4.0));
        cfg.n0 = default_n0(q, phi);
        cfg.validate();
        return cfg;
    }

    // ln*(q^(n/phi(n))) > 1 is exactly (n/phi(n)) ln q > 1.
    static long long default_n0(unsigned q, const PhiSpec& phi) {
        const double lq = std::log(static_cast<double>(q));
        for (long long n = 1; n <= 1'000'000; ++n) {
            const double x = static_cast<double>(n);
            if (x / phi(x) * lq > 1.0) return n;
        }
        throw std::invalid_argument("config: no n0 <= 1e6 satisfies ln*(q^(n/phi(n))) > 1");
    }
};

// sigma_n = c2 * n / ln n. Meaningless at n = 1 (ln 1 = 0), hence n >= 2.
inline double sigma(double n, double c2) {
    if (!(n >= 2.0)) throw std::invalid_argument("sigma requires n >= 2");
    return c2 * n / std::log(n);
}

namespace detail {

inline DInterval sigma_iv(double n, double c2) {
    if (!(n >= 2.0)) throw std::invalid_argument("sigma requires n >= 2");
    return tower::di_mul(tower::di_exact(c2),
                         tower::di_div(tower::di_exact(n), tower::di_log(tower::di_exact(n))));
}

}  // namespace detail

// K^{sigma_n} h^{(n+sigma_n)/2} (c2 ln n)^{sigma_n}, as an enclosing interval.
inline TowerReal bound_step(const TowerReal& k, double h, double n, const BoundConfig& cfg) {
    using namespace tower;
    if (!(h > 1.0)) throw std::invalid_argument("bound_step requires h > 1");
    if (!(n >= 2.0)) throw std::invalid_argument("bound_step requires n >= 2");
    if (cmp(k, TowerReal::one()) == Cmp3::Less)
        throw std::invalid_argument("bound_step requires K >= 1");
    const DInterval sig = detail::sigma_iv(n, cfg.c2);
    const TowerReal sig_t = TowerReal::from_interval(sig);
    const DInterval half_exp = di_div(di_add(di_exact(n), sig), di_exact(2.0));
    const DInterval log_factor = di_mul(di_exact(cfg.c2), di_log(di_exact(n)));
    TowerReal out = pow(k, sig_t);
    out = mul(out, pow(TowerReal::from_real(h), TowerReal::from_interval(half_exp)));
    out = mul(out, pow(TowerReal::from_interval(log_factor), sig_t));
    return out;
}

// Both routes of the log-domain equivalence: the raw inequality
//
//   1 >= K^{sigma_n} (q^{1/alpha})^{(n+sigma_n)/2} (c2 ln n)^{sigma_n}
//        / (q^{1/(alpha lambda)})^{n/2}
//
// checked over TowerReal, against the reduced scalar inequality
//
//   (1-lambda) ln n / (2 alpha lambda c2) * ln q - ln ln n
//      >= ln K + ln c2 + (1/(2 alpha)) ln q.
//
// Both verdicts are oriented as cmp(small side, large side): Less means
// the inequality holds strictly. Whenever both are determinate they must
// agree; the reduction is a chain of strictly monotone transformations.
struct Lemma1Verdicts {
    Cmp3 tower_side;
    Cmp3 scalar_side;
};

inline Lemma1Verdicts lemma1_equivalence_check(double n, double alpha, double k,
                                               const BoundConfig& cfg) {
    using namespace tower;
    if (!(n >= 2.0)) throw std::invalid_argument("lemma1 check requires n >= 2");
    if (!(alpha >= 1.0)) throw std::invalid_argument("lemma1 check requires alpha >= 1");
    if (!(k >= 1.0)) throw std::invalid_argument("lemma1 check requires K >= 1");

    const DInterval sig = detail::sigma_iv(n, cfg.c2);
    const TowerReal sig_t = TowerReal::from_interval(sig);
    const TowerReal q_t = TowerReal::from_real(static_cast<double>(cfg.q));

    TowerReal numer = pow(TowerReal::from_real(k), sig_t);
    numer = mul(numer, pow(pow(q_t, TowerReal::from_interval(
                                        di_div(di_exact(1.0), di_exact(alpha)))),
                           TowerReal::from_interval(
                               di_div(di_add(di_exact(n), sig), di_exact(2.0)))));
    numer = mul(numer, pow(TowerReal::from_interval(
                               di_mul(di_exact(cfg.c2), di_log(di_exact(n)))),
                           sig_t));
    const TowerReal denom =
        pow(pow(q_t, TowerReal::from_interval(
                         di_div(di_exact(1.0),
                                di_mul(di_exact(alpha), di_exact(cfg.lambda))))),
            TowerReal::from_interval(di_div(di_exact(n), di_exact(2.0))));

    const DInterval ln_n = di_log(di_exact(n));
    const DInterval lq = di_log(di_exact(static_cast<double>(cfg.q)));
    const DInterval left =
        di_add(di_add(di_log(di_exact(k)), di_exact(std::log(cfg.c2))),
               di_add(di_div(lq, di_exact(2.0 * alpha)), di_log(ln_n)));
    const DInterval right =
        di_div(di_mul(di_mul(di_exact(1.0 - cfg.lambda), ln_n), lq),
               di_exact(2.0 * alpha * cfg.lambda * cfg.c2));

    return {cmp(numer, denom), di_cmp(left, right)};
}

// alpha_j = (2 lambda)^{j-1}, strictly increasing since 2 lambda > 1.
inline double alpha_j(int j, double lambda) {
    if (j < 1) throw std::invalid_argument("alpha_j requires j >= 1");
    return std::pow(2.0 * lambda, j - 1);
}

namespace detail {

inline DInterval alpha_iv(int j, double lambda) {
    if (j < 1) throw std::invalid_argument("alpha_j requires j >= 1");
    if (j == 1) return tower::di_exact(1.0);
    return tower::di_pow(tower::di_exact(2.0 * lambda), tower::di_exact(double(j - 1)));
}

}  // namespace detail

struct BetaK {
    TowerReal beta;
    TowerReal k;
};

// Memoized beta_j / K_j ladder:
//   beta_1 = 1, K_1 from config,
//   beta_j = ceil(exp(alpha_{j-1}^delta * ln K_{j-1})), K_j = q^{beta_j}.
// The ceiling is absorbed into the interval by adding 1 to the upper
// endpoint (an exact integer ceiling is meaningless at tower heights).
class KSequence {
public:
    explicit KSequence(const BoundConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        beta_.push_back(TowerReal::one());
        k_.push_back(cfg_.k1);
    }

    const TowerReal& beta(int j) {
        grow(j);
        return beta_[static_cast<std::size_t>(j - 1)];
    }
    const TowerReal& k(int j) {
        grow(j);
        return k_[static_cast<std::size_t>(j - 1)];
    }

private:
    void grow(int j) {
        if (j < 1) throw std::invalid_argument("K ladder index must be >= 1");
        using namespace tower;
        while (static_cast<int>(k_.size()) < j) {
            const int jj = static_cast<int>(k_.size()) + 1;
            const DInterval ad = di_pow(detail::alpha_iv(jj - 1, cfg_.lambda),
                                        di_exact(cfg_.delta));
            const TowerReal raw =
                exp(mul(TowerReal::from_interval(ad), ln(k_[k_.size() - 1])));
            const TowerReal beta = ceil_enclosure(raw);
            beta_.push_back(beta);
            k_.push_back(pow(TowerReal::from_real(static_cast<double>(cfg_.q)), beta));
        }
    }

    BoundConfig cfg_;
    std::vector<TowerReal> beta_;
    std::vector<TowerReal> k_;
};

inline BetaK beta_k(int j, const BoundConfig& cfg) {
    KSequence ks(cfg);
    return {ks.beta(j), ks.k(j)};
}

namespace detail {

inline DInterval n_over_phi(double n, const BoundConfig& cfg) {
    return tower::di_div(tower::di_exact(n), cfg.phi.eval(tower::di_exact(n)));
}

// q^{n/phi(n)}
inline TowerReal q_pow_n_over_phi(double n, const BoundConfig& cfg) {
    return tower::pow(TowerReal::from_real(static_cast<double>(cfg.q)),
                      TowerReal::from_interval(n_over_phi(n, cfg)));
}

}  // namespace detail

// tau(n) = max{ j >= 1 : K_j <= max(K_1, q^{n/phi(n)}) }, scanned upward
// with sound comparisons. An indeterminate comparison stops the scan and
// the last certified j is returned; that direction keeps the bound valid.
inline int tau(double n, const BoundConfig& cfg, KSequence* shared = nullptr) {
    if (!(n >= 1.0)) throw std::invalid_argument("tau requires n >= 1");
    KSequence local(cfg);
    KSequence& ks = shared ? *shared : local;
    const TowerReal m = tower::max(cfg.k1, detail::q_pow_n_over_phi(n, cfg));
    int j = 1;  // K_1 <= max(K_1, ...) always
    for (;;) {
        if (j > 10000) throw std::logic_error("tau scan failed to terminate");
        if (tower::cmp(ks.k(j + 1), m) != Cmp3::Less) return j;
        ++j;
    }
}

// G(n) = K_{tau(n)} q^{n/alpha_{tau(n)}}.
inline TowerReal bound_G(double n, const BoundConfig& cfg, KSequence* shared = nullptr) {
    using namespace tower;
    KSequence local(cfg);
    KSequence& ks = shared ? *shared : local;
    const int t = tau(n, cfg, &ks);
    const DInterval expo = di_div(di_exact(n), detail::alpha_iv(t, cfg.lambda));
    return mul(ks.k(t), pow(TowerReal::from_real(static_cast<double>(cfg.q)),
                            TowerReal::from_interval(expo)));
}

// f(n) = (c * ln*((n/phi(n)) ln q))^{1/gamma}; ln* is exact on scalars.
inline double f_exponent(double n, const BoundConfig& cfg) {
    if (!(n > static_cast<double>(cfg.n0)))
        throw std::invalid_argument("f(n) requires n > n0 = " + std::to_string(cfg.n0));
    const double x = n / cfg.phi(n) * std::log(static_cast<double>(cfg.q));
    return std::pow(cfg.c * tower::ln_star(x), 1.0 / cfg.gamma);
}

// e(n) with B(n) = q^{e(n)}: e(n) = n/phi(n) + n/(2 lambda)^{f(n)-1}.
inline double bound_B_exponent(double n, const BoundConfig& cfg) {
    const double f = f_exponent(n, cfg);
    return n / cfg.phi(n) + n / std::pow(2.0 * cfg.lambda, f - 1.0);
}

namespace detail {

// Interval version of e(n); ln* may straddle a boundary, in which case
// the f interval widens to cover both integer values.
inline DInterval e_iv(double n, const BoundConfig& cfg) {
    using namespace tower;
    if (!(n > static_cast<double>(cfg.n0)))
        throw std::invalid_argument("B(n) requires n > n0 = " + std::to_string(cfg.n0));
    const DInterval nop = n_over_phi(n, cfg);
    const DInterval arg = di_mul(nop, di_log(di_exact(static_cast<double>(cfg.q))));
    const DInterval ls = {static_cast<double>(ln_star(arg.lo)),
                          static_cast<double>(ln_star(arg.hi))};
    DInterval f;
    if (ls.lo == 0.0 && ls.hi == 0.0) {
        f = di_exact(0.0);
    } else {
        f = di_pow(di_mul(di_exact(cfg.c), ls), di_exact(1.0 / cfg.gamma));
        if (ls.lo == 0.0) f.lo = 0.0;
    }
    const DInterval decay =
        di_pow(di_exact(2.0 * cfg.lambda), di_sub(f, di_exact(1.0)));
    return di_add(nop, di_div(di_exact(n), decay));
}

}  // namespace detail

// B(n) = q^{e(n)} as an enclosing interval.
inline TowerReal bound_B(double n, const BoundConfig& cfg) {
    return tower::pow(TowerReal::from_real(static_cast<double>(cfg.q)),
                      TowerReal::from_interval(detail::e_iv(n, cfg)));
}

// Smallest c6 on a 1/16 grid with ln*(K_j) <= c6 * j^gamma for all
// j <= J. Throws if some ladder entry has an indeterminate ln*.
inline double fit_c6(int J, const BoundConfig& cfg) {
    if (J < 1) throw std::invalid_argument("fit_c6 requires J >= 1");
    KSequence ks(cfg);
    double need = 1.0;
    for (int j = 1; j <= J; ++j) {
        const auto ls = tower::iter_log(ks.k(j));
        if (!ls)
            throw std::runtime_error("fit_c6: ln* of K_" + std::to_string(j) +
                                     " is indeterminate at this precision");
        const double bound = static_cast<double>(*ls) / std::pow(double(j), cfg.gamma);
        need = std::max(need, bound);
    }
    return std::ceil(need * 16.0) / 16.0;
}

struct BoundRow {
    double n = 0.0;
    std::optional<double> f;    // only for n > n0
    int tau = 0;
    std::optional<double> e_n;  // only for n > n0
    TowerReal lnq_G;
    std::optional<BigInt> r;
    std::optional<Cmp3> verdict_G;  // cmp(R(n), G(n))
    std::optional<Cmp3> verdict_B;  // cmp(R(n), B(n))
};

struct BoundReport {
    unsigned q = 0;
    std::vector<BoundRow> rows;

    // The bound columns assume the configured constants satisfy the
    // side conditions that are existential in the underlying analysis;
    // front ends surface this next to the data.
    static constexpr const char* kConditionalNote =
        "bound columns (f, e_n, lnq_G) are conditional on the configured "
        "constants; the R-vs-bound verdicts against exact counts are "
        "unconditional";

    std::string to_csv() const;
    std::string to_json() const;
    // gnuplot-style two-column trend data: n and e(n)/n
    std::string to_plot() const;
};

namespace detail {

inline std::string fmt(double v) { return tower::detail::fmt_double(v); }

// A readable scalar for log_q G when it fits in double range, the tower
// literal otherwise.
inline std::string lnq_g_text(const TowerReal& lnq_g) {
    const auto lo = lnq_g.lo_double();
    const auto hi = lnq_g.hi_double();
    if (lo && hi) return fmt(0.5 * (*lo + *hi));
    return tower::to_string(lnq_g);
}

inline TowerReal bigint_to_tower(const BigInt& v) {
    const double d = v.convert_to<double>();
    const double inf = std::numeric_limits<double>::infinity();
    return TowerReal::from_interval(std::nextafter(std::nextafter(d, -inf), -inf),
                                    std::nextafter(std::nextafter(d, inf), inf));
}

}  // namespace detail

// Per-n bound evaluations over a sorted grid, with verdicts against
// exact counts where a table is supplied. Bound columns are conditional
// on the configured constants; the R <= G / R <= B verdicts against
// exact counts are the unconditional part.
inline BoundReport report(const std::vector<double>& grid, const BoundConfig& cfg,
                          const CountTable* counts = nullptr) {
    cfg.validate();
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i - 1] <= grid[i]))
            throw std::invalid_argument("report grid must be sorted ascending");

    using namespace tower;
    BoundReport rep;
    rep.q = cfg.q;
    KSequence ks(cfg);
    const TowerReal inv_lnq = TowerReal::from_interval(
        di_div(di_exact(1.0), di_log(di_exact(static_cast<double>(cfg.q)))));

    for (double n : grid) {
        BoundRow row;
        row.n = n;
        row.tau = tau(n, cfg, &ks);
        const TowerReal g = bound_G(n, cfg, &ks);
        row.lnq_G = mul(ln(g), inv_lnq);
        const bool have_fb = n > static_cast<double>(cfg.n0);
        if (have_fb) {
            row.f = f_exponent(n, cfg);
            row.e_n = bound_B_exponent(n, cfg);
        }
        if (counts && n >= 1.0 && n <= static_cast<double>(counts->n_max()) &&
            n == std::floor(n)) {
            row.r = counts->r(static_cast<int>(n));
            const TowerReal r_t = detail::bigint_to_tower(*row.r);
            row.verdict_G = cmp(r_t, g);
            if (have_fb) row.verdict_B = cmp(r_t, bound_B(n, cfg));
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find(',') == std::string::npos) return s;
    return '"' + s + '"';
}

}  // namespace detail

inline std::string BoundReport::to_csv() const {
    std::ostringstream out;
    out << "n,f,tau,e_n,lnq_G,R,verdict_G,verdict_B\n";
    for (const BoundRow& row : rows) {
        out << detail::fmt(row.n) << ',';
        if (row.f) out << detail::fmt(*row.f);
        out << ',' << row.tau << ',';
        if (row.e_n) out << detail::fmt(*row.e_n);
        out << ',' << detail::csv_field(detail::lnq_g_text(row.lnq_G)) << ',';
        if (row.r) out << row.r->str();
        out << ',';
        if (row.verdict_G) out << tower::to_string(*row.verdict_G);
        out << ',';
        if (row.verdict_B) out << tower::to_string(*row.verdict_B);
        out << '\n';
    }
    return out.str();
}

inline std::string BoundReport::to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const BoundRow& row : rows) {
        nlohmann::ordered_json obj;
        obj["n"] = row.n;
        obj["f"] = row.f ? nlohmann::ordered_json(*row.f) : nlohmann::ordered_json(nullptr);
        obj["tau"] = row.tau;
        obj["e_n"] = row.e_n ? nlohmann::ordered_json(*row.e_n) : nlohmann::ordered_json(nullptr);
        obj["lnq_G"] = detail::lnq_g_text(row.lnq_G);
        obj["R"] = row.r ? nlohmann::ordered_json(row.r->str()) : nlohmann::ordered_json(nullptr);
        obj["verdict_G"] = row.verdict_G ? nlohmann::ordered_json(tower::to_string(*row.verdict_G))
                                         : nlohmann::ordered_json(nullptr);
        obj["verdict_B"] = row.verdict_B ? nlohmann::ordered_json(tower::to_string(*row.verdict_B))
                                         : nlohmann::ordered_json(nullptr);
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

inline std::string BoundReport::to_plot() const {
    std::ostringstream out;
    out << "# n  e(n)/n\n";
    for (const BoundRow& row : rows)
        if (row.e_n) out << detail::fmt(row.n) << ' ' << detail::fmt(*row.e_n / row.n) << '\n';
    return out.str();
}

}  // namespace richbound::bounds
