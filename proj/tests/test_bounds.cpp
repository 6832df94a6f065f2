#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "richbound/bounds.hpp"

using namespace richbound;
using namespace richbound::bounds;
using tower::Cmp3;
using tower::TowerReal;

namespace {

BoundConfig default_cfg() { return BoundConfig::defaults(2); }

}  // namespace

TEST_CASE("config validation") {
    CHECK_NOTHROW(default_cfg().validate());
    BoundConfig cfg = default_cfg();
    cfg.lambda = 1.2;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = default_cfg();
    cfg.lambda = 0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = default_cfg();
    cfg.q = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = default_cfg();
    cfg.delta = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = default_cfg();
    cfg.gamma = 0.9;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = default_cfg();
    cfg.c2 = 0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = default_cfg();
    cfg.c = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = default_cfg();
    cfg.k1 = TowerReal::from_real(1.0);
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = default_cfg();
    cfg.c6 = 0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("default n0 is the first n with ln*(q^(n/phi(n))) > 1") {
    // q = 2, phi = sqrt: need sqrt(n) ln 2 > 1, first at n = 3
    CHECK(BoundConfig::defaults(2).n0 == 3);
    // larger alphabets clear the bar immediately
    CHECK(BoundConfig::defaults(16).n0 == 1);
}

TEST_CASE("phi families map [1,inf) into [1,inf) and diverge") {
    for (const char* name : {"sqrt", "pow:0.3", "logshift", "overlog"}) {
        const PhiSpec phi = PhiSpec::parse(name);
        double prev_phi = 0.0, prev_ratio = 0.0;
        for (double x : {1.0, 10.0, 1e3, 1e6, 1e9, 1e12}) {
            const double v = phi(x);
            REQUIRE(v >= 1.0);
            REQUIRE(x / v >= prev_ratio * 0.999);  // x/phi keeps growing
            prev_ratio = x / v;
            REQUIRE(v >= prev_phi * 0.999);
            prev_phi = v;
        }
        CHECK(phi(1e12) > phi(10.0));
        CHECK(1e12 / phi(1e12) > 10.0 / phi(10.0));
    }
    CHECK_THROWS_AS(PhiSpec::parse("cubic"), std::invalid_argument);
    CHECK_THROWS_AS(PhiSpec::parse("pow:1.5"), std::invalid_argument);
    CHECK(PhiSpec::parse("pow:0.25").name() == "pow:0.25");
}

TEST_CASE("sigma") {
    CHECK_THROWS_AS(sigma(1.0, 1.0), std::invalid_argument);
    CHECK(sigma(3.0, 1.0) == Catch::Approx(3.0 / std::log(3.0)).epsilon(1e-12));
    CHECK(sigma(3.0, 1.0) == Catch::Approx(2.73072).margin(1e-4));
    CHECK(sigma(1e6, 1.0) == Catch::Approx(72382.41365).margin(1e-3));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unif(2.0, 1e8);
    for (int i = 0; i < 200; ++i) {
        const double n = unif(rng);
        const double c2 = 1.0 + (rng() % 100) / 10.0;
        REQUIRE(sigma(n, c2) == Catch::Approx(c2 * sigma(n, 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("bound_step") {
    const BoundConfig cfg = default_cfg();
    CHECK_THROWS_AS(bound_step(TowerReal::one(), 1.0, 100.0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(bound_step(TowerReal::one(), 2.0, 1.0, cfg), std::invalid_argument);

    // K = 1 kills the first factor; at n = 3 (ln 3 ~ 1) the remainder is
    // h^{(n+sigma)/2} within the small (ln 3)^{sigma} factor ~ 1.293
    const TowerReal step = bound_step(TowerReal::one(), 2.0, 3.0, cfg);
    const double expo = (3.0 + sigma(3.0, 1.0)) / 2.0;
    const TowerReal core = tower::pow(TowerReal::from_real(2.0), expo);
    CHECK(tower::cmp(step, core) == Cmp3::Greater);
    CHECK(tower::cmp(step, tower::mul(core, TowerReal::from_real(1.3))) == Cmp3::Less);

    // monotone nondecreasing in K
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(1.0, 50.0);
    for (int i = 0; i < 100; ++i) {
        double k1 = unif(rng), k2 = unif(rng);
        if (k2 < k1) std::swap(k1, k2);
        const double n = 2.0 + (rng() % 1000);
        const auto lo = bound_step(TowerReal::from_real(k1), 2.0, n, cfg);
        const auto hi = bound_step(TowerReal::from_real(k2), 2.0, n, cfg);
        REQUIRE(tower::cmp(lo, hi) != Cmp3::Greater);
    }

    // containment against an independent long-double log-domain evaluation
    const long double s = 100.0L / std::log(100.0L);
    const long double ln_ref = s * std::log(4.0L) +
                               (100.0L + s) / 2.0L * std::log(2.0L) +
                               s * std::log(std::log(100.0L));
    const double ref = static_cast<double>(std::exp(ln_ref));
    const TowerReal step2 = bound_step(TowerReal::from_real(4.0), 2.0, 100.0, cfg);
    CHECK(tower::contains(step2, ref));
}

TEST_CASE("lemma 1 equivalence: the two routes never contradict") {
    const BoundConfig cfg = default_cfg();
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> log_n(std::log(2.0), std::log(1e6));
    std::uniform_real_distribution<double> unif_alpha(1.0, 10.0);
    std::uniform_real_distribution<double> log_k(0.0, std::log(1e4));
    int determinate_pairs = 0;
    for (int i = 0; i < 150; ++i) {
        const double n = std::exp(log_n(rng));
        const double a = unif_alpha(rng);
        const double k = std::exp(log_k(rng));
        const auto v = lemma1_equivalence_check(n, a, k, cfg);
        if (v.tower_side != Cmp3::Indeterminate && v.scalar_side != Cmp3::Indeterminate) {
            REQUIRE(v.tower_side == v.scalar_side);
            ++determinate_pairs;
        }
    }
    CHECK(determinate_pairs >= 100);
}

TEST_CASE("lemma 1 at the anchor point n = 10 e^(alpha^delta ln K)") {
    // the inequality needs a steep configuration before double-range n can
    // satisfy it: lambda near 1/2 and delta = 3 work at alpha = 17, K = 1.15
    BoundConfig cfg = default_cfg();
    cfg.lambda = 0.55;
    cfg.delta = 3.0;
    const double alpha = 17.0, k = 1.15;
    const double n = 10.0 * std::exp(std::pow(alpha, cfg.delta) * std::log(k));
    REQUIRE(std::isfinite(n));
    const auto v = lemma1_equivalence_check(n, alpha, k, cfg);
    CHECK(v.tower_side == Cmp3::Less);   // inequality holds
    CHECK(v.scalar_side == Cmp3::Less);

    // small n with large K: false on both routes
    const auto w = lemma1_equivalence_check(3.0, 2.0, 100.0, default_cfg());
    CHECK(w.tower_side == Cmp3::Greater);
    CHECK(w.scalar_side == Cmp3::Greater);
}

TEST_CASE("alpha_j") {
    CHECK(alpha_j(1, 0.6) == 1.0);
    CHECK(alpha_j(3, 0.75) == Catch::Approx(2.25).epsilon(1e-12));
    CHECK_THROWS_AS(alpha_j(0, 0.75), std::invalid_argument);
    for (int j = 1; j < 20; ++j) CHECK(alpha_j(j + 1, 0.75) > alpha_j(j, 0.75));
}

TEST_CASE("beta/K ladder") {
    const BoundConfig cfg = default_cfg();
    const auto first = beta_k(1, cfg);
    CHECK(first.beta.is_point());
    CHECK(tower::cmp(first.beta, TowerReal::from_real(0.5)) == Cmp3::Greater);
    CHECK(tower::cmp(first.beta, TowerReal::from_real(1.5)) == Cmp3::Less);
    CHECK(tower::cmp(first.k, TowerReal::from_real(15.9)) == Cmp3::Greater);
    CHECK(tower::cmp(first.k, TowerReal::from_real(16.1)) == Cmp3::Less);

    // alpha_1 = 1 makes e^{ln K_1} = K_1 = 16 exactly; the interval ceiling
    // covers [16, 17]
    const auto second = beta_k(2, cfg);
    CHECK(tower::contains(second.beta, 16.0));
    CHECK(tower::contains(second.beta, 17.0));
    CHECK(tower::cmp(second.beta, TowerReal::from_real(15.99)) == Cmp3::Greater);
    CHECK(tower::cmp(second.beta, TowerReal::from_real(17.01)) == Cmp3::Less);
    CHECK(tower::cmp(second.k, TowerReal::from_real(65535.0)) == Cmp3::Greater);
    CHECK(tower::cmp(second.k, TowerReal::from_real(200000.0)) == Cmp3::Less);

    // ln* K_j is determinate and nondecreasing up to j = 6
    KSequence ks(cfg);
    long long prev = 0;
    for (int j = 1; j <= 6; ++j) {
        const auto ls = tower::iter_log(ks.k(j));
        REQUIRE(ls.has_value());
        REQUIRE(*ls >= prev);
        prev = *ls;
    }
}

TEST_CASE("ladder growth matches the iterated ln* inequality") {
    // ln* K_j <= 2 ln* q + ln* K_{j-1} + ln*(alpha_j^delta) + 1
    const BoundConfig cfg = default_cfg();
    KSequence ks(cfg);
    const long long lsq = tower::ln_star(static_cast<double>(cfg.q));
    for (int j = 2; j <= 6; ++j) {
        const auto cur = tower::iter_log(ks.k(j));
        const auto prev = tower::iter_log(ks.k(j - 1));
        REQUIRE(cur.has_value());
        REQUIRE(prev.has_value());
        const long long lsa =
            tower::ln_star(std::pow(alpha_j(j, cfg.lambda), cfg.delta));
        REQUIRE(*cur <= 2 * lsq + *prev + lsa + 1);
    }
}

TEST_CASE("tau") {
    const BoundConfig cfg = default_cfg();
    // q^{n/phi(n)} < K_1 = 16 for tiny n: tau = max{j : K_j <= K_1} = 1
    CHECK(tau(2.0, cfg) == 1);
    CHECK(tau(12.0, cfg) == 1);
    CHECK_THROWS_AS(tau(0.5, cfg), std::invalid_argument);

    // nondecreasing along a sampled grid
    int prev = 0;
    for (double n : {1.0, 4.0, 16.0, 256.0, 1e3, 1e4, 1e6, 1e9, 1e12, 1e15}) {
        const int t = tau(n, cfg);
        REQUIRE(t >= prev);
        prev = t;
    }

    // growth trend with the ladder brought closer: K_1 = q^2
    BoundConfig low = default_cfg();
    low.k1 = TowerReal::from_real(4.0);
    CHECK(tau(1e4, low) == 2);
    CHECK(tau(1e12, low) == 3);
    // and with the default ladder at a taller horizon
    CHECK(tau(1e4, cfg) == 2);
    CHECK(tau(1e24, cfg) == 3);
}

TEST_CASE("G dominates the exact counts at desk scale") {
    const BoundConfig cfg = default_cfg();
    const CountTable counts = count_rich(2, 12);
    for (int n = 1; n <= 12; ++n) {
        const TowerReal g = bound_G(static_cast<double>(n), cfg);
        const TowerReal r = TowerReal::from_real(counts.r(n).convert_to<double>());
        REQUIRE(tower::cmp(r, g) != Cmp3::Greater);
        // G(n) >= q^{n/alpha_tau} since K >= 1
        const int t = tau(static_cast<double>(n), cfg);
        const TowerReal qpart = tower::pow(
            TowerReal::from_real(2.0), static_cast<double>(n) / alpha_j(t, cfg.lambda));
        REQUIRE(tower::cmp(g, qpart) != Cmp3::Less);
    }
}

TEST_CASE("corollary chain: R(n) <= K_j q^{n/alpha_j} for every j") {
    const BoundConfig cfg = default_cfg();
    const CountTable counts = count_rich(2, 12);
    KSequence ks(cfg);
    for (int j = 1; j <= 5; ++j) {
        for (int n = 1; n <= 12; ++n) {
            const TowerReal bound = tower::mul(
                ks.k(j), tower::pow(TowerReal::from_real(2.0),
                                    static_cast<double>(n) / alpha_j(j, cfg.lambda)));
            const TowerReal r = TowerReal::from_real(counts.r(n).convert_to<double>());
            REQUIRE(tower::cmp(r, bound) != Cmp3::Greater);
        }
    }
}

TEST_CASE("K_tau stays below q^{n/phi(n)} once that exceeds K_1") {
    const BoundConfig cfg = default_cfg();
    KSequence ks(cfg);
    for (double n : {100.0, 1e3, 1e4, 1e6, 1e9, 1e12}) {
        const TowerReal cap = tower::pow(
            TowerReal::from_real(2.0),
            TowerReal::from_interval(tower::di_div(
                tower::di_exact(n), cfg.phi.eval(tower::di_exact(n)))));
        if (tower::cmp(cap, cfg.k1) != Cmp3::Greater) continue;
        const int t = tau(n, cfg, &ks);
        REQUIRE(tower::cmp(ks.k(t), cap) != Cmp3::Greater);
    }
}

TEST_CASE("f exponent") {
    const BoundConfig cfg = default_cfg();
    CHECK_THROWS_AS(f_exponent(3.0, cfg), std::invalid_argument);
    CHECK(f_exponent(1e6, cfg) == Catch::Approx(std::sqrt(3.0)).epsilon(1e-12));

    double prev = 0.0;
    for (double n : {1e3, 1e6, 1e9, 1e12}) {
        const double f = f_exponent(n, cfg);
        REQUIRE(f >= prev);
        prev = f;
    }

    // c -> 8c multiplies f by 2 at gamma = 3
    BoundConfig g3 = default_cfg();
    g3.gamma = 3.0;
    BoundConfig g3c8 = g3;
    g3c8.c = 8.0;
    for (double n : {1e4, 1e8, 1e12})
        REQUIRE(f_exponent(n, g3c8) ==
                Catch::Approx(2.0 * f_exponent(n, g3)).epsilon(1e-12));
}

TEST_CASE("B exponent") {
    const BoundConfig cfg = default_cfg();
    CHECK_THROWS_AS(bound_B_exponent(2.0, cfg), std::invalid_argument);
    CHECK(bound_B_exponent(1e6, cfg) == Catch::Approx(744176.9846793421).epsilon(1e-9));

    // e(n)/n = 1/phi(n) + (2 lambda)^{1 - f(n)} exactly
    for (double n : {1e3, 1e5, 1e7, 1e10}) {
        const double lhs = bound_B_exponent(n, cfg) / n;
        const double rhs = 1.0 / cfg.phi(n) +
                           std::pow(2.0 * cfg.lambda, 1.0 - f_exponent(n, cfg));
        REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-12));
    }

    // subexponential trend proxy
    CHECK(bound_B_exponent(1e12, cfg) / 1e12 < bound_B_exponent(1e6, cfg) / 1e6);
}

TEST_CASE("B dominates the exact counts at desk scale") {
    const BoundConfig cfg = default_cfg();
    const CountTable counts = count_rich(2, 12);
    for (int n = static_cast<int>(cfg.n0) + 1; n <= 12; ++n) {
        const TowerReal b = bound_B(static_cast<double>(n), cfg);
        const TowerReal r = TowerReal::from_real(counts.r(n).convert_to<double>());
        REQUIRE(tower::cmp(r, b) != Cmp3::Greater);
    }
}

TEST_CASE("fit_c6") {
    const BoundConfig cfg = default_cfg();
    const double c6 = fit_c6(5, cfg);
    // j = 1 forces c6 >= ln* K_1 = ln* 16 = 3; later j are slack at gamma = 2
    CHECK(c6 == 3.0);
    CHECK(c6 >= static_cast<double>(*tower::iter_log(cfg.k1)));

    // post-hoc: K_j <= e^^(ceil(c6 j^gamma))
    KSequence ks(cfg);
    for (int j = 1; j <= 5; ++j) {
        const auto height = static_cast<std::uint32_t>(
            std::ceil(c6 * std::pow(double(j), cfg.gamma)));
        REQUIRE(tower::cmp(ks.k(j), tower::tetrate(TowerReal::euler(), height)) !=
                Cmp3::Greater);
    }

    // more constraints never shrink the fit
    double prev = 0.0;
    for (int J = 1; J <= 6; ++J) {
        const double v = fit_c6(J, cfg);
        REQUIRE(v >= prev);
        prev = v;
    }
    CHECK_THROWS_AS(fit_c6(0, cfg), std::invalid_argument);
}

TEST_CASE("report") {
    const BoundConfig cfg = default_cfg();
    CHECK(report({}, cfg).rows.empty());
    CHECK_THROWS_AS(report({10.0, 5.0}, cfg), std::invalid_argument);

    const CountTable counts = count_rich(2, 12);
    std::vector<double> grid;
    for (int n = 1; n <= 12; ++n) grid.push_back(n);
    const BoundReport rep = report(grid, cfg, &counts);
    REQUIRE(rep.rows.size() == 12);
    for (const auto& row : rep.rows) {
        REQUIRE(row.r.has_value());
        REQUIRE(row.verdict_G.has_value());
        REQUIRE(*row.verdict_G != Cmp3::Greater);
        if (row.n > static_cast<double>(cfg.n0)) {
            REQUIRE(row.f.has_value());
            REQUIRE(row.e_n.has_value());
            REQUIRE(row.verdict_B.has_value());
            REQUIRE(*row.verdict_B != Cmp3::Greater);
        } else {
            REQUIRE_FALSE(row.f.has_value());
            REQUIRE_FALSE(row.verdict_B.has_value());
        }
    }

    const std::string csv = rep.to_csv();
    CHECK(csv.rfind("n,f,tau,e_n,lnq_G,R,verdict_G,verdict_B\n", 0) == 0);
    CHECK(csv.find("less") != std::string::npos);

    const auto js = nlohmann::json::parse(rep.to_json());
    REQUIRE(js.is_array());
    REQUIRE(js.size() == 12);
    CHECK(js[0]["R"].get<std::string>() == "2");
    CHECK(js[0]["f"].is_null());  // n = 1 <= n0

    // trend columns over the big grid
    const BoundReport trend = report({1e3, 1e4, 1e5, 1e6, 1e9, 1e12}, cfg);
    double prev_en = std::numeric_limits<double>::infinity();
    double prev_g = std::numeric_limits<double>::infinity();
    for (const auto& row : trend.rows) {
        REQUIRE(row.e_n.has_value());
        const double en_over_n = *row.e_n / row.n;
        REQUIRE(en_over_n < prev_en);
        prev_en = en_over_n;
        const auto glo = row.lnq_G.lo_double();
        const auto ghi = row.lnq_G.hi_double();
        REQUIRE(glo);
        REQUIRE(ghi);
        const double g_over_n = 0.5 * (*glo + *ghi) / row.n;
        REQUIRE(g_over_n < prev_g);
        prev_g = g_over_n;
    }

    const std::string plot = trend.to_plot();
    CHECK(plot.rfind("# n  e(n)/n\n", 0) == 0);
    CHECK(std::count(plot.begin(), plot.end(), '\n') == 7);  // header + 6 rows
}
