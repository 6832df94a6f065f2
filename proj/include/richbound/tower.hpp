#pragma once

// Interval arithmetic for reals too large for floating point, in
// level-index form.
//
// A canonical scalar endpoint is a pair (h, r) with h a nonnegative
// integer, r in [0,1), and value E^h(r) where E = exp. The form is
// unique (height h covers [e^^(h-1), e^^h) for h >= 1, and [0,1) for
// h = 0), so comparing endpoints is exact lexicographic order, and exp
// and ln are exact height shifts. In particular e^^n is the exact point
// (n+1, 0) and ln* of an endpoint is h, or h-1 when r = 0.
//
// A TowerReal is a closed interval between two such endpoints, rounded
// outward: the mathematically exact value of every operation lies
// inside the returned interval. Comparisons certify an order only when
// intervals are disjoint and report Indeterminate otherwise; nothing is
// ever claimed that floating point cannot back up.
//
// When operand magnitudes are too far apart for a meaningful digit-level
// combination (say x + y with x around e^^5 and y around e), the
// dominant operand is widened minimally instead of combined exactly:
// the true result still lies inside, which is all the bound checks need.

#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace richbound::tower {

enum class Cmp3 { Less, Greater, Indeterminate };

inline const char* to_string(Cmp3 v) {
    switch (v) {
        case Cmp3::Less: return "less";
        case Cmp3::Greater: return "greater";
        default: return "indeterminate";
    }
}

namespace detail {

enum class Dir { Down, Up };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Values whose double image stays below exp(kExpGuard) are combined in
// plain (directed) double arithmetic; anything taller goes through the
// structural log/exp routes. exp(667) ~ 4.5e289.
inline constexpr double kExpGuard = 667.0;

inline double nudge(double x, Dir d, int ulps) {
    for (int i = 0; i < ulps; ++i)
        x = std::nextafter(x, d == Dir::Down ? -kInf : kInf);
    return x;
}

// glibc exp/log are well under 1 ulp off; two ulps of slack cover them.
inline double exp_d(double x, Dir d) {
    double v = nudge(std::exp(x), d, 2);
    return (d == Dir::Down && v < 0.0) ? 0.0 : v;
}
inline double log_d(double x, Dir d) { return nudge(std::log(x), d, 2); }
inline double add_d(double a, double b, Dir d) { return nudge(a + b, d, 1); }
inline double mul_d(double a, double b, Dir d) {
    double v = nudge(a * b, d, 1);
    return (d == Dir::Down && v < 0.0 && a >= 0.0 && b >= 0.0) ? 0.0 : v;
}

struct LevelIndex {
    std::uint32_t h = 0;
    double r = 0.0;  // [0, 1)
};

inline bool li_less(const LevelIndex& a, const LevelIndex& b) {
    return a.h != b.h ? a.h < b.h : a.r < b.r;
}
inline bool li_leq(const LevelIndex& a, const LevelIndex& b) { return !li_less(b, a); }
inline bool li_eq(const LevelIndex& a, const LevelIndex& b) {
    return a.h == b.h && a.r == b.r;
}
inline bool li_is_zero(const LevelIndex& a) { return a.h == 0 && a.r == 0.0; }

inline constexpr std::int64_t kMaxHeight = 1u << 30;

// Renormalizes an arbitrary (h, r) into canonical form, rounding in the
// given direction. r = 1 maps exactly to (h+1, 0); a residue below 0
// steps one level down through exp. Negative values clamp to 0 (all
// represented quantities are nonnegative; only down-rounded lower
// endpoints ever land there).
inline LevelIndex canonical(std::int64_t h, double r, Dir d) {
    if (!std::isfinite(r)) throw std::overflow_error("tower residue overflow");
    for (;;) {
        if (h > kMaxHeight) throw std::overflow_error("tower height overflow");
        if (r >= 1.0) {
            r = (r == 1.0) ? 0.0 : log_d(r, d);
            ++h;
        } else if (r < 0.0) {
            if (h == 0) {
                r = 0.0;
            } else {
                r = exp_d(r, d);
                --h;
            }
        } else {
            return LevelIndex{static_cast<std::uint32_t>(h), r};
        }
    }
}

inline LevelIndex from_double(double x, Dir d) { return canonical(0, x, d); }

// Directed double image, or nullopt when the value is too tall to trust
// in double arithmetic.
inline std::optional<double> to_double(const LevelIndex& li, Dir d) {
    double v = li.r;
    for (std::uint32_t k = 0; k < li.h; ++k) {
        if (v >= kExpGuard) return std::nullopt;
        v = exp_d(v, d);
    }
    return v;
}

// exp and ln are exact height shifts on canonical endpoints.
inline LevelIndex exp_li(const LevelIndex& a) {
    if (a.h + 1ull > static_cast<unsigned long long>(kMaxHeight))
        throw std::overflow_error("tower height overflow");
    return LevelIndex{a.h + 1, a.r};
}
inline LevelIndex ln_li(const LevelIndex& a) {
    assert(a.h >= 1);
    return LevelIndex{a.h - 1, a.r};
}

// value(li) + c for a modest signed constant c. For values beyond the
// double range the relative perturbation is folded one level down:
// ln(v + c) <= ln v + c/v and >= ln v + 2c/v for |c|/v <= 1/2.
inline LevelIndex add_const(const LevelIndex& li, double c, Dir d) {
    if (auto v = to_double(li, d)) return canonical(0, add_d(*v, c, d), d);
    if (d == Dir::Up && c <= 0.0) return li;
    if (d == Dir::Down && c >= 0.0) return li;
    // v >= exp(kExpGuard) ~ 4.5e289, so |c|/v <= |c| * 2.3e-290
    const double folded = (d == Dir::Up ? 1.0 : 2.0) * c * 2.3e-290;
    return exp_li(add_const(ln_li(li), folded, d));
}

// value(li) * f for a positive double factor.
inline LevelIndex scale_li(const LevelIndex& li, double f, Dir d) {
    if (f == 0.0 || li_is_zero(li)) return LevelIndex{};
    if (auto v = to_double(li, d)) {
        const double p = mul_d(*v, f, d);
        if (std::isfinite(p)) return canonical(0, p, d);
    }
    return exp_li(add_const(ln_li(li), log_d(f, d), d));
}

inline LevelIndex add_li(const LevelIndex& a, const LevelIndex& b, Dir d) {
    const auto va = to_double(a, d);
    const auto vb = to_double(b, d);
    if (va && vb) return canonical(0, add_d(*va, *vb, d), d);
    const bool a_big = li_less(b, a);
    const LevelIndex& big = a_big ? a : b;
    const LevelIndex& small = a_big ? b : a;
    if (li_is_zero(small)) return big;
    if (const auto vs = to_double(small, Dir::Up)) {
        // big is beyond double range, the addend is not
        if (d == Dir::Down) return big;
        return add_const(big, *vs, Dir::Up);
    }
    // both beyond double range: ln(x+y) = ln big + log1p(small/big), and
    // small/big = exp(ln small - ln big) is a plain double whenever the
    // ln parts are
    const LevelIndex lnb = ln_li(big);
    const LevelIndex lns = ln_li(small);
    if (d == Dir::Down) {
        const auto ls = to_double(lns, Dir::Down);
        const auto lb = to_double(lnb, Dir::Up);
        if (ls && lb) {
            const double bump = nudge(std::log1p(std::exp(*ls - *lb)), Dir::Down, 4);
            return exp_li(add_const(lnb, bump, Dir::Down));
        }
        return big;  // x + y >= big
    }
    double bump = 0.6931471805599454;  // ln 2 always covers small <= big
    const auto ls = to_double(lns, Dir::Up);
    const auto lb = to_double(lnb, Dir::Down);
    if (ls && lb) bump = nudge(std::log1p(std::exp(*ls - *lb)), Dir::Up, 4);
    return exp_li(add_const(lnb, bump, Dir::Up));
}

inline LevelIndex mul_li(const LevelIndex& a, const LevelIndex& b, Dir d) {
    if (li_is_zero(a) || li_is_zero(b)) return LevelIndex{};
    const auto va = to_double(a, d);
    const auto vb = to_double(b, d);
    if (va && vb) {
        const double p = mul_d(*va, *vb, d);
        if (std::isfinite(p)) return canonical(0, p, d);
    }
    if (a.h == 0) return scale_li(b, a.r, d);
    if (b.h == 0) return scale_li(a, b.r, d);
    return exp_li(add_li(ln_li(a), ln_li(b), d));
}

// a^b for a, b >= 0, computed at a specific corner; the caller picks the
// corner per monotonicity (a^b falls in b when a < 1).
inline LevelIndex pow_li(const LevelIndex& a, const LevelIndex& b, Dir d) {
    if (li_is_zero(b)) return LevelIndex{1, 0.0};  // a^0 = 1
    if (li_is_zero(a)) return LevelIndex{};        // 0^b = 0 for b > 0
    if (a.h == 1 && a.r == 0.0) return LevelIndex{1, 0.0};  // 1^b
    if (a.h == 0) {
        // base below 1: exponentiate through b * ln a (< 0)
        const double la = log_d(a.r, d == Dir::Down ? Dir::Down : Dir::Up);
        if (auto vb = to_double(b, d == Dir::Down ? Dir::Up : Dir::Down)) {
            const double t = mul_d(*vb, la, d);
            if (d == Dir::Down && t < -745.0) return LevelIndex{};
            return canonical(0, exp_d(t, d), d);
        }
        // enormous exponent: the power collapses toward 0
        return d == Dir::Down ? LevelIndex{} : LevelIndex{0, 1e-300};
    }
    return exp_li(mul_li(b, ln_li(a), d));
}

struct DInterval {
    double lo = 0.0;
    double hi = 0.0;
};

inline DInterval di_exact(double v) { return {v, v}; }
inline DInterval di_add(DInterval a, DInterval b) {
    return {add_d(a.lo, b.lo, Dir::Down), add_d(a.hi, b.hi, Dir::Up)};
}
inline DInterval di_sub(DInterval a, DInterval b) {
    return {nudge(a.lo - b.hi, Dir::Down, 1), nudge(a.hi - b.lo, Dir::Up, 1)};
}
inline DInterval di_mul(DInterval a, DInterval b) {
    const double c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    double lo = c[0], hi = c[0];
    for (double v : c) {
        lo = v < lo ? v : lo;
        hi = v > hi ? v : hi;
    }
    return {nudge(lo, Dir::Down, 1), nudge(hi, Dir::Up, 1)};
}
inline DInterval di_div(DInterval a, DInterval b) {
    if (b.lo <= 0.0 && b.hi >= 0.0)
        throw std::domain_error("interval division by an interval containing 0");
    const double c[4] = {a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi};
    double lo = c[0], hi = c[0];
    for (double v : c) {
        lo = v < lo ? v : lo;
        hi = v > hi ? v : hi;
    }
    return {nudge(lo, Dir::Down, 1), nudge(hi, Dir::Up, 1)};
}
inline DInterval di_log(DInterval a) {
    if (a.lo <= 0.0) throw std::domain_error("interval log of a nonpositive interval");
    return {log_d(a.lo, Dir::Down), log_d(a.hi, Dir::Up)};
}
inline DInterval di_exp(DInterval a) {
    return {exp_d(a.lo, Dir::Down), exp_d(a.hi, Dir::Up)};
}
inline DInterval di_sqrt(DInterval a) {
    if (a.lo < 0.0) throw std::domain_error("interval sqrt of a negative interval");
    return {nudge(std::sqrt(a.lo), Dir::Down, 1), nudge(std::sqrt(a.hi), Dir::Up, 1)};
}
// a^b for a > 0
inline DInterval di_pow(DInterval a, DInterval b) { return di_exp(di_mul(b, di_log(a))); }
inline Cmp3 di_cmp(DInterval a, DInterval b) {
    if (a.hi < b.lo) return Cmp3::Less;
    if (b.hi < a.lo) return Cmp3::Greater;
    return Cmp3::Indeterminate;
}

}  // namespace detail

using detail::DInterval;
using detail::di_add;
using detail::di_cmp;
using detail::di_div;
using detail::di_exact;
using detail::di_exp;
using detail::di_log;
using detail::di_mul;
using detail::di_pow;
using detail::di_sqrt;
using detail::di_sub;

class TowerReal {
public:
    TowerReal() = default;  // exact zero

    static TowerReal from_real(double x) {
        if (!std::isfinite(x) || x < 0.0)
            throw std::invalid_argument("TowerReal requires a finite nonnegative value");
        return TowerReal(detail::from_double(x, detail::Dir::Down),
                         detail::from_double(x, detail::Dir::Up));
    }

    static TowerReal from_interval(double lo, double hi) {
        if (!(lo <= hi)) throw std::invalid_argument("inverted interval");
        return TowerReal(detail::from_double(lo, detail::Dir::Down),
                         detail::from_double(hi, detail::Dir::Up));
    }

    static TowerReal from_interval(const DInterval& iv) { return from_interval(iv.lo, iv.hi); }

    static TowerReal zero() { return TowerReal(); }
    static TowerReal one() { return point({1, 0.0}); }
    // the exact point e = E^2(0)
    static TowerReal euler() { return point({2, 0.0}); }
    // the exact point e^^n = E^{n+1}(0)
    static TowerReal e_tower(std::uint32_t n) { return point({n + 1, 0.0}); }

    static TowerReal from_endpoints(const detail::LevelIndex& lo, const detail::LevelIndex& hi) {
        if (!detail::li_leq(lo, hi)) throw std::invalid_argument("inverted tower interval");
        return TowerReal(lo, hi);
    }

    const detail::LevelIndex& lo() const { return lo_; }
    const detail::LevelIndex& hi() const { return hi_; }
    bool is_point() const { return detail::li_eq(lo_, hi_); }
    std::uint32_t height() const { return hi_.h; }

    // Directed double images; nullopt when the endpoint exceeds ~4.5e289.
    std::optional<double> lo_double() const { return detail::to_double(lo_, detail::Dir::Down); }
    std::optional<double> hi_double() const { return detail::to_double(hi_, detail::Dir::Up); }

private:
    static TowerReal point(detail::LevelIndex li) { return TowerReal(li, li); }
    TowerReal(detail::LevelIndex lo, detail::LevelIndex hi) : lo_(lo), hi_(hi) {}

    detail::LevelIndex lo_{};
    detail::LevelIndex hi_{};
};

inline Cmp3 cmp(const TowerReal& x, const TowerReal& y) {
    if (detail::li_less(x.hi(), y.lo())) return Cmp3::Less;
    if (detail::li_less(y.hi(), x.lo())) return Cmp3::Greater;
    return Cmp3::Indeterminate;
}

inline TowerReal max(const TowerReal& x, const TowerReal& y) {
    return TowerReal::from_endpoints(
        detail::li_less(x.lo(), y.lo()) ? y.lo() : x.lo(),
        detail::li_less(x.hi(), y.hi()) ? y.hi() : x.hi());
}

inline TowerReal add(const TowerReal& x, const TowerReal& y) {
    return TowerReal::from_endpoints(detail::add_li(x.lo(), y.lo(), detail::Dir::Down),
                                     detail::add_li(x.hi(), y.hi(), detail::Dir::Up));
}

inline TowerReal mul(const TowerReal& x, const TowerReal& y) {
    return TowerReal::from_endpoints(detail::mul_li(x.lo(), y.lo(), detail::Dir::Down),
                                     detail::mul_li(x.hi(), y.hi(), detail::Dir::Up));
}

inline TowerReal exp(const TowerReal& x) {
    return TowerReal::from_endpoints(detail::exp_li(x.lo()), detail::exp_li(x.hi()));
}

inline TowerReal ln(const TowerReal& x) {
    if (x.lo().h == 0)
        throw std::domain_error("tower ln requires the whole interval to be >= 1");
    return TowerReal::from_endpoints(detail::ln_li(x.lo()), detail::ln_li(x.hi()));
}

// x^y; both operands nonnegative by representation. The corner for each
// endpoint follows monotonicity: the power falls in y when the base is
// below 1.
inline TowerReal pow(const TowerReal& x, const TowerReal& y) {
    const bool lo_small = x.lo().h == 0;
    const bool hi_small = x.hi().h == 0;
    return TowerReal::from_endpoints(
        detail::pow_li(x.lo(), lo_small ? y.hi() : y.lo(), detail::Dir::Down),
        detail::pow_li(x.hi(), hi_small ? y.lo() : y.hi(), detail::Dir::Up));
}

inline TowerReal pow(const TowerReal& x, double y) {
    if (!std::isfinite(y) || y < 0.0)
        throw std::invalid_argument("tower pow requires a finite nonnegative exponent");
    return pow(x, TowerReal::from_real(y));
}

// a^^n with a >= 1: a tower of n copies of a. Base e is exact at any
// height; other bases go through repeated pow.
inline TowerReal tetrate(const TowerReal& a, std::uint32_t n) {
    if (detail::li_less(a.lo(), detail::LevelIndex{1, 0.0}))
        throw std::domain_error("tetration requires base >= 1");
    if (a.is_point() && a.lo().h == 2 && a.lo().r == 0.0) return TowerReal::e_tower(n);
    TowerReal t = TowerReal::one();
    for (std::uint32_t i = 0; i < n; ++i) t = pow(a, t);
    return t;
}

// Enclosure of the integer ceiling: true ceil(x) lies in [x, x+1], and
// an exact integer ceiling is meaningless once endpoints live at tower
// heights, so the upper endpoint is just pushed up by one.
inline TowerReal ceil_enclosure(const TowerReal& x) {
    return TowerReal::from_endpoints(x.lo(),
                                     detail::add_const(x.hi(), 1.0, detail::Dir::Up));
}

// ln* of a double, by definition: 0 if x <= 1, else 1 + ln*(ln x).
inline int ln_star(double x) {
    int k = 0;
    while (x > 1.0) {
        x = std::log(x);
        ++k;
    }
    return k;
}

// ln* of an endpoint is exact: h when r > 0, h - 1 when r = 0 (h >= 1).
inline long long iter_log_endpoint(const detail::LevelIndex& li) {
    if (li.h == 0) return 0;
    return li.r > 0.0 ? li.h : static_cast<long long>(li.h) - 1;
}

// Exact ln* when both endpoints agree; nullopt (indeterminate) when the
// interval straddles a level boundary.
inline std::optional<long long> iter_log(const TowerReal& x) {
    const long long a = iter_log_endpoint(x.lo());
    const long long b = iter_log_endpoint(x.hi());
    if (a == b) return a;
    return std::nullopt;
}

// Certified containment of a double value (conservative: may report
// false within a few ulps of an endpoint).
inline bool contains(const TowerReal& x, double v) {
    return detail::li_leq(x.lo(), detail::from_double(v, detail::Dir::Down)) &&
           detail::li_leq(detail::from_double(v, detail::Dir::Up), x.hi());
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("bad number in tower literal: '" + std::string(s) + "'");
    return v;
}

}  // namespace detail

// Textual form: T(h; rlo, rhi) when endpoint heights agree, otherwise
// T(hlo; rlo | hhi; rhi). Residues round-trip exactly.
inline std::string to_string(const TowerReal& x) {
    using detail::fmt_double;
    if (x.lo().h == x.hi().h) {
        return "T(" + std::to_string(x.lo().h) + "; " + fmt_double(x.lo().r) + ", " +
               fmt_double(x.hi().r) + ")";
    }
    return "T(" + std::to_string(x.lo().h) + "; " + fmt_double(x.lo().r) + " | " +
           std::to_string(x.hi().h) + "; " + fmt_double(x.hi().r) + ")";
}

// Loose human rendering, e.g. "e^^3" for exact towers or
// "e^^4 - {0.12..0.13}" meaning residues at height 4.
inline std::string human_string(const TowerReal& x) {
    if (x.is_point() && x.lo().r == 0.0) {
        if (x.lo().h == 0) return "0";
        return "e^^" + std::to_string(x.lo().h - 1);
    }
    if (auto lo = x.lo_double()) {
        if (auto hi = x.hi_double(); hi && *hi <= 1e18)
            return "[" + detail::fmt_double(*lo) + ", " + detail::fmt_double(*hi) + "]";
    }
    return "e^^" + std::to_string(x.hi().h) + " - {" + detail::fmt_double(x.lo().r) + ".." +
           detail::fmt_double(x.hi().r) + " @h=" + std::to_string(x.lo().h) + "}";
}

inline TowerReal parse(std::string_view s) {
    auto fail = [&] { throw std::invalid_argument("bad tower literal: '" + std::string(s) + "'"); };
    auto skip_ws = [](std::string_view& v) {
        while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
        while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
    };
    std::string_view v = s;
    skip_ws(v);
    if (v.size() < 4 || v.substr(0, 2) != "T(" || v.back() != ')') fail();
    v = v.substr(2, v.size() - 3);

    auto parse_part = [&](std::string_view part, std::uint32_t& h, double& r) {
        const auto semi = part.find(';');
        if (semi == std::string_view::npos) fail();
        std::string_view hs = part.substr(0, semi), rs = part.substr(semi + 1);
        skip_ws(hs);
        skip_ws(rs);
        unsigned long hv = 0;
        auto res = std::from_chars(hs.data(), hs.data() + hs.size(), hv);
        if (res.ec != std::errc() || res.ptr != hs.data() + hs.size()) fail();
        h = static_cast<std::uint32_t>(hv);
        r = detail::parse_double(rs);
        if (r < 0.0 || r >= 1.0) fail();
    };

    detail::LevelIndex lo, hi;
    if (const auto bar = v.find('|'); bar != std::string_view::npos) {
        parse_part(v.substr(0, bar), lo.h, lo.r);
        parse_part(v.substr(bar + 1), hi.h, hi.r);
    } else {
        const auto semi = v.find(';');
        if (semi == std::string_view::npos) fail();
        std::string_view hs = v.substr(0, semi), rest = v.substr(semi + 1);
        const auto comma = rest.find(',');
        if (comma == std::string_view::npos) fail();
        skip_ws(hs);
        unsigned long hv = 0;
        auto res = std::from_chars(hs.data(), hs.data() + hs.size(), hv);
        if (res.ec != std::errc() || res.ptr != hs.data() + hs.size()) fail();
        std::string_view rlo = rest.substr(0, comma), rhi = rest.substr(comma + 1);
        skip_ws(rlo);
        skip_ws(rhi);
        lo.h = hi.h = static_cast<std::uint32_t>(hv);
        lo.r = detail::parse_double(rlo);
        hi.r = detail::parse_double(rhi);
        if (lo.r < 0.0 || lo.r >= 1.0 || hi.r < 0.0 || hi.r >= 1.0) fail();
    }
    return TowerReal::from_endpoints(lo, hi);
}

}  // namespace richbound::tower
