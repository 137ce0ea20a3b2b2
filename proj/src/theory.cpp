#include "idhb/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace idhb {

namespace {

using I128 = __int128;

std::int64_t narrow(I128 v, const char* what) {
    if (v > static_cast<I128>(INT64_MAX) || v < static_cast<I128>(INT64_MIN))
        throw std::overflow_error(std::string("rational overflow in ") + what);
    return static_cast<std::int64_t>(v);
}

std::int64_t ipow(std::int64_t base, int exp) {
    std::int64_t v = 1;
    for (int i = 0; i < exp; ++i) v *= base;
    return v;
}

void check_nu_sorted(const std::vector<double>& nu) {
    if (!std::is_sorted(nu.begin(), nu.end()))
        throw std::invalid_argument("instance: nu must be nondecreasing");
}

} // namespace

// --- Rat -----------------------------------------------------------------------

Rat Rat::of(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    return Rat{n, d};
}

namespace {

I128 gcd128(I128 a, I128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        I128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

} // namespace

Rat Rat::operator+(const Rat& o) const {
    I128 n = static_cast<I128>(num) * o.den + static_cast<I128>(o.num) * den;
    I128 d = static_cast<I128>(den) * o.den;
    I128 g = gcd128(n, d); // reduce in 128 bits before narrowing
    if (g > 1) {
        n /= g;
        d /= g;
    }
    return Rat{narrow(n, "add"), narrow(d, "add")};
}

Rat Rat::operator-(const Rat& o) const { return *this + Rat{-o.num, o.den}; }

Rat Rat::operator*(const Rat& o) const {
    I128 n = static_cast<I128>(num) * o.num;
    I128 d = static_cast<I128>(den) * o.den;
    I128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    return Rat{narrow(n, "mul"), narrow(d, "mul")};
}

Rat Rat::operator/(const Rat& o) const {
    if (o.num == 0) throw std::domain_error("rational division by zero");
    return *this * Rat::of(o.den, o.num);
}

bool Rat::operator<(const Rat& o) const {
    return static_cast<I128>(num) * o.den < static_cast<I128>(o.num) * den;
}

// --- z_{ID-SH} -------------------------------------------------------------------

int ceil_log(int eta, std::int64_t n) {
    if (eta < 2) throw std::invalid_argument("ceil_log: eta must be >= 2");
    if (n < 1) throw std::invalid_argument("ceil_log: n must be >= 1");
    int L = 0;
    std::int64_t v = 1;
    while (v < n) {
        v *= eta;
        ++L;
    }
    return L;
}

namespace {

// max_{i=2..n} i * (1 + min{R, gamma^-1(max{eps/4, (nu_i - nu_1)/2})})
double inner_max(const std::vector<double>& nu, const Envelope& env, Level R,
                 int, double eps) {
    double best = 0.0;
    for (std::size_t i = 2; i <= nu.size(); ++i) {
        double y = std::max(eps / 4.0, (nu[i - 1] - nu[0]) / 2.0);
        Level pulls = envelope_inverse(env, y, R);
        double term = static_cast<double>(i) * (1.0 + static_cast<double>(pulls));
        best = std::max(best, term);
    }
    return best;
}

} // namespace

double z_id_sh(const InstanceSpec& spec) {
    if (spec.nu.size() < 2) throw std::domain_error("z_id_sh: need at least 2 arms");
    check_nu_sorted(spec.nu);
    if (spec.eps <= 0.0) throw std::domain_error("z_id_sh: eps must be > 0");
    std::int64_t n = static_cast<std::int64_t>(spec.nu.size());
    double factor = static_cast<double>(spec.eta) * ceil_log(spec.eta, n);
    return factor * inner_max(spec.nu, spec.envelope, spec.R, spec.eta, spec.eps);
}

double z_id_sh_bracket_form(const InstanceSpec& spec, std::int64_t bracket_pool) {
    if (spec.nu.size() < 2) throw std::domain_error("z_id_sh: need at least 2 arms");
    check_nu_sorted(spec.nu);
    if (bracket_pool < 1)
        throw std::invalid_argument("z_id_sh_bracket_form: pool must be >= 1");
    double factor = static_cast<double>(spec.eta) * ceil_log(spec.eta, bracket_pool);
    return factor * inner_max(spec.nu, spec.envelope, spec.R, spec.eta, spec.eps);
}

// --- pull-ratio closed forms ------------------------------------------------------

namespace {

void check_bound_args(std::int64_t n, std::int64_t n_tilde, int s, Level R, int eta) {
    if (eta < 2) throw std::invalid_argument("pull bound: eta must be >= 2");
    if (s < 0) throw std::invalid_argument("pull bound: s must be >= 0");
    if (n < 1) throw std::invalid_argument("pull bound: n must be >= 1");
    if (n_tilde < 0 || n_tilde > n)
        throw std::invalid_argument("pull bound: need 0 <= n_tilde <= n");
    if (R < 1) throw std::invalid_argument("pull bound: R must be >= 1");
}

Rat clamp01(const Rat& r) {
    if (r < Rat::whole(0)) return Rat::whole(0);
    if (Rat::whole(1) < r) return Rat::whole(1);
    return r;
}

// (s+1)(nR+eta^s)(eta-1) - (eta^{s+1}-1)(R+n): the common denominator core.
std::int64_t sh_lower_numerator(std::int64_t n, int s, Level R, int eta) {
    I128 sp = s + 1;
    I128 es = ipow(eta, s);
    I128 a = sp * (static_cast<I128>(n) * R + es) * (eta - 1);
    I128 b = (static_cast<I128>(es) * eta - 1) * (static_cast<I128>(R) + n);
    return narrow(a - b, "sh lower bound");
}

} // namespace

Rat sh_pull_lower_bound(std::int64_t n, int s, Level R, int eta) {
    check_bound_args(n, 0, s, R, eta);
    return Rat::of(sh_lower_numerator(n, s, R, eta), ipow(eta, s) * (eta - 1));
}

BoundFraction eid_pull_bound(std::int64_t n, std::int64_t n_tilde, int s, Level R,
                             int eta) {
    check_bound_args(n, n_tilde, s, R, eta);
    std::int64_t den = sh_lower_numerator(n, s, R, eta);
    if (den == 0)
        throw std::domain_error("eid_pull_bound: degenerate parameters "
                                "(SH lower bound is zero)");
    I128 sp = s + 1;
    I128 es = ipow(eta, s);
    I128 num = sp * (static_cast<I128>(n_tilde) * R + es) * (eta - 1) -
               (es * eta - 1) * (2 * static_cast<I128>(R) + n);
    Rat raw = Rat::whole(1) - Rat::of(narrow(num, "eid bound"), den);
    return BoundFraction{raw, clamp01(raw)};
}

BoundFraction pdid_pull_bound(std::int64_t n, std::int64_t n_tilde, int s, Level R,
                              int eta) {
    check_bound_args(n, n_tilde, s, R, eta);
    std::int64_t den = sh_lower_numerator(n, s, R, eta);
    if (den == 0)
        throw std::domain_error("pdid_pull_bound: degenerate parameters "
                                "(SH lower bound is zero)");
    I128 es = ipow(eta, s);
    I128 num = (eta - 1) * (static_cast<I128>(s + 1) * es + static_cast<I128>(R) * n_tilde) -
               (es * eta - 1) * (static_cast<I128>(R) + n);
    Rat raw = Rat::whole(1) - Rat::of(narrow(num, "pdid bound"), den);
    return BoundFraction{raw, clamp01(raw)};
}

// --- deepening budget condition ---------------------------------------------------

std::int64_t sample_size_for_confidence(double alpha, double delta) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("sample size: alpha must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("sample size: delta must lie in (0,1)");
    double q = std::log(delta) / std::log(1.0 - alpha);
    double nearest = std::round(q);
    if (std::abs(q - nearest) < 1e-12) q = nearest; // exact boundary, e.g. delta = 1-alpha
    return static_cast<std::int64_t>(std::ceil(q));
}

BudgetConditionResult deepening_budget_condition(int eta, Level R, double alpha, double delta,
                          const std::vector<std::vector<double>>& bracket_limits,
                          const Envelope& env, double eps) {
    if (eta < 2) throw std::invalid_argument("budget condition: eta must be >= 2");
    if (R < eta)
        throw std::domain_error("budget condition: R < eta makes log_eta(log_eta R) "
                                "nonpositive; the condition is not evaluable");
    if (eps <= 0.0) throw std::domain_error("budget condition: eps must be > 0");

    BudgetConditionResult res;
    res.sampling_branch = static_cast<double>(
        sample_size_for_confidence(alpha, delta) * (eta - 1) + 1);

    const int k_floor = ceil_log(eta, R + 1) - 1; // floor(log_eta R)
    const double ln_eta = std::log(static_cast<double>(eta));
    double gamma_bar = 0.0;
    double budget_sum = 0.0;
    for (std::size_t s = 0; s < bracket_limits.size(); ++s) {
        const auto& nu = bracket_limits[s];
        if (nu.size() < 2) continue;
        check_nu_sorted(nu);
        double m = inner_max(nu, env, R, eta, eps);
        gamma_bar = std::max(gamma_bar, m);
        budget_sum += static_cast<double>(eta) *
                      ceil_log(eta, static_cast<std::int64_t>(nu.size())) * m;
    }
    res.gamma_bar_inv = gamma_bar;
    res.budget_sum_exact = budget_sum;

    // log_eta(K!) computed in log space; K! overflows integers almost at once.
    const double K = static_cast<double>(k_floor) + 1.0;
    const double log_fact = std::lgamma(K + 1.0) / ln_eta;
    const double loglog = std::log(std::log(static_cast<double>(R)) / ln_eta) / ln_eta;
    res.budget_branch = static_cast<double>(eta) *
                        (loglog + 4.0 + static_cast<double>(k_floor) / 2.0 - log_fact / K) *
                        gamma_bar;
    res.holds = static_cast<double>(R) >= res.sampling_branch &&
                static_cast<double>(R) >= res.budget_branch;
    return res;
}

BoundReport make_bound_report(const InstanceSpec& spec, double alpha, double delta) {
    BoundReport rep;
    rep.z_id_sh = z_id_sh(spec);
    std::int64_t n = static_cast<std::int64_t>(spec.nu.size());
    BoundFraction e = eid_pull_bound(n, spec.n_tilde, spec.rounds, spec.R, spec.eta);
    BoundFraction pd = pdid_pull_bound(n, spec.n_tilde, spec.rounds, spec.R, spec.eta);
    rep.eid_fraction_raw = e.raw.value();
    rep.eid_fraction_clamped = e.clamped.value();
    rep.pdid_fraction_raw = pd.raw.value();
    rep.pdid_fraction_clamped = pd.clamped.value();
    BudgetConditionResult cond = deepening_budget_condition(
        spec.eta, spec.R, alpha, delta, {spec.nu}, spec.envelope, spec.eps);
    rep.min_size_terms = {cond.sampling_branch, cond.budget_branch};
    rep.gamma_bar_inv = cond.gamma_bar_inv;
    return rep;
}

} // namespace idhb
