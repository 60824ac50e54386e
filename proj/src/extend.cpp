#include "carleman/extend.hpp"

#include "carleman/detail/parallel.hpp"
#include "carleman/errors.hpp"
#include "carleman/fit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace carleman {

using cd = std::complex<double>;

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();
constexpr double eps = std::numeric_limits<double>::epsilon();

// e^x - 1 without cancellation for small |x|
cd cexpm1(cd x)
{
    const double s = std::sin(0.5 * x.imag());
    return {std::expm1(x.real()) * std::cos(x.imag()) - 2 * s * s, std::exp(x.real()) * std::sin(x.imag())};
}

// exp(l) with l = log|v| + i arg v; 0 for l = -inf
cd cexp_log(cd l)
{
    if (l.real() == neg_inf)
        return 0.0;
    return std::polar(std::exp(l.real()), l.imag());
}

cd clog_nonzero(cd v) { return v == cd(0.0) ? cd(neg_inf, 0.0) : std::log(v); }

double log_norm(const Jet& l)
{
    double m = neg_inf;
    for (int j = 0; j < l.size(); ++j)
        if (l.lambda[j] != cd(0.0))
            m = std::max(m, std::log(std::abs(l.lambda[j])) - log_jet_weight(l, j));
    return m;
}

double log_weight(const WeightSequence& M, double sigma, int j)
{
    return j * std::log(sigma) + std::lgamma(j + 1.0) + M.log_M(j);
}

// sum_j lambda_j w^j/j! u_j(w), with u_j - 1 in place of u_j for j < n_sub
Remainder damped_sum(const ExtensionHandle& h, const SectorPoint& w, int n_sub)
{
    const cd lw = w.log();
    Remainder s{0.0, 0.0};
    for (int j = 0; j < h.jet.size(); ++j) {
        const cd lam = h.jet.lambda[j];
        if (lam == cd(0.0))
            continue;
        // w_j = (b_j/w)^{1/gamma'}, Re w_j > 0 on the sector
        const cd lW = (h.log_b[j] - lw) / h.gamma_prime;
        const double reW = std::exp(lW.real()) * std::cos(lW.imag());
        cd u;
        if (j < n_sub)
            u = reW > 800.0 ? cd(0.0) : -std::exp(-std::exp(lW));
        else
            u = reW > 800.0 ? cd(1.0) : -cexpm1(-std::exp(lW));
        const cd t = lam * cexp_log(double(j) * lw - std::lgamma(j + 1.0)) * u;
        s.value += t;
        s.scale += std::abs(t);
    }
    return s;
}

void check_schedule(std::span<const double> r)
{
    if (r.size() < 5)
        throw InputError("z schedule needs at least 5 radii");
    for (double v : r)
        if (!(v > 0.0) || !std::isfinite(v))
            throw InputError("z schedule radii must be positive");
    const double rho = r[0] / r[1];
    if (!(rho > 1.0))
        throw InputError("z schedule must be strictly decreasing");
    for (std::size_t k = 1; k < r.size(); ++k)
        if (std::abs(r[k - 1] / r[k] - rho) > 1e-9 * rho)
            throw InputError("z schedule must be geometric");
    if (std::log10(r.front() / r.back()) < 3.0 - 1e-9)
        throw InputError("z schedule must span at least 3 decades");
}

struct Envelope {
    double log_C, log_d;
};

Envelope remainder_envelope(const std::vector<std::vector<Remainder>>& T, const Jet& l, std::span<const double> r,
                            int N_max, int stride)
{
    std::vector<double> e(N_max + 1, neg_inf);
    for (int N = 0; N <= N_max; ++N) {
        const double w = log_weight(l.M, l.sigma, N);
        for (std::size_t k = 0; k < r.size(); k += stride) {
            const cd v = T[N + 1][k].value;
            if (v != cd(0.0))
                e[N] = std::max(e[N], std::log(std::abs(v)) - w - N * std::log(r[k]));
        }
    }
    double lo = std::numeric_limits<double>::infinity();
    for (double v : e)
        if (std::isfinite(v))
            lo = std::min(lo, v);
    if (!std::isfinite(lo))
        return {neg_inf, 0.0}; // remainder vanishes identically
    // R_1 == 0 satisfies any bound; anchor order 0 at the smallest finite entry
    if (!std::isfinite(e[0]))
        e[0] = lo;
    auto f = fit_geometric_envelope(e);
    return {f.log_C, f.log_d};
}

double rel_change(double a, double b)
{
    if (a == b)
        return 0.0;
    if (!std::isfinite(a) || !std::isfinite(b))
        return std::numeric_limits<double>::infinity();
    return std::abs(std::expm1(b - a));
}

} // namespace

Jet::Jet(std::vector<cd> l, WeightSequence m, double s) : lambda(std::move(l)), M(std::move(m)), sigma(s)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw InputError("jet sigma must be positive");
    if (size() > M.j_max() + 1)
        throw InputError("jet has " + std::to_string(size()) + " entries, weight table stores " +
                         std::to_string(M.j_max() + 1));
    for (cd v : lambda)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw InputError("jet coefficients must be finite");
}

double log_jet_weight(const Jet& l, int j) { return log_weight(l.M, l.sigma, j); }

double jet_norm(const Jet& l)
{
    const double m = log_norm(l);
    return m == neg_inf ? 0.0 : std::exp(m);
}

TwoIndexJet complexify(const Jet& l)
{
    static const cd ipow[4] = {1.0, cd(0, 1), -1.0, cd(0, -1)};
    TwoIndexJet c{{}, l.M, l.sigma};
    for (int j = 0; j < l.size(); ++j) {
        std::vector<cd> row;
        for (int k = 0; j + k < l.size(); ++k)
            row.push_back(ipow[k % 4] * l.lambda[j + k]);
        c.c.push_back(std::move(row));
    }
    return c;
}

double two_index_norm(const TwoIndexJet& c)
{
    double m = neg_inf;
    for (std::size_t j = 0; j < c.c.size(); ++j)
        for (std::size_t k = 0; k < c.c[j].size(); ++k)
            if (c.c[j][k] != cd(0.0))
                m = std::max(m, std::log(std::abs(c.c[j][k])) - log_weight(c.M, c.sigma, int(j + k)));
    return m == neg_inf ? 0.0 : std::exp(m);
}

Jet ramify_jet(const Jet& l, int q)
{
    if (q < 2)
        throw InputError("ramification order q must be >= 2");
    WeightSequence Mq = power(l.M, 1.0 / q);
    const int len = std::min(q * std::max(l.size() - 1, 0) + 1, Mq.j_max() + 1);
    std::vector<cd> out(l.size() == 0 ? 0 : len, 0.0);
    for (int j = 0; q * j < len && j < l.size(); ++j) {
        if (l.lambda[j] == cd(0.0))
            continue;
        const double f = std::lgamma(q * j + 1.0) - std::lgamma(j + 1.0);
        out[q * j] = l.lambda[j] * std::exp(f);
        if (!std::isfinite(std::abs(out[q * j])))
            throw NumericError("ramified coefficient " + std::to_string(q * j) + " overflows");
    }
    Jet r(std::move(out), std::move(Mq), std::pow(l.sigma, 1.0 / q));
    const double a = log_norm(r), b = log_norm(l);
    if (a > b + 1e-12 * (1 + std::abs(b)))
        throw NumericError("ramified jet norm exceeds the source norm (weight sequence not log-convex?)");
    return r;
}

ExtensionHandle extend_damped(const Jet& l, double gamma, const GammaEstimate& est, const ExtendParams& p)
{
    if (!(gamma > 0.0))
        throw InputError("gamma must be positive");
    if (gamma >= 2.0)
        throw InputError("gamma >= 2: use extend_ramified");
    if (!(gamma < est.gamma_hat))
        throw InputError("gamma must be below the growth index estimate " + std::to_string(est.gamma_hat));
    const double gp = p.gamma_prime > 0.0 ? p.gamma_prime : 0.5 * (gamma + est.gamma_hat);
    if (!(gp > gamma && gp < est.gamma_hat))
        throw InputError("gamma' must lie strictly between gamma and gamma_hat");
    if (p.J_ext < 0 || p.J_ext > l.M.j_max())
        throw InputError("J_ext must be in [0, J_max of M]");
    std::vector<double> lb = p.log_b;
    if (lb.empty()) {
        for (int j = 0; j <= p.J_ext; ++j)
            lb.push_back(-gp * (j * std::log(l.sigma) + l.M.log_M(j)));
    } else if (static_cast<int>(lb.size()) < p.J_ext + 1) {
        throw InputError("log_b needs J_ext + 1 entries");
    }
    const bool trunc = l.size() > p.J_ext + 1;
    std::vector<cd> kept(l.lambda.begin(), l.lambda.begin() + std::min(l.size(), p.J_ext + 1));
    Jet stored(std::move(kept), l.M, l.sigma);
    return ExtensionHandle{l, gamma, 1, std::move(stored), gp, p.J_ext, trunc, std::move(lb)};
}

ExtensionHandle extend_ramified(const Jet& l, double gamma, const GammaEstimate& est, const ExtendParams& p)
{
    if (gamma < 2.0)
        throw InputError("gamma < 2: use extend_damped");
    if (!(gamma < est.gamma_hat))
        throw InputError("gamma must be below the growth index estimate " + std::to_string(est.gamma_hat));
    const int q = p.q > 0 ? p.q : static_cast<int>(std::floor(gamma / 2.0)) + 1;
    if (q < 2 || !(gamma / q < 2.0))
        throw InputError("ramification order q must satisfy q >= 2 and gamma/q < 2");
    GammaEstimate inner_est = est;
    inner_est.gamma_hat /= q;
    inner_est.lo /= q;
    inner_est.hi /= q;
    ExtendParams ip = p;
    ip.q = 0;
    ExtensionHandle h = extend_damped(ramify_jet(l, q), gamma / q, inner_est, ip);
    h.source = l;
    h.gamma = gamma;
    h.q = q;
    return h;
}

ExtensionHandle extend(const Jet& l, double gamma, const GammaEstimate& est, const ExtendParams& p)
{
    return gamma < 2.0 ? extend_damped(l, gamma, est, p) : extend_ramified(l, gamma, est, p);
}

cd ExtensionHandle::operator()(const SectorPoint& z) const
{
    return damped_sum(*this, q > 1 ? power_map(z, 1.0 / q) : z, 0).value;
}

cd ExtensionHandle::remainder(const SectorPoint& z, int N) const { return remainder_scaled(z, N).value; }

Remainder ExtensionHandle::remainder_scaled(const SectorPoint& z, int N) const
{
    if (N < 0 || q * N > J_ext + 1)
        throw InputError("remainder order beyond the extension's truncation");
    return damped_sum(*this, q > 1 ? power_map(z, 1.0 / q) : z, q * N);
}

RemainderFn direct_remainder(std::function<cd(const SectorPoint&)> f, const Jet& l)
{
    return [f = std::move(f), lam = l.lambda](const SectorPoint& z, int N) {
        const cd fz = f(z);
        Remainder r{fz, std::abs(fz)};
        for (int j = 0; j < std::min<int>(N, lam.size()); ++j) {
            const cd t = lam[j] * cexp_log(double(j) * z.log() - std::lgamma(j + 1.0));
            r.value -= t;
            r.scale += std::abs(t);
        }
        return r;
    };
}

std::vector<std::vector<Remainder>> remainder_table_serial(const RemainderFn& R, int N_count, double ray,
                                                           std::span<const double> radii)
{
    std::vector<std::vector<Remainder>> T(N_count, std::vector<Remainder>(radii.size()));
    for (std::size_t k = 0; k < radii.size(); ++k)
        for (int N = 0; N < N_count; ++N)
            T[N][k] = R(SectorPoint{std::log(radii[k]), ray}, N);
    return T;
}

std::vector<std::vector<Remainder>> remainder_table(const RemainderFn& R, int N_count, double ray,
                                                    std::span<const double> radii)
{
    std::vector<std::vector<Remainder>> T(N_count, std::vector<Remainder>(radii.size()));
    detail::parallel_for(static_cast<int>(radii.size()), [&](int k) {
        for (int N = 0; N < N_count; ++N)
            T[N][k] = R(SectorPoint{std::log(radii[k]), ray}, N);
    });
    return T;
}

AsymptoticsReport verify_asymptotics(const RemainderFn& R, const Jet& l, int N_max, double ray,
                                     std::span<const double> z_schedule)
{
    if (N_max < 0)
        throw InputError("N_max must be >= 0");
    check_schedule(z_schedule);
    const int K = static_cast<int>(z_schedule.size());
    const double rho = z_schedule[0] / z_schedule[1];
    const auto T = remainder_table(R, N_max + 2, ray, z_schedule);
    const double lnorm = log_norm(l);

    AsymptoticsReport rep;
    rep.ray = ray;
    rep.grid.assign(z_schedule.begin(), z_schedule.end());
    for (int N = 0; N <= N_max; ++N) {
        // g(z) = N! R_N(z)/z^N = lambda_N + c_1 z + c_2 z^2 + ..., with a rounding bound
        std::vector<cd> g(K);
        std::vector<double> noise(K);
        for (int k = 0; k < K; ++k) {
            const cd lz(std::log(z_schedule[k]), ray);
            const double lf = std::lgamma(N + 1.0) - N * lz.real();
            g[k] = cexp_log(lf + clog_nonzero(T[N][k].value) - double(N) * cd(0.0, ray));
            noise[k] = T[N][k].scale > 0.0 ? 4 * eps * std::exp(lf + std::log(T[N][k].scale)) : 0.0;
        }
        // two Richardson levels on (z, z/rho, z/rho^2); the weights sum to 5 in modulus
        std::vector<cd> C(K - 2);
        std::vector<double> Cn(K - 2);
        for (int k = 0; k + 2 < K; ++k) {
            cd b0 = (rho * g[k + 1] - g[k]) / (rho - 1), b1 = (rho * g[k + 2] - g[k + 1]) / (rho - 1);
            C[k] = (rho * rho * b1 - b0) / (rho * rho - 1);
            Cn[k] = 5 * std::max({noise[k], noise[k + 1], noise[k + 2]});
        }
        // neighbouring triples that agree beyond their rounding bound
        int best = 0;
        double spread = std::numeric_limits<double>::infinity();
        for (int k = 0; k + 1 < K - 2; ++k) {
            const double d = std::abs(C[k + 1] - C[k]) + Cn[k] + Cn[k + 1];
            if (d < spread) {
                spread = d;
                best = k;
            }
        }
        const cd est = C[best + 1];
        const cd truth = N < l.size() ? l.lambda[N] : cd(0.0);
        double nrm = std::abs(truth);
        if (lnorm != neg_inf)
            nrm = std::max(nrm, std::exp(lnorm + log_jet_weight(l, N)));
        const double err = std::abs(est - truth);
        rep.recovered.push_back(est);
        rep.per_order_error.push_back(nrm > 0.0 ? err / nrm : err);
        rep.best_radius.push_back(z_schedule[best]);
        rep.spread.push_back(spread);
        const bool ok = std::isfinite(spread) && spread <= 1e-6 * std::max(nrm, std::abs(est));
        const bool ok_zero = spread == 0.0;
        rep.converged.push_back(ok || ok_zero);
        if (!(ok || ok_zero) && rep.reason.empty()) {
            std::ostringstream s;
            s << "order " << N << ": extraction did not settle (spread " << spread << ")";
            rep.reason = s.str();
        }
    }
    auto full = remainder_envelope(T, l, z_schedule, N_max, 1);
    auto half = remainder_envelope(T, l, z_schedule, N_max, 2);
    rep.log_C = full.log_C;
    rep.log_d = full.log_d;
    rep.log_C_half = half.log_C;
    rep.log_d_half = half.log_d;
    rep.envelope_drift = std::max(rel_change(full.log_C, half.log_C), rel_change(full.log_d, half.log_d));
    return rep;
}

AsymptoticsReport verify_asymptotics(const ExtensionHandle& h, const Jet& l, int N_max, double ray,
                                     std::span<const double> z_schedule)
{
    if (!(std::abs(ray) < h.gamma * std::numbers::pi / 2))
        throw InputError("ray must lie inside S_gamma");
    if (h.q * (N_max + 1) > h.J_ext + 1)
        throw InputError("N_max beyond the extension's truncation");
    return verify_asymptotics([&h](const SectorPoint& z, int N) { return h.remainder_scaled(z, N); }, l, N_max,
                              ray, z_schedule);
}

std::vector<double> default_z_schedule()
{
    std::vector<double> r;
    for (int k = 0; k <= 36; ++k)
        r.push_back(0.1 * std::ldexp(1.0, -k));
    return r;
}

std::vector<cd> parse_jet_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::vector<cd> out;
    std::vector<bool> seen;
    int lineno = 0;
    auto fail = [&](const std::string& why) {
        throw InputError("jet CSV line " + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++lineno;
        line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }),
                   line.end());
        if (line.empty() || line[0] == '#')
            continue;
        if (out.empty() && line.rfind("j,", 0) == 0)
            continue; // header
        std::vector<std::string> f;
        std::size_t a = 0;
        for (std::size_t b; (b = line.find(',', a)) != std::string::npos; a = b + 1)
            f.push_back(line.substr(a, b - a));
        f.push_back(line.substr(a));
        if (f.size() != 3)
            fail("expected j,re_lambda,im_lambda");
        int j = -1;
        double re = 0, im = 0;
        auto num = [&](const std::string& s, auto& v) {
            auto r = std::from_chars(s.data(), s.data() + s.size(), v);
            if (r.ec != std::errc() || r.ptr != s.data() + s.size())
                fail("cannot parse '" + s + "'");
        };
        num(f[0], j);
        num(f[1], re);
        num(f[2], im);
        if (j < 0 || j > 100000)
            fail("index out of range");
        if (!std::isfinite(re) || !std::isfinite(im))
            fail("coefficient not finite");
        if (j >= static_cast<int>(out.size())) {
            out.resize(j + 1, 0.0);
            seen.resize(j + 1, false);
        }
        if (seen[j])
            fail("duplicate index " + std::to_string(j));
        seen[j] = true;
        out[j] = {re, im};
    }
    if (out.empty())
        throw InputError("jet CSV has no rows");
    return out;
}

} // namespace carleman
