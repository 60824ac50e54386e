#include "carleman/divide.hpp"

#include "carleman/detail/parallel.hpp"
#include "carleman/errors.hpp"
#include "carleman/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <random>

namespace carleman {

using cd = std::complex<double>;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// O(h^2) central stencils for d^m/dx^m, offsets -2..2
constexpr double stencil[5][5] = {
    {0, 0, 1, 0, 0},
    {0, -0.5, 0, 0.5, 0},
    {0, 1, -2, 1, 0},
    {-0.5, 1, 0, -1, 0.5},
    {1, -4, 6, -4, 1},
};

double log_weight(const WeightSequence& M, int k) { return std::lgamma(k + 1.0) + M.log_M(k); }

std::vector<std::vector<double>> normal_directions(const SubspaceSpec& spec)
{
    if (spec.k == 1)
        return {{1.0}, {-1.0}};
    std::vector<std::vector<double>> d;
    for (int i = 0; i < 3; ++i)
        d.push_back({std::cos(2 * std::numbers::pi * i / 3), std::sin(2 * std::numbers::pi * i / 3)});
    return d;
}

// derivative tables of one field over the grid
struct FieldDerivs {
    std::vector<std::vector<double>> D; // [point][multi-index]
};

FieldDerivs derivs_on_grid(const LogField& f, std::span<const std::vector<double>> grid, std::span<const double> dist,
                           int order_max)
{
    FieldDerivs r;
    r.D.resize(grid.size());
    detail::parallel_for(static_cast<int>(grid.size()),
                         [&](int i) { r.D[i] = log_fd_derivatives(f, grid[i], order_max, dist[i]).log_abs; });
    return r;
}

// e_k = max over the selected points and |K| = k of D - L_k - H
std::vector<double> order_maxima(const FieldDerivs& F, const std::vector<std::vector<int>>& multi,
                                 const std::vector<double>& L, const std::vector<double>& H,
                                 const std::vector<bool>& use, int order_max)
{
    std::vector<double> e(order_max + 1, -inf);
    for (std::size_t i = 0; i < F.D.size(); ++i) {
        if (!use[i])
            continue;
        for (std::size_t m = 0; m < multi.size(); ++m) {
            int k = 0;
            for (int v : multi[m])
                k += v;
            if (std::isfinite(F.D[i][m]))
                e[k] = std::max(e[k], F.D[i][m] - L[k] - H[i]);
        }
    }
    return e;
}

int degree(const std::vector<int>& K)
{
    int k = 0;
    for (int v : K)
        k += v;
    return k;
}

} // namespace

SubspaceSpec::SubspaceSpec(int n_, int k_) : n(n_), k(k_)
{
    if (k < 1 || k > n)
        throw InputError("subspace codimension k must satisfy 1 <= k <= n");
    if (n > 3 || k > 2)
        throw InputError("desk scale: n <= 3 and k <= 2");
}

double phi(std::span<const double> x, const SubspaceSpec& spec)
{
    if (static_cast<int>(x.size()) != spec.n)
        throw InputError("point dimension does not match n");
    double s = 0.0;
    for (int i = 0; i < spec.k; ++i)
        s += x[i] * x[i];
    return std::sqrt(s);
}

cd Q(std::span<const cd> zeta, const SubspaceSpec& spec)
{
    if (static_cast<int>(zeta.size()) != spec.n)
        throw InputError("point dimension does not match n");
    cd s = 0.0;
    for (int i = 0; i < spec.k; ++i)
        s += zeta[i] * zeta[i];
    return s;
}

double complex_dist(std::span<const cd> zeta, const SubspaceSpec& spec)
{
    if (static_cast<int>(zeta.size()) != spec.n)
        throw InputError("point dimension does not match n");
    double s = 0.0;
    for (int i = 0; i < spec.n; ++i)
        s += (i < spec.k ? zeta[i].real() * zeta[i].real() : 0.0) + zeta[i].imag() * zeta[i].imag();
    return std::sqrt(s);
}

double epsilon_select(const SubspaceSpec& spec, double delta)
{
    if (!(delta > 0.0 && delta < 1.0))
        throw InputError("delta must lie in (0, 1)");
    const double c = std::cos(delta * std::numbers::pi / 2);
    for (int m = 1; m < 4000; ++m) {
        const double e = std::exp2(-m / 16.0);
        if (1 - e * e - 2 * spec.k * e > c)
            return e;
    }
    throw NumericError("no admissible epsilon above 2^-250");
}

RealpartCheck realpart_check(const SubspaceSpec& spec, double eps, int samples, std::uint64_t seed)
{
    if (!(eps > 0.0 && eps < 1.0))
        throw InputError("epsilon must lie in (0, 1)");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1, 1), U01(0, 1);
    std::normal_distribution<double> G;
    RealpartCheck r;
    r.min_margin = inf;
    const double bound = 1 - eps * eps - 2 * spec.k * eps;
    std::vector<cd> z(spec.n);
    while (r.samples < samples) {
        double a2 = 0.0, e2 = 0.0;
        std::vector<double> eta(spec.n);
        for (int i = 0; i < spec.n; ++i) {
            z[i] = U(rng);
            eta[i] = G(rng);
            e2 += eta[i] * eta[i];
            if (i < spec.k)
                a2 += z[i].real() * z[i].real();
        }
        if (a2 < 1e-6 || e2 == 0.0)
            continue;
        // |Im| < eps dist  <=>  |Im| < eps sqrt(a2) / sqrt(1 - eps^2)
        const double m = 0.999 * U01(rng) * eps * std::sqrt(a2 / (1 - eps * eps)) / std::sqrt(e2);
        for (int i = 0; i < spec.n; ++i)
            z[i] = {z[i].real(), eta[i] * m};
        const double d = complex_dist(z, spec);
        const double margin = Q(z, spec).real() / (d * d) - bound;
        r.min_margin = std::min(r.min_margin, margin);
        if (!(margin > 0.0))
            ++r.violations;
        ++r.samples;
    }
    return r;
}

double eval_vtau(const FlatHandle& h, double tau, std::span<const double> x, const SubspaceSpec& spec)
{
    if (!(tau > 0.0))
        throw InputError("tau must be positive");
    const double p = phi(x, spec);
    if (p == 0.0)
        return -inf;
    return eval_flat(h, SectorPoint{std::log(tau) + std::log(p), 0.0}).real();
}

double select_tau(double rho2, double d11, double d13)
{
    if (!(rho2 > 0.0) || !(d11 > 0.0) || !(d13 > 0.0) || !std::isfinite(rho2 * d11 / d13))
        throw InputError("select_tau needs positive finite rho(2), d11, d13");
    return rho2 * d11 / d13;
}

LogField vtau_field(const FlatHandle& h, double tau, const SubspaceSpec& spec)
{
    auto hp = std::make_shared<const FlatHandle>(h);
    return [hp, tau, spec](std::span<const double> x) {
        const double l = eval_vtau(*hp, tau, x, spec);
        return LogReal{l, l == -inf ? 0 : 1};
    };
}

LogField phi_power_field(double p, const SubspaceSpec& spec)
{
    return [p, spec](std::span<const double> x) {
        const double f = phi(x, spec);
        return f == 0.0 ? LogReal{-inf, 0} : LogReal{p * std::log(f), 1};
    };
}

std::vector<std::vector<int>> multi_indices(int n, int order_max)
{
    std::vector<std::vector<int>> out;
    for (int total = 0; total <= order_max; ++total) {
        std::vector<int> K(n, 0);
        // compositions of total into n parts, lexicographic from the front
        std::function<void(int, int)> rec = [&](int i, int left) {
            if (i == n - 1) {
                K[i] = left;
                out.push_back(K);
                return;
            }
            for (int v = left; v >= 0; --v) {
                K[i] = v;
                rec(i + 1, left - v);
            }
        };
        rec(0, total);
    }
    return out;
}

LogDerivatives log_fd_derivatives(const LogField& f, std::span<const double> x, int order_max, double dist)
{
    if (order_max < 0 || order_max > 4)
        throw InputError("finite-difference orders are capped at 4");
    if (!(dist > 0.0))
        throw InputError("finite differences need a point off V");
    const int n = static_cast<int>(x.size());
    const LogReal f0 = f(x);
    LogDerivatives out;
    out.multi = multi_indices(n, order_max);
    if (f0.sign == 0 || !std::isfinite(f0.log_abs)) {
        out.log_abs.assign(out.multi.size(), -inf);
        return out;
    }
    std::vector<double> y(x.begin(), x.end());
    // step from the gradient of g = log|f|
    double grad2 = 0.0;
    const double dh = 1e-4 * dist;
    for (int i = 0; i < n; ++i) {
        y[i] = x[i] + dh;
        const double gp = f(y).log_abs;
        y[i] = x[i] - dh;
        const double gm = f(y).log_abs;
        y[i] = x[i];
        const double gi = (gp - gm) / (2 * dh);
        if (std::isfinite(gi))
            grad2 += gi * gi;
    }
    double h = 0.05 * dist;
    if (grad2 > 0.0)
        h = std::min(h, 0.1 / std::sqrt(grad2));
    out.step = h;

    auto derivs_at = [&](double step) {
        std::map<std::array<int, 3>, double> cache;
        auto r = [&](const std::array<int, 3>& a) {
            auto it = cache.find(a);
            if (it != cache.end())
                return it->second;
            for (int i = 0; i < n; ++i)
                y[i] = x[i] + a[i] * step;
            const LogReal v = f(y);
            const double val = v.sign == 0 ? 0.0 : v.sign * f0.sign * std::exp(v.log_abs - f0.log_abs);
            cache.emplace(a, val);
            return val;
        };
        std::vector<double> D(out.multi.size());
        for (std::size_t m = 0; m < out.multi.size(); ++m) {
            const auto& K = out.multi[m];
            double s = 0.0;
            std::array<int, 3> a{0, 0, 0};
            // tensor product of the 1-D stencils
            std::function<void(int, double)> rec = [&](int i, double w) {
                if (i == n) {
                    s += w * r(a);
                    return;
                }
                for (int o = -2; o <= 2; ++o) {
                    const double c = stencil[K[i]][o + 2];
                    if (c == 0.0)
                        continue;
                    a[i] = o;
                    rec(i + 1, w * c);
                }
                a[i] = 0;
            };
            rec(0, 1.0);
            D[m] = s / std::pow(step, degree(K));
        }
        return D;
    };
    const auto D1 = derivs_at(h), D2 = derivs_at(0.5 * h);
    for (std::size_t m = 0; m < out.multi.size(); ++m) {
        const double v = degree(out.multi[m]) == 0 ? 1.0 : (4 * D2[m] - D1[m]) / 3;
        out.log_abs.push_back(v == 0.0 ? -inf : f0.log_abs + std::log(std::abs(v)));
    }
    return out;
}

double ring_log_derivative_max(const LogField& f, const SubspaceSpec& spec, double r, int order_max)
{
    double m = -inf;
    for (const auto& nu : normal_directions(spec)) {
        std::vector<double> x(spec.n, 0.0);
        for (int i = 0; i < spec.k; ++i)
            x[i] = r * nu[i];
        for (double v : log_fd_derivatives(f, x, order_max, r).log_abs)
            m = std::max(m, v);
    }
    return m;
}

std::vector<std::vector<double>> division_grid(const SubspaceSpec& spec)
{
    std::vector<std::vector<double>> g;
    const std::vector<double> tangential = spec.n > spec.k ? std::vector<double>{0.0, 0.5} : std::vector<double>{0.0};
    for (int m = 0; m <= 18; ++m) {
        const double d = 1e-3 * std::pow(10.0, m / 6.0);
        for (const auto& nu : normal_directions(spec))
            for (double t : tangential) {
                std::vector<double> x(spec.n, t);
                for (int i = 0; i < spec.k; ++i)
                    x[i] = d * nu[i];
                g.push_back(std::move(x));
            }
    }
    return g;
}

DivisionReport divide_verify(const LogField& u, const FlatHandle& h, double tau, const SubspaceSpec& spec,
                             std::span<const std::vector<double>> grid, int order_max)
{
    if (!(tau > 0.0))
        throw InputError("tau must be positive");
    if (order_max < 0 || order_max > 4)
        throw InputError("order_max must be in [0, 4]");
    if (grid.size() < 4)
        throw InputError("division grid needs at least 4 points");
    DivisionReport R;
    R.tau = tau;
    R.order_max = order_max;
    R.grid.assign(grid.begin(), grid.end());
    const int np = static_cast<int>(grid.size());
    double dmin = inf, dmax = 0.0;
    for (const auto& x : grid) {
        const double d = phi(x, spec);
        if (!(d >= 1e-3 * (1 - 1e-12)))
            throw InputError("division grid must stay at distance >= 1e-3 from V");
        R.dist.push_back(d);
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    if (dmax < 100 * dmin)
        throw InputError("division grid must span at least 2 decades of dist(x, V)");
    std::vector<bool> low(np), all(np, true), outer(np);
    for (int i = 0; i < np; ++i) {
        low[i] = R.dist[i] < 10 * dmin;
        outer[i] = !low[i];
    }
    const auto& M = h.M;
    const auto multi = multi_indices(spec.n, order_max);
    std::vector<double> L(order_max + 1);
    for (int k = 0; k <= order_max; ++k)
        L[k] = log_weight(M, k);
    std::vector<std::string> problems;

    // u must vanish on V: check at the projections of the grid points
    bool vanishes = true;
    for (const auto& x : grid) {
        std::vector<double> p = x;
        for (int i = 0; i < spec.k; ++i)
            p[i] = 0.0;
        vanishes = vanishes && u(p).sign == 0;
    }
    if (!vanishes)
        problems.push_back("dividend does not vanish on V");

    const LogField v = vtau_field(h, tau, spec);
    const LogField inv_v = [v](std::span<const double> x) {
        auto r = v(x);
        return LogReal{-r.log_abs, r.sign};
    };
    const LogField q = [u, v](std::span<const double> x) {
        auto a = u(x), b = v(x);
        return a.sign == 0 ? LogReal{-inf, 0} : LogReal{a.log_abs - b.log_abs, a.sign * b.sign};
    };
    const auto Du = derivs_on_grid(u, grid, R.dist, order_max);
    const auto Dinv = derivs_on_grid(inv_v, grid, R.dist, order_max);
    const auto Dq = derivs_on_grid(q, grid, R.dist, order_max);
    const auto Dv = derivs_on_grid(v, grid, R.dist, order_max);

    ConstantGrid cg;
    const auto cvals = cg.values();
    auto Hfor = [&](double scale) {
        std::vector<double> H(np);
        for (int i = 0; i < np; ++i)
            H[i] = log_hM_ext_log(M, std::log(scale * R.dist[i]));
        return H;
    };

    // (a) dividend: smallest d11 whose order-0 binding point is off the vertex
    // decade; d11 <= 1/(m_0 d_max) keeps h_M(d11 dist) < 1 on the whole grid,
    // otherwise any bounded u would pass
    const double d11_cap = std::exp(-M.log_m(0)) / dmax;
    int c11 = -1;
    for (std::size_t c = 0; c < cvals.size() && cvals[c] <= d11_cap; ++c) {
        const auto H = Hfor(cvals[c]);
        double mlow = -inf, mrest = -inf;
        for (int i = 0; i < np; ++i)
            if (std::isfinite(Du.D[i][0]))
                (low[i] ? mlow : mrest) = std::max(low[i] ? mlow : mrest, Du.D[i][0] - H[i]);
        if (mlow <= mrest) {
            c11 = static_cast<int>(c);
            break;
        }
    }
    if (c11 < 0) {
        problems.push_back("dividend not flat on V: the order-0 envelope binds next to V for every d11 <= " +
                           std::to_string(d11_cap));
    } else {
        R.d11 = cvals[c11];
        const auto H = Hfor(R.d11);
        const auto e = order_maxima(Du, multi, L, H, all, order_max);
        R.dividend_flat = vanishes;
        if (std::isfinite(e[0])) {
            auto f = fit_geometric_envelope(e);
            R.log_d9 = f.log_C;
            R.d10 = std::exp(f.log_d);
        } else {
            R.log_d9 = -inf; // u vanishes on the grid
            R.d10 = 0.0;
        }
    }

    // reciprocal envelope at this tau: largest d3 whose binding point is off the vertex decade
    {
        int c3 = -1;
        double ld1 = 0.0;
        std::vector<double> y(np);
        for (int i = 0; i < np; ++i)
            y[i] = Dinv.D[i][0];
        for (std::size_t c = 0; c < cvals.size(); ++c) {
            const auto H = Hfor(cvals[c] * tau);
            double mlow = -inf, mrest = -inf;
            for (int i = 0; i < np; ++i)
                (low[i] ? mlow : mrest) = std::max(low[i] ? mlow : mrest, y[i] + H[i]);
            if (mlow > mrest)
                break;
            c3 = static_cast<int>(c);
            ld1 = std::max(mlow, mrest);
        }
        if (c3 < 0) {
            problems.push_back("reciprocal envelope infeasible on the constant grid");
        } else {
            R.reciprocal_fit = true;
            R.d3 = cvals[c3];
            R.d13 = R.d3; // normalized coordinates: d12 = 1
            R.log_d1 = ld1;
            auto H = Hfor(R.d3 * tau);
            for (auto& v_ : H)
                v_ = -v_;
            const auto e = order_maxima(Dinv, multi, L, H, all, order_max);
            double ld2 = -inf;
            for (int k = 1; k <= order_max; ++k)
                if (std::isfinite(e[k]))
                    ld2 = std::max(ld2, (e[k] - ld1) / k);
            R.d2 = std::isfinite(ld2) ? std::exp(ld2) / tau : 0.0;
        }
    }

    // (d) quotient envelope fitted away from V, checked next to V
    {
        const std::vector<double> zero(np, 0.0);
        const auto e = order_maxima(Dq, multi, L, zero, outer, order_max);
        if (std::isfinite(e[0])) {
            auto f = fit_geometric_envelope(e);
            R.log_C = f.log_C;
            R.sigma = std::exp(f.log_d);
        } else {
            R.log_C = -inf;
            R.sigma = 1.0;
        }
        const double ls = std::log(R.sigma);
        for (int i = 0; i < np; ++i) {
            double lp = -inf;
            bool bad = false;
            for (std::size_t m = 0; m < multi.size(); ++m) {
                const int k = degree(multi[m]);
                const double val = Dq.D[i][m];
                if (val == -inf)
                    continue;
                lp = std::max(lp, val - k * ls - L[k]);
                const double bound = R.log_C + k * ls + L[k];
                if (low[i] && val > bound + 1e-9 * (1 + std::abs(bound)))
                    bad = true;
            }
            R.quotient_log_p.push_back(lp);
            R.quotient_violations += bad;
        }
        R.quotient_ok = R.quotient_violations == 0;
        if (!R.quotient_ok)
            problems.push_back("quotient envelope fails at " + std::to_string(R.quotient_violations) +
                               " points next to V");
    }

    // (c) round trip q v = u
    for (int i = 0; i < np; ++i) {
        const auto a = u(grid[i]), b = v(grid[i]);
        if (a.sign == 0)
            continue;
        double err;
        const double lq = a.log_abs - b.log_abs;
        if (b.log_abs > std::log(1e-300) && a.log_abs > std::log(1e-300) && std::abs(lq) < 700) {
            const double uu = a.sign * std::exp(a.log_abs), vv = b.sign * std::exp(b.log_abs);
            const double qq = uu / vv;
            err = std::abs(qq * vv - uu) / std::abs(uu);
        } else {
            err = std::abs(std::expm1(lq + b.log_abs - a.log_abs));
        }
        R.round_trip_error = std::max(R.round_trip_error, err);
    }
    if (!(R.round_trip_error <= 1e-12))
        problems.push_back("round trip error " + std::to_string(R.round_trip_error));

    // (e) product inequality p_{s1+s2}(q v) <= p_{s1}(q) p_{s2}(v) on (q, v, u = q v)
    {
        const double s1 = R.sigma, s2 = R.d2 > 0.0 ? R.d2 * tau : 1.0;
        auto log_p = [&](const std::vector<double>& D, double sigma) {
            double lp = -inf;
            for (std::size_t m = 0; m < multi.size(); ++m) {
                const int k = degree(multi[m]);
                if (D[m] != -inf)
                    lp = std::max(lp, D[m] - k * std::log(sigma) - L[k]);
            }
            return lp;
        };
        R.elem_min_slack = inf;
        for (int i = 0; i < np; ++i) {
            const double lhs = log_p(Du.D[i], s1 + s2);
            const double rhs = log_p(Dq.D[i], s1) + log_p(Dv.D[i], s2);
            if (lhs == -inf)
                continue;
            const double slack = rhs - lhs;
            R.elem_min_slack = std::min(R.elem_min_slack, slack);
            if (slack < -1e-6 * (1 + std::abs(lhs)))
                ++R.elem_violations;
        }
        if (R.elem_violations > 0)
            problems.push_back("product inequality fails at " + std::to_string(R.elem_violations) + " points");
    }

    R.accepted = problems.empty() && R.dividend_flat && R.reciprocal_fit;
    for (const auto& p : problems)
        R.reason += (R.reason.empty() ? "" : "; ") + p;
    return R;
}

} // namespace carleman
