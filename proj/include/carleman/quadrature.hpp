#pragma once

#include "carleman/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

namespace carleman {

enum class GKRule { gk15, gk21 };

template <class T>
struct QuadResult {
    T value{};
    double error = 0.0;
    long evaluations = 0;
    long panels = 0;
};

namespace detail {

struct GKTable {
    int n;              // Kronrod nodes on one side, excluding the centre
    const double* x;    // positive nodes, descending, centre last
    const double* wk;   // Kronrod weights, aligned with x
    const double* wg;   // Gauss weights on the odd positions (x[1], x[3], ...)
    double wg_centre;   // Gauss weight of the centre, 0 when not a Gauss node
};

inline const GKTable& gk_table(GKRule r)
{
    static const double x15[] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                 0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                 0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
                                 0.207784955007898467600689403773245, 0.0};
    static const double k15[] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                 0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                 0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static const double g7[] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                0.381830050505118944950369775488975};
    static const double x21[] = {0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
                                 0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
                                 0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
                                 0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
                                 0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
                                 0.0};
    static const double k21[] = {0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
                                 0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
                                 0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
                                 0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
                                 0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
                                 0.149445554002916905664936468389821};
    static const double g10[] = {0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
                                 0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
                                 0.295524224714752870173892994651338};
    static const GKTable t15{7, x15, k15, g7, 0.417959183673469387755102040816327};
    static const GKTable t21{10, x21, k21, g10, 0.0};
    return r == GKRule::gk15 ? t15 : t21;
}

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(std::complex<double> v) { return std::abs(v); }

template <class T>
struct Panel {
    double a, b;
    T value;
    double error;
    double resabs;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class F>
Panel<T> gk_panel(F& f, double a, double b, const GKTable& t)
{
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    T fc = f(c);
    T K = fc * t.wk[t.n];
    T G = fc * t.wg_centre;
    double resabs = magnitude(fc) * t.wk[t.n];
    for (int i = 0; i < t.n; ++i) {
        T f1 = f(c - h * t.x[i]), f2 = f(c + h * t.x[i]);
        K += (f1 + f2) * t.wk[i];
        resabs += (magnitude(f1) + magnitude(f2)) * t.wk[i];
        if (i % 2 == 1)
            G += (f1 + f2) * t.wg[i / 2];
    }
    return {a, b, K * h, magnitude((K - G) * h), resabs * std::abs(h)};
}

} // namespace detail

// Globally adaptive Gauss-Kronrod quadrature over consecutive panels
// [breaks[i], breaks[i+1]].  The worst panel is bisected until the summed
// error estimate |K - G| meets max(abs_tol, rel_tol |I|).
template <class F, class T = std::invoke_result_t<F&, double>>
QuadResult<T> integrate(F&& f, std::span<const double> breaks, GKRule rule, double abs_tol, double rel_tol,
                        long max_panels)
{
    if (breaks.size() < 2)
        throw InputError("integrate needs at least one panel");
    const auto& t = detail::gk_table(rule);
    const int per = 2 * t.n + 1;
    std::priority_queue<detail::Panel<T>> q;
    QuadResult<T> r;
    double err = 0.0, resabs = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i]))
            continue;
        auto p = detail::gk_panel<T>(f, breaks[i], breaks[i + 1], t);
        r.value += p.value;
        err += p.error;
        resabs += p.resabs;
        r.evaluations += per;
        q.push(p);
    }
    const double eps = std::numeric_limits<double>::epsilon();
    while (!q.empty()) {
        double target = std::max({abs_tol, rel_tol * detail::magnitude(r.value), 50 * eps * resabs});
        if (err <= target)
            break;
        if (static_cast<long>(q.size()) >= max_panels)
            throw NumericError("quadrature did not converge within " + std::to_string(max_panels) +
                               " panels (error " + std::to_string(err) + ")");
        auto p = q.top();
        const double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b))
            throw NumericError("quadrature panel collapsed to machine width");
        q.pop();
        auto l = detail::gk_panel<T>(f, p.a, m, t), h = detail::gk_panel<T>(f, m, p.b, t);
        r.value += l.value + h.value - p.value;
        err += l.error + h.error - p.error;
        resabs += l.resabs + h.resabs - p.resabs;
        r.evaluations += 2 * per;
        q.push(l);
        q.push(h);
    }
    // re-sum to shed the drift of the running updates
    r.value = T{};
    r.error = 0.0;
    r.panels = static_cast<long>(q.size());
    while (!q.empty()) {
        r.value += q.top().value;
        r.error += q.top().error;
        q.pop();
    }
    return r;
}

} // namespace carleman
