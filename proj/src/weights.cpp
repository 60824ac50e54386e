#include "carleman/weights.hpp"

#include "carleman/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace carleman {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double loglog(double x) { return std::log(std::log(x)); }

// Raw closed-form log M_j, unscaled.
double raw_log_M(const FamilySpec& f, double j)
{
    switch (f.kind) {
    case Family::gevrey:
        return f.alpha * std::lgamma(j + 1.0);
    case Family::log_gevrey:
        if (j <= 1.0)
            return f.alpha * std::lgamma(j + 1.0);
        return f.alpha * std::lgamma(j + 1.0) + f.beta * j * loglog(j);
    case Family::exp_square:
        return j * j;
    case Family::tabulated:
        break;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// Raw log m_j = log M_{j+1} - log M_j without cancellation, j >= 2 for log_gevrey.
double raw_log_m(const FamilySpec& f, double j)
{
    switch (f.kind) {
    case Family::gevrey:
        return f.alpha * std::log1p(j);
    case Family::log_gevrey: {
        if (j < 2.0)
            return raw_log_M(f, j + 1.0) - raw_log_M(f, j);
        // (j+1) LL(j+1) - j LL(j) = LL(j+1) + j (LL(j+1) - LL(j))
        double dLL = std::log1p(std::log1p(1.0 / j) / std::log(j));
        return f.alpha * std::log1p(j) + f.beta * (loglog(j + 1.0) + j * dLL);
    }
    case Family::exp_square:
        return 2.0 * j + 1.0;
    case Family::tabulated:
        break;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// Lower convex hull of (j, y_j); collinear points are kept so that ties
// resolve toward the smaller index.
std::vector<int> lower_hull(const std::vector<double>& y)
{
    std::vector<int> h;
    for (int j = 0; j < static_cast<int>(y.size()); ++j) {
        while (h.size() >= 2) {
            int a = h[h.size() - 2], b = h.back();
            // drop b if it lies strictly above segment a-j
            double lhs = (y[b] - y[a]) * (j - a);
            double rhs = (y[j] - y[a]) * (b - a);
            double tol = 1e-14 * (std::abs(lhs) + std::abs(rhs));
            if (lhs > rhs + tol)
                h.pop_back();
            else
                break;
        }
        h.push_back(j);
    }
    return h;
}

} // namespace

FamilySpec FamilySpec::gevrey(double alpha)
{
    FamilySpec f;
    f.kind = Family::gevrey;
    f.alpha = alpha;
    return f;
}

FamilySpec FamilySpec::log_gevrey(double alpha, double beta)
{
    FamilySpec f;
    f.kind = Family::log_gevrey;
    f.alpha = alpha;
    f.beta = beta;
    return f;
}

FamilySpec FamilySpec::exp_square()
{
    FamilySpec f;
    f.kind = Family::exp_square;
    return f;
}

FamilySpec FamilySpec::tabulated_log(std::vector<double> log_values)
{
    FamilySpec f;
    f.kind = Family::tabulated;
    f.log_values = std::move(log_values);
    return f;
}

FamilySpec FamilySpec::tabulated(const std::vector<double>& values)
{
    std::vector<double> lv;
    lv.reserve(values.size());
    for (double v : values) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw InputError("tabulated weight values must be strictly positive");
        lv.push_back(std::log(v));
    }
    return tabulated_log(std::move(lv));
}

WeightSequence::WeightSequence(const FamilySpec& spec, int j_max) : spec_(spec)
{
    if (spec.kind == Family::tabulated) {
        const auto& lv = spec.log_values;
        if (lv.size() < 3)
            throw InputError("tabulated sequence needs at least 3 values");
        for (double v : lv)
            if (!std::isfinite(v))
                throw InputError("tabulated log values must be finite");
        if (std::abs(lv[0]) > 1e-14)
            throw InputError("tabulated sequence must have M_0 = 1");
        logM_ = lv;
        logM_[0] = 0.0;
        if (j_max > 0 && j_max < static_cast<int>(lv.size()) - 1)
            logM_.resize(j_max + 1);
        finish();
        return;
    }
    if (j_max < 8)
        throw InputError("J_max must be at least 8");
    if (j_max > 50'000'000)
        throw InputError("J_max too large");
    if (spec.kind != Family::exp_square && !(spec.alpha > 0.0))
        throw InputError("alpha must be positive");
    if (!std::isfinite(spec.beta))
        throw InputError("beta must be finite");

    logM_.resize(j_max + 1);
    for (int j = 0; j <= j_max; ++j)
        logM_[j] = raw_log_M(spec, j);
    closed_from_ = 0;
    if (spec.kind == Family::log_gevrey) {
        // Floor at M_0 = 1 and take the log-convex minorant; the tail is
        // already convex so the closed form stays exact there.
        std::vector<double> raw = logM_;
        for (double& v : logM_)
            v = std::max(v, 0.0);
        auto h = lower_hull(logM_);
        std::vector<double> reg(logM_.size());
        for (std::size_t k = 0; k + 1 < h.size(); ++k) {
            int a = h[k], b = h[k + 1];
            for (int j = a; j <= b; ++j)
                reg[j] = logM_[a] + (logM_[b] - logM_[a]) * (j - a) / double(b - a);
        }
        reg[h.back()] = logM_[h.back()];
        logM_ = reg;
        int last_diff = 0;
        for (int j = 0; j <= j_max; ++j)
            if (logM_[j] != raw[j])
                last_diff = j + 1;
        closed_from_ = std::max(last_diff, 2);
    }
    finish();
}

void WeightSequence::finish()
{
    const int J = j_max();
    logm_.resize(J);
    for (int j = 0; j < J; ++j)
        logm_[j] = logM_[j + 1] - logM_[j];
    // past the regularized head use the cancellation-free closed form
    if (closed_form())
        for (int j = closed_from_; j < J; ++j)
            logm_[j] = scale_ * raw_log_m(spec_, j);
    monotone_ = true;
    for (int j = 0; j + 1 < J; ++j)
        if (logm_[j + 1] < logm_[j] - 1e-12 * (1.0 + std::abs(logm_[j])))
            monotone_ = false;
    hull_j_ = lower_hull(logM_);
    hull_slope_.resize(hull_j_.size() - 1);
    for (std::size_t k = 0; k + 1 < hull_j_.size(); ++k) {
        int a = hull_j_[k], b = hull_j_[k + 1];
        hull_slope_[k] = (b == a + 1) ? logm_[a] : (logM_[b] - logM_[a]) / (b - a);
    }
}

double WeightSequence::log_M(int j) const
{
    if (j < 0 || j > j_max())
        throw BudgetError("extend budget: index " + std::to_string(j) + " beyond J_max");
    return logM_[j];
}

double WeightSequence::log_m(int j) const
{
    if (j < 0 || j >= j_max())
        throw BudgetError("extend budget: quotient index " + std::to_string(j) + " beyond J_max");
    return logm_[j];
}

double WeightSequence::log_M_cont(double j) const
{
    if (!closed_form())
        throw BudgetError("extend budget: tabulated sequence has no continuation");
    if (j < closed_from_)
        throw InputError("continuous form used inside the regularized head");
    return scale_ * raw_log_M(spec_, j);
}

double WeightSequence::log_m_cont(double j) const
{
    if (!closed_form())
        throw BudgetError("extend budget: tabulated sequence has no continuation");
    if (j < closed_from_)
        throw InputError("continuous form used inside the regularized head");
    return scale_ * raw_log_m(spec_, j);
}

double WeightSequence::growth_exponent() const
{
    switch (spec_.kind) {
    case Family::gevrey:
    case Family::log_gevrey:
        return scale_ * spec_.alpha;
    case Family::exp_square:
        return inf;
    case Family::tabulated:
        break;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

long WeightSequence::table_piece(double L) const
{
    if (hull_slope_.empty() || L <= hull_slope_.front())
        return 0;
    auto it = std::lower_bound(hull_slope_.begin(), hull_slope_.end(), L);
    if (it == hull_slope_.end())
        return -1;
    return hull_j_[it - hull_slope_.begin()];
}

double WeightSequence::extended_piece(double L) const
{
    long p = table_piece(L);
    if (p >= 0)
        return double(p);
    if (!closed_form())
        throw BudgetError("extend budget: t below the tabulated range");
    const double J = j_max();
    double x = 0.0;
    switch (spec_.kind) {
    case Family::gevrey:
        x = std::expm1(L / (scale_ * spec_.alpha));
        break;
    case Family::exp_square:
        x = (L / scale_ - 1.0) / 2.0;
        break;
    default: {
        // bisection on y = log(1+j)
        double ylo = std::log1p(J), yhi = ylo + 1.0;
        while (log_m_cont(std::expm1(yhi)) < L) {
            ylo = yhi;
            yhi *= 2.0;
            if (yhi > 700.0)
                throw NumericError("piece index overflow");
        }
        for (int it = 0; it < 200 && yhi - ylo > 1e-15 * yhi; ++it) {
            double ym = 0.5 * (ylo + yhi);
            (log_m_cont(std::expm1(ym)) < L ? ylo : yhi) = ym;
        }
        x = std::expm1(yhi);
    }
    }
    double j = std::max(J, std::ceil(x));
    if (j < 1e15) {
        while (j > J && log_m_cont(j - 1.0) >= L)
            j -= 1.0;
        while (log_m_cont(j) < L)
            j += 1.0;
    }
    return j;
}

std::string WeightSequence::describe() const
{
    std::ostringstream os;
    os.precision(17);
    switch (spec_.kind) {
    case Family::gevrey:
        os << "gevrey(" << spec_.alpha << ")";
        break;
    case Family::log_gevrey:
        os << "loggevrey(" << spec_.alpha << "," << spec_.beta << ")";
        break;
    case Family::exp_square:
        os << "expsquare";
        break;
    case Family::tabulated:
        os << "tabulated[" << spec_.log_values.size() << "]";
        break;
    }
    if (scale_ != 1.0)
        os << "^" << scale_;
    return os.str();
}

WeightSequence make_sequence(const FamilySpec& spec, int j_max) { return WeightSequence(spec, j_max); }

std::vector<double> quotients(const WeightSequence& M, int J, bool* monotone)
{
    if (J < 0 || J > M.j_max())
        throw BudgetError("extend budget: J exceeds J_max");
    const auto& m = M.log_m_table();
    std::vector<double> out(m.begin(), m.begin() + std::min<int>(J, m.size()));
    if (monotone) {
        *monotone = true;
        for (std::size_t j = 0; j + 1 < out.size(); ++j)
            if (out[j + 1] < out[j] - 1e-12 * (1.0 + std::abs(out[j])))
                *monotone = false;
    }
    return out;
}

double log_hM_log(const WeightSequence& M, double lt)
{
    if (std::isnan(lt) || lt == -inf)
        throw InputError("h_M needs t > 0");
    if (lt == inf)
        return 0.0;
    long j = M.table_piece(-lt);
    if (j < 0)
        throw BudgetError("extend budget: t below 1/m_{J_max-1}");
    return j == 0 ? 0.0 : double(j) * lt + M.log_M_table()[j];
}

double log_hM_ext_log(const WeightSequence& M, double lt)
{
    if (std::isnan(lt) || lt == -inf)
        throw InputError("h_M needs t > 0");
    if (lt == inf)
        return 0.0;
    long j = M.table_piece(-lt);
    if (j >= 0)
        return j == 0 ? 0.0 : double(j) * lt + M.log_M_table()[j];
    double jd = M.extended_piece(-lt);
    return jd * lt + M.log_M_cont(jd);
}

double log_hM(const WeightSequence& M, double t)
{
    if (!(t > 0.0))
        throw InputError("h_M needs t > 0");
    return log_hM_log(M, std::log(t));
}

double log_hM_ext(const WeightSequence& M, double t)
{
    if (!(t > 0.0))
        throw InputError("h_M needs t > 0");
    return log_hM_ext_log(M, std::log(t));
}

std::vector<double> log_hM_batch_serial(const WeightSequence& M, std::span<const double> t)
{
    std::vector<double> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        out[i] = log_hM_ext(M, t[i]);
    return out;
}

std::vector<double> log_hM_batch(const WeightSequence& M, std::span<const double> t)
{
    std::vector<double> out(t.size());
    const long n = static_cast<long>(t.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        out[i] = log_hM_ext(M, t[i]);
    return out;
}

double log_hM_brute(const WeightSequence& M, double t, int jmax)
{
    const double lt = std::log(t);
    const auto& lM = M.log_M_table();
    jmax = std::min(jmax, M.j_max());
    double best = 0.0; // j = 0
    for (int j = 1; j <= jmax; ++j)
        best = std::min(best, j * lt + lM[j]);
    return best;
}

std::vector<double> resolvable_t_grid(const WeightSequence& M, int n, double hi_factor)
{
    const auto& m = M.log_m_table();
    double lo = std::max(-m.back(), -700.0);
    double hi = std::log(hi_factor) - m.front();
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = std::exp(lo + (hi - lo) * (n == 1 ? 0.0 : double(i) / (n - 1)));
    g.front() = std::max(g.front(), std::exp(lo));
    return g;
}

double recover_logM(const WeightSequence& M, int j, std::span<const double> t_grid)
{
    if (t_grid.empty())
        throw InputError("empty t grid");
    double best = -inf;
    for (double t : t_grid)
        best = std::max(best, -j * std::log(t) + log_hM(M, t));
    return best;
}

std::string to_string(Condition c)
{
    switch (c) {
    case Condition::mnorm:
        return "Mnorm";
    case Condition::mlogc:
        return "Mlogc";
    case Condition::mmodg:
        return "Mmodg";
    case Condition::msnqa:
        return "Msnqa";
    }
    return "?";
}

ModerateGrowthFit moderate_growth_serial(const WeightSequence& M, int J)
{
    const auto& lM = M.log_M_table();
    ModerateGrowthFit fit;
    for (int n = 2; n <= J; ++n)
        for (int j = 1; j <= n / 2; ++j) {
            double e = lM[n] - lM[j] - lM[n - j];
            fit.log_A = std::max(fit.log_A, e / n);
            fit.min_excess = std::min(fit.min_excess, e);
        }
    return fit;
}

ModerateGrowthFit moderate_growth(const WeightSequence& M, int J)
{
    const auto& lM = M.log_M_table();
    double la = 0.0, mn = 0.0;
#pragma omp parallel for schedule(dynamic, 64) reduction(max : la) reduction(min : mn)
    for (int n = 2; n <= J; ++n)
        for (int j = 1; j <= n / 2; ++j) {
            double e = lM[n] - lM[j] - lM[n - j];
            la = std::max(la, e / n);
            mn = std::min(mn, e);
        }
    return {la, mn};
}

double tail_exponent(std::span<const double> log_terms)
{
    const int J = static_cast<int>(log_terms.size());
    if (J < 10)
        throw InputError("tail exponent fit needs at least 10 terms");
    int j0 = J / 10;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int j = j0; j < J; ++j) {
        double x = std::log(j + 1.0), y = log_terms[j];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -slope;
}

double power_tail_remainder(double log_term_last, int J, double p)
{
    if (!(p > 1.0))
        return inf;
    // term_{J-1} (J)^p sum_{j >= J} (j+1)^{-p} ~ term_{J-1} J^p (J+1/2)^{1-p}/(p-1)
    return std::exp(log_term_last + p * std::log(double(J)) + (1.0 - p) * std::log(J + 0.5) -
                    std::log(p - 1.0));
}

namespace {

// Strong non-quasianalyticity fit at truncation J: A = max over l <= J/2 of
// m_l * sum_{j >= l} 1/((j+1) m_j), tail past J extrapolated.
struct SnqaFit {
    double A = inf;
    double exponent = 0.0;
    double partial = 0.0;
};

SnqaFit snqa_fit(const WeightSequence& M, int J)
{
    const auto& lm = M.log_m_table();
    std::vector<double> lt(J);
    for (int j = 0; j < J; ++j)
        lt[j] = -std::log(j + 1.0) - lm[j];
    SnqaFit fit;
    if (J < 10) {
        // too short to fit a tail: undecidable, reported as failing
        for (double v : lt)
            fit.partial += std::exp(v);
        fit.exponent = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    fit.exponent = tail_exponent(lt);
    double R = power_tail_remainder(lt[J - 1], J, fit.exponent);
    std::vector<double> tail(J + 1);
    tail[J] = R;
    for (int j = J - 1; j >= 0; --j)
        tail[j] = tail[j + 1] + std::exp(lt[j]);
    fit.partial = tail[0] - R;
    fit.A = 0.0;
    for (int l = 0; l <= J / 2; ++l)
        fit.A = std::max(fit.A, std::exp(lm[l]) * tail[l]);
    return fit;
}

} // namespace

RegularityCertificate check_regularity(const WeightSequence& M, int J)
{
    if (J > M.j_max())
        throw BudgetError("extend budget: J exceeds J_max");
    if (J < 4)
        throw InputError("check_regularity needs J >= 4");
    RegularityCertificate c;
    c.J_used = J;
    const auto& lM = M.log_M_table();
    const auto& lm = M.log_m_table();

    c.mnorm_ok = std::abs(lM[0]) <= 1e-14;
    for (int j = 0; j < J; ++j)
        if (lm[j] < -1e-12 * (1.0 + std::abs(lM[j])))
            c.mnorm_ok = false;
    c.mlogc_ok = true;
    for (int j = 0; j + 1 < J; ++j)
        if (lm[j + 1] < lm[j] - 1e-12 * (1.0 + std::abs(lm[j])))
            c.mlogc_ok = false;

    auto mg = moderate_growth(M, J);
    auto mg_half = moderate_growth(M, J / 2);
    c.A_mg = std::exp(mg.log_A);
    c.A_mg_half = std::exp(mg_half.log_A);
    // a genuine constant stops moving; exp(j^2) gives log A ~ J/2
    c.mmodg_ok = mg.log_A <= 0.0 || (mg.log_A - mg_half.log_A) <= 0.1 * mg.log_A;

    auto sq = snqa_fit(M, J);
    auto sq_half = snqa_fit(M, J / 2);
    c.A_snqa = sq.A;
    c.A_snqa_half = sq_half.A;
    c.snqa_exponent = sq.exponent;
    c.denjoy_partial = sq.partial;
    c.msnqa_ok = sq.exponent > 1.0 + 1e-2 && std::isfinite(sq.A) &&
                 std::abs(sq.A - sq_half.A) <= 1e-3 * sq.A;

    if (!c.mnorm_ok)
        c.failed.push_back(Condition::mnorm);
    if (!c.mlogc_ok)
        c.failed.push_back(Condition::mlogc);
    if (!c.mmodg_ok)
        c.failed.push_back(Condition::mmodg);
    if (!c.msnqa_ok)
        c.failed.push_back(Condition::msnqa);

    if (c.strongly_regular()) {
        c.mfast_ok = mg.min_excess >= -1e-9;
        c.quot1_ok = c.quot2_ok = true;
        const double two_log_A = 2.0 * std::log(c.A());
        for (int j = 1; j < J; ++j) {
            double root = lM[j] / j;
            double tol = 1e-12 * (1.0 + std::abs(lm[j]));
            if (root > lm[j] + tol)
                c.quot1_ok = false;
            if (lm[j] > two_log_A + root + tol)
                c.quot2_ok = false;
        }
    }
    return c;
}

WeightSequence power(const WeightSequence& M, double s)
{
    if (!(s > 0.0) || !std::isfinite(s))
        throw InputError("power needs s > 0");
    WeightSequence P = M;
    P.scale_ = M.scale_ * s;
    for (double& v : P.logM_)
        v *= s;
    for (double& v : P.logm_)
        v *= s;
    for (double& v : P.hull_slope_)
        v *= s;
    return P;
}

RhoEstimate rho_estimate(const WeightSequence& M, double s, std::span<const double> t_grid)
{
    if (s < 1.0)
        throw InputError("rho_estimate needs s >= 1");
    RhoEstimate r;
    r.s = s;
    r.t_grid.assign(t_grid.begin(), t_grid.end());
    std::vector<double> lh(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i)
        lh[i] = log_hM(M, t_grid[i]);
    for (int k = 0;; ++k) {
        double rho = std::pow(1.25, k);
        if (rho > 1e6)
            break;
        bool ok = true;
        for (std::size_t i = 0; i < t_grid.size() && ok; ++i) {
            double rhs = s * log_hM_ext(M, rho * t_grid[i]);
            ok = lh[i] <= rhs + 1e-12 * (1.0 + std::abs(lh[i]));
        }
        if (ok) {
            r.ok = true;
            r.rho = rho;
            return r;
        }
    }
    return r;
}

} // namespace carleman
