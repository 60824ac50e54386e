#include "carleman/report.hpp"

#include "carleman/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace carleman {

namespace {

using cd = std::complex<double>;

Json num(double x)
{
    if (!std::isfinite(x))
        return nullptr;
    return x;
}

Json nums(std::span<const double> v)
{
    Json a = Json::array();
    for (double x : v)
        a.push_back(num(x));
    return a;
}

Json complex_pair(cd z) { return Json::array({num(z.real()), num(z.imag())}); }

Json complex_list(std::span<const cd> v)
{
    Json a = Json::array();
    for (cd z : v)
        a.push_back(complex_pair(z));
    return a;
}

Json point(const SectorPoint& z) { return Json{{"log_r", num(z.log_r)}, {"theta", num(z.theta)}}; }

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> f;
    std::size_t a = 0;
    for (std::size_t b; (b = line.find(',', a)) != std::string::npos; a = b + 1)
        f.push_back(line.substr(a, b - a));
    f.push_back(line.substr(a));
    return f;
}

std::string strip(std::string s)
{
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    return s;
}

template <class T>
bool parse_number(const std::string& s, T& v)
{
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool is_header(const std::string& line) { return !line.empty() && std::isalpha(static_cast<unsigned char>(line[0])); }

} // namespace

std::string format_double(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string verdict(const RegularityCertificate& c)
{
    if (c.strongly_regular())
        return "StronglyRegular";
    std::string s = "Fails:";
    for (std::size_t i = 0; i < c.failed.size(); ++i)
        s += (i ? "," : "") + to_string(c.failed[i]);
    return s;
}

Json certificate_json(const RegularityCertificate& c)
{
    Json failed = Json::array();
    for (auto f : c.failed)
        failed.push_back(to_string(f));
    return Json{
        {"mnorm_ok", c.mnorm_ok},
        {"mlogc_ok", c.mlogc_ok},
        {"A_mg", num(c.A_mg)},
        {"A_snqa", num(c.A_snqa)},
        {"denjoy_partial", num(c.denjoy_partial)},
        {"verdict", verdict(c)},
        {"J_used", c.J_used},
        {"mmodg_ok", c.mmodg_ok},
        {"msnqa_ok", c.msnqa_ok},
        {"failed", failed},
        {"A_mg_half", num(c.A_mg_half)},
        {"A_snqa_half", num(c.A_snqa_half)},
        {"snqa_exponent", num(c.snqa_exponent)},
        {"mfast_ok", c.mfast_ok},
        {"quot1_ok", c.quot1_ok},
        {"quot2_ok", c.quot2_ok},
    };
}

Json gamma_json(const GammaEstimate& e)
{
    return Json{{"gamma_hat", num(e.gamma_hat)},
                {"bracket", nums(std::vector<double>{e.lo, e.hi})},
                {"J_schedule", e.J_schedule},
                {"diagnostics", nums(e.diagnostics)}};
}

Json korenblum_json(const KorenblumResult& k)
{
    Json tail = Json::array();
    for (auto [J, S] : k.partial_sums_tail)
        tail.push_back(Json::array({J, num(S)}));
    return Json{{"classification", to_string(k.classification)},
                {"fitted_exponent", num(k.fitted_exponent)},
                {"partial_sum", num(k.partial_sum)},
                {"partial_sums_tail", tail},
                {"J_used", k.J_used}};
}

Json rho_json(const RhoEstimate& r)
{
    return Json{{"ok", r.ok}, {"rho", num(r.rho)}, {"s", num(r.s)}, {"t_grid", nums(r.t_grid)}};
}

Json sandwich_json(const SandwichReport& r)
{
    Json samples = Json::array();
    for (const auto& z : r.samples)
        samples.push_back(point(z));
    return Json{
        {"accepted", r.accepted},
        {"reason", r.reason},
        {"grid", {{"lo", r.grid.lo}, {"hi", r.grid.hi}, {"ratio", r.grid.ratio}}},
        {"j_max", r.j_max},
        {"log_kappa1", num(r.log_kappa1)},
        {"kappa2", num(r.kappa2)},
        {"kappa3", num(r.kappa3)},
        {"kappa_order_ok", r.kappa_order_ok},
        {"log_b5", num(r.log_b5)},
        {"b6", num(r.b6)},
        {"b7", num(r.b7)},
        {"rho2_N", num(r.rho2_N)},
        {"b7_formula", num(r.b7_formula)},
        {"b13", num(r.b13)},
        {"b14", num(r.b14)},
        {"log_b15", num(r.log_b15)},
        {"b16", num(r.b16)},
        {"b17", num(r.b17)},
        {"violations", r.violations},
        {"worst_sample", r.worst_sample},
        {"samples", samples},
        {"log_G", complex_list(r.log_G)},
        {"margin_upper", nums(r.margin_upper)},
        {"margin_lower", nums(r.margin_lower)},
    };
}

Json asymptotics_json(const AsymptoticsReport& r)
{
    Json conv = Json::array();
    for (bool b : r.converged)
        conv.push_back(b);
    return Json{
        {"recovered", complex_list(r.recovered)},
        {"per_order_error", nums(r.per_order_error)},
        {"envelope", {{"C", num(std::exp(r.log_C))}, {"d", num(std::exp(r.log_d))}}},
        {"ray", num(r.ray)},
        {"grid", nums(r.grid)},
        {"converged", conv},
        {"best_radius", nums(r.best_radius)},
        {"spread", nums(r.spread)},
        {"log_C", num(r.log_C)},
        {"log_d", num(r.log_d)},
        {"log_C_half", num(r.log_C_half)},
        {"log_d_half", num(r.log_d_half)},
        {"envelope_drift", num(r.envelope_drift)},
        {"reason", r.reason},
    };
}

Json division_json(const DivisionReport& r)
{
    Json grid = Json::array();
    for (const auto& x : r.grid)
        grid.push_back(nums(x));
    return Json{
        {"tau", num(r.tau)},
        {"order_max", r.order_max},
        {"grid", grid},
        {"dist", nums(r.dist)},
        {"dividend_flat", r.dividend_flat},
        {"log_d9", num(r.log_d9)},
        {"d10", num(r.d10)},
        {"d11", num(r.d11)},
        {"reciprocal_fit", r.reciprocal_fit},
        {"log_d1", num(r.log_d1)},
        {"d2", num(r.d2)},
        {"d3", num(r.d3)},
        {"d13", num(r.d13)},
        {"quotient_ok", r.quotient_ok},
        {"log_C", num(r.log_C)},
        {"sigma", num(r.sigma)},
        {"quotient_log_p", nums(r.quotient_log_p)},
        {"quotient_violations", r.quotient_violations},
        {"round_trip_error", num(r.round_trip_error)},
        {"elem_violations", r.elem_violations},
        {"elem_min_slack", num(r.elem_min_slack)},
        {"accepted", r.accepted},
        {"reason", r.reason},
    };
}

Json realpart_json(const RealpartCheck& r)
{
    return Json{{"samples", r.samples}, {"violations", r.violations}, {"min_margin", num(r.min_margin)}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::vector<double> parse_sequence_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::vector<double> out;
    int lineno = 0;
    auto fail = [&](const std::string& why) {
        throw InputError("sequence CSV line " + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++lineno;
        line = strip(line);
        if (line.empty())
            continue;
        if (out.empty() && is_header(line)) {
            if (line != "j,logM")
                fail("expected header j,logM");
            continue;
        }
        auto f = split_fields(line);
        if (f.size() != 2)
            fail("expected j,logM");
        int j = -1;
        double v = 0;
        if (!parse_number(f[0], j) || !parse_number(f[1], v))
            fail("cannot parse '" + line + "'");
        if (j != static_cast<int>(out.size()))
            fail("indices must run 0, 1, 2, ... (got " + f[0] + ")");
        if (!std::isfinite(v))
            fail("log M not finite");
        out.push_back(v);
    }
    if (out.size() < 2)
        throw InputError("sequence CSV needs at least two rows");
    return out;
}

std::vector<std::vector<double>> parse_grid_csv(const std::string& text, int n)
{
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<double>> out;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip(line);
        if (line.empty() || (out.empty() && is_header(line)))
            continue;
        auto f = split_fields(line);
        if (static_cast<int>(f.size()) != n && static_cast<int>(f.size()) != n + 1)
            throw InputError("grid CSV line " + std::to_string(lineno) + ": expected " + std::to_string(n) +
                             " coordinates");
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i)
            if (!parse_number(f[i], x[i]) || !std::isfinite(x[i]))
                throw InputError("grid CSV line " + std::to_string(lineno) + ": cannot parse '" + f[i] + "'");
        out.push_back(std::move(x));
    }
    if (out.empty())
        throw InputError("grid CSV has no rows");
    return out;
}

std::string sweep_csv(const SandwichReport& r, const WeightSequence& M)
{
    std::string s = "log_r,theta,re_logG,im_logG,log_hM_upper,log_hM_lower\n";
    const bool fitted = r.kappa2 > 0 && r.kappa3 > 0;
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        const auto& z = r.samples[i];
        double up = NAN, lo = NAN;
        if (fitted) {
            up = log_hM_ext_log(M, std::log(r.kappa3) + z.log_r);
            lo = r.log_kappa1 + log_hM_ext_log(M, std::log(r.kappa2) + z.log_r);
        }
        s += format_double(z.log_r) + "," + format_double(z.theta) + "," + format_double(r.log_G[i].real()) + "," +
             format_double(r.log_G[i].imag()) + "," + format_double(up) + "," + format_double(lo) + "\n";
    }
    return s;
}

std::string division_csv(const DivisionReport& r)
{
    if (r.grid.empty())
        return "value\n";
    const std::size_t n = r.grid[0].size();
    std::string s;
    for (std::size_t i = 0; i < n; ++i)
        s += "x" + std::to_string(i + 1) + ",";
    s += "value\n";
    for (std::size_t p = 0; p < r.grid.size(); ++p) {
        for (double x : r.grid[p])
            s += format_double(x) + ",";
        s += format_double(p < r.quotient_log_p.size() ? r.quotient_log_p[p] : NAN) + "\n";
    }
    return s;
}

} // namespace carleman
