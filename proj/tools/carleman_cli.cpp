// carleman: command-line front end.
// Exit codes: 0 pass, 1 expectation failure, 2 input error, 3 numeric failure.

#include "carleman/divide.hpp"
#include "carleman/errors.hpp"
#include "carleman/extend.hpp"
#include "carleman/index.hpp"
#include "carleman/outerflat.hpp"
#include "carleman/report.hpp"
#include "carleman/weights.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace carleman;

namespace {

struct Config {
    std::string command;
    // sequence
    std::optional<double> gevrey;
    std::vector<double> loggevrey;
    bool expsquare = false;
    std::string table;
    int jmax = 4096;
    double tol = 0.0;
    std::uint64_t seed = 1;
    std::string out;
    std::string csv;
    std::string expect;
    // subcommand parameters
    std::optional<double> gamma;
    std::vector<double> t;
    int points = 200;
    double s = 2.0;
    int samples = 500;
    double rmin = 1e-3, rmax = 1.0;
    int orders = 8;
    std::string jet;
    double sigma = 1.0;
    int nmax = 6;
    double ray = 0.0;
    int q = 0;
    int n = 2, k = 1;
    std::optional<double> tau;
    std::string dividend = "self";
    std::string grid;
    std::optional<double> delta;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream o(path);
    if (!o)
        throw InputError("cannot write " + path);
    o << text;
}

int sources(const Config& c)
{
    return c.gevrey.has_value() + !c.loggevrey.empty() + c.expsquare + !c.table.empty();
}

FamilySpec family(const Config& c)
{
    if (sources(c) != 1)
        throw InputError("give exactly one of --gevrey, --loggevrey, --expsquare, --table");
    if (c.gevrey)
        return FamilySpec::gevrey(*c.gevrey);
    if (!c.loggevrey.empty())
        return FamilySpec::log_gevrey(c.loggevrey[0], c.loggevrey[1]);
    if (c.expsquare)
        return FamilySpec::exp_square();
    return FamilySpec::tabulated_log(parse_sequence_csv(read_file(c.table)));
}

WeightSequence sequence(const Config& c)
{
    auto f = family(c);
    if (f.kind == Family::tabulated) {
        const int J = static_cast<int>(f.log_values.size()) - 1;
        return make_sequence(f, std::min(J, c.jmax));
    }
    return make_sequence(f, c.jmax);
}

// gamma(M) is known in closed form for Gevrey sequences, estimated otherwise
GammaEstimate growth(const Config& c, const WeightSequence& M)
{
    if (c.gevrey)
        return known_gamma(*c.gevrey);
    const int hi = M.j_max();
    return gamma_index(M, dyadic_schedule(std::max(64, hi / 16), hi), std::max(c.tol, 0.01));
}

double need_gamma(const Config& c)
{
    if (!c.gamma)
        throw InputError("--gamma is required");
    return *c.gamma;
}

Json config_json(const Config& c)
{
    Json j{{"command", c.command}};
    Json seq;
    if (c.gevrey)
        seq = {{"family", "gevrey"}, {"alpha", *c.gevrey}};
    else if (!c.loggevrey.empty())
        seq = {{"family", "loggevrey"}, {"alpha", c.loggevrey[0]}, {"beta", c.loggevrey[1]}};
    else if (c.expsquare)
        seq = {{"family", "expsquare"}};
    else
        seq = {{"family", "table"}, {"path", c.table}};
    j["sequence"] = seq;
    j["jmax"] = c.jmax;
    j["tol"] = c.tol;
    j["seed"] = c.seed;
    j["expect"] = c.expect;
    if (c.command == "check" || c.command == "gamma" || c.command == "flat" || c.command == "extend" ||
        c.command == "divide")
        j["gamma"] = c.gamma ? Json(*c.gamma) : Json(nullptr);
    if (c.command == "hm") {
        j["t"] = c.t;
        j["points"] = c.points;
    }
    if (c.command == "rho") {
        j["s"] = c.s;
        j["points"] = c.points;
    }
    if (c.command == "flat") {
        j["samples"] = c.samples;
        j["rmin"] = c.rmin;
        j["rmax"] = c.rmax;
        j["orders"] = c.orders;
    }
    if (c.command == "extend") {
        j["jet"] = c.jet;
        j["sigma"] = c.sigma;
        j["nmax"] = c.nmax;
        j["ray"] = c.ray;
        j["q"] = c.q;
    }
    if (c.command == "divide") {
        j["n"] = c.n;
        j["k"] = c.k;
        j["tau"] = c.tau ? Json(*c.tau) : Json(nullptr);
        j["dividend"] = c.dividend;
        j["orders"] = c.orders;
        j["grid"] = c.grid;
        j["delta"] = c.delta ? Json(*c.delta) : Json(nullptr);
        j["samples"] = c.samples;
    }
    return j;
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return s;
}

// "accepted" / "rejected" for the report-style subcommands
bool accepted_expectation(const std::string& expect, bool accepted)
{
    if (expect.empty())
        return accepted;
    if (expect == "accepted")
        return accepted;
    if (expect == "rejected")
        return !accepted;
    throw InputError("--expect must be 'accepted' or 'rejected' here");
}

void emit(const Config& c, Json body)
{
    Json j{{"config", config_json(c)}};
    for (auto& [key, value] : body.items())
        j[key] = value;
    write_text(c.out, dump(j));
}

int run_check(const Config& c)
{
    auto M = sequence(c);
    auto cert = check_regularity(M, M.j_max());
    Json body = certificate_json(cert);
    if (c.gamma)
        body["korenblum"] = korenblum_json(korenblum(M, *c.gamma, M.j_max()));
    emit(c, body);

    if (c.expect.empty())
        return cert.strongly_regular() ? 0 : 1;
    const std::string e = lower(c.expect);
    if (e == "strongly-regular")
        return cert.strongly_regular() ? 0 : 1;
    if (e.rfind("fails:", 0) == 0) {
        std::stringstream ss(e.substr(6));
        std::string name;
        int wanted = 0, found = 0;
        while (std::getline(ss, name, ',')) {
            ++wanted;
            bool known = false;
            for (auto cond : {Condition::mnorm, Condition::mlogc, Condition::mmodg, Condition::msnqa}) {
                if (lower(to_string(cond)) != name)
                    continue;
                known = true;
                found += std::count(cert.failed.begin(), cert.failed.end(), cond) > 0;
            }
            if (!known)
                throw InputError("unknown condition '" + name + "' in --expect");
        }
        if (wanted == 0)
            throw InputError("--expect fails: needs a condition");
        return found == wanted ? 0 : 1;
    }
    throw InputError("--expect must be 'strongly-regular' or 'fails:<cond>[,<cond>]'");
}

int run_gamma(const Config& c)
{
    auto M = sequence(c);
    const int hi = M.j_max();
    auto e = gamma_index(M, dyadic_schedule(std::max(64, hi / 16), hi), std::max(c.tol, 0.01));
    Json body = gamma_json(e);
    KorenblumResult kr;
    if (c.gamma) {
        kr = korenblum(M, *c.gamma, hi);
        body["korenblum"] = korenblum_json(kr);
    }
    emit(c, body);
    if (c.expect.empty())
        return 0;
    const std::string e_ = lower(c.expect);
    if (e_.rfind("gamma:", 0) == 0) {
        double lo = 0, up = 0;
        char comma = 0;
        std::istringstream ss(e_.substr(6));
        if (!(ss >> lo >> comma >> up) || comma != ',')
            throw InputError("--expect gamma:LO,HI");
        return (e.gamma_hat >= lo && e.gamma_hat <= up) ? 0 : 1;
    }
    if (e_.rfind("korenblum:", 0) == 0) {
        if (!c.gamma)
            throw InputError("--expect korenblum: needs --gamma");
        return lower(to_string(kr.classification)) == e_.substr(10) ? 0 : 1;
    }
    throw InputError("--expect must be 'gamma:LO,HI' or 'korenblum:<class>'");
}

int run_hm(const Config& c)
{
    if (!c.expect.empty())
        throw InputError("--expect is not used by hm");
    auto M = sequence(c);
    std::vector<double> t = c.t;
    if (t.empty())
        t = resolvable_t_grid(M, c.points);
    for (double x : t)
        if (!(x > 0))
            throw InputError("t must be positive");
    auto v = log_hM_batch(M, t);
    std::string csv = "t,log_hM\n";
    for (std::size_t i = 0; i < t.size(); ++i)
        csv += format_double(t[i]) + "," + format_double(v[i]) + "\n";
    if (!c.csv.empty())
        write_text(c.csv, csv);
    emit(c, Json{{"t", t}, {"log_hM", v}});
    return 0;
}

int run_rho(const Config& c)
{
    auto M = sequence(c);
    auto r = rho_estimate(M, c.s, resolvable_t_grid(M, c.points));
    emit(c, rho_json(r));
    return accepted_expectation(lower(c.expect), r.ok) ? 0 : 1;
}

int run_flat(const Config& c)
{
    const double gamma = need_gamma(c);
    auto M = sequence(c);
    auto h = build_flat(M, gamma, growth(c, M));
    auto z = sector_samples(gamma, c.samples, c.rmin, c.rmax, c.seed);
    auto r = sandwich_verify(h, z, c.orders);
    if (!c.csv.empty())
        write_text(c.csv, sweep_csv(r, M));
    Json body = sandwich_json(r);
    body["delta"] = h.delta;
    body["s"] = h.s;
    body["gamma_hat"] = h.gamma_estimate_used.gamma_hat;
    emit(c, body);
    return accepted_expectation(lower(c.expect), r.accepted) ? 0 : 1;
}

int run_extend(const Config& c)
{
    const double gamma = need_gamma(c);
    if (c.jet.empty())
        throw InputError("--jet is required");
    auto lambda = parse_jet_csv(read_file(c.jet));
    auto M = sequence(c);
    Jet l(lambda, M, c.sigma);
    ExtendParams p;
    p.q = c.q;
    auto h = extend(l, gamma, growth(c, M), p);
    auto sched = default_z_schedule();
    auto r = verify_asymptotics(h, l, c.nmax, c.ray, sched);
    const double tol = c.tol > 0 ? c.tol : 1e-6;
    bool ok = r.reason.empty();
    for (std::size_t N = 0; N < r.per_order_error.size(); ++N)
        ok = ok && r.converged[N] && r.per_order_error[N] <= tol;
    Json body = asymptotics_json(r);
    body["q"] = h.q;
    body["gamma_prime"] = h.gamma_prime;
    body["J_ext"] = h.J_ext;
    body["jet_norm"] = jet_norm(l);
    body["recovered_within_tol"] = ok;
    emit(c, body);
    return accepted_expectation(lower(c.expect), ok) ? 0 : 1;
}

LogField dividend_field(const Config& c, const FlatHandle& h, double tau, const SubspaceSpec& spec)
{
    const std::string d = lower(c.dividend);
    auto param = [&](std::size_t at) {
        double v = 0;
        std::istringstream ss(d.substr(at));
        if (!(ss >> v) || !(ss >> std::ws).eof() || !(v > 0))
            throw InputError("bad --dividend '" + c.dividend + "'");
        return v;
    };
    if (d == "self")
        return vtau_field(h, tau, spec);
    if (d.rfind("vtau:", 0) == 0)
        return vtau_field(h, param(5), spec);
    if (d.rfind("phi:", 0) == 0)
        return phi_power_field(param(4), spec);
    throw InputError("--dividend must be self, vtau:T or phi:P");
}

int run_divide(const Config& c)
{
    const double gamma = need_gamma(c);
    SubspaceSpec spec(c.n, c.k);
    auto M = sequence(c);
    auto h = build_flat(M, gamma, growth(c, M));
    const double tau = c.tau.value_or(1.0);
    if (!(tau > 0))
        throw InputError("--tau must be positive");
    auto grid = c.grid.empty() ? division_grid(spec) : parse_grid_csv(read_file(c.grid), c.n);
    auto r = divide_verify(dividend_field(c, h, tau, spec), h, tau, spec, grid, c.orders);
    // a sector of opening delta around the positive axis holds tau Phi(V_eps)
    const double delta = c.delta.value_or(0.75 * std::min(1.0, 2 * gamma));
    if (!(delta > 0 && delta < 1))
        throw InputError("--delta must lie in (0, 1)");
    const double eps = epsilon_select(spec, delta);
    auto rp = realpart_check(spec, eps, c.samples, c.seed);
    if (!c.csv.empty())
        write_text(c.csv, division_csv(r));
    Json body = division_json(r);
    body["realpart"] = realpart_json(rp);
    body["realpart"]["delta"] = delta;
    body["realpart"]["epsilon"] = eps;
    emit(c, body);
    return accepted_expectation(lower(c.expect), r.accepted && rp.violations == 0) ? 0 : 1;
}

void add_common(CLI::App* app, Config& c)
{
    app->add_option("--gevrey", c.gevrey, "Gevrey sequence M_j = j!^alpha")->check(CLI::PositiveNumber);
    app->add_option("--loggevrey", c.loggevrey, "M_j = j!^alpha (log j)^(beta j), takes ALPHA BETA")
        ->expected(2);
    app->add_flag("--expsquare", c.expsquare, "M_j = exp(j^2)");
    app->add_option("--table", c.table, "CSV j,logM with j = 0, 1, 2, ...");
    app->add_option("--jmax", c.jmax, "sequence budget J_max")->check(CLI::Range(8, 1 << 20));
    app->add_option("--tol", c.tol, "tolerance (gamma bracket width; extend recovery, default 1e-6)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--seed", c.seed, "seed for randomized samples");
    app->add_option("--out", c.out, "JSON output path (default stdout)");
    app->add_option("--expect", c.expect,
                    "check: strongly-regular | fails:COND[,COND]; gamma: gamma:LO,HI | korenblum:CLASS; "
                    "rho/flat/extend/divide: accepted | rejected");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Carleman classes: weight sequences, flat functions, extension and division"};
    app.require_subcommand(1);
    Config c;

    auto* check = app.add_subcommand("check", "regularity certificate of a weight sequence");
    add_common(check, c);
    check->add_option("--gamma", c.gamma, "also run the Korenblum test at this gamma");

    auto* gamma = app.add_subcommand("gamma", "growth index estimate");
    add_common(gamma, c);
    gamma->add_option("--gamma", c.gamma, "also run the Korenblum test at this gamma");

    auto* hm = app.add_subcommand("hm", "associated function log h_M");
    add_common(hm, c);
    hm->add_option("--t", c.t, "arguments t (default: grid over the resolvable range)");
    hm->add_option("--points", c.points, "grid size")->check(CLI::Range(2, 1000000));
    hm->add_option("--csv", c.csv, "CSV t,log_hM");

    auto* rho = app.add_subcommand("rho", "rho(s) with h_M(t) <= h_M(rho t)^s");
    add_common(rho, c);
    rho->add_option("--s", c.s, "power s")->check(CLI::PositiveNumber);
    rho->add_option("--points", c.points, "t grid size")->check(CLI::Range(2, 1000000));

    auto* flat = app.add_subcommand("flat", "flat function on S_gamma and its sandwich report");
    add_common(flat, c);
    flat->add_option("--gamma", c.gamma, "sector opening, below gamma(M)");
    flat->add_option("--samples", c.samples, "sample count")->check(CLI::Range(1, 1000000));
    flat->add_option("--rmin", c.rmin, "smallest |z|")->check(CLI::PositiveNumber);
    flat->add_option("--rmax", c.rmax, "largest |z|")->check(CLI::PositiveNumber);
    flat->add_option("--orders", c.orders, "derivative orders checked")->check(CLI::Range(0, 64));
    flat->add_option("--csv", c.csv, "sweep CSV");

    auto* ext = app.add_subcommand("extend", "extension of a jet and recovery of its asymptotics");
    add_common(ext, c);
    ext->add_option("--gamma", c.gamma, "sector opening, below gamma(M)");
    ext->add_option("--jet", c.jet, "CSV j,re_lambda,im_lambda");
    ext->add_option("--sigma", c.sigma, "jet scale sigma")->check(CLI::PositiveNumber);
    ext->add_option("--nmax", c.nmax, "highest order recovered")->check(CLI::Range(0, 60));
    ext->add_option("--ray", c.ray, "argument of the ray");
    ext->add_option("--q", c.q, "ramification (gamma >= 2; default minimal)")->check(CLI::Range(0, 64));

    auto* div = app.add_subcommand("divide", "division by the flat function v_tau");
    add_common(div, c);
    div->add_option("--gamma", c.gamma, "opening of the flat function, below gamma(M)");
    div->add_option("--n", c.n, "ambient dimension");
    div->add_option("--k", c.k, "codimension of V");
    div->add_option("--tau", c.tau, "divisor scale (default 1)");
    div->add_option("--dividend", c.dividend, "self | vtau:T | phi:P");
    div->add_option("--orders", c.orders, "derivative orders, at most 4");
    div->add_option("--grid", c.grid, "CSV x1,...,xn[,value] of points off V");
    div->add_option("--delta", c.delta, "realpart sector opening (default 0.75 min(1, 2 gamma))");
    div->add_option("--samples", c.samples, "realpart samples")->check(CLI::Range(1, 10000000));
    div->add_option("--csv", c.csv, "CSV x1,...,xn,log p_sigma(q)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    // --orders defaults differ: sandwich 8, finite differences 4
    if (div->parsed() && div->count("--orders") == 0)
        c.orders = 4;
    if (div->parsed() && div->count("--samples") == 0)
        c.samples = 1000;

    try {
        if (check->parsed())
            return c.command = "check", run_check(c);
        if (gamma->parsed())
            return c.command = "gamma", run_gamma(c);
        if (hm->parsed())
            return c.command = "hm", run_hm(c);
        if (rho->parsed())
            return c.command = "rho", run_rho(c);
        if (flat->parsed())
            return c.command = "flat", run_flat(c);
        if (ext->parsed())
            return c.command = "extend", run_extend(c);
        if (div->parsed())
            return c.command = "divide", run_divide(c);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
