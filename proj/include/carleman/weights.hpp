#pragma once

#include <span>
#include <string>
#include <vector>

namespace carleman {

enum class Family { gevrey, log_gevrey, exp_square, tabulated };

struct FamilySpec {
    Family kind = Family::gevrey;
    double alpha = 1.0;
    double beta = 0.0;
    std::vector<double> log_values; // tabulated: log M_j, j = 0..J

    static FamilySpec gevrey(double alpha);
    static FamilySpec log_gevrey(double alpha, double beta);
    static FamilySpec exp_square();
    static FamilySpec tabulated_log(std::vector<double> log_values);
    static FamilySpec tabulated(const std::vector<double>& values);
};

// Weight sequence M_j held as log M_j, j = 0..J_max, with quotients
// log m_j = log M_{j+1} - log M_j.  Closed-form families can be evaluated
// past the table through log_M_cont / log_m_cont.
class WeightSequence {
public:
    WeightSequence(const FamilySpec& spec, int j_max);

    const FamilySpec& spec() const { return spec_; }
    double scale() const { return scale_; }
    int j_max() const { return static_cast<int>(logM_.size()) - 1; }

    double log_M(int j) const;
    double log_m(int j) const;
    const std::vector<double>& log_M_table() const { return logM_; }
    const std::vector<double>& log_m_table() const { return logm_; }
    bool quotients_monotone() const { return monotone_; }

    bool closed_form() const { return spec_.kind != Family::tabulated; }
    // First index from which the stored table equals the closed form.
    int closed_from() const { return closed_from_; }
    double log_M_cont(double j) const;
    double log_m_cont(double j) const;
    // lim log m_j / log j (infinite for exp_square, NaN for tabulated).
    double growth_exponent() const;

    // Index j of the piece h_M(t) = t^j M_j for L = -log t, or -1 when the
    // table cannot localize it.
    long table_piece(double L) const;
    // Same, continued through the closed form; returned as a double because
    // the index can exceed 2^53.
    double extended_piece(double L) const;

    std::string describe() const;

private:
    friend WeightSequence power(const WeightSequence& M, double s);
    WeightSequence() = default;
    void finish();

    FamilySpec spec_;
    double scale_ = 1.0;
    std::vector<double> logM_;
    std::vector<double> logm_;
    bool monotone_ = true;
    int closed_from_ = 0;
    // lower convex hull of the table, used by h_M
    std::vector<int> hull_j_;
    std::vector<double> hull_slope_;
};

WeightSequence make_sequence(const FamilySpec& spec, int j_max);

// log m_j for j < J; monotone receives whether the slice is non-decreasing.
std::vector<double> quotients(const WeightSequence& M, int J, bool* monotone = nullptr);

// log h_M(t), strict: throws BudgetError when t < 1/m_{J_max-1}.
double log_hM(const WeightSequence& M, double t);
// log h_M(t) continued through the closed form for tiny t.
double log_hM_ext(const WeightSequence& M, double t);
// Same two functions taking log t, for arguments that underflow.
double log_hM_log(const WeightSequence& M, double log_t);
double log_hM_ext_log(const WeightSequence& M, double log_t);
// Batch forms over many t; the OpenMP version must agree exactly.
std::vector<double> log_hM_batch_serial(const WeightSequence& M, std::span<const double> t);
std::vector<double> log_hM_batch(const WeightSequence& M, std::span<const double> t);

// Reference: min over j <= jmax of j log t + log M_j.
double log_hM_brute(const WeightSequence& M, double t, int jmax);

// Log-uniform grid of n points over the resolvable range [1/m_{J-1}, hi],
// clipped to representable doubles.
std::vector<double> resolvable_t_grid(const WeightSequence& M, int n, double hi_factor = 2.0);

// sup over the grid of -j log t + log h_M(t).
double recover_logM(const WeightSequence& M, int j, std::span<const double> t_grid);

enum class Condition { mnorm, mlogc, mmodg, msnqa };
std::string to_string(Condition c);

struct RegularityCertificate {
    bool mnorm_ok = false;
    bool mlogc_ok = false;
    bool mmodg_ok = false;
    bool msnqa_ok = false;
    double A_mg = 1.0;
    double A_mg_half = 1.0; // same fit at J/2, for the drift test
    double A_snqa = 1.0;
    double A_snqa_half = 1.0;
    double snqa_exponent = 0.0; // local decay exponent of the terms 1/((j+1) m_j)
    double denjoy_partial = 0.0;
    std::vector<Condition> failed;
    int J_used = 0;
    // consequences, evaluated only for strongly regular verdicts
    bool mfast_ok = false;
    bool quot1_ok = false;
    bool quot2_ok = false;

    bool strongly_regular() const { return failed.empty(); }
    // max(A_mg, A_snqa), the single constant used downstream
    double A() const { return A_mg > A_snqa ? A_mg : A_snqa; }
};

RegularityCertificate check_regularity(const WeightSequence& M, int J);

// Moderate growth fit: max over 1 <= j+k <= J of
// (log M_{j+k} - log M_j - log M_k)/(j+k), and the min of the numerator.
struct ModerateGrowthFit {
    double log_A = 0.0;
    double min_excess = 0.0;
};
ModerateGrowthFit moderate_growth_serial(const WeightSequence& M, int J);
ModerateGrowthFit moderate_growth(const WeightSequence& M, int J);

WeightSequence power(const WeightSequence& M, double s);

struct RhoEstimate {
    bool ok = false;
    double rho = 0.0;
    double s = 1.0;
    std::vector<double> t_grid;
};
RhoEstimate rho_estimate(const WeightSequence& M, double s, std::span<const double> t_grid);

// Fit of a power-law exponent p with term_j ~ c (j+1)^{-p} over the last
// decade [J/10, J) of a positive sequence given in logs.
double tail_exponent(std::span<const double> log_terms);
// Extrapolated sum of terms j >= J given the fitted exponent (needs p > 1).
double power_tail_remainder(double log_term_last, int J, double p);

} // namespace carleman
