#pragma once

#include "carleman/divide.hpp"
#include "carleman/extend.hpp"
#include "carleman/index.hpp"
#include "carleman/outerflat.hpp"
#include "carleman/weights.hpp"

#include "json.hpp"

#include <span>
#include <string>
#include <vector>

namespace carleman {

using Json = nlohmann::ordered_json;

// "StronglyRegular" or "Fails:<cond>,<cond>"
std::string verdict(const RegularityCertificate& c);

Json certificate_json(const RegularityCertificate& c);
Json gamma_json(const GammaEstimate& e);
Json korenblum_json(const KorenblumResult& k);
Json rho_json(const RhoEstimate& r);
Json sandwich_json(const SandwichReport& r);
Json asymptotics_json(const AsymptoticsReport& r);
Json division_json(const DivisionReport& r);
Json realpart_json(const RealpartCheck& r);

// Pretty-printed with a trailing newline. Doubles use the shortest form that
// reads back to the same value; non-finite values become null.
std::string dump(const Json& j);

// "j,logM" rows with j = 0, 1, 2, ... and an optional header
std::vector<double> parse_sequence_csv(const std::string& text);

// "x1,...,xn[,value]" rows; the value column is ignored
std::vector<std::vector<double>> parse_grid_csv(const std::string& text, int n);

// log_r,theta,re_logG,im_logG,log_hM_upper,log_hM_lower with the fitted
// kappas of the report, one row per sample
std::string sweep_csv(const SandwichReport& r, const WeightSequence& M);

// x1,...,xn,value with value = log p_sigma(q, x)
std::string division_csv(const DivisionReport& r);

// shortest round-trip decimal form of a double
std::string format_double(double x);

} // namespace carleman
