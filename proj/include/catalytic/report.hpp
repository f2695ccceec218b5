#pragma once

#include <json.hpp>
#include <string>

#include "catalytic/asymptotics.hpp"
#include "catalytic/series.hpp"
#include "catalytic/structure.hpp"

namespace catalytic {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "catalytic-report/1";

// x rounded to 10 significant digits; null for non-finite values.
Json number_json(double x);

Json report_json(const SingularityReport& rep);
Json clt_json(const CatalyticEquation& eq, const CltReport& rep);
Json classify_json(const CatalyticEquation& eq);

std::string report_text(const SingularityReport& rep);
std::string clt_text(const CltReport& rep);

// "n,M0,M1" rows with exact rationals.
std::string coefficients_csv(const SectionSeries& s);

}  // namespace catalytic
