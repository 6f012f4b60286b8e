#pragma once

#include <nlohmann/json.hpp>

#include <string>

#include "mmflow/config.hpp"
#include "mmflow/curves.hpp"
#include "mmflow/geodesics.hpp"
#include "mmflow/paths.hpp"
#include "mmflow/report.hpp"
#include "mmflow/space.hpp"
#include "mmflow/transport.hpp"

namespace mmflow {

using json = nlohmann::json;

/// {"points":[ids], "dist":[[...]], "measure":[...], "edges":[[i,j,w],...]}
json space_to_json(const Space& space);
Space space_from_json(const json& j);

/// Emits {"density":[...]}; reads either {"density":[...]} or {"mass":[...]}.
json measure_to_json(const ProbMeasure& mu);
ProbMeasure measure_from_json(const Space& space, const json& j);

/// A bare array or {"values":[...]}.
Field field_from_json(const json& j);
json field_to_json(const Field& f);

/// {"times":[...], "densities":[[...],...]}
json curve_to_json(const CurveSample& curve);
CurveSample curve_from_json(const Space& space, const json& j);

/// {"times":[...], "paths":[[point ids]], "weights":[...]}
json plan_to_json(const Space& space, const Plan& plan);
Plan plan_from_json(const Space& space, const json& j);

/// Bundle carries its space so it can be verified on its own.
json bundle_to_json(const Space& space, const GeodesicBundle& bundle);
GeodesicBundle bundle_from_json(const Space& space, const json& j);

json ot_result_to_json(const Space& space, const OTResult& r);

/// Report text with every number printed to 17 significant digits;
/// non-finite numbers are written as null.
std::string report_to_string(const VerificationReport& report, bool with_wall_time = true);
VerificationReport report_from_json(const json& j);

Config config_from_json(const json& j, Config base = {});

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace mmflow
