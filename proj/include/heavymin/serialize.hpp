#pragma once

#include <string>

#include <json.hpp>

#include "heavymin/construct.hpp"
#include "heavymin/risk.hpp"
#include "heavymin/verify.hpp"

namespace heavymin {

// Structured-document schema.  Field order is fixed (ordered_json) and all
// numerics are decimal strings carrying 17 significant digits plus explicit
// log / log-log mirrors, so the same inputs serialize to identical bytes
// and round-trip to identical doubles.

using Json = nlohmann::ordered_json;

std::string format_double(double v);   // %.17g; "inf"/"-inf"/"nan" specials
double parse_double(const std::string& s);

Json wide_to_json(const WideReal& w);
WideReal wide_from_json(const Json& j);

Json target_to_json(const TargetDistribution& t);
TargetDistribution target_from_json(const Json& j);

Json gauge_to_json(const GrowthFunction& g);
GrowthFunction gauge_from_json(const Json& j);

Json risk_to_json(const RiskFunction& r);
RiskFunction risk_from_json(const Json& j);

// Plan documents: target, gauge, policy, n, k, subset order (1-based),
// breakpoints, and per-interval frozen set / gap / certificate.
Json plan_to_json(const ConstructionPlan& plan);
std::shared_ptr<const ConstructionPlan> plan_from_json(const Json& j);

// Family documents wrap either a plan or closed-form component risks
// (square-root split).
Json family_to_json(const HeavyFamily& family);
HeavyFamily family_from_json(const Json& j);

Json report_to_json(const VerificationReport& report);

std::string to_document(const Json& j);  // canonical bytes (2-space indent)
Json from_document(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace heavymin
