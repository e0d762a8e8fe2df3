#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "spectree/asymptotics.hpp"

namespace spectree::report {

using json = nlohmann::ordered_json;

// Number formatting shared by all writers: shortest round-trip via the
// library for JSON, "%.12g" for CSV. Identical config therefore yields
// byte-identical files.
std::string format_double(double v);

json sweep_to_json(const asymp::SweepReport& rep);
std::string sweep_to_csv(const asymp::SweepReport& rep);

// Minimal standalone SVG: log-log scatter of (lambda, |E1|) with the fitted
// line overlaid (or ln|E| vs 1/lambda for the d = 2 regime).
std::string sweep_to_svg(const asymp::SweepReport& rep);

void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const json& j);

}  // namespace spectree::report
