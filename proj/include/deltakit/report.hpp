#pragma once

// Deterministic renderings of a Report: machine JSON, human Markdown, and a
// flat CSV of the chamber tables. No floats, no timestamps — byte-identical
// output for identical runs.

#include "deltakit/scenario.hpp"

#include <string>

namespace dk {

std::string report_json(const Report& rep);
std::string report_markdown(const Report& rep);
std::string report_csv(const Report& rep);

}  // namespace dk
