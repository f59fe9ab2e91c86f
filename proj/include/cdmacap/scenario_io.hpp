#pragma once

#include <string>

#include "cdmacap/scenario.hpp"

namespace cdmacap {

// Parse an INI scenario description. Sections: [system], [input], [signature],
// [gain], [allocation], [estimation], [noise], [mc]. Throws
// std::runtime_error with "<source>:<line>: ..." context on malformed input.
Scenario parse_scenario_ini(const std::string& text, const std::string& source_name = "<memory>");

Scenario load_scenario_file(const std::string& path);

// Human-readable echo of the parsed scenario plus derived quantities
// (loading, moments, difference support, noise variance per eta).
std::string validation_report(const Scenario& sc);

}  // namespace cdmacap
