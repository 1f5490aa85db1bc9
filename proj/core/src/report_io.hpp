#pragma once

#include <string>

#include "declsolve/eval.hpp"

namespace declsolve::detail {

/// Contents of run.json: everything in a report except the records.
std::string run_header_json(const RunReport& report);

}  // namespace declsolve::detail
