#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "xgw/chat.hpp"

namespace xgw::app {

// Entry point of the xgw tool; returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// "1..5", "1,3,5", "case2" and mixtures like "1..2,case5".
std::vector<CaseId> parse_case_list(const std::string& text);

}  // namespace xgw::app
