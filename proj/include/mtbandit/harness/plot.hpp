#pragma once

#include <string>
#include <vector>

#include "mtbandit/harness/trace_io.hpp"

namespace mtbandit::harness {

/// Time-average regret curves with +/- 1 std bands, one color per algorithm in first-seen order.
/// Output depends only on the rows, so the same summary always gives the same bytes.
std::string render_svg(const std::vector<SummaryRow>& rows, const std::string& title = "time-average regret");

}  // namespace mtbandit::harness
