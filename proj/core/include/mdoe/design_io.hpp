#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mdoe/design.hpp"

namespace mdoe {

/// Plain-text design record:
///
///   # optional comment lines
///   p <int>
///   logdet <real>
///   gap <real>
///   iterations <int>
///   <index> <weight>      one line per support point
struct DesignRecord {
  Eigen::Index p = 0;
  double logdet = 0.0;
  double gap = 0.0;
  int iterations = 0;
  ContinuousDesign design;
};

void write_design(std::ostream& out, const DesignRecord& record, const std::vector<std::string>& comments = {});
/// Throws ParseError with the offending line number.
DesignRecord read_design(std::istream& in);

}  // namespace mdoe
