#include "mdoe/design_io.hpp"

#include <charconv>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "mdoe/error.hpp"

namespace mdoe {

void write_design(std::ostream& out, const DesignRecord& record, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << std::setprecision(17);
  out << "p " << record.p << '\n';
  out << "logdet " << record.logdet << '\n';
  out << "gap " << record.gap << '\n';
  out << "iterations " << record.iterations << '\n';
  for (std::size_t s = 0; s < record.design.support.size(); ++s) {
    out << record.design.support[s] << ' ' << record.design.weights[s] << '\n';
  }
}

DesignRecord read_design(std::istream& in) {
  DesignRecord record;
  std::string line;
  int line_no = 0;
  int headers = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::ParseError, "design file line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    if (key == "p") {
      if (!(fields >> record.p)) fail("bad p");
      ++headers;
    } else if (key == "logdet") {
      if (!(fields >> record.logdet)) fail("bad logdet");
      ++headers;
    } else if (key == "gap") {
      if (!(fields >> record.gap)) fail("bad gap");
      ++headers;
    } else if (key == "iterations") {
      if (!(fields >> record.iterations)) fail("bad iterations");
      ++headers;
    } else {
      Index idx = 0;
      const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
      if (ec != std::errc() || ptr != key.data() + key.size()) fail("expected '<index> <weight>'");
      double w = 0.0;
      if (!(fields >> w)) fail("missing weight");
      record.design.support.push_back(idx);
      record.design.weights.push_back(w);
    }
    std::string extra;
    if (fields >> extra) fail("trailing field '" + extra + "'");
  }
  if (headers != 4) throw Error(ErrorCode::ParseError, "design file is missing one of p/logdet/gap/iterations");
  return record;
}

}  // namespace mdoe
