#pragma once

#include "cubic3/forms.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fixtures {

inline std::string path(const std::string& name) { return std::string(CUBIC3_FIXTURES) + "/" + name + ".txt"; }

// Lines starting with '#' are comments; the rest is one polynomial.
inline std::string text(const std::string& name) {
  std::ifstream in(path(name));
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::string line, out;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') out += line + " ";
  return out;
}

inline cubic3::Form load(const std::string& name) { return cubic3::parse_form(text(name)); }

}  // namespace fixtures
