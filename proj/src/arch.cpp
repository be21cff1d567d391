#include "rentlens/arch.hpp"

#include <fstream>
#include <sstream>

#include "rentlens/error.hpp"

namespace rentlens {

void ArchSpec::validate() const {
  if (cluster_capacity < 1 || cluster_inputs < 1 || cluster_outputs < 1 ||
      clocks < 1) {
    throw DomainError("arch: all capacities must be >= 1");
  }
}

ArchSpec parse_arch(const std::string& text) {
  ArchSpec arch;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) {
      line.resize(hash);
    }
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) {
      continue;
    }
    std::string eq_or_value;
    if (!(ls >> eq_or_value)) {
      throw ParseError("arch key '" + key + "' has no value", line_no);
    }
    if (eq_or_value == "=" && !(ls >> eq_or_value)) {
      throw ParseError("arch key '" + key + "' has no value", line_no);
    }
    int value = 0;
    try {
      value = std::stoi(eq_or_value);
    } catch (const std::exception&) {
      throw ParseError("arch value '" + eq_or_value + "' is not an integer",
                       line_no);
    }
    if (key == "cluster_capacity") {
      arch.cluster_capacity = value;
    } else if (key == "cluster_inputs") {
      arch.cluster_inputs = value;
    } else if (key == "cluster_outputs") {
      arch.cluster_outputs = value;
    } else if (key == "clocks") {
      arch.clocks = value;
    } else {
      throw ParseError("unknown arch key '" + key + "'", line_no);
    }
  }
  arch.validate();
  return arch;
}

ArchSpec load_arch_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_arch(ss.str());
}

}  // namespace rentlens
