#pragma once

#include <string>

namespace rentlens {

// Cluster-level architecture limits (one CLB flavour, soft logic only).
struct ArchSpec {
  int cluster_capacity = 10;  // BLEs per CLB
  int cluster_inputs = 40;
  int cluster_outputs = 10;
  int clocks = 1;

  void validate() const;
};

// Key-value text file, one `key value` pair per line, '#' comments.
// Unknown keys are an error; missing keys keep their defaults.
ArchSpec parse_arch(const std::string& text);
ArchSpec load_arch_file(const std::string& path);

}  // namespace rentlens
