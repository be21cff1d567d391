#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rentlens/netlist.hpp"

namespace rentlens {

// Parse one flat BLIF model (.model/.inputs/.outputs/.names/.latch/.subckt/
// .end, `#` comments, `\` continuations). Latch control nets are marked
// global; an undriven control net gets an implicit primary input. Undriven
// ordinary nets are kept, flagged dangling, and reported as warnings.
// Throws ParseError on malformed input.
Netlist parse_blif(std::string_view text,
                   std::vector<std::string>* warnings = nullptr);

Netlist parse_blif_file(const std::string& path,
                        std::vector<std::string>* warnings = nullptr);

// Emit the netlist as BLIF. parse_blif(write_blif(n)) preserves block and
// net names, kinds, and the full pin incidence.
std::string write_blif(const Netlist& netlist);

}  // namespace rentlens
