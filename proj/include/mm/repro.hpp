#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mm {

/// Self-contained demonstration targets. Each prints claimed vs computed
/// quantities and returns false on any mismatch.
/// Names: refusal-equilibrium, fig1-overbid, truthful-greedy,
/// pandora-binary, group-demo, lovers-demo.
bool run_repro(const std::string& name, std::ostream& out);

std::vector<std::string> repro_names();

}  // namespace mm
