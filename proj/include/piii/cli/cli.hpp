#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "piii/numflow/trajectory.hpp"

namespace piii::cli {

// Exit codes.
enum Exit : int { ok = 0, failed = 1, invalid_input = 2, numerical_failure = 3 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Complex flag values: "re" or "re+im i" with integer, rational or decimal
// parts; scientific notation is accepted as a plain double.
std::complex<double> parse_complex(const std::string& text);

nlohmann::json trajectory_to_json(const numflow::Trajectory& tr);
numflow::Trajectory trajectory_from_json(const nlohmann::json& j);

}  // namespace piii::cli
