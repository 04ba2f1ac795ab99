#pragma once

#include "bivirus/rates.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <utility>

namespace bivirus::cli {

/// Exit codes of `run`.
inline constexpr int kOk = 0;
inline constexpr int kModuleError = 1;
inline constexpr int kConfigError = 2;

class ConfigError : public Error {
public:
    using Error::Error;
};

/// (infection, recovery) pair parsed from "linear:beta=..,delta=..",
/// "case2:alpha=..,delta=.." or "case3:alpha=..,k=..".
std::pair<RateModel, RateModel> parse_rates(const std::string& spec,
                                            std::shared_ptr<const Graph> graph);

/// Runs the command line; output files go under --out.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bivirus::cli
