#ifndef MALIGN_CLI_HPP
#define MALIGN_CLI_HPP

#include <string>

#include "malign/report.hpp"

namespace malign {

struct ExecResult {
    ordered_json report;
    std::string csv;
    std::string svg;
};

/// Runs one subcommand from its canonical config; both the flag parser and
/// manifest replay funnel through here, so identical configs give identical
/// reports. Worker counts are runtime-only and never part of the config.
ExecResult execute_command(const std::string& command, const ordered_json& config, int workers);

/// Full CLI: parse argv, run, write artifacts. Exit code 0 on success, 2 on
/// validation/usage errors, 3 on budget errors.
int run_command(int argc, const char* const* argv);

} // namespace malign

#endif
