#pragma once

#include <string>

namespace trackfuse {

struct ProcessResult {
    int exit_code = -1;
    std::string output; // combined stdout
    std::string error;  // stderr
};

/// Runs `command` through the shell, feeding `stdin_text` and capturing both
/// streams via scratch files in `scratch_dir`. Blocking.
ProcessResult run_command(const std::string& command, const std::string& stdin_text,
                          const std::string& scratch_dir);

} // namespace trackfuse
