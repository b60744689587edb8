#include "trackfuse/process.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "trackfuse/errors.hpp"

namespace trackfuse {

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

ProcessResult run_command(const std::string& command, const std::string& stdin_text,
                          const std::string& scratch_dir) {
    std::filesystem::create_directories(scratch_dir);
    const std::string in_path = scratch_dir + "/cmd_stdin";
    const std::string out_path = scratch_dir + "/cmd_stdout";
    const std::string err_path = scratch_dir + "/cmd_stderr";
    {
        std::ofstream in(in_path, std::ios::binary);
        if (!in) throw ConfigError("run_command: cannot write " + in_path);
        in << stdin_text;
    }

    const std::string full = command + " < '" + in_path + "' > '" + out_path + "' 2> '" +
                             err_path + "'";
    const int status = std::system(full.c_str());

    ProcessResult result;
    result.output = slurp(out_path);
    result.error = slurp(err_path);
    if (status < 0) {
        result.exit_code = -1;
    } else {
        result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
    return result;
}

} // namespace trackfuse
