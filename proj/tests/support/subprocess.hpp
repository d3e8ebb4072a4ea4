#ifndef TESTROLL_TESTS_SUBPROCESS_HPP
#define TESTROLL_TESTS_SUBPROCESS_HPP

#include <string>
#include <vector>

namespace subprocess {

struct Result {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Runs an executable with the given arguments, capturing stdout and
// stderr separately.  Arguments are shell-quoted; the exit code is the
// child's wait status translated the usual way.
Result run(const std::string& exe, const std::vector<std::string>& args);

// Convenience wrapper prepending the command line tool path baked in at
// configure time.  Defined in the header so the macro is taken from the
// including target, not from the support library build.
#ifdef TESTROLL_CLI_PATH
inline Result run_cli(const std::vector<std::string>& args) {
    return run(TESTROLL_CLI_PATH, args);
}
#endif

}  // namespace subprocess

#endif
