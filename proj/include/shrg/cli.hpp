#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace shrg::cli {

// args excludes the program name. Exit codes: 0 ok, 1 usage or validation
// error, 2 I/O error.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace shrg::cli
