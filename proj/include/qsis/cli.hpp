#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qsis {

// Command-line front end. Returns 0 on success, 1 on a domain error (bad
// input data, non-equitable partition, failed experiment check) and 2 on a
// usage error.
int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);
// Same, with args[0] taken as the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace qsis
