#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qsl::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  /// A requested certificate has valid == false (and --allow-invalid was not given).
  kInvalidCertificate = 1,
  /// Bad arguments, unsupported representation or a violated precondition.
  kUsage = 2,
  /// Depth cap, allocation or file-system failure.
  kResource = 3,
};

/// Runs one invocation; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qsl::cli
