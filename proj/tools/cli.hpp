#pragma once

namespace patronage::cli {

/// Full command-line program. Returns the process exit code: 0 success,
/// 1 usage or configuration, 2 data, 3 numerical failure.
int run(int argc, const char* const* argv);

}  // namespace patronage::cli
