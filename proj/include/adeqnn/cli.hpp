#pragma once

namespace adeqnn::cli {

// Full command-line dispatch (classify, qgan, qgdm, gate_check, verify).
// Returns the process exit status: 0 success, 1 verification or training
// failure, 2 usage or data errors. Never calls exit().
int run(int argc, const char* const* argv);

}  // namespace adeqnn::cli
