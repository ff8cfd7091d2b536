#pragma once

namespace cpimpute {

/// Selects between the OpenMP kernels and their serial reference loops.
struct ExecutionPolicy {
    bool parallel = true;
    int threads = 0;  ///< 0 = OpenMP default

    static ExecutionPolicy serial() { return {false, 1}; }
};

/// Threads OpenMP would use for `policy`.
int effective_threads(const ExecutionPolicy& policy);

}  // namespace cpimpute
