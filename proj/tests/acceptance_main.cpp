// SPDX-License-Identifier: Apache-2.0
// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <cstdio>
#include <filesystem>

#include "otfsr/acceptance.hpp"

int main(int argc, char** argv) {
    const std::filesystem::path scratch =
        argc > 1 ? std::filesystem::path(argv[1]) : std::filesystem::temp_directory_path() / "otfsr_acceptance";
    int failed = 0;
    for (const auto& o : otfsr::acceptance::run_all(scratch)) {
        std::printf("%s\n", otfsr::acceptance::format(o).c_str());
        std::fflush(stdout);
        failed += !o.passed;
    }
    std::printf("%d of 9 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
