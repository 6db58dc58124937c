// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace otfsr::acceptance {

struct Outcome {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;  ///< 0: no runtime clause
};

Outcome window_autocorr_closed_form();
Outcome nyquist_orthonormality();
Outcome channel_cross_validation();
Outcome circulant_discrepancy_phase();
Outcome integer_bin_detection();
Outcome doppler_sweep();
Outcome rmse_ordering();
/// Exports the maps into `scratch` and reads the CSVs back.
Outcome ambiguity_oscillation(const std::filesystem::path& scratch);
/// Writes two montecarlo CSVs into `scratch` and compares their bytes.
Outcome determinism(const std::filesystem::path& scratch);

std::vector<Outcome> run_all(const std::filesystem::path& scratch);

/// "PASS [n] name (1.23 s): detail"
std::string format(const Outcome& o);

}  // namespace otfsr::acceptance
