#pragma once

#include <cstddef>
#include <string>

namespace icl {

enum class OutputFormat { json, csv };

// Central knob block shared by the CLI and the test drivers. Library functions
// take the specific numbers they need as arguments; this struct only bundles
// the defaults so every entry point agrees on them.
struct RunConfig {
    std::size_t grid_n = 4096;     // samples per curve
    double fd_step = 1e-3;         // finite-difference step for variation checks
    double root_tol = 1e-12;       // bisection / Newton residual target
    double mu_scan_step = 1e-3;    // grid step for the determinant root scan
    std::string output_dir = ".";
    OutputFormat format = OutputFormat::json;
    bool svg = false;

    bool valid() const {
        return grid_n >= 64 && fd_step > 0.0 && root_tol > 0.0 && mu_scan_step > 0.0;
    }
};

}  // namespace icl
