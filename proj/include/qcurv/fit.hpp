#pragma once

#include <vector>

namespace qcurv {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
};

// Ordinary least squares y = slope x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Fit of ln|y| against x; throws on a zero sample.
LineFit fit_log(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qcurv
