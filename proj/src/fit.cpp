#include "qcurv/fit.hpp"

#include "qcurv/constants.hpp"

#include <cmath>

namespace qcurv {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ParamError("fit_line: need two or more matching samples");
    double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw ParamError("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double r = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double e = y[i] - f.slope * x[i] - f.intercept;
        r += e * e;
    }
    f.rms = std::sqrt(r / n);
    return f;
}

LineFit fit_log(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> ly(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 0.0) throw ParamError("fit_log: zero sample");
        ly[i] = std::log(std::abs(y[i]));
    }
    return fit_line(x, ly);
}

}  // namespace qcurv
