#include <cmath>
#include <stdexcept>

#include "picnn/constructions.hpp"

namespace picnn::construct {

double bspline_integral(int p, double t) {
    if (p < 1) throw std::invalid_argument("cutoff order must be >= 1");
    if (t <= 0.0) return 0.0;
    if (t >= p + 1.0) return 1.0;
    // (1/(p+1)!) sum_j (-1)^j C(p+1, j) (t - j)_+^{p+1}
    double acc = 0.0, binom = 1.0, fact = 1.0;
    for (int j = 1; j <= p + 1; ++j) fact *= j;
    for (int j = 0; j <= p + 1; ++j) {
        const double base = t - j;
        if (base > 0.0) acc += (j % 2 ? -1.0 : 1.0) * binom * std::pow(base, p + 1);
        binom = binom * (p + 1 - j) / (j + 1);
    }
    return acc / fact;
}

double bspline_cutoff(const CutoffSpec& spec, double t) {
    return 1.0 - bspline_integral(spec.p, (spec.p + 1) * (t - 1.0));
}

}  // namespace picnn::construct
