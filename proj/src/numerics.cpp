#include "numerics.hpp"

#include <numbers>

namespace nhflow::num {

// Newton iteration on Legendre polynomials; standard construction.
void gauss_legendre(int npts, std::vector<double>& x, std::vector<double>& w) {
    if (npts < 2) throw std::invalid_argument("gauss_legendre: need at least 2 points");
    x.assign(npts, 0.0);
    w.assign(npts, 0.0);
    const int half = (npts + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based initial guess for the i-th positive root.
        double z = std::cos(std::numbers::pi * (i + 0.75) / (npts + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < npts; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = npts * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[npts - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[npts - 1 - i] = w[i];
    }
    if (npts % 2 == 1) x[npts / 2] = 0.0;
}

}  // namespace nhflow::num
