#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "picnn/spectral.hpp"

namespace picnn::spectral {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_inplace(std::vector<Complex>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) throw std::invalid_argument("FFT length must be a power of two");

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        // Twiddles computed directly per index rather than by repeated
        // multiplication, which keeps the error at O(eps log M).
        std::vector<Complex> tw(half);
        for (std::size_t k = 0; k < half; ++k) {
            const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len);
            tw[k] = {std::cos(ang), std::sin(ang)};
        }
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const Complex u = a[start + k];
                const Complex v = a[start + k + half] * tw[k];
                a[start + k] = u + v;
                a[start + k + half] = u - v;
            }
        }
    }
}

Complex BoundarySpectrum::at(int k) const {
    const int m = size();
    if (k < -m / 2 || k > m / 2) throw std::out_of_range("frequency outside [-M/2, M/2]");
    return bins_[static_cast<std::size_t>((k % m + m) % m)];
}

BoundarySpectrum fft_real(std::span<const double> e) {
    if (e.size() < 4 || !is_power_of_two(e.size()))
        throw std::invalid_argument("boundary sample count must be a power of two >= 4");
    std::vector<Complex> a(e.begin(), e.end());
    fft_inplace(a);
    const double scale = 1.0 / static_cast<double>(e.size());
    for (auto& c : a) c *= scale;
    return BoundarySpectrum(std::move(a));
}

}  // namespace picnn::spectral
