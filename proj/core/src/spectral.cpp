#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "picnn/error.hpp"
#include "picnn/spectral.hpp"

namespace picnn::spectral {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_truncation(std::size_t samples, int truncation) {
    if (truncation < 0 || static_cast<std::size_t>(truncation) > samples / 2)
        throw std::invalid_argument("truncation K must satisfy 0 <= K <= M/2");
}

// Multiplicity of frequency |k| in the symmetric sum; the Nyquist bin has no partner.
double multiplicity(int k, std::size_t samples) {
    return (k == 0 || 2 * static_cast<std::size_t>(k) == samples) ? 1.0 : 2.0;
}

}  // namespace

SpectralWeightTable::SpectralWeightTable(double length, double sigma, int truncation)
    : length_(length), sigma_(sigma), truncation_(truncation) {
    if (!(length > 0.0)) throw std::invalid_argument("boundary length must be positive");
    if (truncation < 0) throw std::invalid_argument("truncation must be non-negative");
    weights_.resize(static_cast<std::size_t>(truncation) + 1);
    for (int k = 0; k <= truncation; ++k) {
        const double lam = std::pow(kTwoPi * k / length, 2);
        weights_[k] = std::pow(1.0 + lam, sigma);
    }
}

double SpectralWeightTable::weight(int k) const {
    const int a = std::abs(k);
    if (a > truncation_) throw std::out_of_range("frequency beyond truncation");
    return weights_[a];
}

double spectral_penalty(std::span<const double> e, const SpectralWeightTable& table) {
    check_truncation(e.size(), table.truncation());
    const BoundarySpectrum spec = fft_real(e);
    double total = 0.0;
    for (int k = 0; k <= table.truncation(); ++k) total += multiplicity(k, e.size()) * table.weight(k) * std::norm(spec.at(k));
    return total;
}

double spectral_penalty(std::span<const double> e, const SpectralWeightTable& table, std::span<double> grad) {
    if (grad.size() != e.size()) throw ShapeError("gradient length must match sample count");
    check_truncation(e.size(), table.truncation());
    const BoundarySpectrum spec = fft_real(e);
    const std::size_t m = e.size();
    const int im = static_cast<int>(m);

    // d/de_j sum_k w_k |e_hat_k|^2 = (2/M) Re sum_k w_k e_hat_k exp(2 pi i jk/M)
    std::vector<Complex> c(m, Complex(0.0, 0.0));
    double total = 0.0;
    for (int k = 0; k <= table.truncation(); ++k) {
        const double w = table.weight(k);
        total += multiplicity(k, m) * w * std::norm(spec.at(k));
        c[k] = w * spec.bins()[k];
        if (k != 0 && 2 * k != im) c[m - k] = w * spec.bins()[m - k];
    }
    fft_inplace(c, true);
    const double scale = 2.0 / static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) grad[j] = scale * c[j].real();
    return total;
}

double sobolev_penalty(std::span<const double> e, double length, double s, int truncation) {
    return spectral_penalty(e, SpectralWeightTable(length, trace_order(s), truncation));
}

Eigen::MatrixXd penalty_matrix(int samples, double length, double s, int truncation) {
    if (samples < 4 || !is_power_of_two(static_cast<std::size_t>(samples)))
        throw std::invalid_argument("sample count must be a power of two >= 4");
    check_truncation(static_cast<std::size_t>(samples), truncation);
    const SpectralWeightTable table(length, trace_order(s), truncation);
    // Circulant: A_jl depends on (j - l) mod M only.
    Eigen::VectorXd row(samples);
    const double m2 = static_cast<double>(samples) * samples;
    for (int d = 0; d < samples; ++d) {
        // Fold the offset so A is exactly symmetric.
        const int fold = std::min(d, samples - d);
        double acc = 0.0;
        for (int k = 0; k <= truncation; ++k) {
            acc += multiplicity(k, samples) * table.weight(k) * std::cos(kTwoPi * k * fold / samples);
        }
        row(d) = acc / m2;
    }
    Eigen::MatrixXd a(samples, samples);
    for (int j = 0; j < samples; ++j) {
        for (int l = 0; l < samples; ++l) a(j, l) = row((j - l + samples) % samples);
    }
    return a;
}

Eigenbasis circle_eigenbasis(int samples, double length, int truncation) {
    if (samples < 1 || truncation < 0 || 2 * truncation > samples)
        throw std::invalid_argument("eigenbasis needs 0 <= K <= M/2");
    Eigenbasis b;
    b.psi.resize(2 * truncation, samples);
    b.eigenvalues.resize(2 * truncation);
    for (int k = 1; k <= truncation; ++k) {
        const double lam = std::pow(kTwoPi * k / length, 2);
        for (int j = 0; j < samples; ++j) {
            const double ang = kTwoPi * k * j / samples;
            b.psi(2 * (k - 1), j) = std::numbers::sqrt2 * std::cos(ang);
            b.psi(2 * (k - 1) + 1, j) = std::numbers::sqrt2 * std::sin(ang);
        }
        b.eigenvalues(2 * (k - 1)) = lam;
        b.eigenvalues(2 * (k - 1) + 1) = lam;
    }
    return b;
}

double plugin_penalty(std::span<const double> r, const Eigenbasis& basis, double sigma, std::span<double> grad) {
    const auto m = static_cast<Eigen::Index>(r.size());
    if (basis.psi.cols() != m || basis.psi.rows() != basis.eigenvalues.size())
        throw ShapeError("eigenfunction table shape does not match residuals");
    if (!grad.empty() && static_cast<Eigen::Index>(grad.size()) != m) throw ShapeError("gradient length mismatch");
    const Eigen::Map<const Eigen::VectorXd> rv(r.data(), m);
    const Eigen::VectorXd coef = basis.psi * rv / static_cast<double>(m);
    Eigen::VectorXd weight(coef.size());
    for (Eigen::Index k = 0; k < coef.size(); ++k) weight(k) = std::pow(basis.eigenvalues(k), sigma);
    if (!grad.empty()) {
        Eigen::Map<Eigen::VectorXd> g(grad.data(), m);
        g.noalias() = basis.psi.transpose() * (weight.cwiseProduct(coef)) * (2.0 / static_cast<double>(m));
    }
    return weight.dot(coef.cwiseAbs2());
}

double plugin_penalty(std::span<const double> r, const Eigenbasis& basis, double sigma) {
    return plugin_penalty(r, basis, sigma, {});
}

double slobodeckij_oracle(std::span<const double> e, double length, double sigma) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("sigma must lie in (0, 1)");
    const std::size_t m = e.size();
    if (m < 2) throw std::invalid_argument("need at least two samples");
    const double h = length / static_cast<double>(m);
    const double expo = 1.0 + 2.0 * sigma;
    // Kernel depends only on the cyclic offset.
    std::vector<double> kernel(m, 0.0);
    for (std::size_t d = 1; d < m; ++d) {
        const double rho = (length / std::numbers::pi) * std::sin(std::numbers::pi * d * h / length);
        kernel[d] = 1.0 / std::pow(rho, expo);
    }
    double semi = 0.0, l2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        l2 += e[i] * e[i];
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            const double diff = e[i] - e[j];
            semi += diff * diff * kernel[(j + m - i) % m];
        }
    }
    return semi * h * h + l2 * h;
}

}  // namespace picnn::spectral
