#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace picnn::spectral {

using Complex = std::complex<double>;

bool is_power_of_two(std::size_t n);

/// In-place radix-2 decimation-in-time transform, unnormalized.
/// Forward uses exp(-2 pi i jk/M); `inverse` flips the sign of the exponent.
void fft_inplace(std::vector<Complex>& a, bool inverse = false);

/// Normalized coefficients e_hat_k = (1/M) sum_j e_j exp(-2 pi i jk/M).
class BoundarySpectrum {
public:
    explicit BoundarySpectrum(std::vector<Complex> bins) : bins_(std::move(bins)) {}

    int size() const { return static_cast<int>(bins_.size()); }
    /// Coefficient for k in [-M/2, M/2].
    Complex at(int k) const;
    /// Raw DFT bins, index 0..M-1.
    const std::vector<Complex>& bins() const { return bins_; }

private:
    std::vector<Complex> bins_;
};

/// Requires a power-of-two length of at least 4.
BoundarySpectrum fft_real(std::span<const double> e);

/// w_k = (1 + (2 pi k / L)^2)^sigma for 0 <= k <= K.
class SpectralWeightTable {
public:
    SpectralWeightTable(double length, double sigma, int truncation);

    double length() const { return length_; }
    double sigma() const { return sigma_; }
    int truncation() const { return truncation_; }
    double weight(int k) const;
    const std::vector<double>& weights() const { return weights_; }

private:
    double length_;
    double sigma_;
    int truncation_;
    std::vector<double> weights_;
};

/// Exponent 2s - 1/2 of the trace space H^{2s-1/2}.
inline double trace_order(double s) { return 2.0 * s - 0.5; }

/// sum_{|k|<=K} w_k |e_hat_k|^2 with the Nyquist bin counted once.
double spectral_penalty(std::span<const double> e, const SpectralWeightTable& table);

/// Same value; writes d(penalty)/de into grad.
double spectral_penalty(std::span<const double> e, const SpectralWeightTable& table, std::span<double> grad);

double sobolev_penalty(std::span<const double> e, double length, double s, int truncation);

/// Dense circulant A with e^T A e == sobolev_penalty(e).
Eigen::MatrixXd penalty_matrix(int samples, double length, double s, int truncation);

/// Laplacian eigenpairs on a circle of length L sampled at M equidistant
/// points: rows sqrt(2) cos and sqrt(2) sin of frequency k = 1..K, each with
/// eigenvalue (2 pi k / L)^2. Rows satisfy sum_j psi_k psi_l = M delta_kl for K < M/2.
struct Eigenbasis {
    Eigen::MatrixXd psi;
    Eigen::VectorXd eigenvalues;
};

Eigenbasis circle_eigenbasis(int samples, double length, int truncation);

/// sum_k lambda_k^sigma |(1/m) sum_j r_j psi_k(y_j)|^2.
double plugin_penalty(std::span<const double> r, const Eigenbasis& basis, double sigma);
double plugin_penalty(std::span<const double> r, const Eigenbasis& basis, double sigma, std::span<double> grad);

/// Trapezoidal Slobodeckij energy on a circle of length L, chordal distance,
/// diagonal excluded, plus the L^2 term.
double slobodeckij_oracle(std::span<const double> e, double length, double sigma);

}  // namespace picnn::spectral
