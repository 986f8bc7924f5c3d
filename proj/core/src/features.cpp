#include <cmath>
#include <numbers>
#include <stdexcept>

#include "picnn/constructions.hpp"

namespace picnn::construct {

FeatureBank degree2_bank(int dim) {
    if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
    FeatureBank bank;
    for (int i = 0; i < dim; ++i) bank.xi.push_back(Eigen::VectorXd::Unit(dim, i));
    for (int i = 0; i < dim; ++i) {
        for (int j = i + 1; j < dim; ++j) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
            v(i) = v(j) = 1.0 / std::numbers::sqrt2;
            bank.xi.push_back(std::move(v));
        }
    }
    return bank;
}

double RidgeExpansion::evaluate(const Eigen::VectorXd& x) const {
    double acc = 0.0;
    for (std::size_t r = 0; r < bank.xi.size(); ++r) {
        const double t = bank.xi[r].dot(x);
        acc += coef[r][0] + coef[r][1] * t + coef[r][2] * t * t;
    }
    return acc;
}

RidgeExpansion ridge_decompose_quadratic(const Eigen::MatrixXd& q, const Eigen::VectorXd& b, double c) {
    const auto n = q.rows();
    if (q.cols() != n || b.size() != n) throw std::invalid_argument("quadratic form shape mismatch");
    RidgeExpansion out;
    out.bank = degree2_bank(static_cast<int>(n));
    // x_i x_j = (xi_ij . x)^2 - (x_i^2 + x_j^2) / 2
    for (Eigen::Index i = 0; i < n; ++i) {
        double diag = q(i, i);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) diag -= 0.5 * (q(i, j) + q(j, i));
        }
        out.coef.push_back({i == 0 ? c : 0.0, b(i), diag});
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) out.coef.push_back({0.0, 0.0, q(i, j) + q(j, i)});
    }
    return out;
}

RidgeExpansion ridge_decompose_sqdist(const Eigen::VectorXd& y) {
    const auto n = y.size();
    return ridge_decompose_quadratic(Eigen::MatrixXd::Identity(n, n), -2.0 * y, y.squaredNorm());
}

namespace {

// Number of input coordinates summed after layer l (1-based count).
int consumed(int layer, int dim, int s) { return std::min(layer * (s - 1) + 1, dim); }

int depth_for(int dim, int s) { return (dim - 1 + s - 2) / (s - 1); }

ConvLayer make_layer(int taps, int in, int out) {
    ConvLayer l;
    l.taps = taps;
    l.in_channels = in;
    l.out_channels = out;
    l.weight.assign(static_cast<std::size_t>(taps) * in * out, 0.0);
    l.bias.assign(out, 0.0);
    return l;
}

}  // namespace

InnerProductNet multichannel_inner_product_net(const FeatureBank& bank, int dim, int filter_size, double input_bound) {
    if (bank.xi.empty()) throw std::invalid_argument("feature bank is empty");
    if (dim < 2) throw std::invalid_argument("dimension must be >= 2");
    if (filter_size < 2 || filter_size > dim) throw std::invalid_argument("filter size must lie in [2, D]");
    if (!(input_bound >= 0.0)) throw std::invalid_argument("input bound must be non-negative");
    for (const auto& xi : bank.xi) {
        if (xi.size() != dim) throw std::invalid_argument("feature dimension mismatch");
    }

    const int s = filter_size;
    const int m = static_cast<int>(bank.xi.size());
    const int depth = depth_for(dim, s);
    InnerProductNet net;
    net.dim = dim;
    net.filter_size = s;
    net.input_bound = input_bound;
    net.features = m;

    // The tail channel carries x + B so the ReLU keeps negative coordinates;
    // the partial-sum channels subtract B times the weights they read.
    ConvLayer first = make_layer(s, 1, 3 * m);
    for (int r = 0; r < m; ++r) {
        for (int k = 0; k < s; ++k) {
            first.w(k, 3 * r, 0) = bank.xi[r](k);
            first.w(k, 3 * r + 1, 0) = -bank.xi[r](k);
        }
        first.w(s - 1, 3 * r + 2, 0) = 1.0;
        first.bias[3 * r + 2] = input_bound;
    }
    net.layers.push_back(std::move(first));

    for (int l = 1; l < depth; ++l) {
        const int q = consumed(l, dim, s), q_next = consumed(l + 1, dim, s);
        ConvLayer layer = make_layer(s, 3 * m, 3 * m);
        for (int r = 0; r < m; ++r) {
            const int pos = 3 * r, neg = 3 * r + 1, tail = 3 * r + 2;
            layer.w(0, pos, pos) = 1.0;
            layer.w(0, pos, neg) = -1.0;
            layer.w(0, neg, pos) = -1.0;
            layer.w(0, neg, neg) = 1.0;
            double read = 0.0;
            for (int k = 1; k <= q_next - q; ++k) {
                const double xi = bank.xi[r](q + k - 1);
                layer.w(k, pos, tail) = xi;
                layer.w(k, neg, tail) = -xi;
                read += xi;
            }
            layer.bias[pos] = -input_bound * read;
            layer.bias[neg] = input_bound * read;
            layer.w(s - 1, tail, tail) = 1.0;
        }
        net.layers.push_back(std::move(layer));
    }
    return net;
}

std::vector<double> InnerProductNet::evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim) throw std::invalid_argument("input length mismatch");
    // cur[c * dim + i] = channel c at position i
    std::vector<double> cur(x.begin(), x.end());
    for (const auto& layer : layers) {
        std::vector<double> next(static_cast<std::size_t>(layer.out_channels) * dim, 0.0);
        for (int o = 0; o < layer.out_channels; ++o) {
            for (int i = 0; i < dim; ++i) {
                double acc = layer.bias[o];
                for (int k = 0; k < layer.taps && i + k < dim; ++k) {
                    for (int c = 0; c < layer.in_channels; ++c) {
                        const double w = layer.w(k, o, c);
                        if (w != 0.0) acc += w * cur[static_cast<std::size_t>(c) * dim + i + k];
                    }
                }
                next[static_cast<std::size_t>(o) * dim + i] = acc > 0.0 ? acc : 0.0;
            }
        }
        cur = std::move(next);
    }
    std::vector<double> out(features);
    for (int r = 0; r < features; ++r) {
        out[r] = cur[static_cast<std::size_t>(3 * r) * dim] - cur[static_cast<std::size_t>(3 * r + 1) * dim];
    }
    return out;
}

std::size_t InnerProductNet::nonzero_filter_entries() const {
    std::size_t n = 0;
    for (const auto& layer : layers) {
        for (double w : layer.weight) n += w != 0.0;
    }
    return n;
}

std::size_t inner_product_filter_count(int dim, int filter_size) {
    const int s = filter_size;
    std::size_t n = 2 * static_cast<std::size_t>(s) + 1;
    for (int l = 1; l < depth_for(dim, s); ++l) {
        n += 2 * static_cast<std::size_t>(2 + consumed(l + 1, dim, s) - consumed(l, dim, s)) + 1;
    }
    return n;
}

}  // namespace picnn::construct
