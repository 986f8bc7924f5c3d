#include "picnn/network.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "picnn/error.hpp"

namespace picnn::net {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffU;
        h *= kFnvPrime;
    }
}

}  // namespace

ad::Fn to_fn(ConvActivation a) { return a == ConvActivation::ReLU ? ad::Fn::Relu : ad::Fn::Gelu; }
ad::Fn to_fn(MlpActivation a) { return a == MlpActivation::ReQU ? ad::Fn::Requ : ad::Fn::Gelu2; }

std::string to_string(ConvActivation a) { return a == ConvActivation::ReLU ? "relu" : "gelu"; }
std::string to_string(MlpActivation a) { return a == MlpActivation::ReQU ? "requ" : "gelu2"; }

ConvActivation parse_conv_activation(const std::string& text) {
    if (text == "relu") return ConvActivation::ReLU;
    if (text == "gelu") return ConvActivation::GeLU;
    throw std::invalid_argument("unknown conv activation '" + text + "'");
}

MlpActivation parse_mlp_activation(const std::string& text) {
    if (text == "requ") return MlpActivation::ReQU;
    if (text == "gelu2") return MlpActivation::GeLU2;
    throw std::invalid_argument("unknown mlp activation '" + text + "'");
}

void NetworkSpec::validate() const {
    if (conv.layers < 1 || conv.channels < 1 || conv.kernel_size < 1) {
        throw std::invalid_argument("conv spec needs layers, channels, kernel_size >= 1");
    }
    if (input_length != 3) throw std::invalid_argument("input_length must be 3 (ambient coordinates)");
    for (int w : mlp.widths) {
        if (w < 1) throw std::invalid_argument("mlp widths must be positive");
    }
}

Layout::Layout(const NetworkSpec& spec) {
    spec.validate();
    conv_layers_ = spec.conv.layers;
    dense_layers_ = static_cast<int>(spec.mlp.widths.size()) + 1;
    const int s = spec.conv.kernel_size;
    auto push = [&](SliceKind kind, int layer, int taps, int rows, int cols, int fan_in, int fan_out) {
        const std::size_t n = static_cast<std::size_t>(taps) * rows * cols;
        slices_.push_back(Slice{kind, layer, size_, n, taps, rows, cols, fan_in, fan_out});
        size_ += n;
    };
    int in = 1;
    for (int l = 0; l < conv_layers_; ++l) {
        const int out = spec.conv.channels;
        push(SliceKind::ConvFilter, l, s, out, in, s * in, s * out);
        push(SliceKind::ConvBias, l, 1, out, 1, 0, 0);
        in = out;
    }
    for (int l = 0; l < dense_layers_; ++l) {
        const int out = l + 1 < dense_layers_ ? spec.mlp.widths[l] : 1;
        push(SliceKind::DenseWeight, l, 1, out, in, in, out);
        push(SliceKind::DenseBias, l, 1, out, 1, 0, 0);
        in = out;
    }
    hash_ = kFnvOffset;
    fnv_mix(hash_, static_cast<std::uint64_t>(spec.input_length));
    for (const Slice& sl : slices_) {
        fnv_mix(hash_, static_cast<std::uint64_t>(sl.kind));
        fnv_mix(hash_, static_cast<std::uint64_t>(sl.layer));
        fnv_mix(hash_, static_cast<std::uint64_t>(sl.taps));
        fnv_mix(hash_, static_cast<std::uint64_t>(sl.rows));
        fnv_mix(hash_, static_cast<std::uint64_t>(sl.cols));
    }
    fnv_mix(hash_, static_cast<std::uint64_t>(spec.conv.activation));
    fnv_mix(hash_, static_cast<std::uint64_t>(spec.mlp.activation));
}

std::size_t parameter_count(const NetworkSpec& spec) {
    std::size_t total = 0;
    std::size_t in = 1;
    const auto s = static_cast<std::size_t>(spec.conv.kernel_size);
    const auto c = static_cast<std::size_t>(spec.conv.channels);
    for (int l = 0; l < spec.conv.layers; ++l) {
        total += s * c * in + c;
        in = c;
    }
    for (int w : spec.mlp.widths) {
        total += static_cast<std::size_t>(w) * in + static_cast<std::size_t>(w);
        in = static_cast<std::size_t>(w);
    }
    return total + in + 1;
}

NetworkParams init(const NetworkSpec& spec, Rng& rng) {
    NetworkParams p{std::vector<double>(), Layout(spec)};
    p.flat.assign(p.layout.size(), 0.0);
    for (const Slice& s : p.layout.slices()) {
        if (s.kind == SliceKind::ConvBias || s.kind == SliceKind::DenseBias) continue;
        const double bound = std::sqrt(6.0 / static_cast<double>(s.fan_in + s.fan_out));
        for (std::size_t i = 0; i < s.size; ++i) p.flat[s.offset + i] = uniform(rng, -bound, bound);
    }
    return p;
}

double forward(const NetworkParams& params, const NetworkSpec& spec, const std::array<double, 3>& input) {
    return forward<double, double>(spec, params.layout, params.flat, input);
}

ad::Jet forward(const NetworkParams& params, const NetworkSpec& spec, const std::array<ad::Jet, 3>& input) {
    return forward<double, ad::Jet>(spec, params.layout, params.flat, input);
}

std::vector<int> single_channel_widths(const SingleChannelSpec& spec, int input_width) {
    std::vector<int> widths{input_width};
    for (int l = 0; l < spec.depth; ++l) widths.push_back(widths.back() + spec.filter_size - 1);
    return widths;
}

std::vector<double> single_channel_features(const SingleChannelSpec& spec,
                                            const std::vector<std::vector<double>>& filters,
                                            const std::vector<std::vector<double>>& biases,
                                            std::span<const double> input) {
    if (spec.depth < 1 || spec.filter_size < 1) throw ShapeError("single-channel spec needs depth, filter_size >= 1");
    if (filters.size() != static_cast<std::size_t>(spec.depth) || biases.size() != filters.size()) {
        throw ShapeError("single-channel network needs one filter and one bias per layer");
    }
    const std::vector<int> widths = single_channel_widths(spec, static_cast<int>(input.size()));
    std::vector<double> x(input.begin(), input.end());
    for (int l = 0; l < spec.depth; ++l) {
        const auto& w = filters[l];
        const auto& b = biases[l];
        if (w.size() != static_cast<std::size_t>(spec.filter_size)) throw ShapeError("filter support size mismatch");
        if (b.size() != static_cast<std::size_t>(widths[l + 1])) throw ShapeError("bias width mismatch");
        std::vector<double> y(widths[l + 1], 0.0);
        // (T x)_i = sum_j w_{i-j} x_j with w supported on {0, ..., S-1}.
        for (int i = 0; i < widths[l + 1]; ++i) {
            double acc = 0.0;
            for (int j = 0; j < widths[l]; ++j) {
                const int k = i - j;
                if (k >= 0 && k < spec.filter_size) acc += w[k] * x[j];
            }
            const double pre = acc - b[i];
            y[i] = pre > 0.0 ? pre : 0.0;
        }
        x = std::move(y);
    }
    return x;
}

std::vector<double> downsample(std::span<const double> x, int stride) {
    if (stride < 1) throw ShapeError("downsampling stride must be >= 1");
    const std::size_t n = x.size() / static_cast<std::size_t>(stride);
    std::vector<double> out(n);
    for (std::size_t i = 1; i <= n; ++i) out[i - 1] = x[i * stride - 1];
    return out;
}

std::vector<double> single_channel_forward(const SingleChannelSpec& spec,
                                           const std::vector<std::vector<double>>& filters,
                                           const std::vector<std::vector<double>>& biases,
                                           std::span<const double> input) {
    const std::vector<double> features = single_channel_features(spec, filters, biases, input);
    return downsample(features, spec.downsample_stride);
}

}  // namespace picnn::net
