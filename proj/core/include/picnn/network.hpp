#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "picnn/autodiff/elementary.hpp"
#include "picnn/autodiff/jet.hpp"
#include "picnn/rng.hpp"

namespace picnn::net {

enum class ConvActivation { ReLU, GeLU };
enum class MlpActivation { ReQU, GeLU2 };

ad::Fn to_fn(ConvActivation a);
ad::Fn to_fn(MlpActivation a);
std::string to_string(ConvActivation a);
std::string to_string(MlpActivation a);
ConvActivation parse_conv_activation(const std::string& text);
MlpActivation parse_mlp_activation(const std::string& text);

/// Stack of one-sided, stride-one multichannel convolutions over the input
/// coordinates viewed as a length-D sequence.
struct ConvSpec {
    int layers = 3;
    int channels = 56;
    int kernel_size = 3;
    ConvActivation activation = ConvActivation::GeLU;
};

/// Hidden widths of the dense head; a final affine map to one output always
/// follows. An empty width list means the final affine reads the pooled features.
struct MlpSpec {
    std::vector<int> widths{24, 8};
    MlpActivation activation = MlpActivation::GeLU2;
};

struct NetworkSpec {
    ConvSpec conv;
    MlpSpec mlp;
    int input_length = 3;

    void validate() const;
};

enum class SliceKind { ConvFilter, ConvBias, DenseWeight, DenseBias };

/// One parameter block. Conv filters are stored as w[tap][out][in] and dense
/// weights as W[out][in], both row-major.
struct Slice {
    SliceKind kind;
    int layer;
    std::size_t offset;
    std::size_t size;
    int taps;
    int rows;  // output channels / units
    int cols;  // input channels / units
    int fan_in;
    int fan_out;
};

class Layout {
public:
    explicit Layout(const NetworkSpec& spec);

    const std::vector<Slice>& slices() const { return slices_; }
    std::size_t size() const { return size_; }
    std::uint64_t hash() const { return hash_; }

    const Slice& conv_filter(int layer) const { return slices_[2 * layer]; }
    const Slice& conv_bias(int layer) const { return slices_[2 * layer + 1]; }
    const Slice& dense_weight(int layer) const { return slices_[2 * (conv_layers_ + layer)]; }
    const Slice& dense_bias(int layer) const { return slices_[2 * (conv_layers_ + layer) + 1]; }
    int conv_layers() const { return conv_layers_; }
    /// Hidden dense layers plus the final affine layer.
    int dense_layers() const { return dense_layers_; }

    bool operator==(const Layout& other) const { return hash_ == other.hash_ && size_ == other.size_; }

private:
    std::vector<Slice> slices_;
    std::size_t size_ = 0;
    std::uint64_t hash_ = 0;
    int conv_layers_ = 0;
    int dense_layers_ = 0;
};

/// Closed-form count sum_l (s J'_l J_l + J'_l) + dense weights and biases.
std::size_t parameter_count(const NetworkSpec& spec);

struct NetworkParams {
    std::vector<double> flat;
    Layout layout;

    std::span<const double> slice(const Slice& s) const { return {flat.data() + s.offset, s.size}; }
};

/// Glorot-uniform weights with bound sqrt(6 / (fan_in + fan_out)), zero biases.
NetworkParams init(const NetworkSpec& spec, Rng& rng);

namespace detail {

template <class P, class X>
X lift(const P& p) {
    if constexpr (std::is_same_v<X, P>) {
        return p;
    } else {
        return X::constant(p);
    }
}

}  // namespace detail

/// Scalar network output for one input point, generic over the parameter
/// scalar P (double or tape variable) and the payload X (P or Jet2<P>).
template <class P, class X>
X forward(const NetworkSpec& spec, const Layout& layout, std::span<const P> params, const std::array<X, 3>& input) {
    const int length = spec.input_length;
    const int taps = spec.conv.kernel_size;
    const ad::Fn conv_fn = to_fn(spec.conv.activation);
    const ad::Fn mlp_fn = to_fn(spec.mlp.activation);

    // act[i][c]: position i, channel c.
    std::vector<std::vector<X>> act(length, std::vector<X>(1));
    for (int i = 0; i < length; ++i) act[i][0] = input[i];

    for (int l = 0; l < layout.conv_layers(); ++l) {
        const Slice& wf = layout.conv_filter(l);
        const Slice& wb = layout.conv_bias(l);
        const int out_ch = wf.rows, in_ch = wf.cols;
        std::vector<std::vector<X>> next(length, std::vector<X>(out_ch));
        for (int i = 0; i < length; ++i) {
            for (int o = 0; o < out_ch; ++o) {
                X acc{};
                for (int k = 0; k < taps && i + k < length; ++k) {
                    const std::size_t base = wf.offset + static_cast<std::size_t>(k * out_ch + o) * in_ch;
                    for (int c = 0; c < in_ch; ++c) acc = acc + params[base + c] * act[i + k][c];
                }
                acc = acc + params[wb.offset + o];
                next[i][o] = ad::apply(conv_fn, acc);
            }
        }
        act = std::move(next);
    }

    const int channels = static_cast<int>(act[0].size());
    std::vector<X> features(channels);
    for (int c = 0; c < channels; ++c) {
        X sum{};
        for (int i = 0; i < length; ++i) sum = sum + act[i][c];
        features[c] = sum * (1.0 / length);
    }

    for (int l = 0; l < layout.dense_layers(); ++l) {
        const Slice& w = layout.dense_weight(l);
        const Slice& b = layout.dense_bias(l);
        const bool hidden = l + 1 < layout.dense_layers();
        std::vector<X> out(w.rows);
        for (int o = 0; o < w.rows; ++o) {
            X acc{};
            for (int c = 0; c < w.cols; ++c) acc = acc + params[w.offset + static_cast<std::size_t>(o) * w.cols + c] * features[c];
            acc = acc + params[b.offset + o];
            out[o] = hidden ? ad::apply(mlp_fn, acc) : acc;
        }
        features = std::move(out);
    }
    return features[0];
}

/// Plain-valued convenience overload.
double forward(const NetworkParams& params, const NetworkSpec& spec, const std::array<double, 3>& input);
ad::Jet forward(const NetworkParams& params, const NetworkSpec& spec, const std::array<ad::Jet, 3>& input);

/// Formal single-channel architecture with expanding widths d_l = d_{l-1} + S - 1.
struct SingleChannelSpec {
    int depth = 1;
    int filter_size = 3;
    int downsample_stride = 1;
};

/// Width after each layer, starting from the input width.
std::vector<int> single_channel_widths(const SingleChannelSpec& spec, int input_width);

/// ReLU Toeplitz recursion without the downsampling step. filters[l] has
/// filter_size taps; biases[l] has width d_{l+1} and is subtracted before ReLU.
std::vector<double> single_channel_features(const SingleChannelSpec& spec,
                                            const std::vector<std::vector<double>>& filters,
                                            const std::vector<std::vector<double>>& biases,
                                            std::span<const double> input);

/// D(x)_i = x_{i d} (1-based), i = 1..floor(len/d).
std::vector<double> downsample(std::span<const double> x, int stride);

/// single_channel_features followed by downsampling with spec.downsample_stride.
std::vector<double> single_channel_forward(const SingleChannelSpec& spec,
                                           const std::vector<std::vector<double>>& filters,
                                           const std::vector<std::vector<double>>& biases,
                                           std::span<const double> input);

/// Checkpoint: little-endian u64 layout hash followed by the flat vector as
/// little-endian IEEE-754 binary64 values.
void save_checkpoint(const std::filesystem::path& path, const NetworkParams& params);
NetworkParams load_checkpoint(const std::filesystem::path& path, const NetworkSpec& spec);

}  // namespace picnn::net
