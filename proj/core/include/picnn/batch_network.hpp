#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "picnn/autodiff/jet.hpp"
#include "picnn/network.hpp"

namespace picnn::net {

/// A batch of network inputs. Columns are component-major: column
/// `component * points + p` holds component `component` of point p, where the
/// components are the jet entries (val, g0, g1, h00, h01, h11) or just val.
struct Batch {
    int components = 1;
    int points = 0;
    Eigen::Matrix<double, 3, Eigen::Dynamic> inputs;  // row i = input coordinate i

    int cols() const { return components * points; }

    static Batch plain(std::span<const std::array<double, 3>> points);
    static Batch jets(std::span<const std::array<ad::Jet, 3>> points);
};

/// Intermediate activations kept for the reverse sweep.
struct Workspace {
    int components = 1;
    int points = 0;
    std::vector<std::vector<Eigen::MatrixXd>> conv_pre;   // [layer][position]
    std::vector<std::vector<Eigen::MatrixXd>> conv_post;  // [layer + 1][position]; [0] is the input
    Eigen::MatrixXd pooled;
    std::vector<Eigen::MatrixXd> dense_pre;
    std::vector<Eigen::MatrixXd> dense_post;
};

/// Batched evaluation of the conv + MLP network with a hand-written reverse
/// sweep. Each activation adjoint has the same jet shape as the activation,
/// so gradients of losses that read output derivatives are exact.
class BatchNetwork {
public:
    explicit BatchNetwork(NetworkSpec spec);

    const NetworkSpec& spec() const { return spec_; }
    const Layout& layout() const { return layout_; }

    /// Outputs as a 1 x cols row in the batch column layout.
    Eigen::RowVectorXd forward(std::span<const double> params, const Batch& batch, Workspace& ws) const;

    /// Accumulates d(loss)/d(params) into grad given d(loss)/d(outputs).
    void backward(std::span<const double> params, const Workspace& ws, const Eigen::RowVectorXd& output_adjoint,
                  std::span<double> grad) const;

private:
    NetworkSpec spec_;
    Layout layout_;
};

/// Jet of point p from a jet-batch output row.
inline ad::Jet output_jet(const Eigen::RowVectorXd& out, int points, int p) {
    ad::Jet j;
    for (int c = 0; c < ad::Jet::kSize; ++c) j[c] = out(c * points + p);
    return j;
}

}  // namespace picnn::net
