#include "picnn/batch_network.hpp"

#include <utility>

#include "picnn/error.hpp"

namespace picnn::net {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstWeights = Eigen::Map<const RowMat>;
using Weights = Eigen::Map<RowMat>;

ConstWeights weights(std::span<const double> params, const Slice& s, int tap = 0) {
    return ConstWeights(params.data() + s.offset + static_cast<std::size_t>(tap) * s.rows * s.cols, s.rows, s.cols);
}

Weights grad_weights(std::span<double> grad, const Slice& s, int tap = 0) {
    return Weights(grad.data() + s.offset + static_cast<std::size_t>(tap) * s.rows * s.cols, s.rows, s.cols);
}

Eigen::Map<const Eigen::VectorXd> bias(std::span<const double> params, const Slice& s) {
    return Eigen::Map<const Eigen::VectorXd>(params.data() + s.offset, s.rows);
}

Eigen::Map<Eigen::VectorXd> grad_bias(std::span<double> grad, const Slice& s) {
    return Eigen::Map<Eigen::VectorXd>(grad.data() + s.offset, s.rows);
}

// Elementwise f on jets stored in component-major column blocks.
void activate(ad::Fn f, int comps, int pts, const Eigen::MatrixXd& z, Eigen::MatrixXd& a) {
    a.resize(z.rows(), z.cols());
    const Eigen::Index rows = z.rows();
    double d[4];
    if (comps == 1) {
        for (Eigen::Index j = 0; j < z.cols(); ++j) {
            for (Eigen::Index r = 0; r < rows; ++r) {
                ad::derivatives(f, z(r, j), 0, d);
                a(r, j) = d[0];
            }
        }
        return;
    }
    for (int p = 0; p < pts; ++p) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            ad::derivatives(f, z(r, p), 2, d);
            const double g0 = z(r, pts + p), g1 = z(r, 2 * pts + p);
            a(r, p) = d[0];
            a(r, pts + p) = d[1] * g0;
            a(r, 2 * pts + p) = d[1] * g1;
            a(r, 3 * pts + p) = d[1] * z(r, 3 * pts + p) + d[2] * g0 * g0;
            a(r, 4 * pts + p) = d[1] * z(r, 4 * pts + p) + d[2] * g0 * g1;
            a(r, 5 * pts + p) = d[1] * z(r, 5 * pts + p) + d[2] * g1 * g1;
        }
    }
}

// Adjoint of activate: given abar = dL/da, returns zbar = dL/dz.
void activate_backward(ad::Fn f, int comps, int pts, const Eigen::MatrixXd& z, const Eigen::MatrixXd& abar,
                       Eigen::MatrixXd& zbar) {
    zbar.resize(z.rows(), z.cols());
    const Eigen::Index rows = z.rows();
    double d[4];
    if (comps == 1) {
        for (Eigen::Index j = 0; j < z.cols(); ++j) {
            for (Eigen::Index r = 0; r < rows; ++r) {
                ad::derivatives(f, z(r, j), 1, d);
                zbar(r, j) = abar(r, j) * d[1];
            }
        }
        return;
    }
    for (int p = 0; p < pts; ++p) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            ad::derivatives(f, z(r, p), 3, d);
            const double g0 = z(r, pts + p), g1 = z(r, 2 * pts + p);
            const double h00 = z(r, 3 * pts + p), h01 = z(r, 4 * pts + p), h11 = z(r, 5 * pts + p);
            const double bv = abar(r, p), bg0 = abar(r, pts + p), bg1 = abar(r, 2 * pts + p);
            const double bh00 = abar(r, 3 * pts + p), bh01 = abar(r, 4 * pts + p), bh11 = abar(r, 5 * pts + p);
            zbar(r, p) = bv * d[1] + d[2] * (bg0 * g0 + bg1 * g1 + bh00 * h00 + bh01 * h01 + bh11 * h11) +
                         d[3] * (bh00 * g0 * g0 + bh01 * g0 * g1 + bh11 * g1 * g1);
            zbar(r, pts + p) = bg0 * d[1] + d[2] * (2.0 * bh00 * g0 + bh01 * g1);
            zbar(r, 2 * pts + p) = bg1 * d[1] + d[2] * (2.0 * bh11 * g1 + bh01 * g0);
            zbar(r, 3 * pts + p) = bh00 * d[1];
            zbar(r, 4 * pts + p) = bh01 * d[1];
            zbar(r, 5 * pts + p) = bh11 * d[1];
        }
    }
}

}  // namespace

Batch Batch::plain(std::span<const std::array<double, 3>> points) {
    Batch b;
    b.components = 1;
    b.points = static_cast<int>(points.size());
    b.inputs.resize(3, b.points);
    for (int p = 0; p < b.points; ++p) {
        for (int i = 0; i < 3; ++i) b.inputs(i, p) = points[p][i];
    }
    return b;
}

Batch Batch::jets(std::span<const std::array<ad::Jet, 3>> points) {
    Batch b;
    b.components = ad::Jet::kSize;
    b.points = static_cast<int>(points.size());
    b.inputs.resize(3, b.cols());
    for (int p = 0; p < b.points; ++p) {
        for (int i = 0; i < 3; ++i) {
            for (int c = 0; c < ad::Jet::kSize; ++c) b.inputs(i, c * b.points + p) = points[p][i][c];
        }
    }
    return b;
}

BatchNetwork::BatchNetwork(NetworkSpec spec) : spec_(std::move(spec)), layout_(spec_) {}

Eigen::RowVectorXd BatchNetwork::forward(std::span<const double> params, const Batch& batch, Workspace& ws) const {
    if (params.size() != layout_.size()) throw ShapeError("parameter vector does not match the network layout");
    const int length = spec_.input_length;
    const int pts = batch.points;
    const int comps = batch.components;
    const ad::Fn conv_fn = to_fn(spec_.conv.activation);
    const ad::Fn mlp_fn = to_fn(spec_.mlp.activation);
    ws.components = comps;
    ws.points = pts;

    ws.conv_pre.assign(layout_.conv_layers(), std::vector<Eigen::MatrixXd>(length));
    ws.conv_post.assign(layout_.conv_layers() + 1, std::vector<Eigen::MatrixXd>(length));
    for (int i = 0; i < length; ++i) ws.conv_post[0][i] = batch.inputs.row(i);

    for (int l = 0; l < layout_.conv_layers(); ++l) {
        const Slice& wf = layout_.conv_filter(l);
        const auto b = bias(params, layout_.conv_bias(l));
        for (int i = 0; i < length; ++i) {
            Eigen::MatrixXd& z = ws.conv_pre[l][i];
            z.setZero(wf.rows, batch.cols());
            for (int k = 0; k < wf.taps && i + k < length; ++k) z.noalias() += weights(params, wf, k) * ws.conv_post[l][i + k];
            z.leftCols(pts).colwise() += b;
            activate(conv_fn, comps, pts, z, ws.conv_post[l + 1][i]);
        }
    }

    const auto& last = ws.conv_post[layout_.conv_layers()];
    ws.pooled = last[0];
    for (int i = 1; i < length; ++i) ws.pooled += last[i];
    ws.pooled *= 1.0 / length;

    ws.dense_pre.assign(layout_.dense_layers(), Eigen::MatrixXd());
    ws.dense_post.assign(layout_.dense_layers(), Eigen::MatrixXd());
    const Eigen::MatrixXd* x = &ws.pooled;
    for (int l = 0; l < layout_.dense_layers(); ++l) {
        Eigen::MatrixXd& z = ws.dense_pre[l];
        z.noalias() = weights(params, layout_.dense_weight(l)) * (*x);
        z.leftCols(pts).colwise() += bias(params, layout_.dense_bias(l));
        if (l + 1 < layout_.dense_layers()) {
            activate(mlp_fn, comps, pts, z, ws.dense_post[l]);
        } else {
            ws.dense_post[l] = z;
        }
        x = &ws.dense_post[l];
    }
    return x->row(0);
}

void BatchNetwork::backward(std::span<const double> params, const Workspace& ws,
                            const Eigen::RowVectorXd& output_adjoint, std::span<double> grad) const {
    if (grad.size() != layout_.size()) throw ShapeError("gradient vector does not match the network layout");
    const int length = spec_.input_length;
    const int pts = ws.points;
    const int comps = ws.components;
    const ad::Fn conv_fn = to_fn(spec_.conv.activation);
    const ad::Fn mlp_fn = to_fn(spec_.mlp.activation);

    Eigen::MatrixXd ybar = output_adjoint;
    Eigen::MatrixXd zbar;
    for (int l = layout_.dense_layers() - 1; l >= 0; --l) {
        if (l + 1 < layout_.dense_layers()) {
            activate_backward(mlp_fn, comps, pts, ws.dense_pre[l], ybar, zbar);
        } else {
            zbar = ybar;
        }
        const Slice& w = layout_.dense_weight(l);
        const Eigen::MatrixXd& x = l == 0 ? ws.pooled : ws.dense_post[l - 1];
        grad_bias(grad, layout_.dense_bias(l)) += zbar.leftCols(pts).rowwise().sum();
        grad_weights(grad, w).noalias() += zbar * x.transpose();
        ybar.noalias() = weights(params, w).transpose() * zbar;
    }

    std::vector<Eigen::MatrixXd> abar(length, ybar * (1.0 / length));
    for (int l = layout_.conv_layers() - 1; l >= 0; --l) {
        const Slice& wf = layout_.conv_filter(l);
        const auto& inputs = ws.conv_post[l];
        std::vector<Eigen::MatrixXd> prev;
        if (l > 0) prev.assign(length, Eigen::MatrixXd::Zero(inputs[0].rows(), inputs[0].cols()));
        for (int i = 0; i < length; ++i) {
            activate_backward(conv_fn, comps, pts, ws.conv_pre[l][i], abar[i], zbar);
            grad_bias(grad, layout_.conv_bias(l)) += zbar.leftCols(pts).rowwise().sum();
            for (int k = 0; k < wf.taps && i + k < length; ++k) {
                grad_weights(grad, wf, k).noalias() += zbar * inputs[i + k].transpose();
                if (l > 0) prev[i + k].noalias() += weights(params, wf, k).transpose() * zbar;
            }
        }
        abar = std::move(prev);
    }
}

}  // namespace picnn::net
