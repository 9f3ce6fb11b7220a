#include "sradapt/ops.hpp"

#include <cmath>
#include <Eigen/Core>

#include "sradapt/error.hpp"

namespace sradapt {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMatrix = Eigen::Map<RowMatrix>;
using ConstMapMatrix = Eigen::Map<const RowMatrix>;

void require(bool ok, const std::string& message) {
    if (!ok) throw Error(message);
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    require(a.shape() == b.shape(), std::string(op) + ": shape mismatch " + shape_string(a.shape()) +
                                        " vs " + shape_string(b.shape()));
}

struct ConvGeometry {
    int n, c, h, w, o, k, stride, padding, oh, ow;
    int rows() const { return c * k * k; }
    int cols() const { return oh * ow; }
};

void im2col(const double* x, const ConvGeometry& g, double* col) {
    for (int ci = 0; ci < g.c; ++ci)
        for (int ky = 0; ky < g.k; ++ky)
            for (int kx = 0; kx < g.k; ++kx) {
                double* row = col + static_cast<std::size_t>((ci * g.k + ky) * g.k + kx) * g.cols();
                const double* plane = x + static_cast<std::size_t>(ci) * g.h * g.w;
                for (int oy = 0; oy < g.oh; ++oy) {
                    const int iy = oy * g.stride - g.padding + ky;
                    double* dst = row + static_cast<std::size_t>(oy) * g.ow;
                    if (iy < 0 || iy >= g.h) {
                        std::fill(dst, dst + g.ow, 0.0);
                        continue;
                    }
                    const double* src = plane + static_cast<std::size_t>(iy) * g.w;
                    for (int ox = 0; ox < g.ow; ++ox) {
                        const int ix = ox * g.stride - g.padding + kx;
                        dst[ox] = (ix < 0 || ix >= g.w) ? 0.0 : src[ix];
                    }
                }
            }
}

void col2im_add(const double* col, const ConvGeometry& g, double* dx) {
    for (int ci = 0; ci < g.c; ++ci)
        for (int ky = 0; ky < g.k; ++ky)
            for (int kx = 0; kx < g.k; ++kx) {
                const double* row = col + static_cast<std::size_t>((ci * g.k + ky) * g.k + kx) * g.cols();
                double* plane = dx + static_cast<std::size_t>(ci) * g.h * g.w;
                for (int oy = 0; oy < g.oh; ++oy) {
                    const int iy = oy * g.stride - g.padding + ky;
                    if (iy < 0 || iy >= g.h) continue;
                    const double* src = row + static_cast<std::size_t>(oy) * g.ow;
                    double* dst = plane + static_cast<std::size_t>(iy) * g.w;
                    for (int ox = 0; ox < g.ow; ++ox) {
                        const int ix = ox * g.stride - g.padding + kx;
                        if (ix >= 0 && ix < g.w) dst[ix] += src[ox];
                    }
                }
            }
}

// Elementwise unary op with derivative expressed through (x, y).
template <typename F, typename DF>
Tensor unary(const char* name, const Tensor& input, F f, DF df) {
    std::vector<double> out(input.size());
    const auto x = input.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(x[i]);
    return make_result(name, input.shape(), std::move(out), {input}, [df](TensorNode& node) {
        auto& in = *node.inputs[0];
        auto& g = in.grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i)
            g[i] += node.grad[i] * df(in.value[i], node.value[i]);
    });
}

// Channel index of a flat offset for tensors laid out (N, C, inner...).
struct ChannelLayout {
    int n, c;
    std::size_t inner;
    explicit ChannelLayout(const Shape& s) {
        if (s.size() < 2) throw Error("expected a tensor with a channel dimension, got " + shape_string(s));
        n = s[0];
        c = s[1];
        inner = element_count(s) / (static_cast<std::size_t>(n) * c);
    }
    int channel(std::size_t flat) const { return static_cast<int>((flat / inner) % c); }
};

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, int stride, int padding) {
    require(input.rank() == 4, "conv2d: input must be (N,C,H,W), got " + shape_string(input.shape()));
    require(weight.rank() == 4 && weight.dim(2) == weight.dim(3),
            "conv2d: weight must be (O,C,k,k), got " + shape_string(weight.shape()));
    require(weight.dim(1) == input.dim(1),
            "conv2d: channel mismatch, input has " + std::to_string(input.dim(1)) +
                " channels, weight expects " + std::to_string(weight.dim(1)));
    require(bias.size() == static_cast<std::size_t>(weight.dim(0)), "conv2d: bias length mismatch");
    require(stride >= 1 && padding >= 0, "conv2d: invalid stride/padding");
    ConvGeometry g{input.dim(0), input.dim(1), input.dim(2), input.dim(3), weight.dim(0), weight.dim(2),
                   stride, padding, 0, 0};
    g.oh = (g.h + 2 * padding - g.k) / stride + 1;
    g.ow = (g.w + 2 * padding - g.k) / stride + 1;
    require(g.h + 2 * padding >= g.k && g.w + 2 * padding >= g.k && g.oh > 0 && g.ow > 0,
            "conv2d: non-positive output extent for input " + shape_string(input.shape()));

    const std::size_t col_size = static_cast<std::size_t>(g.rows()) * g.cols();
    const std::size_t in_item = static_cast<std::size_t>(g.c) * g.h * g.w;
    const std::size_t out_item = static_cast<std::size_t>(g.o) * g.cols();
    const bool record = grad_enabled() && (input.requires_grad() || weight.requires_grad() ||
                                           bias.requires_grad());
    auto cols = std::make_shared<std::vector<double>>(record ? col_size * g.n : col_size);
    std::vector<double> out(out_item * g.n);
    ConstMapMatrix wm(weight.values().data(), g.o, g.rows());
    const Eigen::Map<const Eigen::VectorXd> bv(bias.values().data(), g.o);
    for (int n = 0; n < g.n; ++n) {
        double* col = cols->data() + (record ? col_size * n : 0);
        im2col(input.values().data() + in_item * n, g, col);
        MapMatrix om(out.data() + out_item * n, g.o, g.cols());
        om.noalias() = wm * ConstMapMatrix(col, g.rows(), g.cols());
        om.colwise() += bv;
    }
    if (!record) return make_result("conv2d", {g.n, g.o, g.oh, g.ow}, std::move(out), {}, {});

    return make_result(
        "conv2d", {g.n, g.o, g.oh, g.ow}, std::move(out), {input, weight, bias},
        [g, cols, col_size, in_item, out_item](TensorNode& node) {
            auto& x = *node.inputs[0];
            auto& w = *node.inputs[1];
            ConstMapMatrix wm(w.value.data(), g.o, g.rows());
            std::vector<double> dcol(x.requires_grad ? col_size : 0);
            for (int n = 0; n < g.n; ++n) {
                ConstMapMatrix dout(node.grad.data() + out_item * n, g.o, g.cols());
                ConstMapMatrix col(cols->data() + col_size * n, g.rows(), g.cols());
                if (w.requires_grad) {
                    MapMatrix dw(w.grad_buffer().data(), g.o, g.rows());
                    dw.noalias() += dout * col.transpose();
                }
                if (wants_grad(node, 2)) {
                    auto& db = node.inputs[2]->grad_buffer();
                    for (int o = 0; o < g.o; ++o) db[o] += dout.row(o).sum();
                }
                if (x.requires_grad) {
                    MapMatrix dc(dcol.data(), g.rows(), g.cols());
                    dc.noalias() = wm.transpose() * dout;
                    col2im_add(dcol.data(), g, x.grad_buffer().data() + in_item * n);
                }
            }
        });
}

Tensor dense(const Tensor& input, const Tensor& weight, const Tensor& bias) {
    require(input.rank() >= 1 && weight.rank() == 2, "dense: expected (N,F) input and (O,F) weight");
    const int n = input.dim(0);
    const int f = static_cast<int>(input.size() / static_cast<std::size_t>(n));
    const int o = weight.dim(0);
    require(weight.dim(1) == f, "dense: input feature dim " + std::to_string(f) +
                                    " does not match weight " + shape_string(weight.shape()));
    require(bias.size() == static_cast<std::size_t>(o), "dense: bias length mismatch");
    std::vector<double> out(static_cast<std::size_t>(n) * o);
    ConstMapMatrix xm(input.values().data(), n, f);
    ConstMapMatrix wm(weight.values().data(), o, f);
    MapMatrix om(out.data(), n, o);
    om.noalias() = xm * wm.transpose();
    om.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(bias.values().data(), o);
    return make_result("dense", {n, o}, std::move(out), {input, weight, bias},
                       [n, f, o](TensorNode& node) {
                           ConstMapMatrix dout(node.grad.data(), n, o);
                           auto& x = *node.inputs[0];
                           auto& w = *node.inputs[1];
                           if (x.requires_grad) {
                               MapMatrix dx(x.grad_buffer().data(), n, f);
                               dx.noalias() += dout * ConstMapMatrix(w.value.data(), o, f);
                           }
                           if (w.requires_grad) {
                               MapMatrix dw(w.grad_buffer().data(), o, f);
                               dw.noalias() += dout.transpose() * ConstMapMatrix(x.value.data(), n, f);
                           }
                           if (wants_grad(node, 2)) {
                               auto& db = node.inputs[2]->grad_buffer();
                               for (int j = 0; j < o; ++j) db[j] += dout.col(j).sum();
                           }
                       });
}

Tensor prelu(const Tensor& input, const Tensor& slope) {
    const ChannelLayout layout(input.shape());
    require(slope.size() == static_cast<std::size_t>(layout.c),
            "prelu: slope length " + std::to_string(slope.size()) + " != channel count " +
                std::to_string(layout.c));
    std::vector<double> out(input.size());
    const auto x = input.values();
    const auto a = slope.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] >= 0.0 ? x[i] : a[layout.channel(i)] * x[i];
    return make_result("prelu", input.shape(), std::move(out), {input, slope}, [layout](TensorNode& node) {
        auto& x = *node.inputs[0];
        auto& a = *node.inputs[1];
        if (x.requires_grad) {
            auto& g = x.grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i)
                g[i] += x.value[i] >= 0.0 ? node.grad[i] : a.value[layout.channel(i)] * node.grad[i];
        }
        if (a.requires_grad) {
            auto& g = a.grad_buffer();
            for (std::size_t i = 0; i < x.value.size(); ++i)
                if (x.value[i] < 0.0) g[layout.channel(i)] += node.grad[i] * x.value[i];
        }
    });
}

Tensor leaky_relu(const Tensor& input, double slope) {
    return unary(
        "leaky_relu", input, [slope](double x) { return x >= 0.0 ? x : slope * x; },
        [slope](double x, double) { return x >= 0.0 ? 1.0 : slope; });
}

Tensor tanh_act(const Tensor& input) {
    return unary(
        "tanh", input, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid_act(const Tensor& input) {
    return unary(
        "sigmoid", input,
        [](double x) {
            if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
            const double e = std::exp(x);
            return e / (1.0 + e);
        },
        [](double, double y) { return y * (1.0 - y); });
}

Tensor exp_act(const Tensor& input) {
    return unary(
        "exp", input, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log_clamped(const Tensor& input, double floor) {
    return unary(
        "log", input, [floor](double x) { return std::log(x > floor ? x : floor); },
        [floor](double x, double) { return x > floor ? 1.0 / x : 0.0; });
}

Tensor clamp(const Tensor& input, double lo, double hi) {
    return unary(
        "clamp", input, [lo, hi](double x) { return x < lo ? lo : (x > hi ? hi : x); },
        [lo, hi](double x, double) { return (x < lo || x > hi) ? 0.0 : 1.0; });
}

Tensor batch_norm(const Tensor& input, const Tensor& gamma, const Tensor& beta, BatchNormMode mode,
                  BatchNormBuffers& buffers) {
    const ChannelLayout layout(input.shape());
    const int c = layout.c;
    require(gamma.size() == static_cast<std::size_t>(c) && beta.size() == static_cast<std::size_t>(c),
            "batch_norm: affine parameters must have one entry per channel");
    require(buffers.running_mean.defined() && buffers.running_mean.size() == static_cast<std::size_t>(c) &&
                buffers.running_var.defined() && buffers.running_var.size() == static_cast<std::size_t>(c) &&
                buffers.batches_seen.defined() && buffers.batches_seen.size() == 1,
            "batch_norm: running-statistics buffers missing or mis-shaped");
    const std::size_t per_channel = static_cast<std::size_t>(layout.n) * layout.inner;
    const auto x = input.values();

    std::vector<double> mu(c, 0.0), inv_std(c, 0.0);
    if (mode == BatchNormMode::kTrain) {
        std::vector<double> var(c, 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) mu[layout.channel(i)] += x[i];
        for (auto& m : mu) m /= static_cast<double>(per_channel);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - mu[layout.channel(i)];
            var[layout.channel(i)] += d * d;
        }
        auto rm = buffers.running_mean.mutable_values();
        auto rv = buffers.running_var.mutable_values();
        for (int ch = 0; ch < c; ++ch) {
            var[ch] /= static_cast<double>(per_channel);
            inv_std[ch] = 1.0 / std::sqrt(var[ch] + kBatchNormEpsilon);
            rm[ch] = kBatchNormMomentum * rm[ch] + (1.0 - kBatchNormMomentum) * mu[ch];
            rv[ch] = kBatchNormMomentum * rv[ch] + (1.0 - kBatchNormMomentum) * var[ch];
        }
        buffers.batches_seen.mutable_values()[0] += 1.0;
    } else {
        require(buffers.batches_seen.item() > 0.0,
                "batch_norm: eval mode requested before any training step initialized the running stats");
        for (int ch = 0; ch < c; ++ch) {
            mu[ch] = buffers.running_mean.values()[ch];
            inv_std[ch] = 1.0 / std::sqrt(buffers.running_var.values()[ch] + kBatchNormEpsilon);
        }
    }

    std::vector<double> xhat(x.size()), out(x.size());
    const auto g = gamma.values();
    const auto b = beta.values();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const int ch = layout.channel(i);
        xhat[i] = (x[i] - mu[ch]) * inv_std[ch];
        out[i] = g[ch] * xhat[i] + b[ch];
    }
    const bool train = mode == BatchNormMode::kTrain;
    return make_result(
        "batch_norm", input.shape(), std::move(out), {input, gamma, beta},
        [layout, per_channel, train, inv_std, xhat = std::move(xhat)](TensorNode& node) {
            auto& x = *node.inputs[0];
            auto& gm = *node.inputs[1];
            const int c = layout.c;
            std::vector<double> sum_dy(c, 0.0), sum_dy_xhat(c, 0.0);
            for (std::size_t i = 0; i < node.grad.size(); ++i) {
                const int ch = layout.channel(i);
                sum_dy[ch] += node.grad[i];
                sum_dy_xhat[ch] += node.grad[i] * xhat[i];
            }
            if (gm.requires_grad) {
                auto& dg = gm.grad_buffer();
                for (int ch = 0; ch < c; ++ch) dg[ch] += sum_dy_xhat[ch];
            }
            if (wants_grad(node, 2)) {
                auto& db = node.inputs[2]->grad_buffer();
                for (int ch = 0; ch < c; ++ch) db[ch] += sum_dy[ch];
            }
            if (x.requires_grad) {
                auto& dx = x.grad_buffer();
                const double m = static_cast<double>(per_channel);
                for (std::size_t i = 0; i < dx.size(); ++i) {
                    const int ch = layout.channel(i);
                    const double k = gm.value[ch] * inv_std[ch];
                    if (train)
                        dx[i] += k * (node.grad[i] - sum_dy[ch] / m - xhat[i] * sum_dy_xhat[ch] / m);
                    else
                        dx[i] += k * node.grad[i];
                }
            }
        });
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + b.values()[i];
    return make_result("add", a.shape(), std::move(out), {a, b}, [](TensorNode& node) {
        for (std::size_t k = 0; k < 2; ++k)
            if (wants_grad(node, k)) {
                auto& g = node.inputs[k]->grad_buffer();
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i];
            }
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] - b.values()[i];
    return make_result("sub", a.shape(), std::move(out), {a, b}, [](TensorNode& node) {
        if (wants_grad(node, 0)) {
            auto& g = node.inputs[0]->grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i];
        }
        if (wants_grad(node, 1)) {
            auto& g = node.inputs[1]->grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] -= node.grad[i];
        }
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * b.values()[i];
    return make_result("mul", a.shape(), std::move(out), {a, b}, [](TensorNode& node) {
        auto& x = *node.inputs[0];
        auto& y = *node.inputs[1];
        if (x.requires_grad) {
            auto& g = x.grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i] * y.value[i];
        }
        if (y.requires_grad) {
            auto& g = y.grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i] * x.value[i];
        }
    });
}

Tensor scale(const Tensor& a, double factor) {
    return unary(
        "scale", a, [factor](double x) { return factor * x; }, [factor](double, double) { return factor; });
}

Tensor add_constant(const Tensor& a, double constant) {
    return unary(
        "add_constant", a, [constant](double x) { return x + constant; }, [](double, double) { return 1.0; });
}

Tensor add_broadcast(const Tensor& a, const Tensor& s) {
    require(s.size() == 1, "add_broadcast: expected a single-element tensor, got " + shape_string(s.shape()));
    const double v = s.values()[0];
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + v;
    return make_result("add_broadcast", a.shape(), std::move(out), {a, s}, [](TensorNode& node) {
        double total = 0.0;
        for (const double g : node.grad) total += g;
        if (wants_grad(node, 0)) {
            auto& g = node.inputs[0]->grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i];
        }
        if (wants_grad(node, 1)) node.inputs[1]->grad_buffer()[0] += total;
    });
}

Tensor sum(const Tensor& a) {
    double total = 0.0;
    for (const double v : a.values()) total += v;
    return make_result("sum", {1}, {total}, {a}, [](TensorNode& node) {
        auto& g = node.inputs[0]->grad_buffer();
        for (auto& v : g) v += node.grad[0];
    });
}

Tensor mean(const Tensor& a) {
    require(a.size() > 0, "mean of an empty tensor");
    const double inv = 1.0 / static_cast<double>(a.size());
    double total = 0.0;
    for (const double v : a.values()) total += v;
    return make_result("mean", {1}, {total * inv}, {a}, [inv](TensorNode& node) {
        auto& g = node.inputs[0]->grad_buffer();
        for (auto& v : g) v += node.grad[0] * inv;
    });
}

Tensor avg_pool2x2(const Tensor& input) {
    require(input.rank() == 4, "avg_pool2x2: expected (N,C,H,W)");
    const int planes = input.dim(0) * input.dim(1);
    const int h = input.dim(2), w = input.dim(3);
    const int oh = h / 2, ow = w / 2;
    require(oh > 0 && ow > 0, "avg_pool2x2: input too small " + shape_string(input.shape()));
    std::vector<double> out(static_cast<std::size_t>(planes) * oh * ow);
    const auto x = input.values();
    for (int p = 0; p < planes; ++p)
        for (int y = 0; y < oh; ++y)
            for (int xx = 0; xx < ow; ++xx) {
                const std::size_t base = (static_cast<std::size_t>(p) * h + 2 * y) * w + 2 * xx;
                out[(static_cast<std::size_t>(p) * oh + y) * ow + xx] =
                    0.25 * (x[base] + x[base + 1] + x[base + w] + x[base + w + 1]);
            }
    return make_result("avg_pool2x2", {input.dim(0), input.dim(1), oh, ow}, std::move(out), {input},
                       [planes, h, w, oh, ow](TensorNode& node) {
                           auto& g = node.inputs[0]->grad_buffer();
                           for (int p = 0; p < planes; ++p)
                               for (int y = 0; y < oh; ++y)
                                   for (int xx = 0; xx < ow; ++xx) {
                                       const double d =
                                           0.25 * node.grad[(static_cast<std::size_t>(p) * oh + y) * ow + xx];
                                       const std::size_t base =
                                           (static_cast<std::size_t>(p) * h + 2 * y) * w + 2 * xx;
                                       g[base] += d;
                                       g[base + 1] += d;
                                       g[base + w] += d;
                                       g[base + w + 1] += d;
                                   }
                       });
}

Tensor reshape(const Tensor& a, Shape shape) {
    require(element_count(shape) == a.size(),
            "reshape: cannot view " + shape_string(a.shape()) + " as " + shape_string(shape));
    std::vector<double> values(a.values().begin(), a.values().end());
    return make_result("reshape", std::move(shape), std::move(values), {a}, [](TensorNode& node) {
        auto& g = node.inputs[0]->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i];
    });
}

}  // namespace sradapt
