#include "sradapt/losses.hpp"

#include <cmath>

#include "sradapt/error.hpp"
#include "sradapt/ops.hpp"

namespace sradapt {

namespace {

const std::array<double, kSsimWindow>& gaussian_window() {
    static const std::array<double, kSsimWindow> w = [] {
        std::array<double, kSsimWindow> v{};
        double total = 0.0;
        for (int i = 0; i < kSsimWindow; ++i) {
            const double d = i - kSsimWindow / 2;
            v[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
            total += v[i];
        }
        for (auto& x : v) x /= total;
        return v;
    }();
    return w;
}

// Valid separable Gaussian filtering of an h x w plane -> (h-10) x (w-10).
void filter_valid(const double* in, int h, int w, double* out, std::vector<double>& tmp) {
    const auto& g = gaussian_window();
    const int oh = h - kSsimWindow + 1, ow = w - kSsimWindow + 1;
    tmp.assign(static_cast<std::size_t>(h) * ow, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            const double* row = in + static_cast<std::size_t>(y) * w + x;
            for (int t = 0; t < kSsimWindow; ++t) acc += g[t] * row[t];
            tmp[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int t = 0; t < kSsimWindow; ++t) acc += g[t] * tmp[static_cast<std::size_t>(y + t) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = acc;
        }
}

// Adjoint of filter_valid: scatters an (h-10) x (w-10) map back to h x w.
void filter_valid_adjoint(const double* grad_out, int h, int w, double* grad_in, std::vector<double>& tmp) {
    const auto& g = gaussian_window();
    const int oh = h - kSsimWindow + 1, ow = w - kSsimWindow + 1;
    tmp.assign(static_cast<std::size_t>(h) * ow, 0.0);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            const double d = grad_out[static_cast<std::size_t>(y) * ow + x];
            for (int t = 0; t < kSsimWindow; ++t) tmp[static_cast<std::size_t>(y + t) * ow + x] += g[t] * d;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            const double d = tmp[static_cast<std::size_t>(y) * ow + x];
            double* row = grad_in + static_cast<std::size_t>(y) * w + x;
            for (int t = 0; t < kSsimWindow; ++t) row[t] += g[t] * d;
        }
}

struct LocalMoments {
    std::vector<double> mu_x, mu_y, exx, eyy, exy;
};

LocalMoments local_moments(const double* x, const double* y, int h, int w) {
    const std::size_t n = static_cast<std::size_t>(h) * w;
    const std::size_t m = static_cast<std::size_t>(h - kSsimWindow + 1) * (w - kSsimWindow + 1);
    std::vector<double> xx(n), yy(n), xy(n), tmp;
    for (std::size_t i = 0; i < n; ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    LocalMoments lm{std::vector<double>(m), std::vector<double>(m), std::vector<double>(m),
                    std::vector<double>(m), std::vector<double>(m)};
    filter_valid(x, h, w, lm.mu_x.data(), tmp);
    filter_valid(y, h, w, lm.mu_y.data(), tmp);
    filter_valid(xx.data(), h, w, lm.exx.data(), tmp);
    filter_valid(yy.data(), h, w, lm.eyy.data(), tmp);
    filter_valid(xy.data(), h, w, lm.exy.data(), tmp);
    return lm;
}

void check_pair(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape())
        throw Error(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                    shape_string(b.shape()));
}

// -mean ln Sig(favoured - mean(other)) - mean ln(1 - Sig(other - mean(favoured)))
Tensor relativistic_pair(const Tensor& favoured, const Tensor& other) {
    const Tensor fav_rel = add_broadcast(favoured, scale(mean(other), -1.0));
    const Tensor oth_rel = add_broadcast(other, scale(mean(favoured), -1.0));
    const Tensor term_fav = mean(log_clamped(sigmoid_act(fav_rel), kLogFloor));
    // 1 - Sig(z) == Sig(-z), evaluated without cancellation
    const Tensor term_oth = mean(log_clamped(sigmoid_act(scale(oth_rel, -1.0)), kLogFloor));
    return scale(add(term_fav, term_oth), -1.0);
}

void check_critic(const CriticOutputs& c) {
    if (!c.real_scores.defined() || !c.fake_scores.defined() || c.real_scores.size() == 0 ||
        c.fake_scores.size() == 0)
        throw Error("relativistic loss: empty batch");
    if (c.real_scores.size() != c.fake_scores.size())
        throw Error("relativistic loss: real and fake batches differ in size");
}

}  // namespace

Tensor l1_loss(const Tensor& pred, const Tensor& target) {
    check_pair(pred, target, "l1_loss");
    const std::size_t n = pred.size();
    if (n == 0) throw Error("l1_loss: empty tensors");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += std::abs(pred.values()[i] - target.values()[i]);
    const double inv = 1.0 / static_cast<double>(n);
    return make_result("l1_loss", {1}, {total * inv}, {pred, target}, [inv](TensorNode& node) {
        auto& p = *node.inputs[0];
        auto& t = *node.inputs[1];
        const double g = node.grad[0] * inv;
        for (std::size_t k = 0; k < 2; ++k) {
            if (!wants_grad(node, k)) continue;
            auto& dst = node.inputs[k]->grad_buffer();
            const double sign = k == 0 ? 1.0 : -1.0;
            for (std::size_t i = 0; i < dst.size(); ++i) {
                const double d = p.value[i] - t.value[i];
                if (d > 0.0) dst[i] += sign * g;
                else if (d < 0.0) dst[i] -= sign * g;
            }
        }
    });
}

Tensor ssim_statistic(const Tensor& pred, const Tensor& target, double dynamic_range,
                      SsimStatistic statistic) {
    check_pair(pred, target, "ssim");
    if (pred.rank() != 4) throw Error("ssim: expected (N,C,H,W) tensors, got " + shape_string(pred.shape()));
    const int h = pred.dim(2), w = pred.dim(3);
    if (h < kSsimWindow || w < kSsimWindow)
        throw Error("ssim: image " + std::to_string(w) + "x" + std::to_string(h) +
                    " is smaller than the 11x11 window");
    const int planes = pred.dim(0) * pred.dim(1);
    const std::size_t plane_size = static_cast<std::size_t>(h) * w;
    const std::size_t map_size = static_cast<std::size_t>(h - kSsimWindow + 1) * (w - kSsimWindow + 1);
    const double c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
    const double c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);
    const bool full = statistic == SsimStatistic::kFull;

    double total = 0.0;
    for (int p = 0; p < planes; ++p) {
        const auto lm = local_moments(pred.values().data() + plane_size * p,
                                      target.values().data() + plane_size * p, h, w);
        for (std::size_t i = 0; i < map_size; ++i) {
            const double mx = lm.mu_x[i], my = lm.mu_y[i];
            const double a2 = 2.0 * (lm.exy[i] - mx * my) + c2;
            const double b2 = (lm.exx[i] - mx * mx) + (lm.eyy[i] - my * my) + c2;
            double s = a2 / b2;
            if (full) s *= (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
            total += s;
        }
    }
    const double count = static_cast<double>(map_size) * planes;

    return make_result(
        full ? "ssim" : "ssim_cs", {1}, {total / count}, {pred, target},
        [=](TensorNode& node) {
            auto& xs = *node.inputs[0];
            auto& ys = *node.inputs[1];
            const double g = node.grad[0] / count;
            std::vector<double> d_mx(map_size), d_my(map_size), d_exx(map_size), d_eyy(map_size),
                d_exy(map_size), tmp;
            std::vector<double> f_mx(plane_size), f_my(plane_size), f_exx(plane_size), f_eyy(plane_size),
                f_exy(plane_size);
            for (int p = 0; p < planes; ++p) {
                const double* x = xs.value.data() + plane_size * p;
                const double* y = ys.value.data() + plane_size * p;
                const auto lm = local_moments(x, y, h, w);
                for (std::size_t i = 0; i < map_size; ++i) {
                    const double mx = lm.mu_x[i], my = lm.mu_y[i];
                    const double a2 = 2.0 * (lm.exy[i] - mx * my) + c2;
                    const double b2 = (lm.exx[i] - mx * mx) + (lm.eyy[i] - my * my) + c2;
                    if (full) {
                        const double a1 = 2.0 * mx * my + c1;
                        const double b1 = mx * mx + my * my + c1;
                        const double s = a1 * a2 / (b1 * b2);
                        const double inv = 1.0 / (b1 * b2);
                        // dS/dmu with the second moments held fixed
                        d_mx[i] = g * (2.0 * my * (a2 - a1) * inv - 2.0 * mx * s / b1 + 2.0 * mx * s / b2);
                        d_my[i] = g * (2.0 * mx * (a2 - a1) * inv - 2.0 * my * s / b1 + 2.0 * my * s / b2);
                        d_exx[i] = g * (-s / b2);
                        d_eyy[i] = g * (-s / b2);
                        d_exy[i] = g * (2.0 * a1 * inv);
                    } else {
                        const double s = a2 / b2;
                        d_mx[i] = g * (-2.0 * my / b2 + 2.0 * mx * s / b2);
                        d_my[i] = g * (-2.0 * mx / b2 + 2.0 * my * s / b2);
                        d_exx[i] = g * (-s / b2);
                        d_eyy[i] = g * (-s / b2);
                        d_exy[i] = g * (2.0 / b2);
                    }
                }
                for (auto* f : {&f_mx, &f_my, &f_exx, &f_eyy, &f_exy}) std::fill(f->begin(), f->end(), 0.0);
                filter_valid_adjoint(d_mx.data(), h, w, f_mx.data(), tmp);
                filter_valid_adjoint(d_my.data(), h, w, f_my.data(), tmp);
                filter_valid_adjoint(d_exx.data(), h, w, f_exx.data(), tmp);
                filter_valid_adjoint(d_eyy.data(), h, w, f_eyy.data(), tmp);
                filter_valid_adjoint(d_exy.data(), h, w, f_exy.data(), tmp);
                if (xs.requires_grad) {
                    double* dx = xs.grad_buffer().data() + plane_size * p;
                    for (std::size_t i = 0; i < plane_size; ++i)
                        dx[i] += f_mx[i] + 2.0 * x[i] * f_exx[i] + y[i] * f_exy[i];
                }
                if (ys.requires_grad) {
                    double* dy = ys.grad_buffer().data() + plane_size * p;
                    for (std::size_t i = 0; i < plane_size; ++i)
                        dy[i] += f_my[i] + 2.0 * y[i] * f_eyy[i] + x[i] * f_exy[i];
                }
            }
        });
}

Tensor ssim(const Tensor& pred, const Tensor& target, double dynamic_range) {
    return ssim_statistic(pred, target, dynamic_range, SsimStatistic::kFull);
}

int ms_ssim_scale_count(int height, int width) {
    int scales = 0;
    int h = height, w = width;
    while (scales < static_cast<int>(kMsSsimWeights.size()) && h >= kSsimWindow && w >= kSsimWindow) {
        ++scales;
        h /= 2;
        w /= 2;
    }
    return scales;
}

std::vector<double> ms_ssim_weights(int scales) {
    std::vector<double> w(kMsSsimWeights.begin(), kMsSsimWeights.begin() + scales);
    if (scales == static_cast<int>(kMsSsimWeights.size())) return w;  // canonical set used as published
    double total = 0.0;
    for (const double v : w) total += v;
    for (auto& v : w) v /= total;
    return w;
}

Tensor ms_ssim(const Tensor& pred, const Tensor& target, double dynamic_range) {
    check_pair(pred, target, "ms_ssim");
    if (pred.rank() != 4) throw Error("ms_ssim: expected (N,C,H,W) tensors");
    const int scales = ms_ssim_scale_count(pred.dim(2), pred.dim(3));
    if (scales == 0)
        throw Error("ms_ssim: image " + std::to_string(pred.dim(3)) + "x" + std::to_string(pred.dim(2)) +
                    " is smaller than the 11x11 window");
    const auto weights = ms_ssim_weights(scales);
    Tensor x = pred, y = target, log_sum;
    for (int s = 0; s < scales; ++s) {
        const bool last = s == scales - 1;
        const Tensor stat = ssim_statistic(
            x, y, dynamic_range, last ? SsimStatistic::kFull : SsimStatistic::kContrastStructure);
        const Tensor term = scale(log_clamped(stat, kLogFloor), weights[s]);
        log_sum = log_sum.defined() ? add(log_sum, term) : term;
        if (!last) {
            x = avg_pool2x2(x);
            y = avg_pool2x2(y);
        }
    }
    return exp_act(log_sum);
}

Tensor ssim_loss(const Tensor& pred, const Tensor& target) {
    return add_constant(scale(ssim(pred, target, kNormalizedRange), -1.0), 1.0);
}

Tensor ms_ssim_loss(const Tensor& pred, const Tensor& target) {
    return add_constant(scale(ms_ssim(pred, target, kNormalizedRange), -1.0), 1.0);
}

Tensor ragan_generator_loss(const CriticOutputs& critic) {
    check_critic(critic);
    return relativistic_pair(critic.fake_scores, critic.real_scores);
}

Tensor ragan_discriminator_loss(const CriticOutputs& critic) {
    check_critic(critic);
    return relativistic_pair(critic.real_scores, critic.fake_scores);
}

double LossValue::component(const std::string& name) const {
    for (const auto& [n, v] : components)
        if (n == name) return v;
    throw Error("loss has no component named " + name);
}

LossValue weighted_generator_loss(const Tensor& l1, const Tensor& ssim_term, const Tensor& adversarial) {
    LossValue out;
    out.scalar = add(add(scale(l1, kL1Weight), ssim_term), scale(adversarial, kAdversarialWeight));
    out.components = {{"l1", l1.item()}, {"ssim", ssim_term.item()}, {"adversarial", adversarial.item()}};
    return out;
}

LossValue generator_total_loss(const Tensor& pred, const Tensor& target, const CriticOutputs& critic) {
    return weighted_generator_loss(l1_loss(pred, target), ssim_loss(pred, target),
                                   ragan_generator_loss(critic));
}

}  // namespace sradapt
