#include "sradapt/parameters.hpp"

#include <cmath>

#include "sradapt/error.hpp"

namespace sradapt {

ParameterSet::ParameterSet(const ParameterSet& other) : params_(other.params_) {
    for (auto& p : params_) p.tensor = p.tensor.clone();
}

ParameterSet& ParameterSet::operator=(const ParameterSet& other) {
    if (this != &other) {
        ParameterSet copy(other);
        params_ = std::move(copy.params_);
    }
    return *this;
}

std::size_t ParameterSet::add(std::string name, Shape shape, std::vector<double> values, bool trainable) {
    if (find(name)) throw Error("duplicate parameter name " + name);
    Parameter p;
    p.name = std::move(name);
    p.tensor = Tensor::from(std::move(shape), std::move(values), trainable);
    p.trainable = trainable;
    params_.push_back(std::move(p));
    return params_.size() - 1;
}

const Parameter* ParameterSet::find(const std::string& name) const {
    for (const auto& p : params_)
        if (p.name == name) return &p;
    return nullptr;
}

Parameter* ParameterSet::find(const std::string& name) {
    for (auto& p : params_)
        if (p.name == name) return &p;
    return nullptr;
}

std::size_t ParameterSet::trainable_count() const {
    std::size_t n = 0;
    for (const auto& p : params_)
        if (p.trainable) n += p.tensor.size();
    return n;
}

void ParameterSet::zero_grads() {
    for (auto& p : params_) p.tensor.zero_grad();
}

void ParameterSet::reset_optimizer_state() {
    for (auto& p : params_) p.adam = {};
}

void adam_step(ParameterSet& params, const AdamOptions& o) {
    for (auto& p : params) {
        if (!p.trainable) continue;
        if (!p.tensor.has_grad()) throw Error("adam_step: parameter " + p.name + " has no gradient");
    }
    for (auto& p : params) {
        if (!p.trainable) continue;
        auto& s = p.adam;
        const std::size_t n = p.tensor.size();
        if (s.first_moment.size() != n) {
            s.first_moment.assign(n, 0.0);
            s.second_moment.assign(n, 0.0);
        }
        ++s.step;
        const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(s.step));
        const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(s.step));
        auto w = p.tensor.mutable_values();
        const auto g = p.tensor.grad();
        for (std::size_t i = 0; i < n; ++i) {
            s.first_moment[i] = o.beta1 * s.first_moment[i] + (1.0 - o.beta1) * g[i];
            s.second_moment[i] = o.beta2 * s.second_moment[i] + (1.0 - o.beta2) * g[i] * g[i];
            const double m_hat = s.first_moment[i] / c1;
            const double v_hat = s.second_moment[i] / c2;
            w[i] -= o.lr * m_hat / (std::sqrt(v_hat) + o.eps);
        }
    }
}

}  // namespace sradapt
