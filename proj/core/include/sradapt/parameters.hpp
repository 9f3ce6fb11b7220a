#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sradapt/tensor.hpp"

namespace sradapt {

struct AdamState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::int64_t step = 0;
};

struct Parameter {
    std::string name;
    Tensor tensor;
    bool trainable = true;  // false for buffers such as batch-norm running stats
    AdamState adam;
};

// Ordered, uniquely named parameters. Copying performs a deep copy so that a
// copied network never aliases the storage of the original.
class ParameterSet {
public:
    ParameterSet() = default;
    ParameterSet(const ParameterSet& other);
    ParameterSet& operator=(const ParameterSet& other);
    ParameterSet(ParameterSet&&) noexcept = default;
    ParameterSet& operator=(ParameterSet&&) noexcept = default;

    // Returns the index of the new parameter.
    std::size_t add(std::string name, Shape shape, std::vector<double> values, bool trainable = true);

    const Parameter& operator[](std::size_t i) const { return params_[i]; }
    Parameter& operator[](std::size_t i) { return params_[i]; }
    const Tensor& tensor(std::size_t i) const { return params_[i].tensor; }

    const Parameter* find(const std::string& name) const;
    Parameter* find(const std::string& name);

    std::size_t size() const { return params_.size(); }
    auto begin() const { return params_.begin(); }
    auto end() const { return params_.end(); }
    auto begin() { return params_.begin(); }
    auto end() { return params_.end(); }

    // Number of trainable scalars.
    std::size_t trainable_count() const;
    void zero_grads();
    // Drops Adam moments and step counts (they are not checkpointed either).
    void reset_optimizer_state();

private:
    std::vector<Parameter> params_;
};

struct AdamOptions {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Bias-corrected Adam over every trainable parameter. Throws if any trainable
// parameter has never received a gradient.
void adam_step(ParameterSet& params, const AdamOptions& options);

}  // namespace sradapt
