#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sradapt {

using Shape = std::vector<int>;

std::size_t element_count(const Shape& shape);
std::string shape_string(const Shape& shape);

struct TensorNode;
// Propagates out.grad into out.inputs[*]->grad.
using BackwardFn = std::function<void(TensorNode& out)>;

struct TensorNode {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;  // empty until first touched
    bool requires_grad = false;
    std::vector<std::shared_ptr<TensorNode>> inputs;
    BackwardFn backward;  // empty for leaves
    const char* op = "leaf";

    // Lazily sized gradient buffer.
    std::vector<double>& grad_buffer() {
        if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
        return grad;
    }
};

// Shared handle to a node of the define-by-run graph. Copies alias the same
// storage; use clone() for an independent copy.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, double value, bool requires_grad = false);
    static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const { return node_->shape; }
    int dim(std::size_t i) const { return node_->shape.at(i); }
    std::size_t rank() const { return node_->shape.size(); }
    std::size_t size() const { return node_->value.size(); }

    std::span<const double> values() const { return node_->value; }
    std::span<double> mutable_values() { return node_->value; }
    double item() const;

    bool requires_grad() const { return node_->requires_grad; }
    bool has_grad() const { return node_->grad.size() == node_->value.size() && !node_->value.empty(); }
    std::span<const double> grad() const { return node_->grad; }
    void zero_grad();

    // Same values, cut from the graph.
    Tensor detach() const;
    // Deep copy of values (and requires_grad), no graph history.
    Tensor clone() const;

    TensorNode* node() const { return node_.get(); }
    const std::shared_ptr<TensorNode>& shared_node() const { return node_; }

private:
    explicit Tensor(std::shared_ptr<TensorNode> node) : node_(std::move(node)) {}
    std::shared_ptr<TensorNode> node_;

    friend Tensor make_result(const char* op, Shape shape, std::vector<double> values,
                              std::vector<Tensor> inputs, BackwardFn backward);
};

// Records an op result. The backward closure is attached only when gradient
// tracking is enabled and at least one input requires a gradient.
Tensor make_result(const char* op, Shape shape, std::vector<double> values,
                   std::vector<Tensor> inputs, BackwardFn backward);

// True when inputs(i) of `out` needs its gradient filled.
inline bool wants_grad(const TensorNode& out, std::size_t i) {
    return out.inputs[i] && out.inputs[i]->requires_grad;
}

struct BackwardStats {
    std::size_t nodes_visited = 0;
};

// Reverse-mode sweep from a scalar. Interior gradients are reset on every call;
// leaf gradients accumulate until explicitly zeroed.
BackwardStats backward(const Tensor& loss);

bool grad_enabled();

// Disables graph recording on this thread while alive.
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool previous_;
};

}  // namespace sradapt
