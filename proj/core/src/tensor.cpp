#include "sradapt/tensor.hpp"

#include <algorithm>
#include <unordered_set>

#include "sradapt/error.hpp"

namespace sradapt {

namespace {
thread_local bool g_grad_enabled = true;
}

std::size_t element_count(const Shape& shape) {
    std::size_t n = 1;
    for (const int d : shape) {
        if (d < 0) throw Error("negative extent in shape " + shape_string(shape));
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

std::string shape_string(const Shape& shape) {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + ")";
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0, requires_grad); }

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
    const std::size_t n = element_count(shape);
    return from(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
    if (element_count(shape) != values.size())
        throw Error("tensor shape " + shape_string(shape) + " does not match " +
                    std::to_string(values.size()) + " values");
    auto node = std::make_shared<TensorNode>();
    node->shape = std::move(shape);
    node->value = std::move(values);
    node->requires_grad = requires_grad;
    return Tensor(std::move(node));
}

Tensor Tensor::scalar(double value, bool requires_grad) { return from({1}, {value}, requires_grad); }

double Tensor::item() const {
    if (size() != 1) throw Error("item() on tensor of shape " + shape_string(shape()));
    return node_->value[0];
}

void Tensor::zero_grad() { std::fill(node_->grad.begin(), node_->grad.end(), 0.0); }

Tensor Tensor::detach() const { return from(shape(), node_->value, false); }

Tensor Tensor::clone() const { return from(shape(), node_->value, node_->requires_grad); }

Tensor make_result(const char* op, Shape shape, std::vector<double> values,
                   std::vector<Tensor> inputs, BackwardFn backward) {
    Tensor out = Tensor::from(std::move(shape), std::move(values), false);
    out.node_->op = op;
    if (!g_grad_enabled) return out;
    const bool any = std::any_of(inputs.begin(), inputs.end(),
                                 [](const Tensor& t) { return t.defined() && t.requires_grad(); });
    if (!any) return out;
    out.node_->requires_grad = true;
    out.node_->inputs.reserve(inputs.size());
    for (auto& t : inputs) out.node_->inputs.push_back(t.shared_node());
    out.node_->backward = std::move(backward);
    return out;
}

BackwardStats backward(const Tensor& loss) {
    if (!loss.defined() || loss.size() != 1)
        throw Error("backward: loss must be a scalar, got shape " +
                    (loss.defined() ? shape_string(loss.shape()) : std::string("<undefined>")));
    BackwardStats stats;
    TensorNode* root = loss.node();
    if (!root->requires_grad) return stats;

    // Iterative post-order DFS; `order` ends up topologically sorted.
    std::vector<TensorNode*> order;
    std::unordered_set<TensorNode*> seen;
    std::vector<std::pair<TensorNode*, std::size_t>> stack{{root, 0}};
    seen.insert(root);
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->inputs.size()) {
            TensorNode* child = node->inputs[next++].get();
            if (child && child->requires_grad && seen.insert(child).second) stack.push_back({child, 0});
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    for (TensorNode* n : order)
        if (n->backward) n->grad.assign(n->value.size(), 0.0);
    root->grad_buffer()[0] += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        ++stats.nodes_visited;
        if ((*it)->backward) (*it)->backward(**it);
    }
    return stats;
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

}  // namespace sradapt
