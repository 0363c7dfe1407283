#pragma once

#include <deque>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ad/params.hpp"
#include "ad/rng.hpp"
#include "ad/tensor.hpp"

namespace ad {

// Tape-based reverse-mode autodiff. One tape per example forward pass; nodes
// are owned by the tape and freed together. backward() walks the tape in
// reverse creation order, so any expression built strictly forward is
// differentiated exactly.
class Tape;

struct Node {
    Tensor value;
    Tensor grad;
    std::function<void(Node&, Tape&)> backward;  // empty for leaves
    std::vector<Node*> parents;
};

using Var = Node*;

class Tape {
  public:
    Var leaf(Tensor v) {
        nodes_.push_back(Node{std::move(v), Tensor(), nullptr, {}});
        Node& n = nodes_.back();
        n.grad = Tensor::zeros(n.value.shape);
        return &n;
    }

    Var make(Tensor v, std::vector<Var> parents, std::function<void(Node&, Tape&)> bw) {
        nodes_.push_back(Node{std::move(v), Tensor(), std::move(bw), std::move(parents)});
        Node& n = nodes_.back();
        n.grad = Tensor::zeros(n.value.shape);
        return &n;
    }

    // Leaf for a named parameter; cached so repeated uses within one tape
    // share the node and accumulate gradient.
    Var param(ParamSet& ps, const std::string& name) {
        ParamSet::Entry& e = ps.at(name);
        auto it = param_nodes_.find(&e);
        if (it != param_nodes_.end()) return it->second;
        Var v = leaf(e.value);
        param_nodes_[&e] = v;
        return v;
    }

    // Seeds root gradient with ones and runs the reverse sweep.
    void backward(Var root) {
        std::fill(root->grad.data.begin(), root->grad.data.end(), 1.0);
        for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
            if (it->backward) it->backward(*it, *this);
        }
    }

    // Adds tape-local parameter gradients into the ParamSet grads.
    void accumulate_param_grads() {
        for (auto& [entry, node] : param_nodes_) {
            for (std::size_t i = 0; i < entry->grad.size(); ++i)
                entry->grad.data[i] += node->grad.data[i];
        }
    }

  private:
    std::deque<Node> nodes_;
    std::unordered_map<ParamSet::Entry*, Var> param_nodes_;
};

// ---- ops ----

Var matmul(Tape& t, Var a, Var b);     // [m,k] x [k,n] -> [m,n]
Var matmul_nt(Tape& t, Var a, Var b);  // [m,k] x [n,k]^T -> [m,n]
Var add(Tape& t, Var a, Var b);        // same shape
Var add_rowvec(Tape& t, Var a, Var b); // [m,n] + broadcast [n]
Var scale(Tape& t, Var a, double c);
Var gelu(Tape& t, Var a);              // exact x * Phi(x)
Var tanh_op(Tape& t, Var a);
Var sigmoid(Tape& t, Var a);
Var layer_norm(Tape& t, Var x, Var gain, Var bias, double eps);
Var softmax_rows(Tape& t, Var a);
Var dropout(Tape& t, Var a, double p, RngStream& rng, bool train);
Var concat_cols(Tape& t, const std::vector<Var>& parts);  // [1,n_i] -> [1, sum n_i]
Var select_row(Tape& t, Var a, std::size_t row);          // [m,n] -> [1,n]
Var gather_rows(Tape& t, Var table, const std::vector<int>& ids);
Var multi_head_self_attention(Tape& t, Var q, Var k, Var v, std::size_t num_heads,
                              double attn_dropout, RngStream& rng, bool train);
Var bce(Tape& t, Var p, double y);  // scalar; p clamped to [1e-12, 1-1e-12]
Var sumsq(Tape& t, Var a);          // scalar sum of squares

// Non-differentiable helpers used by forward math outside the tape.
double gelu_scalar(double x);

}  // namespace ad
