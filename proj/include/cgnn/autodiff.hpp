#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "cgnn/matrix.hpp"
#include "cgnn/rng.hpp"

namespace cgnn {

/// Trainable matrix with its gradient accumulator.
struct Parameter {
    Matrix value;
    Matrix grad;

    explicit Parameter(Matrix v) : value(std::move(v)), grad(value.rows(), value.cols()) {}

    void zero_grad() { grad.fill(0.0); }
};

/// value <- value - lr * grad, then grads are zeroed.
void sgd_step(const std::vector<Parameter*>& params, double lr);

class Tape;

/// Handle to a node on a Tape. Valid as long as the tape lives.
class Var {
public:
    Var() = default;

    const Matrix& value() const;
    const Matrix& grad() const;
    int rows() const { return value().rows(); }
    int cols() const { return value().cols(); }

private:
    friend class Tape;
    struct Node;
    explicit Var(Node* node) : node_(node) {}
    Node* node_ = nullptr;
};

/// Reverse-mode gradient tape over Matrix primitives. Ops append nodes in
/// topological (creation) order; backward() walks them once in reverse and
/// accumulates into Parameter::grad for every parameter leaf. A tape is
/// single-use: calling backward() twice throws.
class Tape {
public:
    Tape();
    ~Tape();
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Constant input; no gradient flows into it.
    Var constant(Matrix value);

    /// Leaf bound to a parameter; backward() adds into p.grad.
    Var parameter(Parameter& p);

    Var matmul(Var a, Var b);
    Var add(Var a, Var b);
    /// a + bias broadcast over rows; bias is 1 x cols.
    Var add_row_broadcast(Var a, Var bias);
    Var relu(Var a);
    /// Inverted dropout with the given keep-independent rate; identity when
    /// rate == 0. Mask is drawn once at op creation from `rng`.
    Var dropout(Var a, double rate, Rng& rng);
    /// Supernode row r = aggregate of fine rows i with assignment[i] == r.
    Var pool_rows(Var a, const std::vector<int>& assignment, int n_coarse, bool mean);
    /// Fine row i = copy of coarse row assignment[i].
    Var unpool_rows(Var a, const std::vector<int>& assignment);
    /// Per-column max over the selected rows -> 1 x cols. Gradient routes to
    /// the first argmax row on ties.
    Var row_max_pool(Var a, std::vector<int> rows);
    Var concat_cols(const std::vector<Var>& parts);
    Var concat_rows(const std::vector<Var>& parts);
    /// Per-column log-sum-exp over rows -> 1 x cols.
    Var logsumexp_rows(Var a);
    /// -log softmax(logits)[label] for a 1 x C logit row -> 1 x 1.
    Var cross_entropy(Var logits, int label);

    /// Backpropagate from a 1 x 1 root. Single use.
    void backward(Var root);

    /// Smallest margin to a nondifferentiable kink seen during forward
    /// (|relu input| and max-pool top-2 gap; exact duplicates from row
    /// copies count as safe). Finite-difference checks are only meaningful
    /// when this is comfortably larger than the probe step.
    double kink_margin() const { return kink_margin_; }

private:
    Var::Node* make_node(Matrix value, std::vector<Var::Node*> parents);

    std::vector<std::unique_ptr<Var::Node>> nodes_;
    double kink_margin_;
    bool consumed_ = false;
};

}  // namespace cgnn
