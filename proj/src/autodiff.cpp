#include "cgnn/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cgnn {

struct Var::Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    Parameter* param = nullptr;
    std::vector<Node*> parents;
    // Propagates this->grad into parents' grads.
    std::function<void(Node&)> backprop;
};

const Matrix& Var::value() const { return node_->value; }
const Matrix& Var::grad() const { return node_->grad; }

void sgd_step(const std::vector<Parameter*>& params, double lr) {
    for (Parameter* p : params) {
        for (size_t i = 0; i < p->value.size(); ++i) {
            p->value.data()[i] -= lr * p->grad.data()[i];
        }
        p->zero_grad();
    }
}

Tape::Tape() : kink_margin_(std::numeric_limits<double>::infinity()) {}
Tape::~Tape() = default;

Var::Node* Tape::make_node(Matrix value, std::vector<Var::Node*> parents) {
    auto node = std::make_unique<Var::Node>();
    node->value = std::move(value);
    node->grad = Matrix(node->value.rows(), node->value.cols());
    node->parents = std::move(parents);
    for (Var::Node* p : node->parents) {
        node->requires_grad = node->requires_grad || p->requires_grad;
    }
    nodes_.push_back(std::move(node));
    return nodes_.back().get();
}

Var Tape::constant(Matrix value) { return Var(make_node(std::move(value), {})); }

Var Tape::parameter(Parameter& p) {
    Var::Node* node = make_node(p.value, {});
    node->requires_grad = true;
    node->param = &p;
    return Var(node);
}

Var Tape::matmul(Var a, Var b) {
    Var::Node* node = make_node(cgnn::matmul(a.node_->value, b.node_->value),
                                {a.node_, b.node_});
    node->backprop = [](Var::Node& n) {
        Var::Node* a = n.parents[0];
        Var::Node* b = n.parents[1];
        if (a->requires_grad) {
            a->grad = cgnn::add(a->grad, cgnn::matmul(n.grad, transpose(b->value)));
        }
        if (b->requires_grad) {
            b->grad = cgnn::add(b->grad, cgnn::matmul(transpose(a->value), n.grad));
        }
    };
    return Var(node);
}

Var Tape::add(Var a, Var b) {
    Var::Node* node = make_node(cgnn::add(a.node_->value, b.node_->value), {a.node_, b.node_});
    node->backprop = [](Var::Node& n) {
        for (Var::Node* p : n.parents) {
            if (p->requires_grad) {
                p->grad = cgnn::add(p->grad, n.grad);
            }
        }
    };
    return Var(node);
}

Var Tape::add_row_broadcast(Var a, Var bias) {
    Var::Node* node = make_node(cgnn::add_row_broadcast(a.node_->value, bias.node_->value),
                                {a.node_, bias.node_});
    node->backprop = [](Var::Node& n) {
        Var::Node* a = n.parents[0];
        Var::Node* bias = n.parents[1];
        if (a->requires_grad) {
            a->grad = cgnn::add(a->grad, n.grad);
        }
        if (bias->requires_grad) {
            for (int i = 0; i < n.grad.rows(); ++i) {
                for (int j = 0; j < n.grad.cols(); ++j) {
                    bias->grad.at(0, j) += n.grad.at(i, j);
                }
            }
        }
    };
    return Var(node);
}

Var Tape::relu(Var a) {
    const Matrix& x = a.node_->value;
    for (size_t i = 0; i < x.size(); ++i) {
        kink_margin_ = std::min(kink_margin_, std::abs(x.data()[i]));
    }
    Var::Node* node = make_node(cgnn::relu(x), {a.node_});
    node->backprop = [](Var::Node& n) {
        Var::Node* a = n.parents[0];
        if (!a->requires_grad) {
            return;
        }
        for (size_t i = 0; i < n.grad.size(); ++i) {
            if (a->value.data()[i] > 0.0) {
                a->grad.data()[i] += n.grad.data()[i];
            }
        }
    };
    return Var(node);
}

Var Tape::dropout(Var a, double rate, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0) {
        throw std::invalid_argument("dropout: rate must be in [0, 1)");
    }
    if (rate == 0.0) {
        return a;
    }
    const Matrix& x = a.node_->value;
    auto mask = std::make_shared<std::vector<double>>(x.size());
    const double keep_scale = 1.0 / (1.0 - rate);
    Matrix out = x;
    for (size_t i = 0; i < x.size(); ++i) {
        (*mask)[i] = rng.uniform() < rate ? 0.0 : keep_scale;
        out.data()[i] *= (*mask)[i];
    }
    Var::Node* node = make_node(std::move(out), {a.node_});
    node->backprop = [mask](Var::Node& n) {
        Var::Node* a = n.parents[0];
        if (!a->requires_grad) {
            return;
        }
        for (size_t i = 0; i < n.grad.size(); ++i) {
            a->grad.data()[i] += n.grad.data()[i] * (*mask)[i];
        }
    };
    return Var(node);
}

Var Tape::pool_rows(Var a, const std::vector<int>& assignment, int n_coarse, bool mean) {
    const Matrix& x = a.node_->value;
    if (static_cast<int>(assignment.size()) != x.rows()) {
        throw std::invalid_argument("pool_rows: assignment length " +
                                    std::to_string(assignment.size()) +
                                    " does not match rows of " + x.shape_str());
    }
    std::vector<int> counts(n_coarse, 0);
    Matrix out(n_coarse, x.cols());
    for (int i = 0; i < x.rows(); ++i) {
        const int r = assignment[i];
        counts[r] += 1;
        for (int j = 0; j < x.cols(); ++j) {
            out.at(r, j) += x.at(i, j);
        }
    }
    auto weights = std::make_shared<std::vector<double>>(x.rows(), 1.0);
    if (mean) {
        for (int i = 0; i < x.rows(); ++i) {
            (*weights)[i] = 1.0 / counts[assignment[i]];
        }
        for (int r = 0; r < n_coarse; ++r) {
            for (int j = 0; j < x.cols(); ++j) {
                out.at(r, j) /= counts[r];
            }
        }
    }
    auto assign = std::make_shared<std::vector<int>>(assignment);
    Var::Node* node = make_node(std::move(out), {a.node_});
    node->backprop = [assign, weights](Var::Node& n) {
        Var::Node* a = n.parents[0];
        if (!a->requires_grad) {
            return;
        }
        for (int i = 0; i < a->grad.rows(); ++i) {
            for (int j = 0; j < a->grad.cols(); ++j) {
                a->grad.at(i, j) += n.grad.at((*assign)[i], j) * (*weights)[i];
            }
        }
    };
    return Var(node);
}

Var Tape::unpool_rows(Var a, const std::vector<int>& assignment) {
    const Matrix& x = a.node_->value;
    Matrix out(static_cast<int>(assignment.size()), x.cols());
    for (size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] < 0 || assignment[i] >= x.rows()) {
            throw std::invalid_argument("unpool_rows: supernode index out of range for " +
                                        x.shape_str());
        }
        for (int j = 0; j < x.cols(); ++j) {
            out.at(static_cast<int>(i), j) = x.at(assignment[i], j);
        }
    }
    auto assign = std::make_shared<std::vector<int>>(assignment);
    Var::Node* node = make_node(std::move(out), {a.node_});
    node->backprop = [assign](Var::Node& n) {
        Var::Node* a = n.parents[0];
        if (!a->requires_grad) {
            return;
        }
        for (size_t i = 0; i < assign->size(); ++i) {
            for (int j = 0; j < n.grad.cols(); ++j) {
                a->grad.at((*assign)[i], j) += n.grad.at(static_cast<int>(i), j);
            }
        }
    };
    return Var(node);
}

Var Tape::row_max_pool(Var a, std::vector<int> rows) {
    const Matrix& x = a.node_->value;
    Matrix out = cgnn::row_max_pool(x, rows);
    // One winner per column; ties go to the first row in `rows`.
    auto winners = std::make_shared<std::vector<int>>(x.cols());
    for (int j = 0; j < x.cols(); ++j) {
        int best = rows[0];
        double second = -std::numeric_limits<double>::infinity();
        for (int r : rows) {
            if (x.at(r, j) > x.at(best, j)) {
                second = x.at(best, j);
                best = r;
            } else if (r != best) {
                second = std::max(second, x.at(r, j));
            }
        }
        (*winners)[j] = best;
        const double gap = x.at(best, j) - second;
        if (std::isfinite(second) && gap > 0.0) {
            kink_margin_ = std::min(kink_margin_, gap);
        }
    }
    Var::Node* node = make_node(std::move(out), {a.node_});
    node->backprop = [winners](Var::Node& n) {
        Var::Node* a = n.parents[0];
        if (!a->requires_grad) {
            return;
        }
        for (int j = 0; j < n.grad.cols(); ++j) {
            a->grad.at((*winners)[j], j) += n.grad.at(0, j);
        }
    };
    return Var(node);
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
    std::vector<Matrix> values;
    std::vector<Var::Node*> parents;
    for (Var p : parts) {
        values.push_back(p.node_->value);
        parents.push_back(p.node_);
    }
    Var::Node* node = make_node(cgnn::concat_cols(values), std::move(parents));
    node->backprop = [](Var::Node& n) {
        int offset = 0;
        for (Var::Node* p : n.parents) {
            if (p->requires_grad) {
                for (int i = 0; i < p->grad.rows(); ++i) {
                    for (int j = 0; j < p->grad.cols(); ++j) {
                        p->grad.at(i, j) += n.grad.at(i, offset + j);
                    }
                }
            }
            offset += p->value.cols();
        }
    };
    return Var(node);
}

Var Tape::concat_rows(const std::vector<Var>& parts) {
    std::vector<Matrix> values;
    std::vector<Var::Node*> parents;
    for (Var p : parts) {
        values.push_back(p.node_->value);
        parents.push_back(p.node_);
    }
    Var::Node* node = make_node(cgnn::concat_rows(values), std::move(parents));
    node->backprop = [](Var::Node& n) {
        int offset = 0;
        for (Var::Node* p : n.parents) {
            if (p->requires_grad) {
                for (int i = 0; i < p->grad.rows(); ++i) {
                    for (int j = 0; j < p->grad.cols(); ++j) {
                        p->grad.at(i, j) += n.grad.at(offset + i, j);
                    }
                }
            }
            offset += p->value.rows();
        }
    };
    return Var(node);
}

Var Tape::logsumexp_rows(Var a) {
    const Matrix& x = a.node_->value;
    if (x.rows() == 0) {
        throw std::invalid_argument("logsumexp_rows: empty input");
    }
    Matrix out(1, x.cols());
    for (int j = 0; j < x.cols(); ++j) {
        std::vector<double> column(x.rows());
        for (int i = 0; i < x.rows(); ++i) {
            column[i] = x.at(i, j);
        }
        out.at(0, j) = logsumexp(column);
    }
    // d lse / d x_ij = softmax over the column.
    auto result = std::make_shared<Matrix>(out);
    Var::Node* node = make_node(std::move(out), {a.node_});
    node->backprop = [result](Var::Node& n) {
        Var::Node* a = n.parents[0];
        if (!a->requires_grad) {
            return;
        }
        for (int i = 0; i < a->grad.rows(); ++i) {
            for (int j = 0; j < a->grad.cols(); ++j) {
                a->grad.at(i, j) +=
                    n.grad.at(0, j) * std::exp(a->value.at(i, j) - result->at(0, j));
            }
        }
    };
    return Var(node);
}

Var Tape::cross_entropy(Var logits, int label) {
    const Matrix& x = logits.node_->value;
    if (x.rows() != 1) {
        throw std::invalid_argument("cross_entropy: logits must be a single row, got " +
                                    x.shape_str());
    }
    if (label < 0 || label >= x.cols()) {
        throw std::invalid_argument("cross_entropy: label " + std::to_string(label) +
                                    " out of range for " + std::to_string(x.cols()) +
                                    " classes");
    }
    std::vector<double> row(x.data(), x.data() + x.size());
    const double lse = logsumexp(row);
    Matrix out(1, 1);
    out.at(0, 0) = lse - x.at(0, label);
    auto softmax = std::make_shared<std::vector<double>>(row);
    for (double& v : *softmax) {
        v = std::exp(v - lse);
    }
    Var::Node* node = make_node(std::move(out), {logits.node_});
    node->backprop = [softmax, label](Var::Node& n) {
        Var::Node* a = n.parents[0];
        if (!a->requires_grad) {
            return;
        }
        const double g = n.grad.at(0, 0);
        for (int j = 0; j < a->grad.cols(); ++j) {
            a->grad.at(0, j) += g * ((*softmax)[j] - (j == label ? 1.0 : 0.0));
        }
    };
    return Var(node);
}

void Tape::backward(Var root) {
    if (consumed_) {
        throw std::logic_error("Tape::backward called twice without a new forward pass");
    }
    if (root.node_->value.rows() != 1 || root.node_->value.cols() != 1) {
        throw std::invalid_argument("Tape::backward: root must be 1x1, got " +
                                    root.node_->value.shape_str());
    }
    consumed_ = true;
    root.node_->grad.at(0, 0) = 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
        Var::Node& n = **it;
        if (n.requires_grad && n.backprop) {
            n.backprop(n);
        }
        if (n.param != nullptr) {
            n.param->grad = cgnn::add(n.param->grad, n.grad);
        }
    }
}

}  // namespace cgnn
