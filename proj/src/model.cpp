#include "cgnn/model.hpp"

#include <cmath>
#include <stdexcept>

namespace cgnn {

GcnBlock::GcnBlock(int sublayers, int d_in, int d_out) {
    if (sublayers < 1) {
        throw std::invalid_argument("GcnBlock: sublayers must be >= 1");
    }
    layers.emplace_back(d_in, d_out);
    for (int s = 1; s < sublayers; ++s) {
        layers.emplace_back(d_out, d_out);
    }
}

Matrix gcn_block_forward(const GcnBlock& block, const AdjacencyMatrix& a, const Matrix& h_in) {
    if (a.size() != h_in.rows()) {
        throw std::invalid_argument("gcn_block_forward: adjacency of " +
                                    std::to_string(a.size()) + " nodes does not match features " +
                                    h_in.shape_str());
    }
    const Matrix adj = a.to_matrix();
    Matrix h = h_in;
    for (const GcnLayer& layer : block.layers) {
        h = relu(add_row_broadcast(matmul(adj, matmul(h, layer.weight.value)), layer.bias.value));
    }
    return h;
}

Matrix pool_features(const MatchingMatrix& m, const Matrix& h_out, bool mean) {
    if (m.n_fine != h_out.rows()) {
        throw std::invalid_argument("pool_features: matching covers " + std::to_string(m.n_fine) +
                                    " nodes but features are " + h_out.shape_str());
    }
    Matrix out(m.n_coarse, h_out.cols());
    std::vector<int> counts(m.n_coarse, 0);
    for (int i = 0; i < m.n_fine; ++i) {
        counts[m.assignment[i]] += 1;
        for (int j = 0; j < h_out.cols(); ++j) {
            out.at(m.assignment[i], j) += h_out.at(i, j);
        }
    }
    if (mean) {
        for (int r = 0; r < m.n_coarse; ++r) {
            for (int j = 0; j < out.cols(); ++j) {
                out.at(r, j) /= counts[r];
            }
        }
    }
    return out;
}

Matrix unpool_features(const MatchingMatrix& m, const Matrix& u_out) {
    if (m.n_coarse != u_out.rows()) {
        throw std::invalid_argument("unpool_features: matching has " + std::to_string(m.n_coarse) +
                                    " supernodes but features are " + u_out.shape_str());
    }
    Matrix out(m.n_fine, u_out.cols());
    for (int i = 0; i < m.n_fine; ++i) {
        for (int j = 0; j < u_out.cols(); ++j) {
            out.at(i, j) = u_out.at(m.assignment[i], j);
        }
    }
    return out;
}

Matrix residual_combine(const Matrix& u_tilde, const Matrix& h_out_same_level) {
    return add(u_tilde, h_out_same_level);
}

MultiscaleGcn::MultiscaleGcn(const ModelConfig& config) : config_(config) {
    if (config.level_count < 1) {
        throw std::invalid_argument("MultiscaleGcn: level_count must be >= 1");
    }
    pool_blocks_.emplace_back(config.sublayers, config.input_dim, config.hidden_dim);
    for (int l = 1; l < config.level_count; ++l) {
        pool_blocks_.emplace_back(config.sublayers, config.hidden_dim, config.hidden_dim);
    }
    for (int l = 0; l < config.level_count - 1; ++l) {
        unpool_blocks_.emplace_back(config.sublayers, config.hidden_dim, config.hidden_dim);
    }
}

int MultiscaleGcn::layer_count() const {
    int count = 0;
    for (const GcnBlock& b : pool_blocks_) {
        count += static_cast<int>(b.layers.size());
    }
    for (const GcnBlock& b : unpool_blocks_) {
        count += static_cast<int>(b.layers.size());
    }
    return count;
}

std::vector<Parameter*> MultiscaleGcn::parameters() {
    std::vector<Parameter*> out;
    for (GcnBlock& b : pool_blocks_) {
        for (GcnLayer& layer : b.layers) {
            out.push_back(&layer.weight);
            out.push_back(&layer.bias);
        }
    }
    for (int l = static_cast<int>(unpool_blocks_.size()) - 1; l >= 0; --l) {
        for (GcnLayer& layer : unpool_blocks_[l].layers) {
            out.push_back(&layer.weight);
            out.push_back(&layer.bias);
        }
    }
    return out;
}

std::vector<const Parameter*> MultiscaleGcn::parameters() const {
    auto mutable_params = const_cast<MultiscaleGcn*>(this)->parameters();
    return {mutable_params.begin(), mutable_params.end()};
}

void MultiscaleGcn::init_parameters(uint64_t seed) {
    Rng rng(seed);
    init_parameters(rng);
}

void MultiscaleGcn::init_parameters(Rng& rng) {
    for (Parameter* p : parameters()) {
        if (p->value.rows() == 1) {  // bias
            p->value.fill(0.0);
        } else {
            const double bound = std::sqrt(6.0 / (p->value.rows() + p->value.cols()));
            for (size_t i = 0; i < p->value.size(); ++i) {
                p->value.data()[i] = rng.uniform_symmetric(bound);
            }
        }
        p->zero_grad();
    }
}

void MultiscaleGcn::check_hierarchy(const GraphHierarchy& h, const Matrix& x) const {
    if (h.level_count() != config_.level_count) {
        throw std::invalid_argument("MultiscaleGcn: model expects " +
                                    std::to_string(config_.level_count) +
                                    " levels but hierarchy has " +
                                    std::to_string(h.level_count()));
    }
    if (x.rows() != h.level_size(0) || x.cols() != config_.input_dim) {
        throw std::invalid_argument("MultiscaleGcn: input " + x.shape_str() +
                                    " does not match level-0 size " +
                                    std::to_string(h.level_size(0)) + " x input_dim " +
                                    std::to_string(config_.input_dim));
    }
}

Matrix MultiscaleGcn::forward(const GraphHierarchy& h, const Matrix& x,
                              ForwardTrace* trace) const {
    check_hierarchy(h, x);
    const int levels = config_.level_count;
    std::vector<Matrix> h_in(levels), h_out(levels);

    h_in[0] = x;
    h_out[0] = gcn_block_forward(pool_blocks_[0], h.adjacency[0], h_in[0]);
    for (int l = 1; l < levels; ++l) {
        h_in[l] = pool_features(h.matchings[l - 1], h_out[l - 1], config_.mean_pool);
        h_out[l] = gcn_block_forward(pool_blocks_[l], h.adjacency[l], h_in[l]);
    }

    // The bottom block belongs to the pooling branch; the unpooling branch
    // starts from its output.
    std::vector<Matrix> u_in(std::max(0, levels - 1)), u_tilde(std::max(0, levels - 1)),
        u_out(levels);
    u_out[levels - 1] = h_out[levels - 1];
    for (int l = levels - 2; l >= 0; --l) {
        u_in[l] = unpool_features(h.matchings[l], u_out[l + 1]);
        u_tilde[l] = gcn_block_forward(unpool_blocks_[l], h.adjacency[l], u_in[l]);
        u_out[l] = residual_combine(u_tilde[l], h_out[l]);
    }

    if (trace != nullptr) {
        trace->h_in = std::move(h_in);
        trace->h_out = h_out;
        trace->u_in = std::move(u_in);
        trace->u_tilde = std::move(u_tilde);
        trace->u_out = u_out;
    }
    return u_out[0];
}

namespace {

Var taped_block(Tape& tape, GcnBlock& block, Var adj, Var h, double dropout, Rng* rng) {
    for (GcnLayer& layer : block.layers) {
        Var w = tape.parameter(layer.weight);
        Var b = tape.parameter(layer.bias);
        h = tape.relu(tape.add_row_broadcast(tape.matmul(adj, tape.matmul(h, w)), b));
    }
    if (dropout > 0.0 && rng != nullptr) {
        h = tape.dropout(h, dropout, *rng);
    }
    return h;
}

}  // namespace

Var MultiscaleGcn::forward(Tape& tape, const GraphHierarchy& h, const Matrix& x, Rng* rng) {
    check_hierarchy(h, x);
    const int levels = config_.level_count;
    std::vector<Var> adj(levels);
    for (int l = 0; l < levels; ++l) {
        adj[l] = tape.constant(h.adjacency[l].to_matrix());
    }

    std::vector<Var> h_out(levels);
    Var current = tape.constant(x);
    h_out[0] = taped_block(tape, pool_blocks_[0], adj[0], current, config_.dropout, rng);
    for (int l = 1; l < levels; ++l) {
        Var pooled = tape.pool_rows(h_out[l - 1], h.matchings[l - 1].assignment,
                                    h.matchings[l - 1].n_coarse, config_.mean_pool);
        h_out[l] = taped_block(tape, pool_blocks_[l], adj[l], pooled, config_.dropout, rng);
    }

    Var u_out = h_out[levels - 1];
    for (int l = levels - 2; l >= 0; --l) {
        Var u_in = tape.unpool_rows(u_out, h.matchings[l].assignment);
        Var u_tilde = taped_block(tape, unpool_blocks_[l], adj[l], u_in, config_.dropout, rng);
        u_out = tape.add(u_tilde, h_out[l]);
    }
    return u_out;
}

}  // namespace cgnn
