#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cgnn/autodiff.hpp"
#include "cgnn/hierarchy.hpp"
#include "cgnn/matrix.hpp"

namespace cgnn {

struct GcnLayer {
    Parameter weight;  // d_in x d_out
    Parameter bias;    // 1 x d_out

    GcnLayer(int d_in, int d_out)
        : weight(Matrix(d_in, d_out)), bias(Matrix(1, d_out)) {}
};

/// S stacked convolutions sharing one adjacency:
/// H <- ReLU(A * H * W + 1b), with A used verbatim (integer weights and any
/// coarsening-induced diagonal included; no normalization, no added
/// self-loops).
struct GcnBlock {
    std::vector<GcnLayer> layers;

    GcnBlock(int sublayers, int d_in, int d_out);
};

Matrix gcn_block_forward(const GcnBlock& block, const AdjacencyMatrix& a, const Matrix& h_in);

/// Supernode row = sum of member rows (MtH under the n x m one-hot matching
/// matrix); `mean` divides by member count instead.
Matrix pool_features(const MatchingMatrix& m, const Matrix& h_out, bool mean = false);

/// Fine row = copy of its supernode's row (MU).
Matrix unpool_features(const MatchingMatrix& m, const Matrix& u_out);

Matrix residual_combine(const Matrix& u_tilde, const Matrix& h_out_same_level);

struct ModelConfig {
    int level_count = 1;  // number of graphs in the hierarchy
    int sublayers = 1;    // S, convolutions per block
    int input_dim = 1;
    int hidden_dim = 1;
    bool mean_pool = false;
    double dropout = 0.0;  // applied after each block during training only
};

/// Intermediate activations of one forward pass, retained for tests and
/// inspection.
struct ForwardTrace {
    std::vector<Matrix> h_in;     // per level
    std::vector<Matrix> h_out;    // per level
    std::vector<Matrix> u_in;     // levels 0..L-2
    std::vector<Matrix> u_tilde;  // levels 0..L-2
    std::vector<Matrix> u_out;    // per level
};

/// Encoder-decoder GCN over a graph hierarchy. The pooling branch runs one
/// block per level downward; the unpooling branch restores resolution with
/// one block per level (the bottom block is shared) and residual-adds the
/// pooling branch's output at the same level, for (2L-1)*S convolutions in
/// total.
class MultiscaleGcn {
public:
    explicit MultiscaleGcn(const ModelConfig& config);

    const ModelConfig& config() const { return config_; }
    int layer_count() const;

    /// Glorot-uniform weights (+/- sqrt(6/(d_in+d_out))), zero biases;
    /// deterministic per seed.
    void init_parameters(uint64_t seed);
    void init_parameters(Rng& rng);
    /// Checkpoint order: pooling blocks by level, then unpooling blocks from
    /// the bottom back to level 0; within a block, layer order, W before b.
    std::vector<Parameter*> parameters();
    std::vector<const Parameter*> parameters() const;

    /// Gradient-free forward; returns the level-0 token embeddings.
    Matrix forward(const GraphHierarchy& h, const Matrix& x, ForwardTrace* trace = nullptr) const;

    /// Taped forward for training. Dropout (if configured) draws from `rng`.
    Var forward(Tape& tape, const GraphHierarchy& h, const Matrix& x, Rng* rng = nullptr);

    GcnBlock& pool_block(int level) { return pool_blocks_[level]; }
    GcnBlock& unpool_block(int level) { return unpool_blocks_[level]; }

private:
    void check_hierarchy(const GraphHierarchy& h, const Matrix& x) const;

    ModelConfig config_;
    std::vector<GcnBlock> pool_blocks_;    // levels 0..L-1
    std::vector<GcnBlock> unpool_blocks_;  // levels 0..L-2, indexed by level
};

}  // namespace cgnn
