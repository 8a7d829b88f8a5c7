#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "cgnn/model.hpp"
#include "cgnn/relation.hpp"

namespace cgnn {

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CheckpointMeta {
    ModelConfig model;
    int entity_count = 2;
    int num_classes = 2;
    PoolMethod method = PoolMethod::HybridMatching;
    uint64_t seed = 0;
};

struct LoadedCheckpoint {
    CheckpointMeta meta;
    std::unique_ptr<MultiscaleGcn> model;
    std::unique_ptr<PairScorer> head;
};

/// Single file: one JSON header line (config and parameter shapes) followed
/// by the flat little-endian 64-bit float payload of every parameter in
/// checkpoint order (model blocks, then scorer).
void save_checkpoint(const std::string& path, const CheckpointMeta& meta, MultiscaleGcn& model,
                     PairScorer& head);

/// Throws CheckpointError on unreadable files, malformed headers, or
/// payload/shape mismatches.
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace cgnn
