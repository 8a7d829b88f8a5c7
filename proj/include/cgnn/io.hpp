#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cgnn/analysis.hpp"

namespace cgnn {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Hex FNV-1a digest of the file contents, for run manifests.
std::string file_digest(const std::string& path);

/// Loads every *.conllu file in a directory (sorted by filename) together
/// with its same-basename .json sidecar. A single .conllu path loads one
/// document. The doc_id falls back to the file stem when no sidecar exists.
Corpus load_corpus(const std::string& path);

/// Runs fn(0..n-1) across `jobs` threads; results must be written to
/// per-index slots so the merge order stays deterministic.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

}  // namespace cgnn
