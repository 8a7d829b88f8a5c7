#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "cgnn/conllu.hpp"
#include "cgnn/matrix.hpp"

namespace cgnn {

inline constexpr int kPosDim = 30;

/// Word vectors keyed by surface form plus fixed-width POS-tag vectors.
/// Out-of-vocabulary forms fall back to a unit-norm vector seeded from a
/// stable hash of the string, so runs reproduce without shipped embeddings.
class EmbeddingTable {
public:
    explicit EmbeddingTable(int dim) : dim_(dim) {}

    /// Loads "word v1 v2 ... vd" lines; dim is inferred from the first line.
    static EmbeddingTable load(const std::string& text);

    int dim() const { return dim_; }
    void insert(const std::string& word, std::vector<double> vec);
    bool contains(const std::string& word) const { return words_.count(word) > 0; }

    /// Table row, or the hash fallback when absent. Pure in the surface
    /// string.
    std::vector<double> word_vector(const std::string& form) const;
    /// POS vectors are always hash-derived, width kPosDim.
    std::vector<double> pos_vector(const std::string& upos) const;

private:
    int dim_;
    std::unordered_map<std::string, std::vector<double>> words_;
};

/// Row i = word vector of token i concatenated with its POS vector;
/// n x (dim + kPosDim), deterministic.
Matrix embed_tokens(const Document& doc, const EmbeddingTable& table);

}  // namespace cgnn
