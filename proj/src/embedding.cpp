#include "cgnn/embedding.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cgnn/rng.hpp"

namespace cgnn {

namespace {

std::vector<double> hash_vector(const std::string& key, int dim) {
    Rng rng(fnv1a64(key));
    std::vector<double> v(dim);
    double norm_sq = 0.0;
    for (double& x : v) {
        x = rng.uniform() * 2.0 - 1.0;
        norm_sq += x * x;
    }
    const double norm = std::sqrt(norm_sq);
    if (norm > 0.0) {
        for (double& x : v) {
            x /= norm;
        }
    }
    return v;
}

}  // namespace

EmbeddingTable EmbeddingTable::load(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int dim = -1;
    int line_no = 0;
    EmbeddingTable table(0);
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string word;
        fields >> word;
        std::vector<double> vec;
        double v;
        while (fields >> v) {
            vec.push_back(v);
        }
        if (!fields.eof()) {
            throw ParseError(line_no, "malformed embedding value");
        }
        if (dim == -1) {
            dim = static_cast<int>(vec.size());
            if (dim == 0) {
                throw ParseError(line_no, "embedding line has no values");
            }
            table.dim_ = dim;
        }
        if (static_cast<int>(vec.size()) != dim) {
            throw ParseError(line_no, "embedding width " + std::to_string(vec.size()) +
                                          " does not match declared width " +
                                          std::to_string(dim));
        }
        table.words_[word] = std::move(vec);
    }
    if (dim == -1) {
        throw ParseError(0, "embedding file is empty");
    }
    return table;
}

void EmbeddingTable::insert(const std::string& word, std::vector<double> vec) {
    if (static_cast<int>(vec.size()) != dim_) {
        throw std::invalid_argument("EmbeddingTable::insert: width mismatch");
    }
    words_[word] = std::move(vec);
}

std::vector<double> EmbeddingTable::word_vector(const std::string& form) const {
    auto it = words_.find(form);
    if (it != words_.end()) {
        return it->second;
    }
    return hash_vector("word:" + form, dim_);
}

std::vector<double> EmbeddingTable::pos_vector(const std::string& upos) const {
    return hash_vector("pos:" + upos, kPosDim);
}

Matrix embed_tokens(const Document& doc, const EmbeddingTable& table) {
    Matrix out(doc.token_count(), table.dim() + kPosDim);
    int row = 0;
    for (const auto& sentence : doc.sentences) {
        for (const Token& token : sentence) {
            const std::vector<double> word = table.word_vector(token.form);
            const std::vector<double> pos = table.pos_vector(token.upos);
            for (int j = 0; j < table.dim(); ++j) {
                out.at(row, j) = word[j];
            }
            for (int j = 0; j < kPosDim; ++j) {
                out.at(row, table.dim() + j) = pos[j];
            }
            ++row;
        }
    }
    return out;
}

}  // namespace cgnn
