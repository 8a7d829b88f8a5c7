#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cgnn/conllu.hpp"
#include "cgnn/graph.hpp"

namespace cgnn {

/// Half-open token range [start, end) in global (sentence-major) indexing.
struct MentionSpan {
    int start = 0;
    int end = 0;

    int length() const { return end - start; }
    bool overlaps(const MentionSpan& other) const {
        return start < other.end && other.start < end;
    }
    bool operator==(const MentionSpan&) const = default;
};

struct EntityCluster {
    std::string entity_id;
    std::vector<MentionSpan> mentions;
};

enum class TaskKind { MentionLevel, EntityLevel };

struct RelationInstance {
    std::string doc_id;
    std::vector<EntityCluster> entities;  // >= 2, each nonempty
    int label = 0;
    TaskKind task = TaskKind::MentionLevel;
};

/// Token graph of a whole document: consecutive-token adjacency inside each
/// sentence, dependency arcs (root arcs omitted), coreference pairs, and
/// one sentence-sequence edge between consecutive sentence roots.
struct DocumentGraph {
    LabeledGraph graph;
    std::vector<std::pair<int, int>> sentence_spans;
    std::vector<NodeId> root_tokens;  // one per sentence
};

DocumentGraph build_document_graph(const Document& doc,
                                   const std::vector<std::pair<int, int>>& coref);

/// Replaces every surface form inside each mention span with "ENTITY_k",
/// where k is the entity's position in the instance. Throws on overlapping
/// spans of different entities. Graph topology is untouched.
Document anonymize(const Document& doc, const RelationInstance& instance);

/// Per-document annotations carried in the JSON sidecar next to each
/// .conllu file.
struct DocumentAnnotations {
    std::string doc_id;
    std::vector<std::pair<int, int>> coref;
    std::vector<RelationInstance> instances;
};

/// Parses the sidecar schema:
///   {"doc_id": str, "coref": [[int,int],...],
///    "instances": [{"entities": [{"id": str, "mentions": [[start,end],...]},...],
///                   "label": int, "task": "mention"|"entity"}]}
/// Span and range violations raise ParseError.
DocumentAnnotations parse_annotations(const std::string& json_text, int total_tokens);

}  // namespace cgnn
