#include "cgnn/document_graph.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>

namespace cgnn {

DocumentGraph build_document_graph(const Document& doc,
                                   const std::vector<std::pair<int, int>>& coref) {
    DocumentGraph dg;
    dg.sentence_spans = doc.sentence_spans();
    const int n = doc.token_count();

    std::vector<Edge> edges;
    for (size_t s = 0; s < doc.sentences.size(); ++s) {
        const auto [start, end] = dg.sentence_spans[s];
        for (int i = start; i + 1 < end; ++i) {
            edges.push_back({i, i + 1, adjacency_kind()});
        }
        const auto& sentence = doc.sentences[s];
        for (int i = 0; i < static_cast<int>(sentence.size()); ++i) {
            const Token& t = sentence[i];
            if (t.head == 0) {
                dg.root_tokens.push_back(start + i);
            } else {
                // head -> dependent, both in global indexing
                edges.push_back({start + t.head - 1, start + i, dependency_kind(t.deprel)});
            }
        }
    }
    for (size_t s = 0; s + 1 < dg.root_tokens.size(); ++s) {
        edges.push_back({dg.root_tokens[s], dg.root_tokens[s + 1], sentence_seq_kind()});
    }
    for (const auto& [a, b] : coref) {
        if (a < 0 || a >= n || b < 0 || b >= n) {
            throw std::invalid_argument("coreference pair (" + std::to_string(a) + ", " +
                                        std::to_string(b) + ") out of range");
        }
        edges.push_back({a, b, coreference_kind()});
    }
    dg.graph = LabeledGraph::build(n, edges);
    return dg;
}

Document anonymize(const Document& doc, const RelationInstance& instance) {
    const int n = doc.token_count();
    std::vector<int> owner(n, -1);
    for (size_t k = 0; k < instance.entities.size(); ++k) {
        for (const MentionSpan& span : instance.entities[k].mentions) {
            if (span.start < 0 || span.end > n || span.start >= span.end) {
                throw std::invalid_argument("anonymize: invalid span [" +
                                            std::to_string(span.start) + ", " +
                                            std::to_string(span.end) + ")");
            }
            for (int i = span.start; i < span.end; ++i) {
                if (owner[i] != -1 && owner[i] != static_cast<int>(k)) {
                    throw std::invalid_argument(
                        "anonymize: token " + std::to_string(i) +
                        " covered by mentions of two different entities");
                }
                owner[i] = static_cast<int>(k);
            }
        }
    }
    Document out = doc;
    int index = 0;
    for (auto& sentence : out.sentences) {
        for (Token& token : sentence) {
            if (owner[index] != -1) {
                token.form = "ENTITY_" + std::to_string(owner[index]);
            }
            ++index;
        }
    }
    return out;
}

namespace {

MentionSpan parse_span(const nlohmann::json& j, int total_tokens) {
    if (!j.is_array() || j.size() != 2) {
        throw ParseError(0, "mention span must be a [start, end] pair");
    }
    MentionSpan span{j[0].get<int>(), j[1].get<int>()};
    if (span.start < 0 || span.end > total_tokens || span.start >= span.end) {
        throw ParseError(0, "mention span [" + std::to_string(span.start) + ", " +
                                std::to_string(span.end) + ") out of range for " +
                                std::to_string(total_tokens) + " tokens");
    }
    return span;
}

}  // namespace

DocumentAnnotations parse_annotations(const std::string& json_text, int total_tokens) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(0, std::string("sidecar JSON: ") + e.what());
    }
    try {
        DocumentAnnotations ann;
        ann.doc_id = j.at("doc_id").get<std::string>();
        for (const auto& pair : j.value("coref", nlohmann::json::array())) {
            if (!pair.is_array() || pair.size() != 2) {
                throw ParseError(0, "coref entry must be a [token, token] pair");
            }
            const int a = pair[0].get<int>();
            const int b = pair[1].get<int>();
            if (a < 0 || a >= total_tokens || b < 0 || b >= total_tokens || a == b) {
                throw ParseError(0, "coref pair (" + std::to_string(a) + ", " +
                                        std::to_string(b) + ") out of range");
            }
            ann.coref.emplace_back(a, b);
        }
        for (const auto& inst : j.value("instances", nlohmann::json::array())) {
            RelationInstance instance;
            instance.doc_id = ann.doc_id;
            instance.label = inst.at("label").get<int>();
            const std::string task = inst.at("task").get<std::string>();
            if (task == "mention") {
                instance.task = TaskKind::MentionLevel;
            } else if (task == "entity") {
                instance.task = TaskKind::EntityLevel;
            } else {
                throw ParseError(0, "unknown task '" + task + "'");
            }
            for (const auto& entity : inst.at("entities")) {
                EntityCluster cluster;
                cluster.entity_id = entity.at("id").get<std::string>();
                for (const auto& span : entity.at("mentions")) {
                    cluster.mentions.push_back(parse_span(span, total_tokens));
                }
                if (cluster.mentions.empty()) {
                    throw ParseError(0, "entity '" + cluster.entity_id + "' has no mentions");
                }
                instance.entities.push_back(std::move(cluster));
            }
            if (instance.entities.size() < 2) {
                throw ParseError(0, "instance needs at least two entities");
            }
            if (instance.label < 0) {
                throw ParseError(0, "negative label");
            }
            ann.instances.push_back(std::move(instance));
        }
        return ann;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("sidecar JSON: ") + e.what());
    }
}

}  // namespace cgnn
