#include "cgnn/conllu.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace cgnn {

int Document::token_count() const {
    int n = 0;
    for (const auto& s : sentences) {
        n += static_cast<int>(s.size());
    }
    return n;
}

std::vector<std::pair<int, int>> Document::sentence_spans() const {
    std::vector<std::pair<int, int>> spans;
    int offset = 0;
    for (const auto& s : sentences) {
        spans.emplace_back(offset, offset + static_cast<int>(s.size()));
        offset += static_cast<int>(s.size());
    }
    return spans;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        const size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

bool is_plain_integer(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

struct PendingSentence {
    std::vector<Token> tokens;
    std::vector<int> token_lines;
    int first_line = 0;
};

void finish_sentence(PendingSentence& pending, Document& doc) {
    int roots = 0;
    for (size_t i = 0; i < pending.tokens.size(); ++i) {
        const Token& t = pending.tokens[i];
        if (t.head < 0 || t.head > static_cast<int>(pending.tokens.size())) {
            throw ParseError(pending.token_lines[i],
                             "HEAD " + std::to_string(t.head) + " out of range for sentence of " +
                                 std::to_string(pending.tokens.size()) + " tokens");
        }
        if (t.head == 0) {
            ++roots;
        }
    }
    if (roots != 1) {
        throw ParseError(pending.first_line, "sentence must have exactly one root, found " +
                                                 std::to_string(roots));
    }
    doc.sentences.push_back(std::move(pending.tokens));
    pending = PendingSentence{};
}

}  // namespace

Document parse_conllu(const std::string& text) {
    Document doc;
    PendingSentence pending;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            if (!pending.tokens.empty()) {
                finish_sentence(pending, doc);
            }
            continue;
        }
        if (line[0] == '#') {
            continue;
        }
        const std::vector<std::string> fields = split_tabs(line);
        if (fields.size() != 10) {
            throw ParseError(line_no, "expected 10 tab-separated columns, found " +
                                          std::to_string(fields.size()));
        }
        const std::string& id = fields[0];
        // Multiword-token ranges ("3-4") and empty nodes ("5.1") carry no
        // syntactic head and are skipped.
        if (id.find('-') != std::string::npos || id.find('.') != std::string::npos) {
            continue;
        }
        if (!is_plain_integer(id)) {
            throw ParseError(line_no, "ID column is not an integer: '" + id + "'");
        }
        if (std::stoi(id) != static_cast<int>(pending.tokens.size()) + 1) {
            throw ParseError(line_no, "ID " + id + " is out of sequence");
        }
        if (!is_plain_integer(fields[6])) {
            throw ParseError(line_no, "HEAD column is not an integer: '" + fields[6] + "'");
        }
        if (pending.tokens.empty()) {
            pending.first_line = line_no;
        }
        pending.tokens.push_back(Token{fields[1], fields[3], std::stoi(fields[6]), fields[7]});
        pending.token_lines.push_back(line_no);
    }
    if (!pending.tokens.empty()) {
        finish_sentence(pending, doc);
    }
    if (doc.sentences.empty()) {
        throw ParseError(line_no, "no sentences found");
    }
    return doc;
}

std::string serialize_conllu(const Document& doc) {
    std::ostringstream out;
    for (const auto& sentence : doc.sentences) {
        for (size_t i = 0; i < sentence.size(); ++i) {
            const Token& t = sentence[i];
            out << i + 1 << '\t' << t.form << "\t_\t" << t.upos << "\t_\t_\t" << t.head << '\t'
                << t.deprel << "\t_\t_\n";
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace cgnn
