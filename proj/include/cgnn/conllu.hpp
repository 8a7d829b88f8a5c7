#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cgnn {

/// Error with the 1-based line (0 when no line applies) of the offending
/// input.
struct ParseError : std::runtime_error {
    ParseError(int line, const std::string& message)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                      : message),
          line(line) {}
    int line;
};

struct Token {
    std::string form;
    std::string upos;
    int head = 0;  // 1-based index within the sentence, 0 = root
    std::string deprel;
};

struct Document {
    std::string doc_id;
    std::vector<std::vector<Token>> sentences;

    int token_count() const;
    /// (start, end) global token range of each sentence, sentence-major
    /// reading order.
    std::vector<std::pair<int, int>> sentence_spans() const;
};

/// Parses CoNLL-U text: 10 tab-separated columns, blank-line sentence
/// separation, '#' comments. Consumes ID/FORM/UPOS/HEAD/DEPREL; multiword
/// ranges ("3-4") and empty nodes ("5.1") are skipped. Requires in-range
/// integer HEADs, exactly one root per sentence, and at least one sentence;
/// violations raise ParseError with the line number.
Document parse_conllu(const std::string& text);

/// Canonical 10-column rendering of the fields parse_conllu consumes;
/// unparsed columns are written as "_".
std::string serialize_conllu(const Document& doc);

}  // namespace cgnn
