#include "cgnn/io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cgnn/rng.hpp"

namespace cgnn {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write file: " + path);
    }
    out << content;
}

std::string file_digest(const std::string& path) {
    const uint64_t h = fnv1a64(read_file(path));
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

namespace {

CorpusEntry load_document(const fs::path& conllu_path) {
    CorpusEntry entry;
    entry.doc = parse_conllu(read_file(conllu_path.string()));
    entry.doc.doc_id = conllu_path.stem().string();

    std::vector<std::pair<int, int>> coref;
    fs::path sidecar = conllu_path;
    sidecar.replace_extension(".json");
    if (fs::exists(sidecar)) {
        DocumentAnnotations ann =
            parse_annotations(read_file(sidecar.string()), entry.doc.token_count());
        entry.doc.doc_id = ann.doc_id;
        for (RelationInstance& instance : ann.instances) {
            instance.doc_id = ann.doc_id;
        }
        coref = ann.coref;
        entry.instances = std::move(ann.instances);
    }
    entry.graph = build_document_graph(entry.doc, coref);
    return entry;
}

}  // namespace

Corpus load_corpus(const std::string& path) {
    Corpus corpus;
    if (fs::is_directory(path)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.path().extension() == ".conllu") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        for (const fs::path& f : files) {
            corpus.push_back(load_document(f));
        }
    } else if (fs::exists(path)) {
        corpus.push_back(load_document(path));
    } else {
        throw std::runtime_error("corpus path does not exist: " + path);
    }
    if (corpus.empty()) {
        throw std::runtime_error("no .conllu documents under " + path);
    }
    return corpus;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(jobs);
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&, w]() {
            try {
                for (int i = w; i < n; i += jobs) {
                    fn(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (std::thread& t : workers) {
        t.join();
    }
    for (const std::exception_ptr& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace cgnn
