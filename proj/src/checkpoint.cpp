#include "cgnn/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstring>
#include <fstream>

namespace cgnn {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload is written as native little-endian doubles");

namespace {

std::vector<Parameter*> all_parameters(MultiscaleGcn& model, PairScorer& head) {
    std::vector<Parameter*> params = model.parameters();
    for (Parameter* p : head.parameters()) {
        params.push_back(p);
    }
    return params;
}

}  // namespace

void save_checkpoint(const std::string& path, const CheckpointMeta& meta, MultiscaleGcn& model,
                     PairScorer& head) {
    nlohmann::json header;
    header["format"] = "cgnn-checkpoint-v1";
    header["level_count"] = meta.model.level_count;
    header["sublayers"] = meta.model.sublayers;
    header["input_dim"] = meta.model.input_dim;
    header["hidden_dim"] = meta.model.hidden_dim;
    header["mean_pool"] = meta.model.mean_pool;
    header["entity_count"] = meta.entity_count;
    header["num_classes"] = meta.num_classes;
    header["method"] = to_string(meta.method);
    header["seed"] = meta.seed;

    const std::vector<Parameter*> params = all_parameters(model, head);
    nlohmann::json shapes = nlohmann::json::array();
    for (const Parameter* p : params) {
        shapes.push_back({p->value.rows(), p->value.cols()});
    }
    header["param_shapes"] = shapes;

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw CheckpointError("cannot open checkpoint for writing: " + path);
    }
    out << header.dump() << '\n';
    for (const Parameter* p : params) {
        out.write(reinterpret_cast<const char*>(p->value.data()),
                  static_cast<std::streamsize>(p->value.size() * sizeof(double)));
    }
    if (!out) {
        throw CheckpointError("failed writing checkpoint payload: " + path);
    }
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CheckpointError("cannot open checkpoint: " + path);
    }
    std::string header_line;
    if (!std::getline(in, header_line)) {
        throw CheckpointError("checkpoint has no header line: " + path);
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_line);
    } catch (const nlohmann::json::parse_error& e) {
        throw CheckpointError("malformed checkpoint header: " + std::string(e.what()));
    }
    LoadedCheckpoint loaded;
    try {
        if (header.at("format").get<std::string>() != "cgnn-checkpoint-v1") {
            throw CheckpointError("unsupported checkpoint format");
        }
        loaded.meta.model.level_count = header.at("level_count").get<int>();
        loaded.meta.model.sublayers = header.at("sublayers").get<int>();
        loaded.meta.model.input_dim = header.at("input_dim").get<int>();
        loaded.meta.model.hidden_dim = header.at("hidden_dim").get<int>();
        loaded.meta.model.mean_pool = header.value("mean_pool", false);
        loaded.meta.entity_count = header.at("entity_count").get<int>();
        loaded.meta.num_classes = header.at("num_classes").get<int>();
        loaded.meta.method = pool_method_from_string(header.at("method").get<std::string>());
        loaded.meta.seed = header.at("seed").get<uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError("checkpoint header missing field: " + std::string(e.what()));
    } catch (const std::invalid_argument& e) {
        throw CheckpointError(std::string("checkpoint header: ") + e.what());
    }

    loaded.model = std::make_unique<MultiscaleGcn>(loaded.meta.model);
    loaded.head = std::make_unique<PairScorer>(loaded.meta.entity_count,
                                               loaded.meta.model.hidden_dim,
                                               loaded.meta.model.hidden_dim,
                                               loaded.meta.num_classes);

    const std::vector<Parameter*> params = all_parameters(*loaded.model, *loaded.head);
    const auto& shapes = header.at("param_shapes");
    if (shapes.size() != params.size()) {
        throw CheckpointError("checkpoint declares " + std::to_string(shapes.size()) +
                              " parameters, model expects " + std::to_string(params.size()));
    }
    for (size_t i = 0; i < params.size(); ++i) {
        const int rows = shapes[i][0].get<int>();
        const int cols = shapes[i][1].get<int>();
        if (rows != params[i]->value.rows() || cols != params[i]->value.cols()) {
            throw CheckpointError("parameter " + std::to_string(i) + " shape (" +
                                  std::to_string(rows) + "x" + std::to_string(cols) +
                                  ") does not match model " + params[i]->value.shape_str());
        }
        in.read(reinterpret_cast<char*>(params[i]->value.data()),
                static_cast<std::streamsize>(params[i]->value.size() * sizeof(double)));
        if (in.gcount() !=
            static_cast<std::streamsize>(params[i]->value.size() * sizeof(double))) {
            throw CheckpointError("checkpoint payload truncated at parameter " +
                                  std::to_string(i));
        }
    }
    char extra;
    if (in.read(&extra, 1)) {
        throw CheckpointError("trailing bytes after checkpoint payload");
    }
    return loaded;
}

}  // namespace cgnn
