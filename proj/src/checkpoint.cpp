#include "s2a/checkpoint.hpp"

#include <fstream>

#include "json.hpp"

namespace s2a {

namespace {

using nlohmann::json;

json config_to_json(const ModelConfig& cfg) {
  return json{{"cell", to_string(cfg.cell_kind)},
              {"embedding_dim", cfg.embedding_dim},
              {"hidden_dim", cfg.hidden_dim},
              {"num_layers", cfg.num_layers},
              {"dropout_rate", cfg.dropout_rate},
              {"input_vocab_size", cfg.input_vocab_size},
              {"output_vocab_size", cfg.output_vocab_size},
              {"max_decode_len", cfg.max_decode_len},
              {"temperature", cfg.temperature},
              {"flags", cfg.flags.code()}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig cfg;
  cfg.cell_kind = cell_type_from_string(j.at("cell").get<std::string>());
  cfg.embedding_dim = j.at("embedding_dim").get<std::size_t>();
  cfg.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  cfg.num_layers = j.at("num_layers").get<std::size_t>();
  cfg.dropout_rate = j.at("dropout_rate").get<double>();
  cfg.input_vocab_size = j.at("input_vocab_size").get<std::size_t>();
  cfg.output_vocab_size = j.at("output_vocab_size").get<std::size_t>();
  cfg.max_decode_len = j.at("max_decode_len").get<std::size_t>();
  cfg.temperature = j.at("temperature").get<double>();
  cfg.flags = AblationFlags::from_code(j.at("flags").get<std::string>());
  return cfg;
}

Vocab vocab_from_json(const json& j) {
  Vocab v;
  for (const auto& t : j) v.add(t.get<std::string>());
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Model& model,
                     const Vocab& input_vocab, const Vocab& output_vocab) {
  json params = json::array();
  for (const auto& [name, tensor] : model.params().entries()) {
    params.push_back(json{{"name", name},
                          {"shape", tensor.shape()},
                          {"data", tensor.value()}});
  }
  json doc{{"format_version", kCheckpointVersion},
           {"config", config_to_json(model.config())},
           {"input_vocab", input_vocab.tokens()},
           {"output_vocab", output_vocab.tokens()},
           {"params", std::move(params)}};

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint '" + path + "'");
  const std::vector<std::uint8_t> bytes = json::to_msgpack(doc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for checkpoint '" + path + "'");
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  json doc;
  try {
    doc = json::from_msgpack(bytes);
  } catch (const json::exception& e) {
    throw IoError("checkpoint '" + path + "' is not valid: " + e.what());
  }
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kCheckpointVersion) {
      throw IoError("checkpoint '" + path + "' has format version " +
                    std::to_string(version) + ", expected " +
                    std::to_string(kCheckpointVersion));
    }
    LoadedCheckpoint out;
    out.input_vocab = vocab_from_json(doc.at("input_vocab"));
    out.output_vocab = vocab_from_json(doc.at("output_vocab"));
    ModelConfig cfg = config_from_json(doc.at("config"));
    // Initialization is immediately overwritten, any seed works.
    Rng rng(0);
    out.model = std::make_unique<Model>(cfg, rng);

    std::size_t restored = 0;
    for (const auto& p : doc.at("params")) {
      const std::string name = p.at("name").get<std::string>();
      if (!out.model->params().contains(name)) {
        throw IoError("checkpoint parameter '" + name +
                      "' does not exist in the configured model");
      }
      Tensor t = out.model->params().get(name);
      const auto shape = p.at("shape").get<std::vector<std::size_t>>();
      if (shape != t.shape()) {
        throw IoError("checkpoint parameter '" + name + "' has shape " +
                      shape_to_string(shape) + ", model expects " +
                      shape_to_string(t.shape()));
      }
      t.value() = p.at("data").get<std::vector<double>>();
      ++restored;
    }
    if (restored != out.model->params().entries().size()) {
      throw IoError("checkpoint '" + path + "' restores " +
                    std::to_string(restored) + " of " +
                    std::to_string(out.model->params().entries().size()) +
                    " model parameters");
    }
    return out;
  } catch (const json::exception& e) {
    throw IoError("checkpoint '" + path + "' is malformed: " + e.what());
  }
}

}  // namespace s2a
