#include "smoothnet/checkpoint.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "smoothnet/errors.hpp"
#include "smoothnet/io_util.hpp"

namespace smoothnet {

using nlohmann::json;

namespace {

json tensor_to_json(const double* data, std::size_t rows, std::size_t cols) {
  json t;
  t["shape"] = {rows, cols};
  json arr = json::array();
  for (std::size_t i = 0; i < rows * cols; ++i) {
    arr.push_back(static_cast<double>(static_cast<float>(data[i])));
  }
  t["data"] = std::move(arr);
  return t;
}

void tensor_from_json(const json& t, const std::string& name, double* out, std::size_t rows,
                      std::size_t cols) {
  if (!t.is_object() || !t.contains("shape") || !t.contains("data")) {
    throw ParseError("checkpoint: tensor '" + name + "' needs shape and data");
  }
  const auto& shape = t.at("shape");
  if (!shape.is_array() || shape.size() != 2 || shape.at(0).get<std::size_t>() != rows ||
      shape.at(1).get<std::size_t>() != cols) {
    throw ShapeError("checkpoint: tensor '" + name + "' has wrong shape, expected [" +
                     std::to_string(rows) + "," + std::to_string(cols) + "]");
  }
  const auto& data = t.at("data");
  if (!data.is_array() || data.size() != rows * cols) {
    throw ShapeError("checkpoint: tensor '" + name + "' data length mismatch");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double v = data.at(i).get<double>();
    if (!std::isfinite(v)) throw NumericError("checkpoint: non-finite value in '" + name + "'");
    out[i] = v;
  }
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  validate_config(ckpt.config);
  json doc;
  doc["format_version"] = 1;
  doc["config"] = {{"variant", variant_name(ckpt.config.variant)},
                   {"window_t", ckpt.config.window_t},
                   {"hidden", ckpt.config.hidden},
                   {"blocks", ckpt.config.blocks},
                   {"leaky_slope", ckpt.config.leaky_slope}};
  json weights = json::object();
  for (const auto& [name, layer] : layer_entries(ckpt.weights)) {
    weights[name + ".weight"] = tensor_to_json(layer->w.data.data(), layer->w.rows, layer->w.cols);
    weights[name + ".bias"] = tensor_to_json(layer->b.data(), layer->b.size(), 1);
  }
  doc["weights"] = std::move(weights);
  doc["train_meta"] = {{"epochs", ckpt.meta.epochs},
                       {"seed", ckpt.meta.seed},
                       {"final_loss", ckpt.meta.final_loss}};
  return doc.dump();
}

Checkpoint checkpoint_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
  try {
    if (doc.value("format_version", -1) != 1) {
      throw ParseError("checkpoint: unsupported format_version");
    }
    if (!doc.contains("config")) throw ParseError("checkpoint: missing 'config'");
    const auto& jc = doc.at("config");
    Checkpoint ckpt;
    ckpt.config.variant = variant_from_name(jc.at("variant").get<std::string>());
    ckpt.config.window_t = jc.at("window_t").get<std::size_t>();
    ckpt.config.hidden = jc.at("hidden").get<std::size_t>();
    ckpt.config.blocks = jc.at("blocks").get<std::size_t>();
    ckpt.config.leaky_slope = jc.at("leaky_slope").get<double>();
    validate_config(ckpt.config);

    // Build the skeleton, then overwrite every tensor from the document.
    Rng scratch(0);
    ckpt.weights = init_weights(ckpt.config, scratch);
    if (!doc.contains("weights")) throw ParseError("checkpoint: missing 'weights'");
    const auto& jw = doc.at("weights");
    for (auto& [name, layer] : layer_entries(ckpt.weights)) {
      const std::string wk = name + ".weight", bk = name + ".bias";
      if (!jw.contains(wk)) throw ParseError("checkpoint: missing tensor '" + wk + "'");
      if (!jw.contains(bk)) throw ParseError("checkpoint: missing tensor '" + bk + "'");
      tensor_from_json(jw.at(wk), wk, layer->w.data.data(), layer->w.rows, layer->w.cols);
      tensor_from_json(jw.at(bk), bk, layer->b.data(), layer->b.size(), 1);
    }
    if (doc.contains("train_meta")) {
      const auto& jm = doc.at("train_meta");
      ckpt.meta.epochs = jm.value("epochs", 0);
      ckpt.meta.seed = jm.value("seed", std::uint64_t{0});
      ckpt.meta.final_loss = jm.value("final_loss", 0.0);
    }
    return ckpt;
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  write_file_atomic(path, checkpoint_to_json(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) {
  return checkpoint_from_json(read_file(path));
}

}  // namespace smoothnet
