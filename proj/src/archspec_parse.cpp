#include <cstdint>
#include <set>
#include <string>
#include <utility>

#include <json.hpp>

#include "netscore/archspec.hpp"

namespace netscore {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

LayerKind kind_from_string(const std::string& name, const std::string& layer_id) {
  static const std::pair<const char*, LayerKind> kinds[] = {
      {"conv2d", LayerKind::conv2d},
      {"fc", LayerKind::fc},
      {"maxpool", LayerKind::maxpool},
      {"avgpool", LayerKind::avgpool},
      {"global_avgpool", LayerKind::global_avgpool},
      {"batchnorm", LayerKind::batchnorm},
      {"activation", LayerKind::activation},
      {"add", LayerKind::add},
      {"concat", LayerKind::concat},
      {"flatten", LayerKind::flatten},
      {"dropout", LayerKind::dropout},
      {"lrn", LayerKind::lrn},
      {"softmax", LayerKind::softmax},
  };
  for (const auto& [text, kind] : kinds) {
    if (name == text) return kind;
  }
  throw ValidationError("layer '" + layer_id + "': unknown layer type '" + name + "'");
}

std::int64_t require_int(const json& value, const std::string& context) {
  if (!value.is_number_integer()) {
    throw ValidationError(context + " must be an integer");
  }
  return value.get<std::int64_t>();
}

/// Accepts either a scalar (square) or a [h, w] pair.
std::pair<std::int64_t, std::int64_t> int_pair(const json& value,
                                               const std::string& context) {
  if (value.is_number_integer()) {
    std::int64_t v = value.get<std::int64_t>();
    return {v, v};
  }
  if (value.is_array() && value.size() == 2 && value[0].is_number_integer() &&
      value[1].is_number_integer()) {
    return {value[0].get<std::int64_t>(), value[1].get<std::int64_t>()};
  }
  throw ValidationError(context + " must be an integer or a [h, w] pair");
}

bool require_bool(const json& value, const std::string& context) {
  if (!value.is_boolean()) {
    throw ValidationError(context + " must be true or false");
  }
  return value.get<bool>();
}

template <typename ErrorType = ValidationError>
void reject_unknown_keys(const json& object, const std::set<std::string>& known,
                         const std::string& context) {
  for (const auto& [key, _] : object.items()) {
    if (!known.contains(key)) {
      throw ErrorType(context + ": unknown field '" + key + "'");
    }
  }
}

Layer parse_layer(const json& node, std::size_t position) {
  const std::string where = "layers[" + std::to_string(position) + "]";
  if (!node.is_object()) throw ParseError(where + " must be an object");
  if (!node.contains("id") || !node["id"].is_string()) {
    throw ParseError(where + " needs a string 'id'");
  }

  Layer layer;
  layer.id = node["id"].get<std::string>();
  const std::string ctx = "layer '" + layer.id + "'";

  if (!node.contains("type") || !node["type"].is_string()) {
    throw ValidationError(ctx + ": needs a string 'type'");
  }
  layer.kind = kind_from_string(node["type"].get<std::string>(), layer.id);

  if (!node.contains("inputs") || !node["inputs"].is_array()) {
    throw ValidationError(ctx + ": needs an 'inputs' array of layer ids");
  }
  for (const json& ref : node["inputs"]) {
    if (!ref.is_string()) throw ValidationError(ctx + ": inputs must be strings");
    layer.inputs.push_back(ref.get<std::string>());
  }

  std::set<std::string> known = {"id", "type", "inputs"};
  switch (layer.kind) {
    case LayerKind::conv2d: {
      known.insert({"out_channels", "kernel", "stride", "padding", "groups", "bias"});
      Conv2dAttrs attrs;
      if (!node.contains("out_channels") || !node.contains("kernel") ||
          !node.contains("bias")) {
        throw ValidationError(ctx + ": conv2d requires out_channels, kernel, and bias");
      }
      attrs.out_channels = require_int(node["out_channels"], ctx + ".out_channels");
      std::tie(attrs.kernel_h, attrs.kernel_w) = int_pair(node["kernel"], ctx + ".kernel");
      if (node.contains("stride")) {
        std::tie(attrs.stride_h, attrs.stride_w) = int_pair(node["stride"], ctx + ".stride");
      }
      if (node.contains("padding")) {
        std::tie(attrs.pad_h, attrs.pad_w) = int_pair(node["padding"], ctx + ".padding");
      }
      if (node.contains("groups")) {
        attrs.groups = require_int(node["groups"], ctx + ".groups");
      }
      attrs.bias = require_bool(node["bias"], ctx + ".bias");
      layer.attrs = attrs;
      break;
    }
    case LayerKind::fc: {
      known.insert({"out_features", "bias"});
      if (!node.contains("out_features") || !node.contains("bias")) {
        throw ValidationError(ctx + ": fc requires out_features and bias");
      }
      FcAttrs attrs;
      attrs.out_features = require_int(node["out_features"], ctx + ".out_features");
      attrs.bias = require_bool(node["bias"], ctx + ".bias");
      layer.attrs = attrs;
      break;
    }
    case LayerKind::maxpool:
    case LayerKind::avgpool: {
      known.insert({"kernel", "stride", "padding"});
      if (!node.contains("kernel")) {
        throw ValidationError(ctx + ": pooling requires a kernel");
      }
      PoolAttrs attrs;
      std::tie(attrs.kernel_h, attrs.kernel_w) = int_pair(node["kernel"], ctx + ".kernel");
      if (node.contains("stride")) {
        std::tie(attrs.stride_h, attrs.stride_w) = int_pair(node["stride"], ctx + ".stride");
      } else {
        attrs.stride_h = attrs.kernel_h;  // non-overlapping window by default
        attrs.stride_w = attrs.kernel_w;
      }
      if (node.contains("padding")) {
        std::tie(attrs.pad_h, attrs.pad_w) = int_pair(node["padding"], ctx + ".padding");
      }
      layer.attrs = attrs;
      break;
    }
    default:
      break;
  }

  reject_unknown_keys(node, known, ctx);
  return layer;
}

}  // namespace

ArchGraph parse_arch(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("architecture document: ") + e.what());
  }

  if (!doc.is_object()) throw ParseError("architecture document must be a JSON object");
  reject_unknown_keys<ParseError>(doc, {"format", "name", "input", "layers"},
                                  "architecture document");
  for (const char* field : {"format", "name", "input", "layers"}) {
    if (!doc.contains(field)) {
      throw ParseError(std::string("architecture document: missing field '") +
                       field + "'");
    }
  }
  if (!doc["format"].is_number_integer() ||
      doc["format"].get<int>() != kFormatVersion) {
    throw ParseError("architecture document: unsupported format (expected format: " +
                     std::to_string(kFormatVersion) + ")");
  }
  if (!doc["name"].is_string()) {
    throw ParseError("architecture document: 'name' must be a string");
  }

  const json& input = doc["input"];
  if (!input.is_object()) {
    throw ParseError("architecture document: 'input' must be an object");
  }
  reject_unknown_keys<ParseError>(input, {"height", "width", "channels"}, "input");
  for (const char* field : {"height", "width", "channels"}) {
    if (!input.contains(field)) {
      throw ParseError(std::string("input: missing field '") + field + "'");
    }
  }
  TensorShape input_shape{require_int(input["height"], "input.height"),
                          require_int(input["width"], "input.width"),
                          require_int(input["channels"], "input.channels")};

  if (!doc["layers"].is_array()) {
    throw ParseError("architecture document: 'layers' must be an array");
  }
  std::vector<Layer> layers;
  layers.reserve(doc["layers"].size());
  for (std::size_t i = 0; i < doc["layers"].size(); ++i) {
    layers.push_back(parse_layer(doc["layers"][i], i));
  }

  return ArchGraph(doc["name"].get<std::string>(), input_shape, std::move(layers));
}

}  // namespace netscore
