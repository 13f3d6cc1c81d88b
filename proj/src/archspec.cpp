#include "netscore/archspec.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace netscore {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw ValidationError("count overflows 64-bit integer arithmetic");
  }
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) {
    throw ValidationError("count overflows 64-bit integer arithmetic");
  }
  return r;
}

[[noreturn]] void layer_error(const std::string& id, const std::string& rule) {
  throw ValidationError("layer '" + id + "': " + rule);
}

void validate_attrs(const Layer& layer) {
  switch (layer.kind) {
    case LayerKind::conv2d: {
      if (!std::holds_alternative<Conv2dAttrs>(layer.attrs)) {
        layer_error(layer.id, "conv2d requires conv attributes");
      }
      const auto& a = layer.conv();
      if (a.out_channels < 1) layer_error(layer.id, "out_channels must be >= 1");
      if (a.kernel_h < 1 || a.kernel_w < 1) layer_error(layer.id, "kernel dims must be >= 1");
      if (a.stride_h < 1 || a.stride_w < 1) layer_error(layer.id, "stride must be >= 1");
      if (a.pad_h < 0 || a.pad_w < 0) layer_error(layer.id, "padding must be >= 0");
      if (a.groups < 1) layer_error(layer.id, "groups must be >= 1");
      break;
    }
    case LayerKind::fc: {
      if (!std::holds_alternative<FcAttrs>(layer.attrs)) {
        layer_error(layer.id, "fc requires fc attributes");
      }
      if (layer.fc().out_features < 1) layer_error(layer.id, "out_features must be >= 1");
      break;
    }
    case LayerKind::maxpool:
    case LayerKind::avgpool: {
      if (!std::holds_alternative<PoolAttrs>(layer.attrs)) {
        layer_error(layer.id, "pooling requires pool attributes");
      }
      const auto& a = layer.pool();
      if (a.kernel_h < 1 || a.kernel_w < 1) layer_error(layer.id, "kernel dims must be >= 1");
      if (a.stride_h < 1 || a.stride_w < 1) layer_error(layer.id, "stride must be >= 1");
      if (a.pad_h < 0 || a.pad_w < 0) layer_error(layer.id, "padding must be >= 0");
      break;
    }
    default:
      if (!std::holds_alternative<std::monostate>(layer.attrs)) {
        layer_error(layer.id, std::string(to_string(layer.kind)) + " takes no attributes");
      }
      break;
  }
}

std::size_t min_arity(LayerKind kind) {
  return (kind == LayerKind::add || kind == LayerKind::concat) ? 2 : 1;
}

std::size_t max_arity(LayerKind kind) {
  return (kind == LayerKind::add || kind == LayerKind::concat)
             ? std::numeric_limits<std::size_t>::max()
             : 1;
}

}  // namespace

std::string TensorShape::to_string() const {
  std::ostringstream os;
  os << height << "x" << width << "x" << channels;
  return os.str();
}

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::fc: return "fc";
    case LayerKind::maxpool: return "maxpool";
    case LayerKind::avgpool: return "avgpool";
    case LayerKind::global_avgpool: return "global_avgpool";
    case LayerKind::batchnorm: return "batchnorm";
    case LayerKind::activation: return "activation";
    case LayerKind::add: return "add";
    case LayerKind::concat: return "concat";
    case LayerKind::flatten: return "flatten";
    case LayerKind::dropout: return "dropout";
    case LayerKind::lrn: return "lrn";
    case LayerKind::softmax: return "softmax";
  }
  return "unknown";
}

ArchGraph::ArchGraph(std::string name, TensorShape input_shape,
                     std::vector<Layer> layers)
    : name_(std::move(name)), input_shape_(input_shape) {
  if (input_shape_.height < 1 || input_shape_.width < 1 || input_shape_.channels < 1) {
    throw ValidationError("graph input shape dimensions must be >= 1, got " +
                          input_shape_.to_string());
  }
  if (layers.empty()) {
    throw ValidationError("graph has no layers");
  }

  std::unordered_map<std::string, std::size_t> declared;
  declared.reserve(layers.size());
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& layer = layers[i];
    if (layer.id.empty()) throw ValidationError("layer ids must be non-empty");
    if (layer.id == kInputId) {
      layer_error(layer.id, "'input' is reserved for the graph input");
    }
    if (!declared.emplace(layer.id, i).second) {
      layer_error(layer.id, "duplicate layer id");
    }
    validate_attrs(layer);
  }

  for (const Layer& layer : layers) {
    if (layer.inputs.size() < min_arity(layer.kind)) {
      layer_error(layer.id, std::string(to_string(layer.kind)) + " needs at least " +
                                std::to_string(min_arity(layer.kind)) + " input(s)");
    }
    if (layer.inputs.size() > max_arity(layer.kind)) {
      layer_error(layer.id,
                  std::string(to_string(layer.kind)) + " takes exactly one input");
    }
    for (const std::string& ref : layer.inputs) {
      if (ref != kInputId && !declared.contains(ref)) {
        layer_error(layer.id, "references undeclared layer '" + ref + "'");
      }
    }
  }

  // Kahn's algorithm with the smallest id first, so the stored order depends
  // only on the DAG, never on declaration order. Every layer has at least one
  // input terminating at "input", so acyclicity alone implies reachability.
  std::unordered_map<std::string, std::size_t> pending;  // unresolved input count
  std::unordered_map<std::string, std::vector<std::string>> consumers;
  for (const Layer& layer : layers) {
    std::size_t unresolved = 0;
    for (const std::string& ref : layer.inputs) {
      if (ref == kInputId) continue;
      ++unresolved;
      consumers[ref].push_back(layer.id);
    }
    pending[layer.id] = unresolved;
  }

  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  for (const Layer& layer : layers) {
    if (pending[layer.id] == 0) ready.push(layer.id);
  }

  layers_.reserve(layers.size());
  std::unordered_set<std::string> emitted;
  while (!ready.empty()) {
    std::string id = ready.top();
    ready.pop();
    layers_.push_back(std::move(layers[declared.at(id)]));
    emitted.insert(id);
    auto it = consumers.find(id);
    if (it == consumers.end()) continue;
    for (const std::string& next : it->second) {
      if (--pending[next] == 0) ready.push(next);
    }
  }

  if (layers_.size() != layers.size()) {
    for (const Layer& layer : layers) {
      if (!emitted.contains(layer.id)) {
        layer_error(layer.id, "participates in a cycle");
      }
    }
  }

  index_.reserve(layers_.size());
  std::unordered_set<std::string> consumed;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    index_.emplace(layers_[i].id, i);
    for (const std::string& ref : layers_[i].inputs) consumed.insert(ref);
  }

  std::vector<std::string> terminals;
  for (const Layer& layer : layers_) {
    if (!consumed.contains(layer.id)) terminals.push_back(layer.id);
  }
  if (terminals.size() != 1) {
    std::string names;
    for (const std::string& t : terminals) {
      if (!names.empty()) names += ", ";
      names += "'" + t + "'";
    }
    throw ValidationError("graph must have exactly one terminal layer, found " +
                          std::to_string(terminals.size()) +
                          (names.empty() ? "" : " (" + names + ")"));
  }
}

std::size_t ArchGraph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) {
    throw ValidationError("no layer with id '" + std::string(id) + "'");
  }
  return it->second;
}

const TensorShape& ShapedGraph::input_shape_of(std::size_t layer_index,
                                               std::size_t n) const {
  const std::string& ref = graph.layers()[layer_index].inputs.at(n);
  if (ref == kInputId) return graph.input_shape();
  return output_shapes[graph.index_of(ref)];
}

namespace {

std::int64_t conv_out_dim(std::int64_t in, std::int64_t pad, std::int64_t kernel,
                          std::int64_t stride) {
  // floor((in + 2*pad - kernel)/stride) + 1; a non-positive result is caught
  // by the caller, so truncation vs floor on negatives is immaterial.
  return (in + 2 * pad - kernel) / stride + 1;
}

TensorShape infer_layer_shape(const ShapedGraph& shaped, std::size_t idx) {
  const Layer& layer = shaped.graph.layers()[idx];
  const TensorShape& in = shaped.input_shape_of(idx);
  switch (layer.kind) {
    case LayerKind::conv2d: {
      const auto& a = layer.conv();
      if (in.channels % a.groups != 0) {
        layer_error(layer.id, "groups " + std::to_string(a.groups) +
                                  " does not divide input channels " +
                                  std::to_string(in.channels));
      }
      if (a.out_channels % a.groups != 0) {
        layer_error(layer.id, "groups " + std::to_string(a.groups) +
                                  " does not divide out_channels " +
                                  std::to_string(a.out_channels));
      }
      TensorShape out{conv_out_dim(in.height, a.pad_h, a.kernel_h, a.stride_h),
                      conv_out_dim(in.width, a.pad_w, a.kernel_w, a.stride_w),
                      a.out_channels};
      if (out.height < 1 || out.width < 1) {
        layer_error(layer.id, "non-positive inferred dimension (input " +
                                  in.to_string() + " is smaller than the kernel)");
      }
      return out;
    }
    case LayerKind::maxpool:
    case LayerKind::avgpool: {
      const auto& a = layer.pool();
      TensorShape out{conv_out_dim(in.height, a.pad_h, a.kernel_h, a.stride_h),
                      conv_out_dim(in.width, a.pad_w, a.kernel_w, a.stride_w),
                      in.channels};
      if (out.height < 1 || out.width < 1) {
        layer_error(layer.id, "non-positive inferred dimension (input " +
                                  in.to_string() + " is smaller than the kernel)");
      }
      return out;
    }
    case LayerKind::fc:
      return TensorShape{1, 1, layer.fc().out_features};
    case LayerKind::global_avgpool:
      return TensorShape{1, 1, in.channels};
    case LayerKind::flatten:
      return TensorShape{1, 1, checked_mul(checked_mul(in.height, in.width), in.channels)};
    case LayerKind::add: {
      for (std::size_t n = 1; n < layer.inputs.size(); ++n) {
        const TensorShape& other = shaped.input_shape_of(idx, n);
        if (!(other == in)) {
          layer_error(layer.id, "add inputs '" + layer.inputs[0] + "' (" +
                                    in.to_string() + ") and '" + layer.inputs[n] +
                                    "' (" + other.to_string() +
                                    ") have mismatched shapes");
        }
      }
      return in;
    }
    case LayerKind::concat: {
      std::int64_t channels = in.channels;
      for (std::size_t n = 1; n < layer.inputs.size(); ++n) {
        const TensorShape& other = shaped.input_shape_of(idx, n);
        if (other.height != in.height || other.width != in.width) {
          layer_error(layer.id, "concat inputs '" + layer.inputs[0] + "' (" +
                                    in.to_string() + ") and '" + layer.inputs[n] +
                                    "' (" + other.to_string() +
                                    ") disagree on spatial dimensions");
        }
        channels = checked_add(channels, other.channels);
      }
      return TensorShape{in.height, in.width, channels};
    }
    case LayerKind::batchnorm:
    case LayerKind::activation:
    case LayerKind::dropout:
    case LayerKind::lrn:
    case LayerKind::softmax:
      return in;
  }
  layer_error(layer.id, "unhandled layer kind");
}

}  // namespace

ShapedGraph infer_shapes(const ArchGraph& graph) {
  ShapedGraph shaped{graph, {}};
  shaped.output_shapes.reserve(graph.layers().size());
  // Layers are already in topological order, so each input shape is known
  // by the time it is needed.
  for (std::size_t i = 0; i < graph.layers().size(); ++i) {
    shaped.output_shapes.push_back(infer_layer_shape(shaped, i));
  }
  return shaped;
}

std::vector<std::int64_t> count_params(const ShapedGraph& shaped) {
  std::vector<std::int64_t> params;
  params.reserve(shaped.graph.layers().size());
  for (std::size_t i = 0; i < shaped.graph.layers().size(); ++i) {
    const Layer& layer = shaped.graph.layers()[i];
    switch (layer.kind) {
      case LayerKind::conv2d: {
        const auto& a = layer.conv();
        const TensorShape& in = shaped.input_shape_of(i);
        std::int64_t weights_per_filter =
            checked_mul(checked_mul(a.kernel_h, a.kernel_w), in.channels / a.groups);
        std::int64_t per_filter = checked_add(weights_per_filter, a.bias ? 1 : 0);
        params.push_back(checked_mul(per_filter, a.out_channels));
        break;
      }
      case LayerKind::fc: {
        const auto& a = layer.fc();
        std::int64_t in_features = shaped.input_shape_of(i).elements();
        params.push_back(
            checked_mul(checked_add(in_features, a.bias ? 1 : 0), a.out_features));
        break;
      }
      case LayerKind::batchnorm:
        // Learnable scale and shift only; running statistics are not weights.
        params.push_back(checked_mul(2, shaped.input_shape_of(i).channels));
        break;
      default:
        params.push_back(0);
        break;
    }
  }
  return params;
}

std::vector<std::int64_t> count_macs(const ShapedGraph& shaped) {
  std::vector<std::int64_t> macs;
  macs.reserve(shaped.graph.layers().size());
  for (std::size_t i = 0; i < shaped.graph.layers().size(); ++i) {
    const Layer& layer = shaped.graph.layers()[i];
    switch (layer.kind) {
      case LayerKind::conv2d: {
        const auto& a = layer.conv();
        const TensorShape& in = shaped.input_shape_of(i);
        const TensorShape& out = shaped.shape_of(i);
        std::int64_t per_output = checked_mul(checked_mul(a.kernel_h, a.kernel_w),
                                              in.channels / a.groups);
        std::int64_t outputs =
            checked_mul(checked_mul(out.height, out.width), a.out_channels);
        macs.push_back(checked_mul(per_output, outputs));
        break;
      }
      case LayerKind::fc: {
        std::int64_t in_features = shaped.input_shape_of(i).elements();
        macs.push_back(checked_mul(in_features, layer.fc().out_features));
        break;
      }
      default:
        // Bias adds, pooling, normalization and elementwise ops pair no
        // multiply with their adds, so they contribute zero MACs.
        macs.push_back(0);
        break;
    }
  }
  return macs;
}

ComplexityReport analyze(const ArchGraph& graph) {
  ShapedGraph shaped = infer_shapes(graph);
  std::vector<std::int64_t> params = count_params(shaped);
  std::vector<std::int64_t> macs = count_macs(shaped);

  ComplexityReport report;
  report.per_layer.reserve(graph.layers().size());
  for (std::size_t i = 0; i < graph.layers().size(); ++i) {
    const Layer& layer = graph.layers()[i];
    report.per_layer.push_back(
        LayerComplexity{layer.id, layer.kind, shaped.shape_of(i), params[i], macs[i]});
    report.total_params = checked_add(report.total_params, params[i]);
    report.total_macs = checked_add(report.total_macs, macs[i]);
  }
  return report;
}

std::int64_t simulate_macs(const ShapedGraph& shaped,
                           std::int64_t max_output_elements) {
  std::int64_t elements = 0;
  for (const TensorShape& shape : shaped.output_shapes) {
    elements = checked_add(elements, shape.elements());
  }
  if (elements > max_output_elements) {
    throw SizeLimitError("graph has " + std::to_string(elements) +
                         " output elements, above the simulation limit of " +
                         std::to_string(max_output_elements));
  }

  std::int64_t tally = 0;
  for (std::size_t i = 0; i < shaped.graph.layers().size(); ++i) {
    const Layer& layer = shaped.graph.layers()[i];
    if (layer.kind == LayerKind::conv2d) {
      const auto& a = layer.conv();
      const std::int64_t in_channels_per_group =
          shaped.input_shape_of(i).channels / a.groups;
      const TensorShape& out = shaped.shape_of(i);
      for (std::int64_t oc = 0; oc < a.out_channels; ++oc) {
        for (std::int64_t oy = 0; oy < out.height; ++oy) {
          for (std::int64_t ox = 0; ox < out.width; ++ox) {
            for (std::int64_t ky = 0; ky < a.kernel_h; ++ky) {
              for (std::int64_t kx = 0; kx < a.kernel_w; ++kx) {
                for (std::int64_t ic = 0; ic < in_channels_per_group; ++ic) {
                  ++tally;
                }
              }
            }
          }
        }
      }
    } else if (layer.kind == LayerKind::fc) {
      const std::int64_t in_features = shaped.input_shape_of(i).elements();
      for (std::int64_t of = 0; of < layer.fc().out_features; ++of) {
        for (std::int64_t if_ = 0; if_ < in_features; ++if_) {
          ++tally;
        }
      }
    }
  }
  return tally;
}

}  // namespace netscore
