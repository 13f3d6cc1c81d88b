#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "netscore/errors.hpp"

namespace netscore {

struct TensorShape {
  std::int64_t height = 1;
  std::int64_t width = 1;
  std::int64_t channels = 1;

  std::int64_t elements() const { return height * width * channels; }
  std::string to_string() const;

  friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

enum class LayerKind {
  conv2d,
  fc,
  maxpool,
  avgpool,
  global_avgpool,
  batchnorm,
  activation,
  add,
  concat,
  flatten,
  dropout,
  lrn,
  softmax,
};

std::string_view to_string(LayerKind kind);

struct Conv2dAttrs {
  std::int64_t out_channels = 0;
  std::int64_t kernel_h = 1, kernel_w = 1;
  std::int64_t stride_h = 1, stride_w = 1;
  std::int64_t pad_h = 0, pad_w = 0;
  std::int64_t groups = 1;
  bool bias = true;
};

struct FcAttrs {
  std::int64_t out_features = 0;
  bool bias = true;
};

struct PoolAttrs {
  std::int64_t kernel_h = 1, kernel_w = 1;
  std::int64_t stride_h = 1, stride_w = 1;
  std::int64_t pad_h = 0, pad_w = 0;
};

struct Layer {
  std::string id;
  LayerKind kind = LayerKind::activation;
  std::vector<std::string> inputs;  // layer ids, or "input" for the graph input
  std::variant<std::monostate, Conv2dAttrs, FcAttrs, PoolAttrs> attrs;

  const Conv2dAttrs& conv() const { return std::get<Conv2dAttrs>(attrs); }
  const FcAttrs& fc() const { return std::get<FcAttrs>(attrs); }
  const PoolAttrs& pool() const { return std::get<PoolAttrs>(attrs); }
};

/// A validated layer DAG. Layers are stored in a deterministic topological
/// order (ties broken by id), so downstream passes are independent of the
/// order layers were declared in.
class ArchGraph {
 public:
  ArchGraph(std::string name, TensorShape input_shape, std::vector<Layer> layers);

  const std::string& name() const { return name_; }
  const TensorShape& input_shape() const { return input_shape_; }
  const std::vector<Layer>& layers() const { return layers_; }

  /// Index into layers() for an id; throws ValidationError if absent.
  std::size_t index_of(std::string_view id) const;

 private:
  std::string name_;
  TensorShape input_shape_;
  std::vector<Layer> layers_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Reserved id of the graph input; layers may not use it as their own id.
inline constexpr std::string_view kInputId = "input";

/// Parses and validates an architecture document (JSON, format 1).
/// Throws ParseError for malformed documents (position-annotated) and
/// ValidationError for semantic violations (named layer + rule).
ArchGraph parse_arch(std::string_view document);

/// A graph whose every layer carries its inferred output shape,
/// index-aligned with graph.layers().
struct ShapedGraph {
  ArchGraph graph;
  std::vector<TensorShape> output_shapes;

  const TensorShape& shape_of(std::size_t layer_index) const {
    return output_shapes[layer_index];
  }
  /// Shape feeding a layer's n-th input ("input" resolves to the graph input).
  const TensorShape& input_shape_of(std::size_t layer_index, std::size_t n = 0) const;
};

/// Annotates every layer with its output shape via topological evaluation.
/// Spatial dims follow floor((in + 2*pad - kernel)/stride) + 1.
ShapedGraph infer_shapes(const ArchGraph& graph);

/// Per-layer parameter counts, index-aligned with graph.layers().
/// conv2d: (kh*kw*(c_in/groups) + bias) * c_out; fc: (in + bias) * out;
/// batchnorm: 2*channels (learnable scale/shift); everything else: 0.
std::vector<std::int64_t> count_params(const ShapedGraph& shaped);

/// Per-layer MAC counts, index-aligned with graph.layers().
/// conv2d: kh*kw*(c_in/groups)*c_out*h_out*w_out; fc: in*out; all other
/// kinds 0 (bias adds and elementwise ops are not MACs).
std::vector<std::int64_t> count_macs(const ShapedGraph& shaped);

struct LayerComplexity {
  std::string id;
  LayerKind kind = LayerKind::activation;
  TensorShape output;
  std::int64_t params = 0;
  std::int64_t macs = 0;

  friend bool operator==(const LayerComplexity&, const LayerComplexity&) = default;
};

struct ComplexityReport {
  std::vector<LayerComplexity> per_layer;
  std::int64_t total_params = 0;
  std::int64_t total_macs = 0;

  friend bool operator==(const ComplexityReport&, const ComplexityReport&) = default;
};

/// Shape inference plus both counts in one pass. Pure and idempotent.
ComplexityReport analyze(const ArchGraph& graph);

/// Counts MACs by walking every output element of every layer and tallying
/// each kernel multiply one by one. Independent of the closed-form counter;
/// exists to cross-check it. Throws SizeLimitError when the graph has more
/// than max_output_elements output elements in total.
std::int64_t simulate_macs(const ShapedGraph& shaped,
                           std::int64_t max_output_elements = 10'000'000);

}  // namespace netscore
