#include <doctest.h>

#include <algorithm>
#include <random>

#include "netscore/archspec.hpp"
#include "testutil.hpp"

using namespace netscore;

namespace {

// A two-branch 8x8x3 fixture: conv -> {1x1 conv, 3x3 conv} -> add -> pool.
constexpr const char* kBranchDoc = R"({
  "format": 1,
  "name": "branchy",
  "input": {"height": 8, "width": 8, "channels": 3},
  "layers": [
    {"id": "stem", "type": "conv2d", "inputs": ["input"],
     "out_channels": 4, "kernel": 3, "padding": 1, "bias": false},
    {"id": "a", "type": "conv2d", "inputs": ["stem"],
     "out_channels": 4, "kernel": 1, "bias": false},
    {"id": "b", "type": "conv2d", "inputs": ["stem"],
     "out_channels": 4, "kernel": 3, "padding": 1, "bias": true},
    {"id": "join", "type": "add", "inputs": ["a", "b"]},
    {"id": "pool", "type": "maxpool", "inputs": ["join"], "kernel": 2}
  ]
})";

ArchGraph single_conv(TensorShape input, Conv2dAttrs attrs) {
  Layer conv{"c", LayerKind::conv2d, {std::string(kInputId)}, attrs};
  return ArchGraph("t", input, {conv});
}

}  // namespace

TEST_CASE("minimal document parses to a single layer") {
  ArchGraph graph = parse_arch(R"({
    "format": 1, "name": "tiny",
    "input": {"height": 8, "width": 8, "channels": 3},
    "layers": [{"id": "c1", "type": "conv2d", "inputs": ["input"],
                "out_channels": 4, "kernel": 3, "bias": true}]
  })");
  CHECK(graph.layers().size() == 1);
  CHECK(graph.name() == "tiny");
  CHECK(graph.input_shape() == TensorShape{8, 8, 3});
}

TEST_CASE("parse rejections") {
  SUBCASE("undeclared reference names the missing id") {
    const char* doc = R"({
      "format": 1, "name": "t", "input": {"height": 8, "width": 8, "channels": 3},
      "layers": [{"id": "c1", "type": "conv2d", "inputs": ["convX"],
                  "out_channels": 4, "kernel": 3, "bias": true}]
    })";
    CHECK_THROWS_WITH_AS(parse_arch(doc), doctest::Contains("convX"), ValidationError);
  }
  SUBCASE("unknown layer kind") {
    const char* doc = R"({
      "format": 1, "name": "t", "input": {"height": 8, "width": 8, "channels": 3},
      "layers": [{"id": "c1", "type": "conv3d", "inputs": ["input"]}]
    })";
    CHECK_THROWS_WITH_AS(parse_arch(doc), doctest::Contains("conv3d"), ValidationError);
  }
  SUBCASE("unknown attribute is a hard error") {
    const char* doc = R"({
      "format": 1, "name": "t", "input": {"height": 8, "width": 8, "channels": 3},
      "layers": [{"id": "c1", "type": "conv2d", "inputs": ["input"],
                  "out_channels": 4, "kernel": 3, "bias": true, "striide": 2}]
    })";
    CHECK_THROWS_WITH_AS(parse_arch(doc), doctest::Contains("striide"), ValidationError);
  }
  SUBCASE("unknown top-level field") {
    CHECK_THROWS_AS(parse_arch(R"({"format": 1, "name": "t", "extra": 1,
      "input": {"height": 8, "width": 8, "channels": 3}, "layers": []})"),
                    ParseError);
  }
  SUBCASE("wrong format version") {
    CHECK_THROWS_AS(parse_arch(R"({"format": 2, "name": "t",
      "input": {"height": 8, "width": 8, "channels": 3}, "layers": []})"),
                    ParseError);
  }
  SUBCASE("malformed JSON carries a position") {
    CHECK_THROWS_WITH_AS(parse_arch("{\"format\": 1,,}"), doctest::Contains("parse error"),
                         ParseError);
  }
  SUBCASE("duplicate ids") {
    const char* doc = R"({
      "format": 1, "name": "t", "input": {"height": 8, "width": 8, "channels": 3},
      "layers": [
        {"id": "c", "type": "activation", "inputs": ["input"]},
        {"id": "c", "type": "activation", "inputs": ["input"]}
      ]
    })";
    CHECK_THROWS_WITH_AS(parse_arch(doc), doctest::Contains("duplicate"), ValidationError);
  }
  SUBCASE("cycles are named") {
    const char* doc = R"({
      "format": 1, "name": "t", "input": {"height": 8, "width": 8, "channels": 3},
      "layers": [
        {"id": "root", "type": "activation", "inputs": ["input"]},
        {"id": "x", "type": "add", "inputs": ["root", "y"]},
        {"id": "y", "type": "activation", "inputs": ["x"]}
      ]
    })";
    CHECK_THROWS_WITH_AS(parse_arch(doc), doctest::Contains("cycle"), ValidationError);
  }
  SUBCASE("more than one terminal") {
    const char* doc = R"({
      "format": 1, "name": "t", "input": {"height": 8, "width": 8, "channels": 3},
      "layers": [
        {"id": "a", "type": "activation", "inputs": ["input"]},
        {"id": "b", "type": "activation", "inputs": ["input"]}
      ]
    })";
    CHECK_THROWS_WITH_AS(parse_arch(doc), doctest::Contains("terminal"), ValidationError);
  }
  SUBCASE("'input' is reserved") {
    const char* doc = R"({
      "format": 1, "name": "t", "input": {"height": 8, "width": 8, "channels": 3},
      "layers": [{"id": "input", "type": "activation", "inputs": ["input"]}]
    })";
    CHECK_THROWS_AS(parse_arch(doc), ValidationError);
  }
}

TEST_CASE("spatial inference follows floor((in + 2p - k)/s) + 1") {
  SUBCASE("224 input, 7x7 stride 2 pad 3 gives 112") {
    auto shaped = infer_shapes(single_conv({224, 224, 3},
                                           {64, 7, 7, 2, 2, 3, 3, 1, true}));
    CHECK(shaped.shape_of(0) == TensorShape{112, 112, 64});
  }
  SUBCASE("1x1 conv keeps spatial dims") {
    auto shaped = infer_shapes(single_conv({17, 23, 5}, {8, 1, 1, 1, 1, 0, 0, 1, false}));
    CHECK(shaped.shape_of(0) == TensorShape{17, 23, 8});
  }
  SUBCASE("227 input, 11x11 stride 4 pad 0 gives 55") {
    auto shaped = infer_shapes(single_conv({227, 227, 3},
                                           {96, 11, 11, 4, 4, 0, 0, 1, true}));
    CHECK(shaped.shape_of(0) == TensorShape{55, 55, 96});
  }
}

TEST_CASE("shape errors name the layers involved") {
  SUBCASE("add mismatch names both inputs and both shapes") {
    const char* doc = R"({
      "format": 1, "name": "t", "input": {"height": 8, "width": 8, "channels": 3},
      "layers": [
        {"id": "a", "type": "conv2d", "inputs": ["input"], "out_channels": 4,
         "kernel": 1, "bias": false},
        {"id": "b", "type": "conv2d", "inputs": ["input"], "out_channels": 5,
         "kernel": 1, "bias": false},
        {"id": "sum", "type": "add", "inputs": ["a", "b"]}
      ]
    })";
    ArchGraph graph = parse_arch(doc);
    try {
      infer_shapes(graph);
      FAIL("expected shape mismatch");
    } catch (const ValidationError& e) {
      std::string what = e.what();
      CHECK(what.find("'a'") != std::string::npos);
      CHECK(what.find("'b'") != std::string::npos);
      CHECK(what.find("8x8x4") != std::string::npos);
      CHECK(what.find("8x8x5") != std::string::npos);
    }
  }
  SUBCASE("concat requires matching spatial dims") {
    const char* doc = R"({
      "format": 1, "name": "t", "input": {"height": 8, "width": 8, "channels": 3},
      "layers": [
        {"id": "a", "type": "maxpool", "inputs": ["input"], "kernel": 2},
        {"id": "b", "type": "activation", "inputs": ["input"]},
        {"id": "cat", "type": "concat", "inputs": ["a", "b"]}
      ]
    })";
    CHECK_THROWS_WITH_AS(infer_shapes(parse_arch(doc)), doctest::Contains("spatial"),
                         ValidationError);
  }
  SUBCASE("kernel larger than padded input") {
    CHECK_THROWS_WITH_AS(
        infer_shapes(single_conv({4, 4, 1}, {1, 7, 7, 1, 1, 0, 0, 1, false})),
        doctest::Contains("non-positive"), ValidationError);
  }
  SUBCASE("groups must divide both channel counts") {
    CHECK_THROWS_AS(infer_shapes(single_conv({8, 8, 3}, {4, 1, 1, 1, 1, 0, 0, 2, false})),
                    ValidationError);
    CHECK_THROWS_AS(infer_shapes(single_conv({8, 8, 4}, {6, 1, 1, 1, 1, 0, 0, 4, false})),
                    ValidationError);
  }
}

TEST_CASE("parameter counting formulas") {
  SUBCASE("3x3 single-channel conv without bias has 9 weights") {
    auto shaped = infer_shapes(single_conv({5, 5, 1}, {1, 3, 3, 1, 1, 0, 0, 1, false}));
    CHECK(count_params(shaped)[0] == 9);
  }
  SUBCASE("AlexNet conv1") {
    auto shaped = infer_shapes(single_conv({227, 227, 3}, {96, 11, 11, 4, 4, 0, 0, 1, true}));
    CHECK(count_params(shaped)[0] == 34'944);
  }
  SUBCASE("depthwise 3x3 over 32 channels") {
    auto shaped = infer_shapes(single_conv({8, 8, 32}, {32, 3, 3, 1, 1, 1, 1, 32, false}));
    CHECK(count_params(shaped)[0] == 288);
  }
  SUBCASE("fc and batchnorm") {
    Layer flat{"f", LayerKind::flatten, {std::string(kInputId)}, std::monostate{}};
    Layer dense{"d", LayerKind::fc, {"f"}, FcAttrs{10, true}};
    auto shaped = infer_shapes(ArchGraph("t", {2, 2, 3}, {flat, dense}));
    CHECK(count_params(shaped)[1] == (12 + 1) * 10);

    Layer bn{"bn", LayerKind::batchnorm, {std::string(kInputId)}, std::monostate{}};
    Layer act{"a", LayerKind::activation, {"bn"}, std::monostate{}};
    auto bn_shaped = infer_shapes(ArchGraph("t", {4, 4, 7}, {bn, act}));
    CHECK(count_params(bn_shaped)[0] == 14);
    CHECK(count_params(bn_shaped)[1] == 0);
  }
}

TEST_CASE("MAC counting formulas") {
  SUBCASE("single 1x1 conv on a 1x1 input is one MAC") {
    auto shaped = infer_shapes(single_conv({1, 1, 1}, {1, 1, 1, 1, 1, 0, 0, 1, false}));
    CHECK(count_macs(shaped)[0] == 1);
    CHECK(simulate_macs(shaped) == 1);
  }
  SUBCASE("AlexNet conv1 MACs") {
    auto shaped = infer_shapes(single_conv({227, 227, 3}, {96, 11, 11, 4, 4, 0, 0, 1, true}));
    CHECK(count_macs(shaped)[0] == 105'415'200);
  }
  SUBCASE("fc 4096 to 1000") {
    Layer flat{"f", LayerKind::flatten, {std::string(kInputId)}, std::monostate{}};
    Layer dense{"d", LayerKind::fc, {"f"}, FcAttrs{1000, true}};
    auto shaped = infer_shapes(ArchGraph("t", {1, 1, 4096}, {flat, dense}));
    CHECK(count_macs(shaped)[1] == 4'096'000);
  }
  SUBCASE("degenerate 1x1 conv enumerates c_in * c_out") {
    auto shaped = infer_shapes(single_conv({1, 1, 5}, {7, 1, 1, 1, 1, 0, 0, 1, false}));
    CHECK(simulate_macs(shaped) == 35);
    CHECK(count_macs(shaped)[0] == 35);
  }
}

TEST_CASE("analyze composes counts and totals") {
  ArchGraph graph = parse_arch(R"({
    "format": 1, "name": "t", "input": {"height": 3, "width": 3, "channels": 1},
    "layers": [{"id": "c", "type": "conv2d", "inputs": ["input"], "out_channels": 1,
                "kernel": 3, "padding": 1, "bias": false}]
  })");
  ComplexityReport report = analyze(graph);
  CHECK(report.total_params == 9);
  CHECK(report.total_macs == 81);
  CHECK(report.per_layer.size() == 1);
  CHECK(report.per_layer[0].output == TensorShape{3, 3, 1});

  // Idempotent and deterministic.
  CHECK(analyze(graph) == report);
}

TEST_CASE("report totals equal per-layer sums") {
  ArchGraph graph = parse_arch(kBranchDoc);
  ComplexityReport report = analyze(graph);
  std::int64_t params = 0, macs = 0;
  for (const auto& row : report.per_layer) {
    params += row.params;
    macs += row.macs;
  }
  CHECK(report.total_params == params);
  CHECK(report.total_macs == macs);
}

TEST_CASE("declaration order does not matter") {
  ArchGraph graph = parse_arch(kBranchDoc);
  ComplexityReport baseline = analyze(graph);

  std::vector<Layer> layers = graph.layers();
  std::mt19937 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(layers.begin(), layers.end(), rng);
    ArchGraph permuted("branchy", graph.input_shape(), layers);
    CHECK(analyze(permuted) == baseline);
  }
}

TEST_CASE("simulation equals the closed form on random graphs") {
  testutil::GraphGenerator generator(20'250'810);
  for (int i = 0; i < 60; ++i) {
    ArchGraph graph = generator.next();
    ShapedGraph shaped = infer_shapes(graph);
    std::int64_t total = 0;
    for (std::int64_t layer_macs : count_macs(shaped)) total += layer_macs;
    CHECK(simulate_macs(shaped) == total);
  }
}

TEST_CASE("simulation refuses oversized graphs") {
  auto shaped = infer_shapes(single_conv({2048, 2048, 4}, {4, 1, 1, 1, 1, 0, 0, 1, false}));
  CHECK_THROWS_AS(simulate_macs(shaped), SizeLimitError);
  CHECK_NOTHROW(simulate_macs(shaped, 20'000'000));
}

TEST_CASE("group scaling divides params and MACs by g") {
  for (std::int64_t g : {1, 2, 4, 8}) {
    auto shaped = infer_shapes(single_conv({10, 10, 8}, {16, 3, 3, 1, 1, 1, 1, g, false}));
    auto base = infer_shapes(single_conv({10, 10, 8}, {16, 3, 3, 1, 1, 1, 1, 1, false}));
    CHECK(count_params(shaped)[0] == count_params(base)[0] / g);
    CHECK(count_macs(shaped)[0] == count_macs(base)[0] / g);
  }
}

TEST_CASE("doubling input spatial dims quadruples stride-1 conv MACs") {
  Conv2dAttrs attrs{12, 3, 3, 1, 1, 1, 1, 1, true};
  auto small = infer_shapes(single_conv({14, 14, 6}, attrs));
  auto large = infer_shapes(single_conv({28, 28, 6}, attrs));
  CHECK(count_macs(large)[0] == 4 * count_macs(small)[0]);
  CHECK(count_params(large)[0] == count_params(small)[0]);
}

TEST_CASE("bundled AlexNet description") {
  ArchGraph graph = parse_arch(testutil::read_file(testutil::data_path("arch/alexnet.json")));
  CHECK(graph.layers().size() == 21);
  ComplexityReport report = analyze(graph);
  CHECK(report.total_params == 60'965'224);
  CHECK(report.total_macs == 724'406'816);
  CHECK(std::abs(report.total_params - 61e6) / 61e6 < 0.01);

  const auto conv1 = std::find_if(report.per_layer.begin(), report.per_layer.end(),
                                  [](const LayerComplexity& l) { return l.id == "conv1"; });
  REQUIRE(conv1 != report.per_layer.end());
  CHECK(conv1->macs == 105'415'200);
  CHECK(conv1->output == TensorShape{55, 55, 96});
}

TEST_CASE("bundled VGG16 description") {
  ArchGraph graph = parse_arch(testutil::read_file(testutil::data_path("arch/vgg16.json")));
  ComplexityReport report = analyze(graph);
  CHECK(report.total_params == 138'357'544);
  CHECK(report.total_macs == 15'470'264'320);
  CHECK(std::abs(report.total_params - 138e6) / 138e6 < 0.01);
  CHECK(std::abs(report.total_macs - 15.5e9) / 15.5e9 < 0.01);
}

TEST_CASE("bundled SqueezeNet v1.0 description") {
  ArchGraph graph =
      parse_arch(testutil::read_file(testutil::data_path("arch/squeezenet_v1.0.json")));
  ComplexityReport report = analyze(graph);
  CHECK(report.total_params == 1'248'424);
  CHECK(std::abs(report.total_params - 1.25e6) / 1.25e6 < 0.02);
  CHECK(report.total_macs == 832'667'936);
}

TEST_CASE("bundled MobileNetv1 description") {
  ArchGraph graph = parse_arch(
      testutil::read_file(testutil::data_path("arch/mobilenetv1_1.0-224.json")));
  ComplexityReport report = analyze(graph);
  CHECK(report.total_params == 4'231'976);
  CHECK(report.total_macs == 568'740'352);
  CHECK(std::abs(report.total_macs - 569e6) / 569e6 < 0.01);
}
