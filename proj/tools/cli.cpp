#include "cli.hpp"

#include <charconv>
#include <map>

#include "CLI11.hpp"
#include "json.hpp"
#include "tmts/error.hpp"
#include "tmts/generator.hpp"
#include "tmts/io.hpp"
#include "tmts/metrics.hpp"
#include "tmts/preprocess.hpp"
#include "tmts/sequencer.hpp"

namespace tmts::cli {

namespace {

std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

std::string fixed4(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 4);
  return std::string(buf, res.ptr);
}

const std::map<std::string, TraversalOrder> kOrders{{"dfs", TraversalOrder::Dfs},
                                                    {"bfs", TraversalOrder::Bfs}};
const std::map<std::string, HeightAxis> kAxes{
    {"x", HeightAxis::X}, {"y", HeightAxis::Y}, {"z", HeightAxis::Z}};
const std::map<std::string, PointCloudFormat> kFormats{{"xyz", PointCloudFormat::Xyz},
                                                       {"ply", PointCloudFormat::Ply}};

// OBJ input onto the grid. Meshes already inside the unit cube are taken as
// is, so preprocessed files round-trip; anything else is normalized first.
QuantizedMesh load_quantized(const std::string& path, int bits) {
  auto mesh = read_obj(path);
  if (!inside_unit_cube(mesh)) mesh = normalize(mesh);
  return quantize(mesh, bits);
}

void print_report(std::ostream& os, const ValidationReport& report) {
  for (const auto& v : report.violations) os << "violation: " << v.describe() << "\n";
}

struct Options {
  std::string input, input2, output, transcript;
  int bits = kDefaultBits;
  std::string order = "dfs";
  std::string height_axis = "z";
  bool text = false;
  bool no_dup_check = false;
  bool edge_check = false;
  bool json = false;
  PreprocessConfig pre;
  std::size_t samples = 10000;
  std::uint64_t seed = 42;
  std::size_t points = 8192;
  std::string format = "xyz";
  std::size_t max_steps = 10000;
  std::size_t runs = 1;
};

int cmd_tokenize(const Options& o, std::ostream& out, std::ostream& err) {
  const auto mesh = load_quantized(o.input, o.bits);
  const auto report = validate_manifold(mesh);
  if (!report.ok) {
    print_report(err, report);
    return kRejected;
  }
  EncodeOptions options;
  options.order = kOrders.at(o.order);
  options.height_axis = kAxes.at(o.height_axis);
  const auto seq = encode(mesh, options);
  if (o.text)
    write_stream_text(o.output, seq);
  else
    write_stream(o.output, seq);
  const auto stats = sequence_stats(seq);
  out << "records=" << stats.length << " faces=" << stats.faces
      << " components=" << stats.components << "\n";
  return kOk;
}

int cmd_detokenize(const Options& o, std::ostream& out, std::ostream&) {
  const auto seq = read_stream_any(o.input);
  DecodeOptions options;
  options.duplicate_check = !o.no_dup_check;
  const auto mesh = decode(seq, options);
  write_obj(o.output, mesh);
  out << "faces=" << mesh.faces.size() << " vertices=" << mesh.vertices.size() << "\n";
  return kOk;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream&) {
  const auto mesh = load_quantized(o.input, o.bits);
  const auto report = validate_manifold(mesh);
  if (!report.ok) {
    out << "rejected violations=" << report.violations.size() << "\n";
    print_report(out, report);
    return kRejected;
  }
  out << "ok faces=" << mesh.faces.size() << " vertices=" << mesh.vertices.size()
      << " components=" << connected_components(mesh).size() << "\n";
  return kOk;
}

int cmd_preprocess(const Options& o, std::ostream& out, std::ostream& err) {
  auto cfg = o.pre;
  cfg.bits = o.bits;
  cfg.check();
  const auto mesh = quantize(normalize(read_obj(o.input)), cfg.bits);
  const auto decision = filter(mesh, cfg);
  if (!decision.accept) {
    for (const auto& r : decision.reasons) err << "rejected: " << r.detail << "\n";
    out << "rejected\n";
    return kRejected;
  }
  write_obj(o.output, mesh);
  out << "accepted faces=" << mesh.faces.size() << " vertices=" << mesh.vertices.size() << "\n";
  return kOk;
}

int cmd_stats(const Options& o, std::ostream& out, std::ostream&) {
  const auto seq = read_stream_any(o.input);
  const auto s = sequence_stats(seq);
  out << "length=" << s.length << " faces=" << s.faces << " components=" << s.components
      << " stops=" << s.stops << " ratio=" << fixed4(s.ratio()) << "\n";
  return kOk;
}

int cmd_metrics(const Options& o, std::ostream& out, std::ostream&) {
  const auto src = read_obj(o.input), ref = read_obj(o.input2);
  const auto report = evaluate(src, ref, o.samples, o.seed);
  if (o.json) {
    nlohmann::ordered_json j;
    j["cd"] = report.cd;
    j["nc"] = report.nc;
    j["abs_nc"] = report.abs_nc;
    j["samples"] = report.samples;
    j["seed"] = report.seed;
    out << j.dump() << "\n";
  } else {
    out << "cd=" << number(report.cd) << " nc=" << number(report.nc)
        << " abs_nc=" << number(report.abs_nc) << "\n";
  }
  return kOk;
}

int cmd_sample(const Options& o, std::ostream& out, std::ostream&) {
  const auto mesh = read_obj(o.input);
  const auto points = sample_surface(mesh, o.points, o.seed);
  write_pointcloud(o.output, points, kFormats.at(o.format));
  out << "points=" << points.size() << "\n";
  return kOk;
}

int cmd_augment(const Options& o, std::ostream& out, std::ostream& err) {
  auto cfg = o.pre;
  cfg.bits = o.bits;
  cfg.check();
  auto mesh = augment(read_obj(o.input), cfg, o.seed);
  // Rotation about z can push corners out of the cube.
  if (!inside_unit_cube(mesh)) mesh = normalize(mesh);
  const auto quantized = quantize(mesh, cfg.bits);
  const auto report = validate_manifold(quantized);
  if (!report.ok) {
    print_report(err, report);
    out << "rejected\n";
    return kRejected;
  }
  write_obj(o.output, quantized);
  out << "faces=" << quantized.faces.size() << "\n";
  return kOk;
}

int cmd_fuzz(const Options& o, std::ostream& out, std::ostream&) {
  GeneratorConfig config;
  config.bits = o.bits;
  config.order = kOrders.at(o.order);
  config.duplicate_check = !o.no_dup_check;
  config.edge_conflict_check = o.edge_check;
  config.max_steps = o.max_steps;
  int status = kOk;
  for (std::size_t r = 0; r < o.runs; ++r) {
    const auto seed = o.seed + r;
    auto predictor = fuzz_predictor(seed, config.bits);
    const auto result = run(*predictor, config);
    const auto problems = check_invariants(result, config);
    out << "seed=" << seed << " halt=" << (result.halt == HaltReason::Eos ? "eos" : "budget")
        << " steps=" << result.transcript.records.size() << " faces=" << result.mesh.faces.size()
        << " coerced_dup=" << result.coerced_duplicates
        << " coerced_edge=" << result.coerced_conflicts
        << " coerced_degenerate=" << result.coerced_degenerate
        << " violations=" << problems.size() << "\n";
    for (const auto& p : problems) out << "  violation: " << p << "\n";
    if (!problems.empty()) status = kRejected;
  }
  return status;
}

int cmd_generate(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
  GeneratorConfig config;
  config.bits = o.bits;
  config.order = kOrders.at(o.order);
  config.duplicate_check = !o.no_dup_check;
  config.edge_conflict_check = o.edge_check;
  config.max_steps = o.max_steps;
  StreamPredictor predictor(in, out);
  const auto result = run(predictor, config);
  err << "halt=" << (result.halt == HaltReason::Eos ? "eos" : "budget")
      << " faces=" << result.mesh.faces.size() << "\n";
  if (!o.transcript.empty() && result.halt == HaltReason::Eos)
    write_stream(o.transcript, result.transcript);
  if (result.mesh.faces.empty()) {
    err << "no faces generated\n";
    return kRejected;
  }
  write_obj(o.output, result.mesh);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Tree-sequence mesh tokenizer"};
  app.require_subcommand(1);
  Options o;

  auto add_bits = [&](CLI::App* sub) {
    sub->add_option("--bits", o.bits, "Grid bit depth")->check(CLI::Range(1, kMaxBits));
  };
  auto add_order = [&](CLI::App* sub) {
    sub->add_option("--order", o.order, "Traversal order")->check(CLI::IsMember({"dfs", "bfs"}));
  };

  auto* tokenize = app.add_subcommand("tokenize", "OBJ mesh to token stream");
  tokenize->add_option("input", o.input)->required();
  tokenize->add_option("-o,--output", o.output)->required();
  add_bits(tokenize);
  add_order(tokenize);
  tokenize->add_option("--height-axis", o.height_axis, "Axis used for 'lowest'")
      ->check(CLI::IsMember({"x", "y", "z"}));
  tokenize->add_flag("--text", o.text, "Write the JSON-lines form");

  auto* detokenize = app.add_subcommand("detokenize", "Token stream to OBJ mesh");
  detokenize->add_option("input", o.input)->required();
  detokenize->add_option("-o,--output", o.output)->required();
  detokenize->add_flag("--no-dup-check", o.no_dup_check, "Disable duplicate-face coercion");

  auto* validate = app.add_subcommand("validate", "Check the half-edge condition");
  validate->add_option("input", o.input)->required();
  add_bits(validate);

  auto* preprocess = app.add_subcommand("preprocess", "Normalize, quantize and filter");
  preprocess->add_option("input", o.input)->required();
  preprocess->add_option("-o,--output", o.output)->required();
  add_bits(preprocess);
  preprocess->add_option("--max-faces", o.pre.max_faces);
  preprocess->add_option("--proj-grid", o.pre.projection_grid);
  preprocess->add_option("--proj-min-area", o.pre.projection_min_area);

  auto* stats = app.add_subcommand("stats", "Token stream statistics");
  stats->add_option("input", o.input)->required();

  auto* metrics = app.add_subcommand("metrics", "Chamfer distance and normal consistency");
  metrics->add_option("source", o.input)->required();
  metrics->add_option("reference", o.input2)->required();
  metrics->add_option("--samples", o.samples)->check(CLI::PositiveNumber);
  metrics->add_option("--seed", o.seed);
  metrics->add_flag("--json", o.json);

  auto* sample = app.add_subcommand("sample-pc", "Sample a surface point cloud");
  sample->add_option("input", o.input)->required();
  sample->add_option("-n", o.points)->check(CLI::PositiveNumber);
  sample->add_option("-o,--output", o.output)->required();
  sample->add_option("--seed", o.seed)->default_val(0);
  sample->add_option("--format", o.format)->check(CLI::IsMember({"xyz", "ply"}));

  auto* aug = app.add_subcommand("augment", "Random scale and rotation, then re-quantize");
  aug->add_option("input", o.input)->required();
  aug->add_option("-o,--output", o.output)->required();
  aug->add_option("--seed", o.seed)->required();
  add_bits(aug);
  aug->add_option("--scale-low", o.pre.scale_low);
  aug->add_option("--scale-high", o.pre.scale_high);
  aug->add_option("--flip-prob", o.pre.flip_probability);

  auto* fuzz = app.add_subcommand("fuzz", "Stack-machine robustness run");
  fuzz->add_option("--seed", o.seed)->required();
  fuzz->add_option("--max-steps", o.max_steps)->check(CLI::PositiveNumber);
  fuzz->add_option("--runs", o.runs)->check(CLI::PositiveNumber);
  add_bits(fuzz);
  add_order(fuzz);
  fuzz->add_flag("--no-dup-check", o.no_dup_check);
  fuzz->add_flag("--edge-check", o.edge_check);

  auto* generate = app.add_subcommand(
      "generate", "Generate a mesh from an external predictor over stdin/stdout");
  generate->add_option("-o,--output", o.output)->required();
  generate->add_option("--transcript", o.transcript, "Also write the token stream");
  generate->add_option("--max-steps", o.max_steps)->check(CLI::PositiveNumber);
  add_bits(generate);
  add_order(generate);
  generate->add_flag("--no-dup-check", o.no_dup_check);
  generate->add_flag("--edge-check", o.edge_check);

  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (*tokenize) return cmd_tokenize(o, out, err);
    if (*detokenize) return cmd_detokenize(o, out, err);
    if (*validate) return cmd_validate(o, out, err);
    if (*preprocess) return cmd_preprocess(o, out, err);
    if (*stats) return cmd_stats(o, out, err);
    if (*metrics) return cmd_metrics(o, out, err);
    if (*sample) return cmd_sample(o, out, err);
    if (*aug) return cmd_augment(o, out, err);
    if (*fuzz) return cmd_fuzz(o, out, err);
    if (*generate) return cmd_generate(o, in, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace tmts::cli
