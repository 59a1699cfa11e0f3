#include "tmts/generator.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "tmts/error.hpp"
#include "tmts/preprocess.hpp"

namespace tmts {

namespace {

std::uint64_t position_key(const QuantizedVertex& v) {
  return (std::uint64_t{v.z} << 32) | (std::uint64_t{v.y} << 16) | v.x;
}

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::string describe(const QuantizedVertex& v) {
  return "(" + std::to_string(v.x) + "," + std::to_string(v.y) + "," + std::to_string(v.z) + ")";
}

}  // namespace

GenerationMachine::GenerationMachine(const GeneratorConfig& config) : config_(config) {
  check_bits(config.bits);
  transcript_.bits = config.bits;
  transcript_.order = config.order;
}

PredictorQuery GenerationMachine::query() const {
  PredictorQuery q;
  q.step = transcript_.records.size();
  q.component = component_;
  q.stack_depth = pending_.size();
  switch (phase_) {
    case Phase::Sos: q.input = StepInput::sos(); break;
    case Phase::Sos2: q.input = StepInput::sos2(vertices_[first_vertex_]); break;
    case Phase::Edge:
      q.input = StepInput::edge(vertices_[current_.first], vertices_[current_.second]);
      break;
  }
  return q;
}

std::uint32_t GenerationMachine::intern(const QuantizedVertex& v) {
  auto [it, inserted] =
      vertex_index_.emplace(position_key(v), static_cast<std::uint32_t>(vertices_.size()));
  if (inserted) vertices_.push_back(v);
  return it->second;
}

void GenerationMachine::take_next_edge() {
  if (config_.order == TraversalOrder::Dfs) {
    current_ = pending_.back();
    pending_.pop_back();
  } else {
    current_ = pending_.front();
    pending_.pop_front();
  }
}

PredictorAnswer GenerationMachine::answer(const PredictorAnswer& answer) {
  auto illegal = [&](const std::string& what) {
    return Error(ErrorCode::IllegalAnswer,
                 "step " + std::to_string(transcript_.records.size()) + ": " + what);
  };
  if (halted_) throw illegal("machine already halted");

  const auto limit = 1u << config_.bits;
  if (answer.kind == OutputKind::Vertex &&
      (answer.vertex.x >= limit || answer.vertex.y >= limit || answer.vertex.z >= limit))
    throw illegal("vertex " + describe(answer.vertex) + " outside the " +
                  std::to_string(config_.bits) + "-bit grid");

  const StepInput input = query().input;
  if (!is_legal(input.kind, answer.kind)) {
    static constexpr const char* kIn[] = {"SOS", "SOS2", "EDGE"};
    static constexpr const char* kOut[] = {"VERTEX", "STOP", "EOS"};
    throw illegal(std::string(kOut[static_cast<int>(answer.kind)]) + " cannot answer " +
                  kIn[static_cast<int>(input.kind)]);
  }

  PredictorAnswer recorded = answer;
  switch (phase_) {
    case Phase::Sos:
      if (answer.kind == OutputKind::Eos) {
        halted_ = true;
        halt_ = HaltReason::Eos;
      } else {
        first_vertex_ = intern(answer.vertex);
        phase_ = Phase::Sos2;
      }
      break;

    case Phase::Sos2: {
      if (answer.vertex == vertices_[first_vertex_])
        throw illegal("second vertex repeats the first");
      const auto second = intern(answer.vertex);
      const std::pair start{first_vertex_, second}, twin{second, first_vertex_};
      if (config_.order == TraversalOrder::Dfs) {
        pending_.push_back(twin);
        pending_.push_back(start);
      } else {
        pending_.push_back(start);
        pending_.push_back(twin);
      }
      take_next_edge();
      phase_ = Phase::Edge;
      break;
    }

    case Phase::Edge: {
      const auto [a, b] = current_;
      if (answer.kind == OutputKind::Vertex) {
        const auto found = vertex_index_.find(position_key(answer.vertex));
        const bool known = found != vertex_index_.end();
        const std::uint32_t c = known ? found->second : static_cast<std::uint32_t>(vertices_.size());
        std::array<std::uint32_t, 3> key{a, b, c};
        std::sort(key.begin(), key.end());

        if (c == a || c == b) {
          ++coerced_degenerate_;
          recorded = StepOutput::stop();
        } else if (config_.duplicate_check && known && face_keys_.contains(key)) {
          ++coerced_duplicates_;
          recorded = StepOutput::stop();
        } else if (config_.edge_conflict_check &&
                   (used_edges_.contains(edge_key(a, b)) || used_edges_.contains(edge_key(b, c)) ||
                    used_edges_.contains(edge_key(c, a)))) {
          ++coerced_conflicts_;
          recorded = StepOutput::stop();
        } else {
          intern(answer.vertex);
          faces_.push_back({a, b, c});
          face_keys_.insert(key);
          used_edges_.insert(edge_key(a, b));
          used_edges_.insert(edge_key(b, c));
          used_edges_.insert(edge_key(c, a));
          pending_.emplace_back(a, c);
          pending_.emplace_back(c, b);
        }
      }
      if (pending_.empty()) {
        phase_ = Phase::Sos;
        ++component_;
      } else {
        take_next_edge();
      }
      break;
    }
  }
  transcript_.records.push_back({input, recorded});
  return recorded;
}

void GenerationMachine::halt_on_budget() {
  if (halted_) return;
  halted_ = true;
  halt_ = HaltReason::Budget;
  transcript_.truncated = true;
}

GenerationResult GenerationMachine::finish() && {
  GenerationResult result;
  result.mesh.bits = config_.bits;
  result.mesh.vertices = std::move(vertices_);
  result.mesh.faces = std::move(faces_);
  result.transcript = std::move(transcript_);
  result.halt = halt_;
  result.coerced_duplicates = coerced_duplicates_;
  result.coerced_conflicts = coerced_conflicts_;
  result.coerced_degenerate = coerced_degenerate_;
  return result;
}

GenerationResult run(Predictor& predictor, const GeneratorConfig& config) {
  if (config.max_steps < 1) throw Error(ErrorCode::InvalidConfig, "max_steps must be >= 1");
  GenerationMachine machine(config);
  for (std::size_t step = 0; step < config.max_steps && !machine.halted(); ++step)
    machine.answer(predictor.predict(machine.query()));
  machine.halt_on_budget();
  return std::move(machine).finish();
}

// -----------------------------------------------------------------------------
// Replay.
// -----------------------------------------------------------------------------

namespace {

// Feeds recorded outputs through a machine. When `inputs` is given, each
// derived input must match the recorded one.
GenerationMachine replay(const std::vector<StepOutput>& outputs,
                         const std::vector<StepInput>* inputs, const GeneratorConfig& config) {
  GenerationMachine machine(config);
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (machine.halted())
      throw Error(ErrorCode::MalformedSequence,
                  "record " + std::to_string(i) + " follows the terminal EOS");
    const auto q = machine.query();
    if (inputs && (*inputs)[i] != q.input)
      throw Error(ErrorCode::Desync, "record " + std::to_string(i) +
                                         " input disagrees with the derived input");
    PredictorAnswer recorded;
    try {
      recorded = machine.answer(outputs[i]);
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedSequence, e.what());
    }
    if (recorded != outputs[i])
      throw Error(ErrorCode::Desync,
                  "record " + std::to_string(i) + " would be coerced to STOP during replay");
  }
  if (!machine.halted())
    throw Error(ErrorCode::MalformedSequence, "sequence ends without EOS");
  return machine;
}

}  // namespace

QuantizedMesh decode(const TokenSequence& seq, const DecodeOptions& options) {
  if (seq.truncated) throw Error(ErrorCode::MalformedSequence, "sequence is truncated");
  GeneratorConfig config;
  config.bits = seq.bits;
  config.order = seq.order;
  config.duplicate_check = options.duplicate_check;
  config.edge_conflict_check = options.edge_conflict_check;

  std::vector<StepInput> inputs;
  std::vector<StepOutput> outputs;
  inputs.reserve(seq.records.size());
  outputs.reserve(seq.records.size());
  for (const auto& r : seq.records) {
    inputs.push_back(r.input);
    outputs.push_back(r.output);
  }
  return std::move(replay(outputs, &inputs, config)).finish().mesh;
}

TokenSequence reconstruct_inputs(const std::vector<StepOutput>& outputs, int bits,
                                 TraversalOrder order) {
  GeneratorConfig config;
  config.bits = bits;
  config.order = order;
  config.duplicate_check = false;
  return std::move(replay(outputs, nullptr, config)).finish().transcript;
}

// -----------------------------------------------------------------------------
// Fuzzing.
// -----------------------------------------------------------------------------

namespace {

class FuzzPredictor final : public Predictor {
 public:
  FuzzPredictor(std::uint64_t seed, int bits) : rng_(seed), cells_(1u << bits) {}

  PredictorAnswer predict(const PredictorQuery& q) override {
    switch (q.input.kind) {
      case InputKind::Sos:
        if (q.step > 0 && uniform() < kEosProbability) return StepOutput::eos();
        return StepOutput::vertex_of(pick({}, {}, false));
      case InputKind::Sos2:
        return StepOutput::vertex_of(pick(q.input.from, q.input.from, true));
      case InputKind::Edge:
        if (uniform() < kStopProbability) return StepOutput::stop();
        // Occasionally propose an endpoint to exercise degenerate coercion.
        if (uniform() < 0.02) return StepOutput::vertex_of(q.input.from);
        return StepOutput::vertex_of(pick(q.input.from, q.input.to, true));
    }
    return StepOutput::eos();
  }

 private:
  static constexpr double kEosProbability = 0.05;
  static constexpr double kStopProbability = 0.55;

  double uniform() { return unit_double(rng_()); }

  QuantizedVertex random_vertex() {
    auto coord = [&] { return static_cast<std::uint16_t>(rng_() % cells_); };
    const auto x = coord(), y = coord(), z = coord();
    return {x, y, z};
  }

  QuantizedVertex pick(QuantizedVertex avoid_a, QuantizedVertex avoid_b, bool avoid) {
    for (;;) {
      QuantizedVertex v = (!seen_.empty() && uniform() < 0.5) ? seen_[rng_() % seen_.size()]
                                                              : random_vertex();
      if (avoid && (v == avoid_a || v == avoid_b)) continue;
      seen_.push_back(v);
      return v;
    }
  }

  std::mt19937_64 rng_;
  std::uint32_t cells_;
  std::vector<QuantizedVertex> seen_;
};

}  // namespace

std::unique_ptr<Predictor> fuzz_predictor(std::uint64_t seed, int bits) {
  check_bits(bits);
  return std::make_unique<FuzzPredictor>(seed, bits);
}

}  // namespace tmts

namespace tmts {

std::vector<std::string> check_invariants(const GenerationResult& result,
                                          const GeneratorConfig& config) {
  std::vector<std::string> problems;
  const auto& mesh = result.mesh;
  const auto& records = result.transcript.records;

  std::set<std::array<std::uint32_t, 3>> keys;
  std::unordered_set<std::uint64_t> edges;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    const auto n = mesh.vertices.size();
    if (face.a >= n || face.b >= n || face.c >= n) {
      problems.push_back("face " + std::to_string(f) + " index out of range");
      continue;
    }
    const auto &pa = mesh.vertices[face.a], &pb = mesh.vertices[face.b], &pc = mesh.vertices[face.c];
    if (pa == pb || pb == pc || pc == pa)
      problems.push_back("face " + std::to_string(f) + " repeats a vertex position");
    std::array<std::uint32_t, 3> key{face.a, face.b, face.c};
    std::sort(key.begin(), key.end());
    if (!keys.insert(key).second && config.duplicate_check)
      problems.push_back("face " + std::to_string(f) + " duplicates an earlier face");
    for (int k = 0; k < 3; ++k)
      if (!edges.insert(edge_key(face[k], face[(k + 1) % 3])).second && config.edge_conflict_check)
        problems.push_back("face " + std::to_string(f) + " reuses a directed edge");
  }

  std::size_t emitted = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!is_legal(r.input.kind, r.output.kind))
      problems.push_back("record " + std::to_string(i) + " is illegal");
    if (r.input.kind == InputKind::Edge && r.output.kind == OutputKind::Vertex) {
      if (emitted < mesh.faces.size()) {
        const auto& face = mesh.faces[emitted];
        if (mesh.vertices[face.a] != r.input.from || mesh.vertices[face.b] != r.input.to ||
            mesh.vertices[face.c] != r.output.vertex)
          problems.push_back("record " + std::to_string(i) + " disagrees with face " +
                             std::to_string(emitted));
      }
      ++emitted;
    }
  }
  if (emitted != mesh.faces.size())
    problems.push_back("transcript has " + std::to_string(emitted) + " faces, mesh has " +
                       std::to_string(mesh.faces.size()));

  if (result.halt == HaltReason::Eos) {
    if (result.transcript.truncated) problems.push_back("EOS halt marked truncated");
    try {
      sequence_stats(result.transcript);
    } catch (const Error& e) {
      problems.push_back(std::string("transcript malformed: ") + e.what());
    }
  } else {
    if (!result.transcript.truncated) problems.push_back("BUDGET halt not marked truncated");
    if (records.size() != config.max_steps)
      problems.push_back("BUDGET halt after " + std::to_string(records.size()) + " of " +
                         std::to_string(config.max_steps) + " steps");
  }
  if (records.size() > config.max_steps) problems.push_back("step budget exceeded");
  return problems;
}

}  // namespace tmts
