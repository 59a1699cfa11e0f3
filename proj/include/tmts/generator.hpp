#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tmts/sequencer.hpp"

namespace tmts {

struct PredictorQuery {
  std::size_t step = 0;
  StepInput input;
  std::size_t component = 0;    // 0-based index of the component being built
  std::size_t stack_depth = 0;  // pending edges after the current one was taken
};

using PredictorAnswer = StepOutput;

// Supplies the output of every generation step. A neural sampler, a replay of
// a recorded stream, or an external process all plug in here.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual PredictorAnswer predict(const PredictorQuery& query) = 0;
};

struct GeneratorConfig {
  int bits = kDefaultBits;
  TraversalOrder order = TraversalOrder::Dfs;
  // Coerce to STOP any vertex that would repeat an emitted face (unordered).
  bool duplicate_check = true;
  // Coerce to STOP any vertex that would reuse an emitted directed edge.
  bool edge_conflict_check = false;
  std::size_t max_steps = 1'000'000;
};

enum class HaltReason { Eos, Budget };

struct GenerationResult {
  QuantizedMesh mesh;
  TokenSequence transcript;
  HaltReason halt = HaltReason::Eos;
  std::size_t coerced_duplicates = 0;
  std::size_t coerced_conflicts = 0;
  std::size_t coerced_degenerate = 0;
};

// The decoding stack machine. It derives each step's input from its own state
// and applies the answer; callers alternate query() and answer() until halted().
class GenerationMachine {
 public:
  explicit GenerationMachine(const GeneratorConfig& config);

  bool halted() const { return halted_; }
  PredictorQuery query() const;

  // Applies an answer to the current query and returns the output recorded in
  // the transcript, which is STOP when the answer was coerced. Throws
  // Error(IllegalAnswer) for answers the current input kind cannot take.
  PredictorAnswer answer(const PredictorAnswer& answer);

  // Ends a run that ran out of budget; the transcript is marked truncated.
  void halt_on_budget();

  const TokenSequence& transcript() const { return transcript_; }
  const GeneratorConfig& config() const { return config_; }
  std::size_t pending_edges() const { return pending_.size(); }

  GenerationResult finish() &&;

 private:
  enum class Phase { Sos, Sos2, Edge };

  std::uint32_t intern(const QuantizedVertex& v);
  void take_next_edge();

  GeneratorConfig config_;
  Phase phase_ = Phase::Sos;
  bool halted_ = false;
  HaltReason halt_ = HaltReason::Eos;
  std::size_t component_ = 0;

  std::uint32_t first_vertex_ = 0;
  std::pair<std::uint32_t, std::uint32_t> current_{0, 0};
  std::deque<std::pair<std::uint32_t, std::uint32_t>> pending_;

  std::vector<QuantizedVertex> vertices_;
  std::unordered_map<std::uint64_t, std::uint32_t> vertex_index_;
  std::vector<Face> faces_;
  std::set<std::array<std::uint32_t, 3>> face_keys_;
  std::unordered_set<std::uint64_t> used_edges_;

  TokenSequence transcript_;
  std::size_t coerced_duplicates_ = 0;
  std::size_t coerced_conflicts_ = 0;
  std::size_t coerced_degenerate_ = 0;
};

// Drives a machine with `predictor`, calling it at most config.max_steps times.
GenerationResult run(Predictor& predictor, const GeneratorConfig& config);

struct DecodeOptions {
  bool duplicate_check = false;
  bool edge_conflict_check = false;
};

// Replays a recorded sequence. Throws Error(Desync) when a recorded input
// disagrees with the machine's derived input or when replay would alter a
// recorded output, and Error(MalformedSequence) when records run out or
// remain after EOS.
QuantizedMesh decode(const TokenSequence& seq, const DecodeOptions& options = {});

// Rebuilds the full sequence, inputs included, from its outputs alone.
// Throws like decode.
TokenSequence reconstruct_inputs(const std::vector<StepOutput>& outputs, int bits,
                                 TraversalOrder order);

// Checks a finished run against the machine's guarantees: faces have three
// distinct positions, no duplicate faces (with duplicate_check), no reused
// directed edge (with edge_conflict_check), a well-formed transcript (or a
// legal truncated one on BUDGET) whose EDGE -> VERTEX records match the
// emitted faces. Returns one message per violation.
std::vector<std::string> check_invariants(const GenerationResult& result,
                                          const GeneratorConfig& config);

// Answers uniformly among legal outputs for each query, reusing previously
// answered positions half the time so duplicates and shared edges occur.
// Deterministic per seed.
std::unique_ptr<Predictor> fuzz_predictor(std::uint64_t seed, int bits = kDefaultBits);

}  // namespace tmts
