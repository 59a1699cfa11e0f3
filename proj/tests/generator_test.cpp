#include <gtest/gtest.h>

#include <functional>
#include <set>

#include "fixtures.hpp"
#include "tmts/error.hpp"
#include "tmts/generator.hpp"

namespace tmts {
namespace {

constexpr QuantizedVertex kA{0, 0, 0}, kB{1, 0, 0}, kC{0, 1, 0}, kD{0, 0, 1};

class ScriptedPredictor final : public Predictor {
 public:
  explicit ScriptedPredictor(std::vector<StepOutput> script) : script_(std::move(script)) {}
  PredictorAnswer predict(const PredictorQuery& q) override {
    queries.push_back(q);
    if (next_ < script_.size()) return script_[next_++];
    // Past the script: close every edge, then end.
    return q.input.kind == InputKind::Edge ? StepOutput::stop() : StepOutput::eos();
  }
  std::vector<PredictorQuery> queries;

 private:
  std::vector<StepOutput> script_;
  std::size_t next_ = 0;
};

void expect_code(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

TEST(Decode, RoundTripOverCorpus) {
  for (int bits : {7, 9}) {
    for (auto order : {TraversalOrder::Dfs, TraversalOrder::Bfs}) {
      for (const auto& fx : fixtures::corpus()) {
        const auto mesh = fixtures::prepare(fx.mesh, bits);
        const auto decoded = decode(encode(mesh, {order}));
        EXPECT_EQ(decoded.bits, bits);
        EXPECT_EQ(fixtures::canonical_faces(decoded), fixtures::canonical_faces(mesh))
            << fx.name << " bits=" << bits << " " << to_string(order);
      }
    }
  }
}

TEST(Decode, SingleTriangleStream) {
  const QuantizedMesh tri{7, {kA, kB, kC}, {{0, 1, 2}}};
  const auto decoded = decode(encode(tri));
  EXPECT_EQ(decoded.vertices, (std::vector<QuantizedVertex>{kA, kB, kC}));
  EXPECT_EQ(decoded.faces, (std::vector<Face>{{0, 1, 2}}));
}

TEST(Decode, OracleReplayThroughRun) {
  const auto mesh = fixtures::prepare(fixtures::torus(10, 6));
  const auto seq = encode(mesh);
  std::vector<StepOutput> outputs;
  for (const auto& r : seq.records) outputs.push_back(r.output);
  ScriptedPredictor oracle(outputs);
  const auto result = run(oracle, {});
  EXPECT_EQ(result.halt, HaltReason::Eos);
  EXPECT_EQ(result.transcript.records, seq.records);
  EXPECT_EQ(fixtures::canonical_faces(result.mesh), fixtures::canonical_faces(mesh));
  // Queries carry component and depth alongside the input.
  EXPECT_EQ(oracle.queries.size(), seq.records.size());
  for (std::size_t i = 0; i < seq.records.size(); ++i) {
    EXPECT_EQ(oracle.queries[i].step, i);
    EXPECT_EQ(oracle.queries[i].input, seq.records[i].input);
  }
}

TEST(Decode, ReconstructInputsFromOutputs) {
  for (const auto& fx : fixtures::corpus()) {
    const auto seq = encode(fixtures::prepare(fx.mesh), {TraversalOrder::Bfs});
    std::vector<StepOutput> outputs;
    for (const auto& r : seq.records) outputs.push_back(r.output);
    EXPECT_EQ(reconstruct_inputs(outputs, seq.bits, seq.order), seq) << fx.name;
  }
}

TEST(Decode, MissingEos) {
  auto seq = encode(fixtures::prepare(fixtures::tetrahedron()));
  seq.records.pop_back();
  expect_code(ErrorCode::MalformedSequence, [&] { decode(seq); });
}

TEST(Decode, RecordsAfterEos) {
  auto seq = encode(fixtures::prepare(fixtures::tetrahedron()));
  seq.records.push_back(seq.records.back());
  expect_code(ErrorCode::MalformedSequence, [&] { decode(seq); });
}

TEST(Decode, CorruptedInputDesyncs) {
  auto seq = encode(fixtures::prepare(fixtures::tetrahedron()));
  std::swap(seq.records[3].input, seq.records[4].input);
  expect_code(ErrorCode::Desync, [&] { decode(seq); });
}

TEST(Decode, WrongOrderDesyncs) {
  auto seq = encode(fixtures::prepare(fixtures::icosphere(1)));
  seq.order = TraversalOrder::Bfs;
  expect_code(ErrorCode::Desync, [&] { decode(seq); });
}

TEST(Decode, TruncatedTranscriptIsRejected) {
  auto seq = encode(fixtures::prepare(fixtures::tetrahedron()));
  seq.truncated = true;
  expect_code(ErrorCode::MalformedSequence, [&] { decode(seq); });
}

TEST(Run, EosFirstGivesEmptyMesh) {
  ScriptedPredictor p({StepOutput::eos()});
  const auto r = run(p, {});
  EXPECT_EQ(r.halt, HaltReason::Eos);
  EXPECT_TRUE(r.mesh.faces.empty());
  ASSERT_EQ(r.transcript.records.size(), 1u);
  EXPECT_EQ(r.transcript.records[0], (StepRecord{StepInput::sos(), StepOutput::eos()}));
  EXPECT_FALSE(r.transcript.truncated);
}

TEST(Run, DuplicateProposalIsCoerced) {
  // (a,b) -> c emits the face; (c,b) -> a proposes the same triangle again.
  ScriptedPredictor p({StepOutput::vertex_of(kA), StepOutput::vertex_of(kB),
                       StepOutput::vertex_of(kC), StepOutput::vertex_of(kA)});
  const auto r = run(p, {});
  EXPECT_EQ(r.mesh.faces.size(), 1u);
  EXPECT_EQ(r.coerced_duplicates, 1u);
  EXPECT_EQ(r.transcript.records[3].input, StepInput::edge(kC, kB));
  EXPECT_EQ(r.transcript.records[3].output, StepOutput::stop());
  EXPECT_TRUE(check_invariants(r, {}).empty());
}

TEST(Run, DuplicateCheckOffEmitsTheReversedCopy) {
  ScriptedPredictor p({StepOutput::vertex_of(kA), StepOutput::vertex_of(kB),
                       StepOutput::vertex_of(kC), StepOutput::vertex_of(kA)});
  GeneratorConfig cfg;
  cfg.duplicate_check = false;
  const auto r = run(p, cfg);
  EXPECT_EQ(r.mesh.faces.size(), 2u);
  EXPECT_EQ(r.coerced_duplicates, 0u);
}

TEST(Run, EdgeConflictCheck) {
  // Faces (a,b,c) and (c,b,d), then STOP on (d,b), (c,d), (a,c). The last edge
  // (b,a) answered c would build (b,a,c), whose edge c->b already belongs to
  // (c,b,d).
  const std::vector<StepOutput> script{
      StepOutput::vertex_of(kA), StepOutput::vertex_of(kB), StepOutput::vertex_of(kC),
      StepOutput::vertex_of(kD), StepOutput::stop(),        StepOutput::stop(),
      StepOutput::stop(),        StepOutput::vertex_of(kC)};
  GeneratorConfig cfg;
  cfg.duplicate_check = false;
  cfg.edge_conflict_check = true;
  ScriptedPredictor p(script);
  const auto r = run(p, cfg);
  EXPECT_EQ(r.transcript.records[7].input, StepInput::edge(kB, kA));
  EXPECT_EQ(r.transcript.records[7].output, StepOutput::stop());
  EXPECT_EQ(r.mesh.faces.size(), 2u);
  EXPECT_EQ(r.coerced_conflicts, 1u);
  EXPECT_TRUE(check_invariants(r, cfg).empty());

  cfg.edge_conflict_check = false;
  ScriptedPredictor q(script);
  EXPECT_EQ(run(q, cfg).mesh.faces.size(), 3u);
}

TEST(Run, DegenerateAnswerIsCoerced) {
  ScriptedPredictor p({StepOutput::vertex_of(kA), StepOutput::vertex_of(kB),
                       StepOutput::vertex_of(kA)});
  const auto r = run(p, {});
  EXPECT_TRUE(r.mesh.faces.empty());
  EXPECT_EQ(r.coerced_degenerate, 1u);
  EXPECT_EQ(r.transcript.records[2].output, StepOutput::stop());
}

TEST(Run, IllegalAnswers) {
  expect_code(ErrorCode::IllegalAnswer, [] {
    ScriptedPredictor p({StepOutput::stop()});
    run(p, {});
  });
  expect_code(ErrorCode::IllegalAnswer, [] {
    ScriptedPredictor p({StepOutput::vertex_of(kA), StepOutput::eos()});
    run(p, {});
  });
  expect_code(ErrorCode::IllegalAnswer, [] {
    ScriptedPredictor p({StepOutput::vertex_of(kA), StepOutput::stop()});
    run(p, {});
  });
  expect_code(ErrorCode::IllegalAnswer, [] {
    ScriptedPredictor p({StepOutput::vertex_of(kA), StepOutput::vertex_of(kB), StepOutput::eos()});
    run(p, {});
  });
  expect_code(ErrorCode::IllegalAnswer, [] {
    ScriptedPredictor p({StepOutput::vertex_of({128, 0, 0})});
    run(p, {});
  });
  expect_code(ErrorCode::IllegalAnswer, [] {
    ScriptedPredictor p({StepOutput::vertex_of(kA), StepOutput::vertex_of(kA)});
    run(p, {});
  });
  GenerationMachine m({});
  m.answer(StepOutput::eos());
  expect_code(ErrorCode::IllegalAnswer, [&] { m.answer(StepOutput::eos()); });
}

TEST(Run, BudgetHaltMarksTruncation) {
  class Chain final : public Predictor {
   public:
    PredictorAnswer predict(const PredictorQuery& q) override {
      // Keep opening components with fresh vertices so the run never ends.
      if (q.input.kind == InputKind::Edge) return StepOutput::stop();
      const auto i = static_cast<std::uint16_t>(n_++ % 120);
      return StepOutput::vertex_of({i, static_cast<std::uint16_t>(i + 1), 0});
    }

   private:
    std::size_t n_ = 0;
  } chain;
  GeneratorConfig cfg;
  cfg.max_steps = 25;
  const auto r = run(chain, cfg);
  EXPECT_EQ(r.halt, HaltReason::Budget);
  EXPECT_EQ(r.transcript.records.size(), 25u);
  EXPECT_TRUE(r.transcript.truncated);
  EXPECT_TRUE(check_invariants(r, cfg).empty());

  cfg.max_steps = 0;
  expect_code(ErrorCode::InvalidConfig, [&] { run(chain, cfg); });
}

TEST(Run, QueryReportsComponentAndDepth) {
  GenerationMachine m({});
  EXPECT_EQ(m.query().input.kind, InputKind::Sos);
  m.answer(StepOutput::vertex_of(kA));
  EXPECT_EQ(m.query().input, StepInput::sos2(kA));
  m.answer(StepOutput::vertex_of(kB));
  auto q = m.query();
  EXPECT_EQ(q.input, StepInput::edge(kA, kB));
  EXPECT_EQ(q.stack_depth, 1u);
  m.answer(StepOutput::vertex_of(kC));
  EXPECT_EQ(m.query().stack_depth, 2u);
  for (int i = 0; i < 3; ++i) m.answer(StepOutput::stop());
  q = m.query();
  EXPECT_EQ(q.input.kind, InputKind::Sos);
  EXPECT_EQ(q.component, 1u);
}

TEST(Fuzz, DeterministicPerSeed) {
  for (std::uint64_t seed : {1u, 2u, 77u}) {
    GeneratorConfig cfg;
    cfg.max_steps = 3000;
    auto a = fuzz_predictor(seed), b = fuzz_predictor(seed);
    EXPECT_EQ(run(*a, cfg).transcript, run(*b, cfg).transcript);
  }
}

TEST(Fuzz, RunsAreLegalAndKeepInvariants) {
  std::size_t eos = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    for (bool dup : {true, false}) {
      for (bool edges : {false, true}) {
        GeneratorConfig cfg;
        cfg.max_steps = 2000;
        cfg.duplicate_check = dup;
        cfg.edge_conflict_check = edges;
        cfg.order = seed % 2 ? TraversalOrder::Bfs : TraversalOrder::Dfs;
        auto p = fuzz_predictor(seed, seed % 3 ? 7 : 9);
        cfg.bits = seed % 3 ? 7 : 9;
        const auto r = run(*p, cfg);
        eos += r.halt == HaltReason::Eos;
        const auto problems = check_invariants(r, cfg);
        EXPECT_TRUE(problems.empty()) << "seed " << seed << ": " << problems.front();
        for (const auto& f : r.mesh.faces) {
          const auto &a = r.mesh.vertices[f.a], &b = r.mesh.vertices[f.b], &c = r.mesh.vertices[f.c];
          EXPECT_TRUE(a != b && b != c && a != c);
        }
        if (r.halt == HaltReason::Eos) {
          // A completed transcript replays to the same mesh.
          const auto replayed = decode(r.transcript, {dup, edges});
          EXPECT_EQ(replayed.faces, r.mesh.faces);
        }
      }
    }
  }
  EXPECT_GT(eos, 0u);
}

TEST(Invariants, DetectsDuplicateFaces) {
  ScriptedPredictor p({StepOutput::vertex_of(kA), StepOutput::vertex_of(kB),
                       StepOutput::vertex_of(kC), StepOutput::vertex_of(kA)});
  GeneratorConfig off;
  off.duplicate_check = false;
  const auto r = run(p, off);
  EXPECT_TRUE(check_invariants(r, off).empty());
  EXPECT_FALSE(check_invariants(r, GeneratorConfig{}).empty());
}

}  // namespace
}  // namespace tmts
