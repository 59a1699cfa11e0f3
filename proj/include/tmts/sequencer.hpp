#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "tmts/mesh.hpp"

namespace tmts {

enum class TraversalOrder { Dfs, Bfs };

std::string_view to_string(TraversalOrder order);

enum class InputKind { Sos, Sos2, Edge };
enum class OutputKind { Vertex, Stop, Eos };

// Input of one generation step. SOS2 carries the first vertex in `from`; EDGE
// carries the directed edge from -> to. Vertices are grid positions, not
// indices: positions are what a token stream can express.
struct StepInput {
  InputKind kind = InputKind::Sos;
  QuantizedVertex from, to;

  static StepInput sos() { return {}; }
  static StepInput sos2(QuantizedVertex first) { return {InputKind::Sos2, first, {}}; }
  static StepInput edge(QuantizedVertex a, QuantizedVertex b) { return {InputKind::Edge, a, b}; }

  friend bool operator==(const StepInput&, const StepInput&) = default;
};

struct StepOutput {
  OutputKind kind = OutputKind::Eos;
  QuantizedVertex vertex;

  static StepOutput vertex_of(QuantizedVertex v) { return {OutputKind::Vertex, v}; }
  static StepOutput stop() { return {OutputKind::Stop, {}}; }
  static StepOutput eos() { return {OutputKind::Eos, {}}; }

  friend bool operator==(const StepOutput&, const StepOutput&) = default;
};

struct StepRecord {
  StepInput input;
  StepOutput output;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

// True when the output kind may answer the input kind: SOS -> VERTEX | EOS,
// SOS2 -> VERTEX, EDGE -> VERTEX | STOP.
bool is_legal(InputKind input, OutputKind output);

struct TokenSequence {
  int bits = kDefaultBits;
  TraversalOrder order = TraversalOrder::Dfs;
  std::vector<StepRecord> records;
  // Set on generator transcripts that hit the step budget before EOS.
  bool truncated = false;

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

struct EncodeOptions {
  TraversalOrder order = TraversalOrder::Dfs;
  HeightAxis height_axis = HeightAxis::Z;
};

// Autoregressive tree sequencing of a validated mesh. Each connected component
// contributes (SOS -> v1), (SOS2 -> v2) and then one record per popped edge:
// the opposite vertex when the edge bounds an unvisited face, STOP otherwise.
// A final (SOS -> EOS) closes the sequence.
//
// The pending-edge container starts with the twin below the start edge, and
// each discovered face (a, b, c) pushes (a, c) then (c, b). DFS pops the most
// recent edge; BFS takes the oldest (with the start edge queued first).
//
// Components start at the lowest vertex incident to an unvisited face (by
// height_key, then vertex index), along the half-edge leaving it whose
// destination is lowest.
//
// Throws Error(InvalidMesh) when validate_manifold rejects the mesh.
TokenSequence encode(const QuantizedMesh& mesh, const EncodeOptions& options = {});

struct SequenceStats {
  std::size_t length = 0;             // every record, auxiliary ones included
  std::size_t faces = 0;              // EDGE -> VERTEX records
  std::size_t components = 0;         // SOS -> VERTEX records
  std::size_t stops = 0;
  std::size_t traversal_records = 0;  // records with an EDGE input
  std::vector<std::size_t> faces_per_component;
  std::vector<std::size_t> stops_per_component;

  // length / (9 * faces): size relative to nine coordinate tokens per face.
  double ratio() const {
    return faces == 0 ? 0.0 : static_cast<double>(length) / (9.0 * static_cast<double>(faces));
  }
};

// Throws Error(MalformedSequence) unless the sequence is well formed: legal
// input/output pairs, each component opening with SOS, SOS2, and a single
// trailing (SOS -> EOS).
SequenceStats sequence_stats(const TokenSequence& seq);

}  // namespace tmts
