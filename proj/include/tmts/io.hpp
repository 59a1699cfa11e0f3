#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tmts/generator.hpp"
#include "tmts/mesh.hpp"
#include "tmts/sequencer.hpp"

namespace tmts {

// -----------------------------------------------------------------------------
// Wavefront OBJ.
// -----------------------------------------------------------------------------

struct ObjOptions {
  bool fan_triangulate = true;
};

// Reads `v` and `f` lines (1-based, `a/b/c` forms accepted); every other
// statement is ignored. Throws Error(ParseError) with the line number,
// Error(NegativeIndex) for relative indices and Error(NonTriangle) for
// polygons when fan triangulation is off.
MeshReal read_obj(std::istream& in, const ObjOptions& options = {});
MeshReal read_obj(const std::filesystem::path& path, const ObjOptions& options = {});

// Writes vertices in shortest round-trip decimal form, so reading the file
// back reproduces every double exactly. Throws Error(EmptyMesh) for meshes
// without faces.
void write_obj(std::ostream& out, const MeshReal& mesh);
void write_obj(const std::filesystem::path& path, const MeshReal& mesh);
// Quantized meshes are written at cell centers.
void write_obj(const std::filesystem::path& path, const QuantizedMesh& mesh);

// -----------------------------------------------------------------------------
// Token streams.
//
// Binary layout, little endian:
//   header  "TMTS" | version u8 = 1 | bits u8 | flags u8 (bit0: 1 = BFS) |
//           record count u32
//   record  opcode u8 (0 VERTEX, 1 STOP, 2 EOS); VERTEX is followed by z, y, x
//           as u16 each.
// Only outputs are stored; inputs are rebuilt by replaying the stack machine.
// -----------------------------------------------------------------------------

inline constexpr std::uint8_t kStreamVersion = 1;
inline constexpr std::size_t kStreamHeaderSize = 11;

std::vector<std::uint8_t> stream_bytes(const TokenSequence& seq);

// Throws Error(FormatError) with the byte offset of the first problem: wrong
// magic or version, reserved flag bits, bits outside [1, 16], truncation,
// trailing bytes, unknown opcodes, coordinates >= 2^bits, a missing or early
// EOS, or outputs the stack machine cannot replay.
TokenSequence parse_stream_bytes(std::span<const std::uint8_t> bytes);

void write_stream(const std::filesystem::path& path, const TokenSequence& seq);
TokenSequence read_stream(const std::filesystem::path& path);

// JSON-lines form: a header {"magic":"TMTS","bits":B,"order":"dfs"|"bfs"}
// followed by one {"op":"v","z":Z,"y":Y,"x":X} | {"op":"stop"} | {"op":"eos"}
// per record.
std::string stream_text(const TokenSequence& seq);
TokenSequence parse_stream_text(std::istream& in);

void write_stream_text(const std::filesystem::path& path, const TokenSequence& seq);
// Reads either form, telling them apart by the leading bytes.
TokenSequence read_stream_any(const std::filesystem::path& path);

// Single-record JSON used by the text form and the predictor pipe.
std::string output_json(const StepOutput& output);
StepOutput parse_output_json(const std::string& line);
std::string query_json(const PredictorQuery& query);

// Predictor that writes each query as a JSON line to `requests` and reads the
// answer as a JSON line from `answers`, so an external process can drive
// generation. Throws Error(FormatError) on a closed or malformed answer stream.
class StreamPredictor final : public Predictor {
 public:
  StreamPredictor(std::istream& answers, std::ostream& requests)
      : answers_(answers), requests_(requests) {}
  PredictorAnswer predict(const PredictorQuery& query) override;

 private:
  std::istream& answers_;
  std::ostream& requests_;
};

// -----------------------------------------------------------------------------
// Point clouds.
// -----------------------------------------------------------------------------

enum class PointCloudFormat { Xyz, Ply };

// XYZ: "x y z" per line with 9 significant digits. PLY: binary little endian,
// float32 x, y, z. Throws Error(EmptyMesh) for an empty set.
void write_pointcloud(std::ostream& out, std::span<const Vec3> points, PointCloudFormat format);
void write_pointcloud(const std::filesystem::path& path, std::span<const Vec3> points,
                      PointCloudFormat format);

}  // namespace tmts
