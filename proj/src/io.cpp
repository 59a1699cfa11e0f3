#include "tmts/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

#include "tmts/error.hpp"

namespace tmts {

namespace {

using Json = nlohmann::ordered_json;

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  std::ifstream in(path, mode);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write to " + path.string() + " failed");
}

// Locale-independent shortest round-trip formatting.
std::string format_double(double v, int precision = -1) {
  std::array<char, 64> buf;
  const auto res = precision < 0
                       ? std::to_chars(buf.data(), buf.data() + buf.size(), v)
                       : std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                       std::chars_format::general, precision);
  return std::string(buf.data(), res.ptr);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const auto start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) parts.push_back(s.substr(start, i - start));
  }
  return parts;
}

}  // namespace

// -----------------------------------------------------------------------------
// OBJ.
// -----------------------------------------------------------------------------

MeshReal read_obj(std::istream& in, const ObjOptions& options) {
  MeshReal mesh;
  std::vector<std::pair<std::vector<long long>, std::size_t>> polygons;  // indices, line
  std::string line;
  std::size_t line_no = 0;
  auto parse_error = [&](const std::string& what) {
    return Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++line_no;
    auto text = trim(line);
    if (const auto hash = text.find('#'); hash != std::string_view::npos)
      text = trim(text.substr(0, hash));
    if (text.empty()) continue;
    const auto parts = split_ws(text);
    if (parts[0] == "v") {
      if (parts.size() < 4) throw parse_error("vertex needs three coordinates");
      double c[3];
      for (int k = 0; k < 3; ++k) {
        const auto tok = parts[k + 1];
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), c[k]);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
          throw parse_error("bad coordinate '" + std::string(tok) + "'");
      }
      mesh.vertices.push_back({c[0], c[1], c[2]});
    } else if (parts[0] == "f") {
      if (parts.size() < 4) throw parse_error("face needs at least three vertices");
      std::vector<long long> idx;
      for (std::size_t k = 1; k < parts.size(); ++k) {
        auto tok = parts[k].substr(0, parts[k].find('/'));
        long long value = 0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
          throw parse_error("bad face index '" + std::string(parts[k]) + "'");
        if (value < 0)
          throw Error(ErrorCode::NegativeIndex,
                      "line " + std::to_string(line_no) + ": relative index " + std::to_string(value));
        if (value == 0) throw parse_error("face index 0 (indices are 1-based)");
        idx.push_back(value - 1);
      }
      if (idx.size() > 3 && !options.fan_triangulate)
        throw Error(ErrorCode::NonTriangle, "line " + std::to_string(line_no) + ": " +
                                                std::to_string(idx.size()) + "-gon");
      polygons.emplace_back(std::move(idx), line_no);
    }
  }
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed");

  for (const auto& [idx, at] : polygons) {
    for (auto i : idx)
      if (static_cast<unsigned long long>(i) >= mesh.vertices.size())
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(at) + ": index " + std::to_string(i + 1) + " out of range");
    for (std::size_t k = 1; k + 1 < idx.size(); ++k)
      mesh.faces.push_back({static_cast<std::uint32_t>(idx[0]), static_cast<std::uint32_t>(idx[k]),
                            static_cast<std::uint32_t>(idx[k + 1])});
  }
  return mesh;
}

MeshReal read_obj(const std::filesystem::path& path, const ObjOptions& options) {
  auto in = open_in(path);
  try {
    return read_obj(in, options);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_obj(std::ostream& out, const MeshReal& mesh) {
  if (mesh.faces.empty()) throw Error(ErrorCode::EmptyMesh, "mesh has no faces");
  std::string buf;
  for (const auto& v : mesh.vertices)
    buf += "v " + format_double(v.x) + " " + format_double(v.y) + " " + format_double(v.z) + "\n";
  for (const auto& f : mesh.faces)
    buf += "f " + std::to_string(f.a + 1) + " " + std::to_string(f.b + 1) + " " +
           std::to_string(f.c + 1) + "\n";
  out << buf;
}

void write_obj(const std::filesystem::path& path, const MeshReal& mesh) {
  if (mesh.faces.empty()) throw Error(ErrorCode::EmptyMesh, "mesh has no faces");
  auto out = open_out(path, std::ios::binary);
  write_obj(out, mesh);
  finish_write(out, path);
}

void write_obj(const std::filesystem::path& path, const QuantizedMesh& mesh) {
  write_obj(path, dequantize(mesh));
}

// -----------------------------------------------------------------------------
// Binary token stream.
// -----------------------------------------------------------------------------

namespace {

enum Opcode : std::uint8_t { kVertex = 0, kStop = 1, kEos = 2 };

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>((v >> (8 * k)) & 0xff));
}

void check_writable(const TokenSequence& seq) {
  check_bits(seq.bits);
  if (seq.truncated) throw Error(ErrorCode::MalformedSequence, "sequence is truncated");
  sequence_stats(seq);
  const auto limit = 1u << seq.bits;
  for (const auto& r : seq.records)
    if (r.output.kind == OutputKind::Vertex &&
        (r.output.vertex.x >= limit || r.output.vertex.y >= limit || r.output.vertex.z >= limit))
      throw Error(ErrorCode::MalformedSequence, "vertex outside the grid");
}

TokenSequence rebuild(const std::vector<StepOutput>& outputs, int bits, TraversalOrder order,
                      const std::string& where) {
  try {
    return reconstruct_inputs(outputs, bits, order);
  } catch (const Error& e) {
    throw Error(ErrorCode::FormatError, where + ": " + e.what());
  }
}

}  // namespace

std::vector<std::uint8_t> stream_bytes(const TokenSequence& seq) {
  check_writable(seq);
  std::vector<std::uint8_t> out;
  out.reserve(kStreamHeaderSize + 7 * seq.records.size());
  for (char c : {'T', 'M', 'T', 'S'}) out.push_back(static_cast<std::uint8_t>(c));
  out.push_back(kStreamVersion);
  out.push_back(static_cast<std::uint8_t>(seq.bits));
  out.push_back(seq.order == TraversalOrder::Bfs ? 1 : 0);
  put_u32(out, static_cast<std::uint32_t>(seq.records.size()));
  for (const auto& r : seq.records) {
    switch (r.output.kind) {
      case OutputKind::Vertex:
        out.push_back(kVertex);
        put_u16(out, r.output.vertex.z);
        put_u16(out, r.output.vertex.y);
        put_u16(out, r.output.vertex.x);
        break;
      case OutputKind::Stop: out.push_back(kStop); break;
      case OutputKind::Eos: out.push_back(kEos); break;
    }
  }
  return out;
}

TokenSequence parse_stream_bytes(std::span<const std::uint8_t> bytes) {
  auto fail = [](std::size_t offset, const std::string& what) {
    return Error(ErrorCode::FormatError, "byte " + std::to_string(offset) + ": " + what);
  };
  if (bytes.size() < kStreamHeaderSize) throw fail(bytes.size(), "truncated header");
  if (std::memcmp(bytes.data(), "TMTS", 4) != 0) throw fail(0, "bad magic");
  if (bytes[4] != kStreamVersion) throw fail(4, "unsupported version " + std::to_string(bytes[4]));
  const int bits = bytes[5];
  if (bits < 1 || bits > kMaxBits) throw fail(5, "bit depth " + std::to_string(bits) + " outside [1, 16]");
  if (bytes[6] & ~1u) throw fail(6, "reserved flag bits set");
  const auto order = (bytes[6] & 1u) ? TraversalOrder::Bfs : TraversalOrder::Dfs;
  std::uint32_t count = 0;
  for (int k = 0; k < 4; ++k) count |= std::uint32_t{bytes[7 + k]} << (8 * k);

  const auto limit = 1u << bits;
  std::vector<StepOutput> outputs;
  outputs.reserve(std::min<std::size_t>(count, bytes.size()));
  std::size_t at = kStreamHeaderSize;
  auto u16 = [&](std::size_t off) {
    return static_cast<std::uint16_t>(bytes[off] | (bytes[off + 1] << 8));
  };
  for (std::uint32_t i = 0; i < count; ++i) {
    if (at >= bytes.size()) throw fail(at, "truncated: record " + std::to_string(i) + " missing");
    const auto op = bytes[at];
    if (op == kVertex) {
      if (at + 7 > bytes.size()) throw fail(at, "truncated vertex record");
      const QuantizedVertex v{u16(at + 5), u16(at + 3), u16(at + 1)};
      if (v.x >= limit || v.y >= limit || v.z >= limit)
        throw fail(at, "coordinate outside the " + std::to_string(bits) + "-bit grid");
      outputs.push_back(StepOutput::vertex_of(v));
      at += 7;
    } else if (op == kStop) {
      outputs.push_back(StepOutput::stop());
      ++at;
    } else if (op == kEos) {
      if (i + 1 != count) throw fail(at, "EOS before the last record");
      outputs.push_back(StepOutput::eos());
      ++at;
    } else {
      throw fail(at, "unknown opcode " + std::to_string(op));
    }
  }
  if (at != bytes.size()) throw fail(at, "trailing bytes");
  if (outputs.empty() || outputs.back().kind != OutputKind::Eos)
    throw fail(at, "missing terminal EOS");
  return rebuild(outputs, bits, order, "byte " + std::to_string(kStreamHeaderSize));
}

void write_stream(const std::filesystem::path& path, const TokenSequence& seq) {
  const auto bytes = stream_bytes(seq);
  auto out = open_out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  finish_write(out, path);
}

namespace {

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TokenSequence read_stream(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  return parse_stream_bytes(bytes);
}

// -----------------------------------------------------------------------------
// Text token stream.
// -----------------------------------------------------------------------------

std::string output_json(const StepOutput& output) {
  Json j;
  switch (output.kind) {
    case OutputKind::Vertex:
      j["op"] = "v";
      j["z"] = output.vertex.z;
      j["y"] = output.vertex.y;
      j["x"] = output.vertex.x;
      break;
    case OutputKind::Stop: j["op"] = "stop"; break;
    case OutputKind::Eos: j["op"] = "eos"; break;
  }
  return j.dump();
}

StepOutput parse_output_json(const std::string& line) {
  try {
    const auto j = Json::parse(line);
    const auto op = j.at("op").get<std::string>();
    if (op == "stop") return StepOutput::stop();
    if (op == "eos") return StepOutput::eos();
    if (op == "v") {
      auto coord = [&](const char* key) {
        const auto v = j.at(key).get<long long>();
        if (v < 0 || v > 0xffff) throw Error(ErrorCode::FormatError, std::string(key) + " out of range");
        return static_cast<std::uint16_t>(v);
      };
      const auto z = coord("z"), y = coord("y"), x = coord("x");
      return StepOutput::vertex_of({x, y, z});
    }
    throw Error(ErrorCode::FormatError, "unknown op '" + op + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FormatError, e.what());
  }
}

std::string query_json(const PredictorQuery& query) {
  static constexpr const char* kKind[] = {"sos", "sos2", "edge"};
  auto vertex = [](const QuantizedVertex& v) {
    Json j;
    j["z"] = v.z;
    j["y"] = v.y;
    j["x"] = v.x;
    return j;
  };
  Json j;
  j["step"] = query.step;
  j["input"] = kKind[static_cast<int>(query.input.kind)];
  if (query.input.kind != InputKind::Sos) j["from"] = vertex(query.input.from);
  if (query.input.kind == InputKind::Edge) j["to"] = vertex(query.input.to);
  j["component"] = query.component;
  j["depth"] = query.stack_depth;
  return j.dump();
}

std::string stream_text(const TokenSequence& seq) {
  check_writable(seq);
  Json header;
  header["magic"] = "TMTS";
  header["bits"] = seq.bits;
  header["order"] = std::string(to_string(seq.order));
  std::string out = header.dump() + "\n";
  for (const auto& r : seq.records) out += output_json(r.output) + "\n";
  return out;
}

TokenSequence parse_stream_text(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    return Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": " + what);
  };

  int bits = 0;
  TraversalOrder order = TraversalOrder::Dfs;
  bool have_header = false;
  std::vector<StepOutput> outputs;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!have_header) {
      try {
        const auto j = Json::parse(line);
        if (j.at("magic").get<std::string>() != "TMTS") throw fail("bad magic");
        bits = j.at("bits").get<int>();
        const auto o = j.at("order").get<std::string>();
        if (o != "dfs" && o != "bfs") throw fail("order must be dfs or bfs");
        order = o == "bfs" ? TraversalOrder::Bfs : TraversalOrder::Dfs;
      } catch (const nlohmann::json::exception& e) {
        throw fail(e.what());
      }
      if (bits < 1 || bits > kMaxBits) throw fail("bit depth outside [1, 16]");
      have_header = true;
      continue;
    }
    if (!outputs.empty() && outputs.back().kind == OutputKind::Eos) throw fail("record after EOS");
    StepOutput out;
    try {
      out = parse_output_json(line);
    } catch (const Error& e) {
      throw fail(e.what());
    }
    const auto limit = 1u << bits;
    if (out.kind == OutputKind::Vertex &&
        (out.vertex.x >= limit || out.vertex.y >= limit || out.vertex.z >= limit))
      throw fail("coordinate outside the grid");
    outputs.push_back(out);
  }
  if (!have_header) throw fail("missing header");
  if (outputs.empty() || outputs.back().kind != OutputKind::Eos) throw fail("missing terminal EOS");
  return rebuild(outputs, bits, order, "text stream");
}

void write_stream_text(const std::filesystem::path& path, const TokenSequence& seq) {
  const auto text = stream_text(seq);
  auto out = open_out(path, std::ios::binary);
  out << text;
  finish_write(out, path);
}

TokenSequence read_stream_any(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), "TMTS", 4) == 0)
    return parse_stream_bytes(bytes);
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  return parse_stream_text(in);
}

PredictorAnswer StreamPredictor::predict(const PredictorQuery& query) {
  requests_ << query_json(query) << '\n' << std::flush;
  std::string line;
  do {
    if (!std::getline(answers_, line))
      throw Error(ErrorCode::FormatError, "answer stream closed at step " + std::to_string(query.step));
  } while (trim(line).empty());
  return parse_output_json(line);
}

// -----------------------------------------------------------------------------
// Point clouds.
// -----------------------------------------------------------------------------

void write_pointcloud(std::ostream& out, std::span<const Vec3> points, PointCloudFormat format) {
  if (points.empty()) throw Error(ErrorCode::EmptyMesh, "empty point set");
  if (format == PointCloudFormat::Xyz) {
    std::string buf;
    for (const auto& p : points)
      buf += format_double(p.x, 9) + " " + format_double(p.y, 9) + " " + format_double(p.z, 9) + "\n";
    out << buf;
    return;
  }
  out << "ply\nformat binary_little_endian 1.0\nelement vertex " << points.size()
      << "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
  std::vector<char> body;
  body.reserve(points.size() * 12);
  for (const auto& p : points) {
    for (double c : {p.x, p.y, p.z}) {
      auto word = std::bit_cast<std::uint32_t>(static_cast<float>(c));
      for (int k = 0; k < 4; ++k) body.push_back(static_cast<char>((word >> (8 * k)) & 0xff));
    }
  }
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
}

void write_pointcloud(const std::filesystem::path& path, std::span<const Vec3> points,
                      PointCloudFormat format) {
  if (points.empty()) throw Error(ErrorCode::EmptyMesh, "empty point set");
  auto out = open_out(path, std::ios::binary);
  write_pointcloud(out, points, format);
  finish_write(out, path);
}

}  // namespace tmts
