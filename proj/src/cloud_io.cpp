#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "travkit/errors.hpp"
#include "travkit/geom.hpp"

static_assert(std::endian::native == std::endian::little,
              "cloud I/O assumes a little-endian host");

namespace travkit {
namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t offset, const std::string& what) {
  throw ParseError(path + ": " + what + " (byte offset " + std::to_string(offset) + ")");
}

struct PlyProperty {
  std::string name;
  std::size_t size = 0;  // bytes
  bool is_float32 = false;
};

std::size_t ply_type_size(const std::string& t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" || t == "float32")
    return 4;
  if (t == "double" || t == "float64" || t == "int64" || t == "uint64") return 8;
  return 0;
}

PointCloud load_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  std::string line;
  std::size_t offset = 0;
  auto next_line = [&](std::string& out) {
    if (!std::getline(in, out)) parse_fail(path, offset, "truncated header");
    offset += out.size() + 1;
    if (!out.empty() && out.back() == '\r') out.pop_back();
  };

  next_line(line);
  if (line != "ply") parse_fail(path, 0, "unknown magic, expected 'ply'");
  next_line(line);
  if (line != "format binary_little_endian 1.0")
    parse_fail(path, offset - line.size() - 1, "unsupported format '" + line + "'");

  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> props;
  };
  std::vector<Element> elements;
  while (true) {
    next_line(line);
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "comment" || tok == "obj_info" || tok.empty()) continue;
    if (tok == "end_header") break;
    if (tok == "element") {
      Element e;
      ls >> e.name >> e.count;
      if (ls.fail()) parse_fail(path, offset - line.size() - 1, "malformed element line");
      elements.push_back(e);
    } else if (tok == "property") {
      if (elements.empty()) parse_fail(path, offset - line.size() - 1, "property before element");
      std::string type;
      ls >> type;
      if (type == "list")
        parse_fail(path, offset - line.size() - 1, "list properties are not supported");
      PlyProperty p;
      ls >> p.name;
      if (ls.fail()) parse_fail(path, offset - line.size() - 1, "malformed property line");
      p.size = ply_type_size(type);
      if (p.size == 0)
        parse_fail(path, offset - line.size() - 1, "unknown property type '" + type + "'");
      p.is_float32 = (type == "float" || type == "float32");
      elements.back().props.push_back(p);
    } else {
      parse_fail(path, offset - line.size() - 1, "unexpected header token '" + tok + "'");
    }
  }

  PointCloud cloud;
  for (const auto& elem : elements) {
    std::size_t row_size = 0;
    for (const auto& p : elem.props) row_size += p.size;
    if (elem.name != "vertex") {
      // Skip foreign elements wholesale; their row size is fixed (no lists).
      in.seekg(static_cast<std::streamoff>(row_size * elem.count), std::ios::cur);
      offset += row_size * elem.count;
      continue;
    }
    std::ptrdiff_t off_x = -1, off_y = -1, off_z = -1;
    std::size_t running = 0;
    for (const auto& p : elem.props) {
      if (p.name == "x" || p.name == "y" || p.name == "z") {
        if (!p.is_float32)
          parse_fail(path, offset, "vertex property '" + p.name + "' must be float32");
        if (p.name == "x") off_x = static_cast<std::ptrdiff_t>(running);
        if (p.name == "y") off_y = static_cast<std::ptrdiff_t>(running);
        if (p.name == "z") off_z = static_cast<std::ptrdiff_t>(running);
      }
      running += p.size;
    }
    if (off_x < 0 || off_y < 0 || off_z < 0)
      parse_fail(path, offset, "vertex element lacks float32 x,y,z");

    std::vector<char> row(row_size);
    cloud.points.reserve(cloud.points.size() + elem.count);
    for (std::size_t i = 0; i < elem.count; ++i) {
      in.read(row.data(), static_cast<std::streamsize>(row_size));
      if (in.gcount() != static_cast<std::streamsize>(row_size))
        parse_fail(path, offset + static_cast<std::size_t>(in.gcount()),
                   "truncated vertex payload at record " + std::to_string(i));
      offset += row_size;
      float x, y, z;
      std::memcpy(&x, row.data() + off_x, 4);
      std::memcpy(&y, row.data() + off_y, 4);
      std::memcpy(&z, row.data() + off_z, 4);
      cloud.points.push_back({x, y, z});
    }
  }
  return cloud;
}

void save_ply(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "ply\n"
      << "format binary_little_endian 1.0\n"
      << "element vertex " << cloud.size() << "\n"
      << "property float x\n"
      << "property float y\n"
      << "property float z\n"
      << "end_header\n";
  for (const auto& p : cloud.points) {
    const float v[3] = {static_cast<float>(p.x), static_cast<float>(p.y),
                        static_cast<float>(p.z)};
    out.write(reinterpret_cast<const char*>(v), sizeof(v));
  }
  if (!out) throw IoError("write failed for " + path);
}

PointCloud load_xyz(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  PointCloud cloud;
  std::string line;
  std::size_t offset = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;

    double vals[3];
    const char* cur = line.data() + first;
    const char* end = line.data() + line.size();
    for (int k = 0; k < 3; ++k) {
      while (cur < end && (*cur == ' ' || *cur == '\t')) ++cur;
      auto [ptr, ec] = std::from_chars(cur, end, vals[k]);
      if (ec != std::errc{})
        parse_fail(path, line_start + static_cast<std::size_t>(cur - line.data()),
                   "non-numeric token on line " + std::to_string(line_no));
      cur = ptr;
    }
    while (cur < end && (*cur == ' ' || *cur == '\t')) ++cur;
    if (cur != end)
      parse_fail(path, line_start + static_cast<std::size_t>(cur - line.data()),
                 "trailing junk on line " + std::to_string(line_no));
    cloud.points.push_back({vals[0], vals[1], vals[2]});
  }
  return cloud;
}

void save_xyz(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  char buf[128];
  for (const auto& p : cloud.points) {
    // 9 significant digits round-trips every float32 exactly.
    const int n = std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", p.x, p.y, p.z);
    out.write(buf, n);
  }
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace

PointCloud load_cloud(const std::string& path, CloudFormat format) {
  return format == CloudFormat::ply_binary ? load_ply(path) : load_xyz(path);
}

void save_cloud(const PointCloud& cloud, const std::string& path, CloudFormat format) {
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    if (!cloud.points[i].is_finite())
      throw ContractError("save_cloud: non-finite point at index " + std::to_string(i));
  }
  if (format == CloudFormat::ply_binary)
    save_ply(cloud, path);
  else
    save_xyz(cloud, path);
}

PointCloud load_cloud_auto(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[3] = {0, 0, 0};
  in.read(magic, 3);
  in.close();
  if (std::memcmp(magic, "ply", 3) == 0) return load_ply(path);
  return load_xyz(path);
}

}  // namespace travkit
