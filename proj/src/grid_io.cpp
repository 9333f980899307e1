#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "travkit/errors.hpp"
#include "travkit/feature_map.hpp"

static_assert(std::endian::native == std::endian::little,
              "UNRG I/O assumes a little-endian host");

namespace travkit {

void save_grid(const FeatureMap& map, const std::string& path,
               const std::optional<Pose>& pose) {
  map.validate();
  nlohmann::json header{{"width", map.spec.width},
                        {"height", map.spec.height},
                        {"channels", map.channels},
                        {"resolution", map.spec.resolution},
                        {"origin", {map.spec.origin_x, map.spec.origin_y}},
                        {"pose", nullptr}};
  if (pose) header["pose"] = pose_to_json(*pose);
  const std::string hs = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write("UNRG", 4);
  const std::uint32_t hlen = static_cast<std::uint32_t>(hs.size());
  out.write(reinterpret_cast<const char*>(&hlen), 4);
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  out.write(reinterpret_cast<const char*>(map.values.data()),
            static_cast<std::streamsize>(map.values.size() * sizeof(float)));
  if (!out) throw IoError("write failed for " + path);
}

LoadedGrid load_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, "UNRG", 4) != 0)
    throw ParseError(path + ": bad magic, expected UNRG (byte offset 0)");
  std::uint32_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), 4);
  if (in.gcount() != 4) throw ParseError(path + ": truncated header length (byte offset 4)");
  std::string hs(hlen, '\0');
  in.read(hs.data(), hlen);
  if (in.gcount() != static_cast<std::streamsize>(hlen))
    throw ParseError(path + ": truncated header (byte offset 8)");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hs);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": header is not valid JSON: " + e.what());
  }

  LoadedGrid out;
  try {
    GridSpec spec;
    spec.width = header.at("width").get<int>();
    spec.height = header.at("height").get<int>();
    spec.resolution = header.at("resolution").get<double>();
    spec.origin_x = header.at("origin")[0].get<double>();
    spec.origin_y = header.at("origin")[1].get<double>();
    if (header.contains("pose") && !header["pose"].is_null()) {
      out.pose = pose_from_json(header["pose"]);
      spec.ego_centered = true;
    }
    out.map = FeatureMap(spec, header.at("channels").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": header: " + e.what());
  }

  const std::size_t payload = out.map.values.size() * sizeof(float);
  in.read(reinterpret_cast<char*>(out.map.values.data()),
          static_cast<std::streamsize>(payload));
  if (in.gcount() != static_cast<std::streamsize>(payload))
    throw ParseError(path + ": truncated value payload (byte offset " +
                     std::to_string(8 + hlen + static_cast<std::size_t>(in.gcount())) + ")");

  // A cell is observed when any channel holds a finite value there.
  const std::size_t n = out.map.spec.cell_count();
  for (std::size_t i = 0; i < n; ++i) {
    bool any = false;
    for (std::size_t c = 0; c < out.map.channels.size() && !any; ++c)
      any = std::isfinite(out.map.values[c * n + i]);
    out.map.observed[i] = any ? 1 : 0;
  }
  return out;
}

}  // namespace travkit
