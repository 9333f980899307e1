#include "travkit/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "travkit/errors.hpp"

namespace travkit {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;

void write_json_file(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

void DatasetSpec::validate() const {
  detail::require(n_samples >= 1, "dataset needs n_samples >= 1");
  grid.validate();
  sensor.validate();
  noising.validate();
  detail::require(pose_rule.sensor_height > 0.0, "sensor height must be > 0");
}

Pose sample_pose(const FeatureMap& global_map, const PoseRule& rule, Rng& rng) {
  const auto free = freespace_cells(global_map, rule.step_max, rule.slope_max,
                                    rule.footprint_radius);
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < free.size(); ++i)
    if (free[i]) candidates.push_back(i);
  if (candidates.empty())
    throw ContractError("sample_pose: no freespace cells under the given rule");

  const std::size_t cell = candidates[rng.uniform_index(candidates.size())];
  const int ix = static_cast<int>(cell / global_map.spec.height);
  const int iy = static_cast<int>(cell % global_map.spec.height);
  const int c_terrain = global_map.channel_index("terrain");
  detail::require(c_terrain >= 0, "sample_pose: map lacks a terrain channel");
  const double z =
      static_cast<double>(global_map.at(c_terrain, ix, iy)) + rule.sensor_height;
  const double yaw = rng.uniform(0.0, kTwoPi);
  return Pose::from_yaw_pitch_roll(
      yaw, 0.0, 0.0,
      {global_map.spec.center_x(ix), global_map.spec.center_y(iy), z});
}

DatasetPair make_pair(const PointCloud& gt_cloud, const FeatureMap& global_map,
                      const Pose& pose, const DatasetSpec& spec, std::uint64_t pair_seed) {
  Rng rng(pair_seed);
  const DepthImage clean = simulate_scan(gt_cloud, pose, spec.sensor);
  PipelineTrace trace;
  const DepthImage noised = apply_pipeline(clean, spec.noising, rng, &trace);

  DatasetPair pair;
  pair.scan = depth_to_cloud(noised, CloudFrame::sensor);
  pair.label = crop_and_align(global_map, pose, spec.grid);
  pair.meta = nlohmann::json{
      {"pose", pose_to_json(pose)},
      {"seed", pair_seed},
      {"sensor", sensor_to_json(spec.sensor)},
      {"grid", grid_spec_to_json(spec.grid)},
      {"noising", noising_to_json(spec.noising)},
      {"noising_trace",
       {{"ceiling_fired", trace.ceiling_fired},
        {"ceiling_dz", trace.ceiling_dz},
        {"mask_fired", trace.mask_fired},
        {"mask_index", trace.mask_index},
        {"salt_fired", trace.salt_fired},
        {"range_fired", trace.range_fired},
        {"range_m", trace.range_m}}}};
  return pair;
}

void generate_dataset(const PointCloud& gt_cloud, const FeatureMap& global_map,
                      const DatasetSpec& spec, const std::string& out_dir, int n_threads) {
  spec.validate();
  detail::require(n_threads >= 1, "generate_dataset: n_threads must be >= 1");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());

  struct Entry {
    nlohmann::json manifest_row;
  };
  std::vector<Entry> entries(static_cast<std::size_t>(spec.n_samples));

  auto run_pair = [&](int i) {
    // Pose and pair content both derive from the per-pair seed only.
    const std::uint64_t pair_seed = mix_seed(spec.rng_seed, static_cast<std::uint64_t>(i));
    Rng pose_rng(mix_seed(pair_seed, 0x706f7365ull));  // "pose" stream tag
    const Pose pose = sample_pose(global_map, spec.pose_rule, pose_rng);
    const DatasetPair pair = make_pair(gt_cloud, global_map, pose, spec, pair_seed);

    char name[32];
    std::snprintf(name, sizeof(name), "pair_%06d", i);
    const fs::path dir = fs::path(out_dir) / name;
    std::error_code dir_ec;
    fs::create_directories(dir, dir_ec);
    if (dir_ec) throw IoError("cannot create " + dir.string() + ": " + dir_ec.message());
    save_cloud(pair.scan, (dir / "scan.ply").string(), CloudFormat::ply_binary);
    save_grid(pair.label, (dir / "label.unrg").string(), pose);
    write_json_file(pair.meta, dir / "meta.json");

    const double px = pose.translation().x();
    const double py = pose.translation().y();
    bool in_test = false;
    for (const auto& r : spec.test_regions) in_test |= r.contains(px, py);

    entries[static_cast<std::size_t>(i)].manifest_row = nlohmann::json{
        {"id", i},
        {"pose", pose_to_json(pose)},
        {"seed", pair_seed},
        {"split", in_test ? "test" : "train"},
        {"paths",
         {{"scan", std::string(name) + "/scan.ply"},
          {"label", std::string(name) + "/label.unrg"},
          {"meta", std::string(name) + "/meta.json"}}}};
  };

  if (n_threads == 1) {
    for (int i = 0; i < spec.n_samples; ++i) run_pair(i);
  } else {
    std::vector<std::thread> workers;
    std::exception_ptr failure;
    std::mutex failure_mu;
    for (int t = 0; t < n_threads; ++t) {
      workers.emplace_back([&, t]() {
        try {
          for (int i = t; i < spec.n_samples; i += n_threads) run_pair(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    if (failure) std::rethrow_exception(failure);
  }

  nlohmann::json manifest{{"dataset_spec", dataset_spec_to_json(spec)},
                          {"pairs", nlohmann::json::array()}};
  for (const auto& e : entries) manifest["pairs"].push_back(e.manifest_row);
  write_json_file(manifest, fs::path(out_dir) / "manifest.json");
}

nlohmann::json dataset_spec_to_json(const DatasetSpec& spec) {
  nlohmann::json regions = nlohmann::json::array();
  for (const auto& r : spec.test_regions)
    regions.push_back({r.x_min, r.y_min, r.x_max, r.y_max});
  return nlohmann::json{{"n_samples", spec.n_samples},
                        {"grid", grid_spec_to_json(spec.grid)},
                        {"sensor", sensor_to_json(spec.sensor)},
                        {"noising", noising_to_json(spec.noising)},
                        {"pose_rule",
                         {{"step_max", spec.pose_rule.step_max},
                          {"slope_max", spec.pose_rule.slope_max},
                          {"footprint_radius", spec.pose_rule.footprint_radius},
                          {"sensor_height", spec.pose_rule.sensor_height}}},
                        {"test_regions", regions},
                        {"rng_seed", spec.rng_seed}};
}

DatasetSpec dataset_spec_from_json(const nlohmann::json& j) {
  DatasetSpec spec;
  try {
    spec.n_samples = j.value("n_samples", spec.n_samples);
    if (j.contains("grid")) spec.grid = grid_spec_from_json(j["grid"]);
    if (j.contains("sensor")) spec.sensor = sensor_from_json(j["sensor"]);
    if (j.contains("noising")) spec.noising = noising_from_json(j["noising"]);
    if (j.contains("pose_rule")) {
      const auto& r = j["pose_rule"];
      spec.pose_rule.step_max = r.value("step_max", spec.pose_rule.step_max);
      spec.pose_rule.slope_max = r.value("slope_max", spec.pose_rule.slope_max);
      spec.pose_rule.footprint_radius =
          r.value("footprint_radius", spec.pose_rule.footprint_radius);
      spec.pose_rule.sensor_height = r.value("sensor_height", spec.pose_rule.sensor_height);
    }
    if (j.contains("test_regions")) {
      for (const auto& r : j["test_regions"]) {
        if (!r.is_array() || r.size() != 4)
          throw ParseError("test region must be [x_min, y_min, x_max, y_max]");
        spec.test_regions.push_back(
            {r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>()});
      }
    }
    spec.rng_seed = j.value("rng_seed", spec.rng_seed);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("dataset spec json: ") + e.what());
  }
  spec.validate();
  return spec;
}

DatasetSpec load_dataset_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return dataset_spec_from_json(j);
}

}  // namespace travkit
