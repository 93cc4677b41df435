#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace msde {

/// Full-resolution trajectory. `fast` is empty for coarse-model paths, whose
/// epsilon tag is 0.
struct Path {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> slow;
  std::vector<double> fast;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::string model_name;

  bool has_fast() const { return !fast.empty(); }
  std::size_t size() const { return slow.size(); }
  double horizon() const { return dt * static_cast<double>(slow.size() - 1); }
};

/// delta-subsampled series x_n = x(n delta).
struct SampleSeries {
  double delta = 0.0;
  std::vector<double> values;
  double epsilon = 0.0;
  double origin_dt = 0.0;
  std::size_t n_count = 0;
};

/// Takes every m-th point of the path, m = round(delta / dt); the snapped
/// delta = m dt is recorded in the output. Throws on delta < dt or when
/// fewer than two samples result.
SampleSeries subsample(const Path& path, double delta);

/// Returns the path with the leading `fraction` of its steps removed
/// (burn-in discard); t0 is advanced accordingly.
Path drop_initial_fraction(const Path& path, double fraction);

/// CSV dump, header "t,x" or "t,x,y", one row per stored step; `stride`
/// thins on write. A text sidecar (same basename, extension ".meta") records
/// model, seed, dt and epsilon.
void write_path_csv(const Path& path, const std::string& csv_file, std::size_t stride = 1);
void write_path_meta(const Path& path, const std::string& meta_file);

}  // namespace msde
