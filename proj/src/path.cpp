#include "msde/path.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace msde {

SampleSeries subsample(const Path& path, double delta) {
  if (path.slow.size() < 2) throw std::invalid_argument("path too short to subsample");
  if (delta < path.dt) throw std::invalid_argument("subsampling interval below path resolution");
  const std::size_t m = static_cast<std::size_t>(std::llround(delta / path.dt));
  if (m < 1) throw std::invalid_argument("subsampling interval below path resolution");
  SampleSeries s;
  s.delta = static_cast<double>(m) * path.dt;
  s.epsilon = path.epsilon;
  s.origin_dt = path.dt;
  for (std::size_t i = 0; i < path.slow.size(); i += m) s.values.push_back(path.slow[i]);
  s.n_count = s.values.size();
  if (s.n_count < 2) throw std::invalid_argument("subsampling leaves fewer than two samples");
  return s;
}

Path drop_initial_fraction(const Path& path, double fraction) {
  if (!(fraction >= 0.0 && fraction < 0.5)) {
    throw std::invalid_argument("burn-in fraction must lie in [0, 0.5)");
  }
  const std::size_t n_steps = path.slow.size() - 1;
  const std::size_t drop = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n_steps)));
  if (drop == 0) return path;
  Path out;
  out.t0 = path.t0 + static_cast<double>(drop) * path.dt;
  out.dt = path.dt;
  out.epsilon = path.epsilon;
  out.seed = path.seed;
  out.model_name = path.model_name;
  out.slow.assign(path.slow.begin() + static_cast<std::ptrdiff_t>(drop), path.slow.end());
  if (path.has_fast()) {
    out.fast.assign(path.fast.begin() + static_cast<std::ptrdiff_t>(drop), path.fast.end());
  }
  return out;
}

void write_path_csv(const Path& path, const std::string& csv_file, std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("stride must be positive");
  std::FILE* f = std::fopen(csv_file.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + csv_file + " for writing");
  std::fprintf(f, path.has_fast() ? "t,x,y\n" : "t,x\n");
  for (std::size_t i = 0; i < path.slow.size(); i += stride) {
    const double t = path.t0 + static_cast<double>(i) * path.dt;
    if (path.has_fast()) {
      std::fprintf(f, "%.17g,%.17g,%.17g\n", t, path.slow[i], path.fast[i]);
    } else {
      std::fprintf(f, "%.17g,%.17g\n", t, path.slow[i]);
    }
  }
  std::fclose(f);
}

void write_path_meta(const Path& path, const std::string& meta_file) {
  std::FILE* f = std::fopen(meta_file.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + meta_file + " for writing");
  std::fprintf(f, "model = %s\n", path.model_name.c_str());
  std::fprintf(f, "seed = %llu\n", static_cast<unsigned long long>(path.seed));
  std::fprintf(f, "dt = %.17g\n", path.dt);
  std::fprintf(f, "epsilon = %.17g\n", path.epsilon);
  std::fprintf(f, "t0 = %.17g\n", path.t0);
  std::fprintf(f, "points = %zu\n", path.slow.size());
  std::fclose(f);
}

}  // namespace msde
