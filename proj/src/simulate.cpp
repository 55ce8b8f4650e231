#include "notears/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "notears/errors.hpp"
#include "notears/graphs.hpp"
#include "notears/rng.hpp"

#include <json.hpp>

namespace notears {

namespace {

constexpr double kEulerGamma = 0.57721566490153286;

double draw_noise(Rng& rng, const NoiseKind& noise) {
  switch (noise.kind) {
    case NoiseKind::Kind::gaussian:
      return rng.normal(0.0, noise.scale);
    case NoiseKind::Kind::exponential:
      return rng.exponential(noise.scale) - noise.scale;
    case NoiseKind::Kind::gumbel:
      return rng.gumbel(noise.scale) - noise.scale * kEulerGamma;
  }
  return 0.0;
}

const char* noise_name(NoiseKind::Kind k) {
  switch (k) {
    case NoiseKind::Kind::gaussian: return "gaussian";
    case NoiseKind::Kind::exponential: return "exponential";
    case NoiseKind::Kind::gumbel: return "gumbel";
  }
  return "?";
}

}  // namespace

Dataset simulate_linear_sem(const Mat& W, int n, const NoiseKind& noise, uint64_t seed) {
  if (n < 1) throw invalid_argument_error("simulate_linear_sem: n must be >= 1");
  if (noise.scale <= 0.0) throw invalid_argument_error("noise scale must be > 0");
  const std::vector<int> order = topological_order(W, 0.0);
  const int d = static_cast<int>(W.rows());

  Rng rng(seed);
  Dataset data;
  data.kind = DataKind::continuous;
  data.X = Mat::Zero(n, d);
  for (int j : order) {
    Vec z(n);
    for (int i = 0; i < n; ++i) z(i) = draw_noise(rng, noise);
    data.X.col(j) = data.X * W.col(j) + z;
  }
  return data;
}

Dataset simulate_logistic_sem(const Mat& W, int n, uint64_t seed) {
  if (n < 1) throw invalid_argument_error("simulate_logistic_sem: n must be >= 1");
  const std::vector<int> order = topological_order(W, 0.0);
  const int d = static_cast<int>(W.rows());

  Rng rng(seed);
  Dataset data;
  data.kind = DataKind::binary;
  data.X = Mat::Zero(n, d);
  for (int j : order) {
    const Vec t = data.X * W.col(j);
    for (int i = 0; i < n; ++i) {
      const double p = 1.0 / (1.0 + std::exp(-t(i)));
      data.X(i, j) = rng.uniform() < p ? 1.0 : 0.0;
    }
  }
  return data;
}

void save_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw error("cannot open for writing: " + path);
  char buf[40];
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.d(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", data.X(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

void save_dataset_meta(const Dataset& data, const NoiseKind& noise, uint64_t seed,
                       const std::string& graph_file, const std::string& path) {
  nlohmann::json meta;
  meta["n"] = data.n();
  meta["d"] = data.d();
  meta["kind"] = data.kind == DataKind::binary ? "binary" : "continuous";
  meta["seed"] = seed;
  meta["noise"] = {{"kind", noise_name(noise.kind)}, {"scale", noise.scale}};
  meta["graph_file"] = graph_file;
  std::ofstream out(path);
  if (!out) throw error("cannot open for writing: " + path);
  out << meta.dump(2) << '\n';
}

}  // namespace notears
