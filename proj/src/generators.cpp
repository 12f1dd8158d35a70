// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include "vpf/generators.hpp"

#include <numbers>

namespace vpf::gen {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

template <std::size_t Dim>
SparseTensor<Dim> sparse_tensor(Rng& rng, const Coord<Dim>& extents, double density,
                                int channels, int stride) {
  SparseTensor<Dim> t;
  t.extents = extents;
  t.stride = stride;
  std::size_t volume = 1;
  for (auto e : extents) volume *= static_cast<std::size_t>(e);
  std::vector<Real> values;
  for (std::size_t lin = 0; lin < volume; ++lin) {
    if (uniform(rng, 0, 1) >= density) continue;
    Coord<Dim> c{};
    std::size_t rest = lin;
    for (std::size_t a = Dim; a-- > 0;) {
      c[a] = static_cast<std::int32_t>(rest % static_cast<std::size_t>(extents[a]));
      rest /= static_cast<std::size_t>(extents[a]);
    }
    t.coords.push_back(c);
    for (int k = 0; k < channels; ++k) values.push_back(uniform(rng, -1, 1));
  }
  t.features = FeatureMatrix(t.coords.size(), static_cast<std::size_t>(channels));
  std::copy(values.begin(), values.end(), t.features.data().begin());
  return t;
}

template SparseTensor<2> sparse_tensor(Rng&, const Coord<2>&, double, int, int);
template SparseTensor<3> sparse_tensor(Rng&, const Coord<3>&, double, int, int);

std::pair<SparseTensor3D, SparseTensor2D> paired_tensors(Rng& rng, const Coord3& extents,
                                                         double density, int voxel_channels,
                                                         int pillar_channels) {
  auto voxels = sparse_tensor<3>(rng, extents, density, voxel_channels);
  SparseTensor2D pillars;
  pillars.extents = {extents[0], extents[1]};
  pillars.coords = bev_projection(voxels.coords);
  pillars.features = FeatureMatrix(pillars.coords.size(), static_cast<std::size_t>(pillar_channels));
  for (auto& v : pillars.features.data()) v = uniform(rng, -1, 1);
  return {std::move(voxels), std::move(pillars)};
}

PointCloud cloud(Rng& rng, const GridSpec& grid, std::size_t n) {
  PointCloud out;
  out.points.reserve(n);
  const auto& lo = grid.range_min();
  const auto& hi = grid.range_max();
  for (std::size_t i = 0; i < n; ++i) {
    const bool outside = uniform(rng, 0, 1) < 0.1;
    Point p;
    double* axes[3] = {&p.x, &p.y, &p.z};
    for (int a = 0; a < 3; ++a) {
      const double span = hi[a] - lo[a];
      *axes[a] = outside ? uniform(rng, lo[a] - 0.2 * span, hi[a] + 0.2 * span)
                         : uniform(rng, lo[a], hi[a]);
    }
    p.intensity = uniform(rng, 0, 1);
    out.points.push_back(p);
  }
  return out;
}

ConvWeights conv_weights(Rng& rng, int kernel_volume, int in, int out, bool with_bias) {
  auto w = ConvWeights::zeros(kernel_volume, in, out, with_bias);
  for (auto& v : w.kernel) v = uniform(rng, -1, 1);
  for (auto& v : w.bias) v = uniform(rng, -1, 1);
  return w;
}

Box3D box(Rng& rng, double spread, double min_dim, double max_dim, bool rotated) {
  Box3D b;
  for (auto& c : b.center) c = uniform(rng, -spread, spread);
  for (auto& d : b.dims) d = uniform(rng, min_dim, max_dim);
  b.heading = rotated ? canonical_heading(uniform(rng, -std::numbers::pi, std::numbers::pi)) : 0.0;
  return b;
}

}  // namespace vpf::gen
