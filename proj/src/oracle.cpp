// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include "vpf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace vpf::oracle {

namespace {

template <std::size_t Dim>
std::size_t volume(const Coord<Dim>& e) {
  std::size_t v = 1;
  for (auto x : e) v *= static_cast<std::size_t>(std::max(x, 0));
  return v;
}

template <std::size_t Dim>
std::size_t flat(const Coord<Dim>& c, const Coord<Dim>& e) {
  std::size_t idx = 0;
  for (std::size_t a = 0; a < Dim; ++a) idx = idx * static_cast<std::size_t>(e[a]) + c[a];
  return idx;
}

template <std::size_t Dim>
Coord<Dim> unflat(std::size_t idx, const Coord<Dim>& e) {
  Coord<Dim> c{};
  for (std::size_t a = Dim; a-- > 0;) {
    c[a] = static_cast<std::int32_t>(idx % static_cast<std::size_t>(e[a]));
    idx /= static_cast<std::size_t>(e[a]);
  }
  return c;
}

std::array<double, 3> local_coords(const Box3D& b, double x, double y, double z) {
  const double dx = x - b.center[0];
  const double dy = y - b.center[1];
  const double c = std::cos(-b.heading);
  const double s = std::sin(-b.heading);
  return {c * dx - s * dy, s * dx + c * dy, z - b.center[2]};
}

bool inside(const Box3D& b, const std::array<double, 3>& l) {
  return std::abs(l[0]) <= b.dims[0] / 2 && std::abs(l[1]) <= b.dims[1] / 2 &&
         std::abs(l[2]) <= b.dims[2] / 2;
}

}  // namespace

template <std::size_t Dim>
SparseTensor<Dim> dense_conv(const SparseTensor<Dim>& x, const ConvSpec<Dim>& spec,
                             const ConvWeights& w) {
  const std::size_t cin = x.channels();
  const auto cout = static_cast<std::size_t>(spec.out_channels);
  const bool subm = spec.mode == ConvMode::Submanifold;

  const std::size_t vin = volume(x.extents);
  std::vector<Real> dense(vin * cin, 0);
  std::vector<std::uint8_t> active(vin, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t f = flat(x.coords[i], x.extents);
    active[f] = 1;
    for (std::size_t ch = 0; ch < cin; ++ch) dense[f * cin + ch] = x.features(i, ch);
  }

  Coord<Dim> out_ext{};
  for (std::size_t a = 0; a < Dim; ++a) {
    const int span = x.extents[a] + 2 * spec.padding[a] - spec.kernel[a];
    out_ext[a] = subm ? x.extents[a] : (span < 0 ? 0 : span / spec.stride[a] + 1);
  }
  const std::size_t kvol = volume(spec.kernel);

  SparseTensor<Dim> out;
  out.extents = out_ext;
  out.stride = x.stride * (subm ? 1 : spec.stride[0]);
  std::vector<Real> values;
  for (std::size_t lin = 0; lin < volume(out_ext); ++lin) {
    const Coord<Dim> o = unflat(lin, out_ext);
    std::vector<Real> acc(cout, 0);
    bool touched = false;
    for (std::size_t k = 0; k < kvol; ++k) {
      const Coord<Dim> off = unflat(k, spec.kernel);
      Coord<Dim> c{};
      bool ok = true;
      for (std::size_t a = 0; a < Dim; ++a) {
        const int s = subm ? 1 : spec.stride[a];
        c[a] = o[a] * s - spec.padding[a] + off[a];
        ok = ok && c[a] >= 0 && c[a] < x.extents[a];
      }
      if (!ok) continue;
      const std::size_t f = flat(c, x.extents);
      if (!active[f]) continue;
      touched = true;
      for (std::size_t ci = 0; ci < cin; ++ci) {
        for (std::size_t co = 0; co < cout; ++co) {
          acc[co] += dense[f * cin + ci] *
                     w.at(static_cast<int>(k), static_cast<int>(ci), static_cast<int>(co));
        }
      }
    }
    const bool keep = subm ? active[flat(o, x.extents)] != 0 : touched;
    if (!keep) continue;
    out.coords.push_back(o);
    for (std::size_t co = 0; co < cout; ++co) {
      values.push_back(acc[co] + (w.has_bias() ? w.bias[co] : 0));
    }
  }
  out.features = FeatureMatrix(out.coords.size(), cout);
  std::copy(values.begin(), values.end(), out.features.data().begin());
  return out;
}

template SparseTensor<2> dense_conv(const SparseTensor<2>&, const ConvSpec<2>&, const ConvWeights&);
template SparseTensor<3> dense_conv(const SparseTensor<3>&, const ConvSpec<3>&, const ConvWeights&);

std::vector<std::vector<std::uint8_t>> index_matrix(const SparseTensor3D& voxels,
                                                    const SparseTensor2D& pillars) {
  std::vector<std::vector<std::uint8_t>> c(voxels.size(),
                                           std::vector<std::uint8_t>(pillars.size(), 0));
  for (std::size_t i = 0; i < voxels.size(); ++i) {
    for (std::size_t j = 0; j < pillars.size(); ++j) {
      c[i][j] = voxels.coords[i][0] == pillars.coords[j][0] &&
                voxels.coords[i][1] == pillars.coords[j][1];
    }
  }
  return c;
}

FeatureMatrix group_max(const SparseTensor3D& voxels, const SparseTensor2D& pillars) {
  const std::size_t ch = voxels.channels();
  FeatureMatrix out(pillars.size(), ch, -std::numeric_limits<Real>::infinity());
  for (std::size_t j = 0; j < pillars.size(); ++j) {
    for (std::size_t i = 0; i < voxels.size(); ++i) {
      if (voxels.coords[i][0] != pillars.coords[j][0] ||
          voxels.coords[i][1] != pillars.coords[j][1]) {
        continue;
      }
      for (std::size_t k = 0; k < ch; ++k) out(j, k) = std::max(out(j, k), voxels.features(i, k));
    }
  }
  return out;
}

FeatureMatrix group_broadcast(const SparseTensor2D& pillars, const SparseTensor3D& voxels) {
  const std::size_t ch = pillars.channels();
  FeatureMatrix out(voxels.size(), ch, std::numeric_limits<Real>::quiet_NaN());
  for (std::size_t i = 0; i < voxels.size(); ++i) {
    for (std::size_t j = 0; j < pillars.size(); ++j) {
      if (voxels.coords[i][0] == pillars.coords[j][0] &&
          voxels.coords[i][1] == pillars.coords[j][1]) {
        for (std::size_t k = 0; k < ch; ++k) out(i, k) = pillars.features(j, k);
      }
    }
  }
  return out;
}

double monte_carlo_iou(const Box3D& a, const Box3D& b, std::size_t samples, std::uint64_t seed) {
  std::array<double, 3> lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
                           std::numeric_limits<double>::max()};
  std::array<double, 3> hi{-lo[0], -lo[1], -lo[2]};
  for (const Box3D* box : {&a, &b}) {
    for (int sx : {-1, 1}) {
      for (int sy : {-1, 1}) {
        const double lx = sx * box->dims[0] / 2;
        const double ly = sy * box->dims[1] / 2;
        const double x = box->center[0] + lx * std::cos(box->heading) - ly * std::sin(box->heading);
        const double y = box->center[1] + lx * std::sin(box->heading) + ly * std::cos(box->heading);
        lo[0] = std::min(lo[0], x);
        hi[0] = std::max(hi[0], x);
        lo[1] = std::min(lo[1], y);
        hi[1] = std::max(hi[1], y);
      }
    }
    lo[2] = std::min(lo[2], box->center[2] - box->dims[2] / 2);
    hi[2] = std::max(hi[2], box->center[2] + box->dims[2] / 2);
  }
  std::mt19937_64 rng(seed);
  std::array<std::uniform_real_distribution<double>, 3> u{
      std::uniform_real_distribution<double>(lo[0], hi[0]),
      std::uniform_real_distribution<double>(lo[1], hi[1]),
      std::uniform_real_distribution<double>(lo[2], hi[2])};
  std::size_t in_a = 0;
  std::size_t in_b = 0;
  std::size_t both = 0;
  for (std::size_t n = 0; n < samples; ++n) {
    const double x = u[0](rng);
    const double y = u[1](rng);
    const double z = u[2](rng);
    const bool ia = inside(a, local_coords(a, x, y, z));
    const bool ib = inside(b, local_coords(b, x, y, z));
    in_a += ia;
    in_b += ib;
    both += ia && ib;
  }
  const std::size_t uni = in_a + in_b - both;
  return uni == 0 ? 0 : static_cast<double>(both) / static_cast<double>(uni);
}

BinCounts density_bins(const PointCloud& cloud, const Box3D& box) {
  BinCounts out;
  const double h = box.dims[2];
  for (const auto& p : cloud.points) {
    const auto l = local_coords(box, p.x, p.y, p.z);
    if (!inside(box, l)) continue;
    ++out.inside;
    for (int k = 0; k < kDensityBins; ++k) {
      const double lo = -h / 2 + k * h / kDensityBins;
      const double hi = -h / 2 + (k + 1) * h / kDensityBins;
      if (l[2] >= lo && (l[2] < hi || k == kDensityBins - 1)) {
        ++out.z[k];
        break;
      }
    }
  }
  return out;
}

std::size_t max_matching(const std::vector<std::vector<bool>>& eligible) {
  const std::size_t g_count = eligible.size();
  const std::size_t p_count = g_count == 0 ? 0 : eligible[0].size();
  check(p_count <= 16, ErrorCode::InvalidArgument, "exhaustive matching supports 16 predictions");
  const std::size_t masks = std::size_t{1} << p_count;
  // best[g][mask]: largest matching of gts g.. given predictions in `mask` are taken.
  std::vector<std::vector<std::size_t>> best(g_count + 1, std::vector<std::size_t>(masks, 0));
  for (std::size_t g = g_count; g-- > 0;) {
    for (std::size_t mask = 0; mask < masks; ++mask) {
      std::size_t v = best[g + 1][mask];
      for (std::size_t p = 0; p < p_count; ++p) {
        if (eligible[g][p] && !(mask & (std::size_t{1} << p))) {
          v = std::max(v, 1 + best[g + 1][mask | (std::size_t{1} << p)]);
        }
      }
      best[g][mask] = v;
    }
  }
  return best[0][0];
}

SparseTensor2D height_compress(const SparseTensor3D& x) {
  const auto [L, W, H] = x.extents;
  const std::size_t ch = x.channels();
  const std::size_t slot = static_cast<std::size_t>(H) * ch;
  std::vector<Real> dense(static_cast<std::size_t>(L) * W * slot, 0);
  std::vector<std::uint8_t> column(static_cast<std::size_t>(L) * W, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& c = x.coords[i];
    const std::size_t col = static_cast<std::size_t>(c[0]) * W + c[1];
    column[col] = 1;
    for (std::size_t k = 0; k < ch; ++k) {
      dense[col * slot + static_cast<std::size_t>(c[2]) * ch + k] = x.features(i, k);
    }
  }
  SparseTensor2D out;
  out.extents = {L, W};
  out.stride = x.stride;
  std::vector<Real> values;
  for (std::size_t col = 0; col < column.size(); ++col) {
    if (!column[col]) continue;
    out.coords.push_back({static_cast<std::int32_t>(col / W), static_cast<std::int32_t>(col % W)});
    values.insert(values.end(), dense.begin() + col * slot, dense.begin() + (col + 1) * slot);
  }
  out.features = FeatureMatrix(out.coords.size(), slot);
  std::copy(values.begin(), values.end(), out.features.data().begin());
  return out;
}

DenseFeatureMap merge(const SparseTensor2D& fine, const SparseTensor2D& coarse) {
  const auto ch = static_cast<int>(fine.channels());
  DenseFeatureMap out(fine.extents[0], fine.extents[1], ch, fine.stride);
  auto add = [&](const Coord2& c, std::span<const Real> f) {
    if (c[0] < 0 || c[0] >= out.rows || c[1] < 0 || c[1] >= out.cols) return;
    for (int k = 0; k < ch; ++k) out.values[(static_cast<std::size_t>(c[0]) * out.cols + c[1]) * ch + k] += f[k];
  };
  for (std::size_t i = 0; i < fine.size(); ++i) add(fine.coords[i], fine.features.row(i));
  const int ratio = coarse.stride / fine.stride;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    add({coarse.coords[i][0] * ratio, coarse.coords[i][1] * ratio}, coarse.features.row(i));
  }
  return out;
}

double focal(double p, bool positive, double alpha, double gamma) {
  const double q = std::min(std::max(p, 1e-7), 1 - 1e-7);
  if (positive) return -alpha * std::pow(1 - q, gamma) * std::log(q);
  return -(1 - alpha) * std::pow(q, gamma) * std::log(1 - q);
}

double overall_loss(const std::vector<ClassificationTerm>& cls, const std::vector<IouTerm>& iou,
                    const std::vector<RegressionTerm>& reg, const std::vector<DiouTerm>& diou,
                    const LossWeights& weights) {
  auto mean = [](double sum, std::size_t n) { return n == 0 ? 0.0 : sum / static_cast<double>(n); };
  double l_cls = 0;
  for (const auto& t : cls) l_cls += focal(t.p, t.positive, weights.focal_alpha, weights.focal_gamma);
  double l_iou = 0;
  for (const auto& t : iou) {
    const double target = std::min(1.0, std::max(-1.0, 2 * t.iou - 0.5));
    l_iou += std::abs(t.predicted - target);
  }
  double l_reg = 0;
  for (const auto& t : reg) {
    for (std::size_t k = 0; k < t.target.size(); ++k) {
      if (!weights.reg_mask.empty() && !weights.reg_mask[k]) continue;
      l_reg += std::abs(t.predicted[k] - t.target[k]);
    }
  }
  double l_diou = 0;
  for (const auto& t : diou) l_diou += diou_loss(t.box, t.gt);
  return mean(l_cls, cls.size()) + mean(l_iou, iou.size()) +
         weights.gamma * (mean(l_diou, diou.size()) + mean(l_reg, reg.size()));
}

}  // namespace vpf::oracle
