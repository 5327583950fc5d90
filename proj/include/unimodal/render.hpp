#pragma once

// Bifurcation diagrams: per-parameter histograms of the critical orbit written
// as binary PGM rasters (density + analytic cycle overlay) and a CSV of cycles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "maps.hpp"
#include "numeric.hpp"
#include "structure.hpp"

namespace unimodal {

struct RenderSpec {
  Family family = Family::tent;
  double s_lo = 1.01;
  double s_hi = 2.0;
  int columns = 1200;
  int transient = 1000;
  int samples = 4000;
  int y_bins = 600;
  bool overlay_cycles = true;
  std::string out_path = "bifurcation";
};

inline Interval family_range(Family f) {
  switch (f) {
    case Family::tent: return {1.0, 2.0};
    case Family::logistic: return {0.0, 4.0};
    case Family::tu: return {0.0, tu_mu_max()};
    case Family::custom: break;
  }
  throw Error(Errc::invalid_parameter, "custom maps cannot be rendered");
}

inline void validate(const RenderSpec& spec) {
  Interval r = family_range(spec.family);
  if (spec.columns < 1 || spec.samples < 1 || spec.y_bins < 1 || spec.transient < 0)
    throw Error(Errc::invalid_parameter, "columns, samples and bins must be >= 1");
  bool ordered = spec.s_lo < spec.s_hi || (spec.columns == 1 && spec.s_lo == spec.s_hi);
  if (!ordered) throw Error(Errc::invalid_parameter, "parameter range must satisfy lo < hi");
  bool lo_ok = spec.family == Family::tu ? spec.s_lo >= r.lo : spec.s_lo > r.lo;
  if (!lo_ok || spec.s_hi > r.hi) throw Error(Errc::invalid_parameter, "parameter range outside the family's domain");
}

inline PiecewiseMap family_map(Family f, double param) {
  switch (f) {
    case Family::tent: return make_tent(param);
    case Family::logistic: return make_logistic(param);
    case Family::tu: return make_tu(param);
    case Family::custom: break;
  }
  throw Error(Errc::invalid_parameter, "custom maps cannot be rendered");
}

struct RenderColumn {
  double parameter = 0.0;
  std::vector<std::uint32_t> hist;  // bin 0 is the bottom of the domain
  std::vector<double> cycles;       // analytic repelling cycle points
};

inline double column_parameter(const RenderSpec& spec, int i) {
  if (spec.columns == 1) return spec.s_lo;
  return spec.s_lo + (spec.s_hi - spec.s_lo) * i / (spec.columns - 1);
}

/// Repelling cycles drawn over the density: the cascade N_0..N_{p-1} of a
/// tent map, the boundary 3-cycle of u_mu inside its window.
inline std::vector<double> overlay_points(Family family, double param) {
  std::vector<double> pts;
  if (family == Family::tent) {
    int p = node_depth(param);
    if (p > 12) return {0.0};
    for (const auto& n : analytic_nodes(param))
      if (!n.is_attractor())
        for (const auto& iv : n.support) pts.push_back(iv.lo);
  } else if (family == Family::tu) {
    pts.push_back(0.0);
    try {
      auto u = make_tu(param);
      for (double x : tu_region(u).gamma.points) pts.push_back(x);
    } catch (const Error&) {
    }
  }
  return pts;
}

inline RenderColumn render_column(const RenderSpec& spec, double param) {
  auto f = family_map(spec.family, param);
  RenderColumn col;
  col.parameter = param;
  col.hist.assign(static_cast<std::size_t>(spec.y_bins), 0);
  const Interval d = f.domain();
  double x = f.critical();
  for (int i = 0; i < spec.transient; ++i) x = f.eval(x);
  for (int i = 0; i < spec.samples; ++i) {
    x = f.eval(x);
    int b = static_cast<int>((x - d.lo) / d.length() * spec.y_bins);
    b = std::clamp(b, 0, spec.y_bins - 1);
    ++col.hist[static_cast<std::size_t>(b)];
  }
  if (spec.overlay_cycles) col.cycles = overlay_points(spec.family, param);
  return col;
}

inline std::vector<RenderColumn> render_columns(const RenderSpec& spec) {
  validate(spec);
  std::vector<RenderColumn> cols(static_cast<std::size_t>(spec.columns));
  parallel_for(cols.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) cols[i] = render_column(spec, column_parameter(spec, static_cast<int>(i)));
  });
  return cols;
}

/// Connected runs of occupied bins, bridging empty gaps of at most max_gap bins.
inline int count_components(const std::vector<std::uint32_t>& hist, int max_gap = 1) {
  int comps = 0;
  int last = -1;
  for (int i = 0; i < static_cast<int>(hist.size()); ++i) {
    if (hist[static_cast<std::size_t>(i)] == 0) continue;
    if (last < 0 || i - last - 1 > max_gap) ++comps;
    last = i;
  }
  return comps;
}

/// Raster rows run top (high y) to bottom. Density pixels are 255 on empty
/// bins and darken with the square root of the relative bin count.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> density;
  std::vector<std::uint8_t> overlay;
};

inline Raster rasterize(const RenderSpec& spec, const std::vector<RenderColumn>& cols) {
  Raster r;
  r.width = static_cast<int>(cols.size());
  r.height = spec.y_bins;
  r.density.assign(static_cast<std::size_t>(r.width) * r.height, 255);
  r.overlay.assign(static_cast<std::size_t>(r.width) * r.height, 0);
  for (int c = 0; c < r.width; ++c) {
    const auto& col = cols[static_cast<std::size_t>(c)];
    std::uint32_t peak = *std::max_element(col.hist.begin(), col.hist.end());
    for (int b = 0; b < r.height; ++b) {
      std::size_t px = static_cast<std::size_t>(r.height - 1 - b) * r.width + c;
      std::uint32_t n = col.hist[static_cast<std::size_t>(b)];
      if (n > 0 && peak > 0) {
        double v = std::sqrt(static_cast<double>(n) / peak);
        r.density[px] = static_cast<std::uint8_t>(std::lround(200.0 * (1.0 - v)));
      }
    }
    for (double y : col.cycles) {
      int b = std::clamp(static_cast<int>(y * r.height), 0, r.height - 1);
      r.overlay[static_cast<std::size_t>(r.height - 1 - b) * r.width + c] = 255;
    }
  }
  return r;
}

inline void write_pgm(const std::string& path, int w, int h, const std::vector<std::uint8_t>& px) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::io, "cannot open " + path + " for writing");
  os << "P5 " << w << ' ' << h << " 255\n";
  os.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!os) throw Error(Errc::io, "write failed for " + path);
}

struct RenderFiles {
  std::string density;
  std::string overlay;
  std::string csv;
};

/// Writes <out>.pgm, <out>_cycles.pgm and <out>.csv.
inline RenderFiles write_render(const RenderSpec& spec, const std::vector<RenderColumn>& cols) {
  RenderFiles files{spec.out_path + ".pgm", spec.out_path + "_cycles.pgm", spec.out_path + ".csv"};
  auto r = rasterize(spec, cols);
  write_pgm(files.density, r.width, r.height, r.density);
  write_pgm(files.overlay, r.width, r.height, r.overlay);
  std::ofstream csv(files.csv);
  if (!csv) throw Error(Errc::io, "cannot open " + files.csv + " for writing");
  csv.precision(17);
  csv << "parameter,point\n";
  for (const auto& col : cols)
    for (double y : col.cycles) csv << col.parameter << ',' << y << '\n';
  if (!csv) throw Error(Errc::io, "write failed for " + files.csv);
  return files;
}

}  // namespace unimodal
