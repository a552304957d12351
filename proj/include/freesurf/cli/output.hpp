#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "freesurf/common.hpp"
#include "freesurf/diagnostics.hpp"
#include "freesurf/integrate.hpp"

namespace freesurf::cli {

namespace fs = std::filesystem;

/// 17 significant digits; reads back bit-exact.
inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw InvalidInput("cannot open '" + p.string() + "' for writing");
  return f;
}

template <class Json>
void write_json(const fs::path& p, const Json& j) {
  auto f = open_out(p);
  f << j.dump(2) << '\n';
}

/// Frame samples: t, j, theta, X, Y, ReUbar, ImUbar.
class FrameWriter {
 public:
  static constexpr const char* header = "t,j,theta,X,Y,ReUbar,ImUbar";

  FrameWriter(const fs::path& p, std::size_t stride) : out_(open_out(p)), stride_(stride) { out_ << header << '\n'; }

  void write(const integrate::Frame& f) {
    const std::size_t n = f.Z.size();
    const std::string t = num(f.t);
    for (std::size_t j = 0; j < n; j += stride_) {
      const double th = 2.0 * pi * static_cast<double>(j) / static_cast<double>(n);
      out_ << t << ',' << j << ',' << num(th) << ',' << num(f.Z[j].real()) << ',' << num(f.Z[j].imag()) << ','
           << num(f.U[j].real()) << ',' << num(f.U[j].imag()) << '\n';
    }
  }

 private:
  std::ofstream out_;
  std::size_t stride_;
};

class DiagnosticsWriter {
 public:
  explicit DiagnosticsWriter(const fs::path& p) : out_(open_out(p)) {
    out_ << diagnostics::DiagnosticRecord::csv_header << '\n';
  }

  void write(const diagnostics::DiagnosticRecord& r) {
    out_ << num(r.t) << ',' << num(r.area) << ',' << num(r.kinetic) << ',' << num(r.surface_energy) << ','
         << num(r.potential_energy) << ',' << num(r.total_energy) << ',' << num(r.minJ) << ','
         << num(r.maxCurvature) << ',' << num(r.min_boundary_gap) << ',' << num(r.neg_mode_energy) << '\n';
  }

 private:
  std::ofstream out_;
};

/// Labelled planar curves: t, k, X, Y.
inline void write_curves(const fs::path& p, const std::vector<double>& times, const std::vector<CVec>& curves) {
  auto f = open_out(p);
  f << "t,k,X,Y\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const std::string t = num(times[i]);
    for (std::size_t k = 0; k < curves[i].size(); ++k) {
      f << t << ',' << k << ',' << num(curves[i][k].real()) << ',' << num(curves[i][k].imag()) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// SVG

struct SvgView {
  double x0, x1, y0, y1;
};

/// Bounding box of the curves; heavy-tailed samples (unbounded interfaces)
/// are clipped to the 90th percentile of |z - median|.
inline SvgView auto_view(const std::vector<CVec>& curves) {
  std::vector<cplx> pts;
  for (const auto& c : curves) {
    for (auto z : c) {
      if (std::isfinite(z.real()) && std::isfinite(z.imag())) pts.push_back(z);
    }
  }
  if (pts.empty()) return {-1, 1, -1, 1};
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    return v[v.size() / 2];
  };
  std::vector<double> xs, ys;
  for (auto z : pts) {
    xs.push_back(z.real());
    ys.push_back(z.imag());
  }
  const cplx c(median(xs), median(ys));
  std::vector<double> d;
  for (auto z : pts) d.push_back(std::abs(z - c));
  std::sort(d.begin(), d.end());
  const double q90 = d[static_cast<std::size_t>(0.9 * static_cast<double>(d.size() - 1))];
  const double cut = d.back() > 4.0 * q90 ? 2.0 * q90 : d.back();
  SvgView v{INFINITY, -INFINITY, INFINITY, -INFINITY};
  for (auto z : pts) {
    if (std::abs(z - c) > cut) continue;
    v.x0 = std::min(v.x0, z.real());
    v.x1 = std::max(v.x1, z.real());
    v.y0 = std::min(v.y0, z.imag());
    v.y1 = std::max(v.y1, z.imag());
  }
  const double pad = 0.05 * std::max({v.x1 - v.x0, v.y1 - v.y0, 1e-12});
  return {v.x0 - pad, v.x1 + pad, v.y0 - pad, v.y1 + pad};
}

/// Polyline plot with axes and equal aspect ratio.
inline void write_svg(const fs::path& p, const std::vector<CVec>& curves, const std::vector<std::string>& labels,
                      const std::string& title, bool closed = true) {
  const SvgView v = auto_view(curves);
  const double W = 640, margin = 50;
  const double span = std::max(v.x1 - v.x0, v.y1 - v.y0);
  const double s = (W - 2 * margin) / span;
  const double H = (v.y1 - v.y0) * s + 2 * margin;
  const double Wd = (v.x1 - v.x0) * s + 2 * margin;
  auto px = [&](double x) { return margin + (x - v.x0) * s; };
  auto py = [&](double y) { return H - margin - (y - v.y0) * s; };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

  auto f = open_out(p);
  char buf[128];
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(Wd + 80) << "\" height=\"" << num(H) << "\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  f << "<defs><clipPath id=\"plot\"><rect x=\"" << margin << "\" y=\"" << margin << "\" width=\""
    << num(Wd - 2 * margin) << "\" height=\"" << num(H - 2 * margin) << "\"/></clipPath></defs>\n";
  f << "<text x=\"" << margin << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  f << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << num(Wd - 2 * margin) << "\" height=\""
    << num(H - 2 * margin) << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (v.x0 < 0 && v.x1 > 0) {
    f << "<line x1=\"" << num(px(0)) << "\" y1=\"" << margin << "\" x2=\"" << num(px(0)) << "\" y2=\""
      << num(H - margin) << "\" stroke=\"#bbb\"/>\n";
  }
  if (v.y0 < 0 && v.y1 > 0) {
    f << "<line x1=\"" << margin << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(Wd - margin) << "\" y2=\""
      << num(py(0)) << "\" stroke=\"#bbb\"/>\n";
  }
  auto label = [&](double x, double y, double value, const char* anchor) {
    std::snprintf(buf, sizeof buf, "%.4g", value);
    f << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\" font-size=\"11\" "
      << "text-anchor=\"" << anchor << "\">" << buf << "</text>\n";
  };
  label(margin, H - margin + 15, v.x0, "start");
  label(Wd - margin, H - margin + 15, v.x1, "end");
  label(margin - 4, H - margin, v.y0, "end");
  label(margin - 4, margin + 10, v.y1, "end");

  f << "<g clip-path=\"url(#plot)\" fill=\"none\" stroke-width=\"1.2\">\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    f << "<polyline stroke=\"" << colors[i % 10] << "\" points=\"";
    auto put = [&](cplx z) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(std::clamp(z.real(), v.x0 - span, v.x1 + span)),
                    py(std::clamp(z.imag(), v.y0 - span, v.y1 + span)));
      f << buf;
    };
    for (auto z : curves[i]) put(z);
    if (closed && !curves[i].empty()) put(curves[i].front());
    f << "\"/>\n";
  }
  f << "</g>\n";
  for (std::size_t i = 0; i < labels.size() && i < curves.size(); ++i) {
    f << "<text x=\"" << num(Wd - margin + 4) << "\" y=\"" << num(margin + 14.0 * (i + 1))
      << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << colors[i % 10] << "\">" << labels[i]
      << "</text>\n";
  }
  f << "</svg>\n";
}

}  // namespace freesurf::cli
