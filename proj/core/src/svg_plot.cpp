/*
 Copyright 2026 The tankds Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "tankds/svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

#include "tankds/errors.hpp"

namespace tankds {
namespace {

constexpr double kCanvas = 600.0;
constexpr double kMargin = 30.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  Eigen::Vector2d lo, hi;
  double scale = 1.0;

  Eigen::Vector2d map(const Eigen::Vector2d& p) const {
    return {kMargin + (p.x() - lo.x()) * scale, kCanvas - kMargin - (p.y() - lo.y()) * scale};
  }
};

}  // namespace

std::vector<Arrow> field_arrows(const StabilizedDS& ds, const Eigen::Vector2d& lo,
                                const Eigen::Vector2d& hi, int nx, int ny) {
  if (ds.dim() != 2) throw DimensionMismatch("field_arrows: system is not 2-D");
  if (nx < 2 || ny < 2) throw InvalidParameter("field_arrows: grid needs at least 2x2 points");
  std::vector<Arrow> arrows;
  arrows.reserve(static_cast<std::size_t>(nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Eigen::Vector2d p(lo.x() + (hi.x() - lo.x()) * i / (nx - 1),
                              lo.y() + (hi.y() - lo.y()) * j / (ny - 1));
      const Eigen::VectorXd y = p - ds.goal();
      const TankState full = init_tank(y, ds.s_bar(), ds.gains());
      arrows.push_back({p, esds_velocity(ds, y, full).xdot});
    }
  }
  return arrows;
}

std::optional<std::string> plot_motion(const PlotInput& input) {
  Eigen::Index dim = 0;
  for (const auto& m : input.demos) dim = std::max(dim, m.cols());
  for (const auto& m : input.rollouts) dim = std::max(dim, m.cols());
  if (input.ds) dim = std::max(dim, input.ds->dim());
  if (dim != 2) return std::nullopt;

  Eigen::Vector2d lo = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector2d hi = -lo;
  auto extend = [&](const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      lo = lo.cwiseMin(m.row(r).transpose());
      hi = hi.cwiseMax(m.row(r).transpose());
    }
  };
  for (const auto& m : input.demos) extend(m);
  for (const auto& m : input.rollouts) extend(m);
  if (input.ds) extend(input.ds->goal().transpose());
  if (!lo.allFinite()) {
    lo.setConstant(-1.0);
    hi.setConstant(1.0);
  }
  const Eigen::Vector2d pad = 0.1 * (hi - lo).cwiseMax(1e-9) + Eigen::Vector2d::Constant(1e-3);
  lo -= pad;
  hi += pad;

  Frame frame{lo, hi, (kCanvas - 2.0 * kMargin) / (hi - lo).maxCoeff()};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kCanvas << "\" height=\""
      << kCanvas << "\" viewBox=\"0 0 " << kCanvas << ' ' << kCanvas << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!input.title.empty())
    svg << "<text x=\"" << kMargin << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">"
        << escape(input.title) << "</text>\n";

  if (input.ds && input.grid >= 2) {
    const auto arrows = field_arrows(*input.ds, lo, hi, input.grid, input.grid);
    double vmax = 0.0;
    for (const auto& a : arrows) vmax = std::max(vmax, a.velocity.norm());
    const double cell = (kCanvas - 2.0 * kMargin) / (input.grid - 1);
    const double gain = vmax > 0.0 ? 0.8 * cell / vmax : 0.0;
    svg << "<g id=\"field\" stroke=\"#3b6fb6\" stroke-width=\"1\">\n";
    for (const auto& a : arrows) {
      const Eigen::Vector2d b = frame.map(a.base);
      const Eigen::Vector2d tip = b + gain * Eigen::Vector2d(a.velocity.x(), -a.velocity.y());
      svg << "<line x1=\"" << num(b.x()) << "\" y1=\"" << num(b.y()) << "\" x2=\""
          << num(tip.x()) << "\" y2=\"" << num(tip.y()) << "\"/>\n";
    }
    svg << "</g>\n";
  }

  svg << "<g id=\"demos\" fill=\"#8b4513\">\n";
  for (const auto& m : input.demos)
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const Eigen::Vector2d p = frame.map(m.row(r).transpose());
      svg << "<circle cx=\"" << num(p.x()) << "\" cy=\"" << num(p.y()) << "\" r=\"1.5\"/>\n";
    }
  svg << "</g>\n";

  svg << "<g id=\"rollouts\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\">\n";
  for (const auto& m : input.rollouts) {
    if (m.rows() == 0) continue;
    svg << "<polyline points=\"";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const Eigen::Vector2d p = frame.map(m.row(r).transpose());
      svg << (r ? " " : "") << num(p.x()) << ',' << num(p.y());
    }
    svg << "\"/>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace tankds
