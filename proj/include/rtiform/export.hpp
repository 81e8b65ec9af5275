#pragma once

// CSV and SVG output for trajectory logs.

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <system_error>
#include <vector>

#include "rtiform/simulator.hpp"

namespace rti {

inline constexpr const char* kTrajectoryCsvHeader =
    "t,uav_id,px,py,pz,qw,qx,qy,qz,wx,wy,wz,vx,err_norm,rel_phi,rel_theta,rel_psi,sat_flag";

/// Unit quaternion (w, x, y, z) with w >= 0.
inline Eigen::Vector4d rotation_to_quaternion(const Rotation& R) {
  Eigen::Quaterniond q(R);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return {q.w(), q.x(), q.y(), q.z()};
}

namespace detail {

/// Shortest round-trip representation; identical bits give identical text.
inline void append_number(std::string& out, double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace detail

inline std::string trajectory_csv(const TrajectoryLog& log) {
  std::string out = kTrajectoryCsvHeader;
  out += '\n';
  out.reserve(log.rows.size() * 220);
  for (const auto& r : log.rows) {
    const Eigen::Vector4d q = rotation_to_quaternion(r.pose.rotation);
    detail::append_number(out, r.time);
    out += ',';
    out += std::to_string(r.uav);
    const double fields[] = {r.pose.position.x(), r.pose.position.y(), r.pose.position.z(),
                             q[0], q[1], q[2], q[3],
                             r.twist.angular.x(), r.twist.angular.y(), r.twist.angular.z(),
                             r.twist.linear.x(), r.error_norm,
                             r.relative.roll, r.relative.pitch, r.relative.yaw};
    for (double v : fields) {
      out += ',';
      detail::append_number(out, v);
    }
    out += ',';
    out += std::to_string(r.flags);
    out += '\n';
  }
  return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

inline void export_csv(const TrajectoryLog& log, const std::filesystem::path& path) {
  if (log.rows.empty()) throw Error(ErrorCode::kInvalidArgument, "empty trajectory log");
  write_text_file(path, trajectory_csv(log));
}

namespace detail {

struct Panel {
  double x0, y0, w, h;           // placement in the document
  double xmin, xmax, ymin, ymax; // data range
  std::string title, xlabel, ylabel;

  [[nodiscard]] double sx(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
  [[nodiscard]] double sy(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

inline void pad_range(double& lo, double& hi) {
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double m = 0.05 * (hi - lo);
  lo -= m;
  hi += m;
}

inline std::string color_for(NodeId uav, std::size_t count) {
  if (uav == 0) return "#1f4fd6";
  // Followers in shades of green.
  const double f = count > 2 ? static_cast<double>(uav - 1) / static_cast<double>(count - 2) : 0.0;
  const int g = static_cast<int>(150 + 70 * f);
  const int r = static_cast<int>(20 + 60 * f);
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, 40);
  return buf;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline void draw_frame(std::string& svg, const Panel& p) {
  svg += "<rect x=\"" + num(p.x0) + "\" y=\"" + num(p.y0) + "\" width=\"" + num(p.w) +
         "\" height=\"" + num(p.h) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  svg += "<text x=\"" + num(p.x0 + p.w / 2) + "\" y=\"" + num(p.y0 - 8) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + p.title + "</text>\n";
  svg += "<text x=\"" + num(p.x0 + p.w / 2) + "\" y=\"" + num(p.y0 + p.h + 30) +
         "\" text-anchor=\"middle\" font-size=\"11\">" + p.xlabel + "</text>\n";
  svg += "<text x=\"" + num(p.x0 - 40) + "\" y=\"" + num(p.y0 + p.h / 2) +
         "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 " + num(p.x0 - 40) +
         " " + num(p.y0 + p.h / 2) + ")\">" + p.ylabel + "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = p.xmin + (p.xmax - p.xmin) * k / 4.0;
    const double yv = p.ymin + (p.ymax - p.ymin) * k / 4.0;
    char lx[32], ly[32];
    std::snprintf(lx, sizeof lx, "%.3g", xv);
    std::snprintf(ly, sizeof ly, "%.3g", yv);
    svg += "<text x=\"" + num(p.sx(xv)) + "\" y=\"" + num(p.y0 + p.h + 14) +
           "\" text-anchor=\"middle\" font-size=\"9\">" + lx + "</text>\n";
    svg += "<text x=\"" + num(p.x0 - 4) + "\" y=\"" + num(p.sy(yv) + 3) +
           "\" text-anchor=\"end\" font-size=\"9\">" + ly + "</text>\n";
  }
}

}  // namespace detail

/// Three trajectory projections (x-y, x-z, y-z) and ||X_CF|| versus time on a
/// log scale. One polyline per UAV in each panel.
inline std::string trajectory_svg(const TrajectoryLog& log, const std::string& title = "") {
  using detail::Panel;
  const std::size_t n = log.node_count;
  const std::size_t ticks = log.tick_count();
  const std::size_t stride = std::max<std::size_t>(1, ticks / 1500);

  std::array<double, 3> lo{}, hi{};
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  double tmax = 0.0;
  double emin = std::numeric_limits<double>::infinity(), emax = 0.0;
  for (const auto& r : log.rows) {
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], r.pose.position[a]);
      hi[a] = std::max(hi[a], r.pose.position[a]);
    }
    tmax = std::max(tmax, r.time);
    if (r.uav != 0 && r.error_norm > 0.0) {
      emin = std::min(emin, r.error_norm);
      emax = std::max(emax, r.error_norm);
    }
  }
  for (int a = 0; a < 3; ++a) detail::pad_range(lo[a], hi[a]);
  const double floor_exp = -12.0;
  double le_lo = std::isfinite(emin) ? std::max(std::floor(std::log10(emin)), floor_exp) : -3.0;
  double le_hi = emax > 0.0 ? std::ceil(std::log10(emax)) : 0.0;
  if (!(le_hi > le_lo)) le_hi = le_lo + 1.0;

  const std::array<const char*, 3> axis{"x [m]", "y [m]", "z [m]"};
  const std::array<std::array<int, 2>, 3> proj{{{0, 1}, {0, 2}, {1, 2}}};
  std::vector<Panel> panels;
  for (int k = 0; k < 3; ++k) {
    const int a = proj[k][0], b = proj[k][1];
    panels.push_back({70.0 + 340.0 * k, 50.0, 270.0, 270.0, lo[a], hi[a], lo[b], hi[b],
                      std::string(axis[a]).substr(0, 1) + "-" + std::string(axis[b]).substr(0, 1) +
                          " projection",
                      axis[a], axis[b]});
  }
  panels.push_back({70.0, 400.0, 950.0, 220.0, 0.0, tmax > 0 ? tmax : 1.0, le_lo, le_hi,
                    "tracking error ||X_CF||", "t [s]", "log10 ||X_CF||"});

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1060\" height=\"680\" "
      "font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg += "<text x=\"530\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">" + title +
           "</text>\n";
  }
  for (const auto& p : panels) detail::draw_frame(svg, p);

  for (NodeId u = 0; u < n; ++u) {
    const std::string color = detail::color_for(u, n);
    for (int k = 0; k < 3; ++k) {
      const int a = proj[k][0], b = proj[k][1];
      svg += "<polyline class=\"traj\" data-uav=\"" + std::to_string(u) + "\" fill=\"none\" stroke=\"" +
             color + "\" stroke-width=\"1.2\" points=\"";
      for (std::size_t t = 0; t < ticks; t += stride) {
        const auto& r = log.at(t, u);
        svg += detail::num(panels[k].sx(r.pose.position[a])) + "," +
               detail::num(panels[k].sy(r.pose.position[b])) + " ";
      }
      const auto& last = log.at(ticks - 1, u);
      svg += detail::num(panels[k].sx(last.pose.position[a])) + "," +
             detail::num(panels[k].sy(last.pose.position[b]));
      svg += "\"/>\n";
    }
    if (u == 0) continue;
    const Panel& ep = panels[3];
    svg += "<polyline class=\"err\" data-uav=\"" + std::to_string(u) + "\" fill=\"none\" stroke=\"" +
           color + "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t t = 0; t < ticks; t += stride) {
      const auto& r = log.at(t, u);
      const double le = std::clamp(r.error_norm > 0.0 ? std::log10(r.error_norm) : le_lo, le_lo, le_hi);
      svg += detail::num(ep.sx(r.time)) + "," + detail::num(ep.sy(le)) + " ";
    }
    svg += "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline void export_svg(const TrajectoryLog& log, const std::filesystem::path& path,
                       const std::string& title = "") {
  if (log.rows.empty()) throw Error(ErrorCode::kInvalidArgument, "empty trajectory log");
  write_text_file(path, trajectory_svg(log, title));
}

}  // namespace rti
