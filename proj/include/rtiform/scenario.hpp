#pragma once

// Scenario description and its plain-text file format.
//
// The file is a list of flat sections. Each section starts with a header line
// `[name]` or `[uav <id>]`; each following line is `key = value`. Vectors are
// whitespace-separated numbers. `#` starts a comment. See docs/scenario_format.md.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rtiform/controller.hpp"
#include "rtiform/feasibility.hpp"
#include "rtiform/profile.hpp"
#include "rtiform/topology.hpp"

namespace rti {

/// Per-follower configuration. Offsets are relative to the node's virtual
/// parent.
struct FollowerConfig {
  std::vector<NodeId> parents;
  std::vector<double> weights;  ///< empty: running-mean default
  Vec3 offset = Vec3::Zero();
  double roll = 0.0;
  std::optional<EulerAngles> attitude_override;
  /// Initial pose; when absent the follower starts at g_G(0) gbar exp(initial_error).
  std::optional<Pose> initial_pose;
  Vec6 initial_error = Vec6::Zero();
};

struct VelocityLimitPair {
  VelocityLimits leader;
  VelocityLimits follower;
};

struct Scenario {
  std::string name = "scenario";
  double duration = 20.0;
  double step = kDefaultStep;
  LeaderProfile profile;
  ControlGains gains;
  std::optional<VelocityLimitPair> limits;
  Pose leader_initial;
  std::vector<FollowerConfig> followers;  ///< node i + 1 is followers[i]
  std::string output_dir = "out";

  [[nodiscard]] std::size_t node_count() const { return followers.size() + 1; }

  [[nodiscard]] SwarmTopology topology() const {
    std::vector<Edge> edges;
    std::vector<std::vector<double>> weights(node_count());
    for (std::size_t k = 0; k < followers.size(); ++k) {
      for (NodeId p : followers[k].parents) edges.push_back({p, k + 1});
      weights[k + 1] = followers[k].weights;
    }
    return SwarmTopology(node_count(), edges, std::move(weights));
  }

  [[nodiscard]] std::size_t tick_count() const {
    return static_cast<std::size_t>(std::floor(duration / step + 1e-9));
  }

  /// Structural checks that do not need the dynamics. Throws kInvalidArgument.
  void validate() const {
    if (!(duration > 0.0) || !std::isfinite(duration)) {
      throw Error(ErrorCode::kInvalidArgument, "duration must be positive");
    }
    if (!(step > 0.0) || step > duration) {
      throw Error(ErrorCode::kInvalidArgument, "step must satisfy 0 < step <= duration");
    }
    if (!gains.valid()) {
      throw Error(ErrorCode::kInvalidArgument, "gains must be positive");
    }
    profile.validate(duration);
    if (limits) {
      if (!limits->leader.valid() || !limits->follower.valid()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "limits need alpha > 0 and 0 < beta_low < beta_up");
      }
      if (!limits_pairing_ok(limits->leader, limits->follower)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "follower limits must bracket the leader's with equal alpha");
      }
    }
    if (!is_rotation(leader_initial.rotation)) {
      throw Error(ErrorCode::kInvalidArgument, "leader attitude is not a rotation");
    }
    (void)topological_order(topology());
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

struct Section {
  std::string name;
  int line = 0;
  std::multimap<std::string, Entry> entries;
};

class SectionReader {
 public:
  SectionReader(const Section& s, std::string_view source) : s_(s), source_(source) {}

  [[nodiscard]] bool has(const std::string& key) const { return s_.entries.count(key) > 0; }

  [[nodiscard]] const Entry& entry(const std::string& key) const {
    const auto n = s_.entries.count(key);
    if (n == 0) fail(s_.line, "missing key '" + key + "' in [" + s_.name + "]");
    if (n > 1) fail(s_.entries.find(key)->second.line, "duplicate key '" + key + "'");
    return s_.entries.find(key)->second;
  }

  [[nodiscard]] std::vector<Entry> all(const std::string& key) const {
    std::vector<Entry> out;
    auto [lo, hi] = s_.entries.equal_range(key);
    for (auto it = lo; it != hi; ++it) out.push_back(it->second);
    std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.line < b.line; });
    return out;
  }

  [[nodiscard]] std::string text(const std::string& key) const { return entry(key).value; }

  [[nodiscard]] std::vector<double> numbers(const Entry& e) const {
    std::vector<double> out;
    for (const auto& w : split_words(e.value)) out.push_back(number(w, e.line));
    return out;
  }

  [[nodiscard]] double scalar(const std::string& key) const {
    const auto& e = entry(key);
    const auto v = numbers(e);
    if (v.size() != 1) fail(e.line, "key '" + key + "' expects one number");
    return v[0];
  }

  [[nodiscard]] double scalar_or(const std::string& key, double fallback) const {
    return has(key) ? scalar(key) : fallback;
  }

  [[nodiscard]] Vec3 vec3(const std::string& key) const {
    const auto& e = entry(key);
    const auto v = numbers(e);
    if (v.size() != 3) fail(e.line, "key '" + key + "' expects three numbers");
    return {v[0], v[1], v[2]};
  }

  [[nodiscard]] EulerAngles angles(const std::string& key) const {
    const Vec3 v = vec3(key);
    return {v.x(), v.y(), v.z()};
  }

  void only(std::initializer_list<std::string_view> allowed) const {
    for (const auto& [k, e] : s_.entries) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        fail(e.line, "unknown key '" + k + "' in [" + s_.name + "]");
      }
    }
  }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw Error(ErrorCode::kParseError,
                std::string(source_) + ":" + std::to_string(line) + ": " + msg);
  }

  double number(const std::string& w, int line) const {
    if (w == "inf") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto* end = w.data() + w.size();
    const auto [ptr, ec] = std::from_chars(w.data(), end, v);
    if (ec != std::errc() || ptr != end) fail(line, "not a number: '" + w + "'");
    return v;
  }

 private:
  const Section& s_;
  std::string_view source_;
};

}  // namespace detail

/// Parses scenario text. `source` names the input in error messages.
inline Scenario parse_scenario(std::string_view text, std::string_view source = "<scenario>") {
  using detail::Section;
  std::vector<Section> sections;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  auto fail = [&](int line, const std::string& msg) -> void {
    throw Error(ErrorCode::kParseError,
                std::string(source) + ":" + std::to_string(line) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      Section s;
      s.name = std::string(detail::trim(line.substr(1, line.size() - 2)));
      s.line = line_no;
      sections.push_back(std::move(s));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
    if (sections.empty()) fail(line_no, "key outside of any section");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty()) fail(line_no, "empty key");
    sections.back().entries.emplace(key, detail::Entry{value, line_no});
  }

  Scenario sc;
  std::map<NodeId, const Section*> uavs;
  bool have_profile = false;
  for (const auto& s : sections) {
    const detail::SectionReader r(s, source);
    const auto words = detail::split_words(s.name);
    if (s.name == "scenario") {
      r.only({"name", "duration", "step", "output"});
      if (r.has("name")) sc.name = r.text("name");
      sc.duration = r.scalar_or("duration", sc.duration);
      sc.step = r.scalar_or("step", sc.step);
      if (r.has("output")) sc.output_dir = r.text("output");
    } else if (s.name == "profile") {
      r.only({"kind", "speed", "omega", "segment"});
      have_profile = true;
      const std::string kind = r.text("kind");
      const double speed = r.scalar("speed");
      if (kind == "line") {
        sc.profile = LeaderProfile::line(speed);
      } else if (kind == "helix") {
        sc.profile = LeaderProfile::helix(speed, r.vec3("omega"));
      } else if (kind == "piecewise") {
        std::vector<ProfileSegment> segs;
        for (const auto& e : r.all("segment")) {
          const auto w = detail::split_words(e.value);
          if (w.size() != 7) r.fail(e.line, "segment expects: start end shape frequency wx wy wz");
          ProfileSegment seg;
          seg.start = r.number(w[0], e.line);
          seg.end = r.number(w[1], e.line);
          if (w[2] == "const") {
            seg.shape = SegmentShape::kConstant;
          } else if (w[2] == "sin") {
            seg.shape = SegmentShape::kSine;
          } else {
            r.fail(e.line, "segment shape must be 'const' or 'sin'");
          }
          seg.frequency = r.number(w[3], e.line);
          seg.amplitude = {r.number(w[4], e.line), r.number(w[5], e.line), r.number(w[6], e.line)};
          segs.push_back(seg);
        }
        sc.profile = LeaderProfile::piecewise(speed, std::move(segs));
      } else {
        r.fail(s.line, "profile kind must be line, helix or piecewise");
      }
    } else if (s.name == "gains") {
      r.only({"kp", "ka"});
      sc.gains.k_p = r.scalar_or("kp", sc.gains.k_p);
      sc.gains.k_a = r.scalar_or("ka", sc.gains.k_a);
    } else if (s.name == "limits") {
      r.only({"leader_alpha", "leader_beta_low", "leader_beta_up", "follower_alpha",
              "follower_beta_low", "follower_beta_up"});
      VelocityLimitPair lp;
      lp.leader = {r.scalar("leader_alpha"), r.scalar("leader_beta_low"), r.scalar("leader_beta_up")};
      lp.follower = {r.scalar("follower_alpha"), r.scalar("follower_beta_low"),
                     r.scalar("follower_beta_up")};
      sc.limits = lp;
    } else if (words.size() == 2 && words[0] == "uav") {
      const double id = r.number(words[1], s.line);
      if (id < 0 || id != std::floor(id)) r.fail(s.line, "uav id must be a non-negative integer");
      const auto node = static_cast<NodeId>(id);
      if (uavs.count(node)) r.fail(s.line, "duplicate [uav " + words[1] + "]");
      uavs[node] = &s;
    } else {
      fail(s.line, "unknown section [" + s.name + "]");
    }
  }
  if (!have_profile) fail(line_no, "missing [profile] section");
  if (!uavs.count(0)) fail(line_no, "missing [uav 0] (leader)");
  if (uavs.rbegin()->first + 1 != uavs.size()) {
    fail(line_no, "uav ids must be contiguous from 0");
  }

  for (const auto& [id, s] : uavs) {
    const detail::SectionReader r(*s, source);
    if (id == 0) {
      r.only({"position", "attitude"});
      if (r.has("position")) sc.leader_initial.position = r.vec3("position");
      if (r.has("attitude")) sc.leader_initial.rotation = euler_to_rotation(r.angles("attitude"));
      continue;
    }
    r.only({"parents", "weights", "offset", "roll", "relative_attitude", "initial",
            "initial_error", "position", "attitude"});
    FollowerConfig f;
    for (double p : r.numbers(r.entry("parents"))) {
      if (p < 0 || p != std::floor(p)) r.fail(r.entry("parents").line, "parent ids must be integers");
      f.parents.push_back(static_cast<NodeId>(p));
    }
    if (r.has("weights")) f.weights = r.numbers(r.entry("weights"));
    f.offset = r.vec3("offset");
    f.roll = r.scalar_or("roll", 0.0);
    if (r.has("relative_attitude")) f.attitude_override = r.angles("relative_attitude");
    const std::string initial = r.has("initial") ? r.text("initial") : "formation";
    if (initial == "formation") {
      if (r.has("position") || r.has("attitude")) {
        r.fail(s->line, "position/attitude require 'initial = explicit'");
      }
      if (r.has("initial_error")) {
        const auto& e = r.entry("initial_error");
        const auto v = r.numbers(e);
        if (v.size() != 6) r.fail(e.line, "initial_error expects six numbers");
        for (int k = 0; k < 6; ++k) f.initial_error(k) = v[static_cast<std::size_t>(k)];
      }
    } else if (initial == "explicit") {
      if (r.has("initial_error")) r.fail(s->line, "initial_error requires 'initial = formation'");
      Pose g;
      g.position = r.vec3("position");
      if (r.has("attitude")) g.rotation = euler_to_rotation(r.angles("attitude"));
      f.initial_pose = g;
    } else {
      r.fail(r.entry("initial").line, "initial must be 'formation' or 'explicit'");
    }
    sc.followers.push_back(std::move(f));
  }
  return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

}  // namespace rti
