#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "support.hpp"

using namespace rti;
using rti::test::Rng;

namespace {

std::size_t count(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

Scenario wedge(const char* file, double duration) {
  Scenario sc = load_scenario(test::scenario_path(file));
  sc.duration = duration;
  return sc;
}

Scenario leader_only(const LeaderProfile& profile, double duration) {
  Scenario sc;
  sc.name = "solo";
  sc.profile = profile;
  sc.duration = duration;
  sc.leader_initial = {exp_so3(Vec3(0.1, -0.2, 0.4)), Vec3(3, -1, 2)};
  return sc;
}

}  // namespace

TEST(Simulation, LeaderOnlyFollowsTheExponentialFlow) {
  const LeaderProfile helix = LeaderProfile::helix(5.0, Vec3(0.03, 0.05, 0.2));
  const Scenario sc = leader_only(helix, 30.0);
  const TrajectoryLog log = run(sc);
  ASSERT_EQ(log.node_count, 1u);
  ASSERT_EQ(log.tick_count(), sc.tick_count() + 1);
  const Twist xi = leader_twist_at(helix, 0.0);
  for (std::size_t k = 0; k < log.tick_count(); k += 250) {
    const Pose expected = compose(sc.leader_initial, exp_se3((k * sc.step) * xi));
    EXPECT_LE((log.at(k, 0).pose.matrix() - expected.matrix()).norm(), 1e-10) << "tick " << k;
  }
}

TEST(Simulation, PatternHeldExactlyWhenStartedOnIt) {
  Scenario sc = wedge("wedge5_helix.scn", 20.0);
  for (auto& f : sc.followers) f.initial_error.setZero();
  const TrajectoryLog log = run(sc);
  double worst = 0.0;
  for (const auto& r : log.rows) worst = std::max(worst, r.error_norm);
  EXPECT_LE(worst, 1e-9);
}

TEST(Simulation, RowsAreOrderedAndTimed) {
  const Scenario sc = wedge("wedge5_line.scn", 1.0);
  const TrajectoryLog log = run(sc);
  ASSERT_EQ(log.rows.size(), (sc.tick_count() + 1) * sc.node_count());
  for (std::size_t k = 0; k < log.tick_count(); ++k) {
    for (NodeId u = 0; u < log.node_count; ++u) {
      EXPECT_EQ(log.at(k, u).uav, u);
      EXPECT_EQ(log.at(k, u).time, static_cast<double>(k) * sc.step);
    }
  }
  for (const auto& r : log.rows) {
    EXPECT_EQ(r.twist.linear.y(), 0.0);
    EXPECT_EQ(r.twist.linear.z(), 0.0);
  }
}

TEST(Simulation, ParallelRunMatchesSequentialBitForBit) {
  const Scenario sc = wedge("wedge5_helix.scn", 5.0);
  const std::string seq = trajectory_csv(run(sc));
  const std::string par = trajectory_csv(run(sc, {.parallel = true, .workers = 3}));
  EXPECT_EQ(seq, par);
  const Scenario swarm = wedge("swarm10_piecewise.scn", 6.0);
  EXPECT_EQ(trajectory_csv(run(swarm)), trajectory_csv(run(swarm, {.parallel = true})));
}

TEST(Simulation, RepeatedRunsAreIdentical) {
  const Scenario sc = wedge("tree5_helix3d.scn", 3.0);
  EXPECT_EQ(trajectory_csv(run(sc)), trajectory_csv(run(sc)));
}

TEST(Simulation, SingularInitialErrorIsReportedWithTick) {
  Scenario sc = wedge("circle3.scn", 1.0);
  sc.followers[0].initial_error.setZero();
  sc.followers[0].initial_error(2) = std::numbers::pi;  // half turn about z
  try {
    (void)run(sc);
    FAIL() << "expected NearPiSingularity";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNearPiSingularity);
    const std::string what = e.what();
    EXPECT_NE(what.find("tick 0"), std::string::npos) << what;
    EXPECT_NE(what.find("node 1"), std::string::npos) << what;
    EXPECT_EQ(what.find("NearPiSingularity"), what.rfind("NearPiSingularity")) << what;
  }
}

TEST(Simulation, SingularBlendOfStartingPosesNamesTheNode) {
  // Parents 1 and 2 start half a turn apart, so node 3 has no unique blended pose.
  Scenario sc = wedge("wedge5_line.scn", 1.0);
  sc.followers[0].initial_error.setZero();
  sc.followers[0].initial_error(2) = std::numbers::pi;
  sc.followers[1].initial_error.setZero();
  try {
    (void)run(sc);
    FAIL() << "expected NearPiSingularity";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNearPiSingularity);
    EXPECT_NE(std::string(e.what()).find("initial pose of node 3"), std::string::npos) << e.what();
  }
}

TEST(Simulation, SaturatedRunKeepsCommandsInsideLimits) {
  Scenario sc = wedge("circle3.scn", 10.0);
  sc.limits = VelocityLimitPair{{0.5, 4.0, 6.0}, {0.5, 3.5, 7.0}};
  sc.followers[0].initial_error << 0.0, 0.0, 0.0, 3.0, 0.0, 0.0;  // 3 m ahead of its slot
  const TrajectoryLog log = run(sc);
  bool clamped = false;
  for (const auto& r : log.rows) {
    if (r.uav == 0) continue;
    EXPECT_GE(r.twist.linear.x(), 3.5);
    EXPECT_LE(r.twist.linear.x(), 7.0);
    EXPECT_LE(r.twist.angular.norm(), 0.5 + 1e-12);
    clamped = clamped || r.flags != kFlagNone;
  }
  EXPECT_TRUE(clamped);
}

TEST(Report, LineScenarioIsIdentityFeasible) {
  const FeasibilityReport rep = feasibility_report(wedge("wedge5_line.scn", 20.0));
  EXPECT_TRUE(rep.feasible());
  EXPECT_EQ(rep.kind, FormationKind::kRti);
  EXPECT_EQ(rep.samples, 1u);
  ASSERT_EQ(rep.rows.size(), 4u);
  for (const auto& r : rep.rows) {
    EXPECT_EQ(r.kind, FormationKind::kRti);
    EXPECT_TRUE(r.identity_admissible);
    EXPECT_EQ(r.angles.pitch, 0.0);
    EXPECT_EQ(r.angles.yaw, 0.0);
  }
}

TEST(Report, OffsetBeyondBoundFailsSaturation) {
  Scenario sc = wedge("wedge5_helix.scn", 20.0);
  const VelocityLimits leader{0.25, 4.0, 6.0}, follower{0.25, 3.5, 6.5};
  sc.limits = VelocityLimitPair{leader, follower};
  const double c2 = *max_offset_norm(leader, follower, true);
  sc.followers[2].offset = Vec3(0, 4.0 * c2, 0);  // far out on the inside of the turn
  const FeasibilityReport rep = feasibility_report(sc);
  EXPECT_FALSE(rep.feasible());
  EXPECT_EQ(rep.rows[2].status, FeasibilityStatus::kSaturation);
  ASSERT_TRUE(rep.rows[2].offset_bound.has_value());
  EXPECT_DOUBLE_EQ(*rep.rows[2].offset_bound, c2);
  EXPECT_GT(rep.rows[2].offset_norm, c2);
  EXPECT_NE(render_text(rep).find("saturation"), std::string::npos);
}

TEST(Report, HoveringPlacementIsReported) {
  Scenario sc = wedge("circle3.scn", 10.0);
  // Turn centre for v = 5, omega_z = 0.2: 25 m to the left.
  sc.followers[1].offset = Vec3(0, 25, 0);
  const FeasibilityReport rep = feasibility_report(sc);
  EXPECT_FALSE(rep.feasible());
  EXPECT_EQ(rep.rows[1].status, FeasibilityStatus::kHoverRequired);
  EXPECT_EQ(rep.rows[0].status, FeasibilityStatus::kOk);
  const std::string csv = render_csv(rep);
  EXPECT_EQ(csv.rfind(kFeasibilityCsvHeader, 0), 0u);
  EXPECT_NE(csv.find("HoverRequired"), std::string::npos);
}

TEST(Report, PiecewiseScenarioIsSampledEveryTick) {
  const Scenario sc = wedge("swarm10_piecewise.scn", 100.0);
  const FeasibilityReport rep = feasibility_report(sc);
  EXPECT_EQ(rep.kind, FormationKind::kPseudoRti);
  EXPECT_EQ(rep.samples, sc.tick_count() + 1);
  EXPECT_TRUE(rep.feasible()) << render_text(rep);
}

TEST(Export, QuaternionHasNonNegativeScalarPart) {
  Rng rng(71);
  for (int k = 0; k < 1000; ++k) {
    const Rotation R = test::random_rotation(rng, 3.1);
    const Eigen::Vector4d q = rotation_to_quaternion(R);
    EXPECT_GE(q[0], 0.0);
    EXPECT_NEAR(q.norm(), 1.0, 1e-15);
    const Eigen::Quaterniond back(q[0], q[1], q[2], q[3]);
    EXPECT_LE((back.toRotationMatrix() - R).norm(), 1e-14);
  }
}

TEST(Export, CsvLayout) {
  const Scenario sc = wedge("wedge5_line.scn", 0.05);
  const std::string csv = trajectory_csv(run(sc));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kTrajectoryCsvHeader);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(count(line, ","), 17u) << line;
    ++rows;
  }
  EXPECT_EQ(rows, (sc.tick_count() + 1) * 5);
}

TEST(Export, LeaderOnlyCsvHasOnlyLeaderRows) {
  const TrajectoryLog log = run(leader_only(LeaderProfile::line(5.0), 0.1));
  const std::string csv = trajectory_csv(log);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line.substr(line.find(',') + 1, 2), "0,");
    ++rows;
  }
  EXPECT_EQ(rows, 11u);
}

TEST(Export, SvgHasOneSeriesPerUavAndProjection) {
  const Scenario sc = wedge("wedge5_line.scn", 2.0);
  const std::string svg = trajectory_svg(run(sc), sc.name);
  EXPECT_EQ(count(svg, "class=\"traj\""), 3 * sc.node_count());
  for (NodeId u = 0; u < sc.node_count(); ++u) {
    EXPECT_EQ(count(svg, "class=\"traj\" data-uav=\"" + std::to_string(u) + "\""), 3u);
  }
  EXPECT_EQ(count(svg, "class=\"err\""), sc.node_count() - 1);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Export, WritesFilesAndReportsIoErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "rtiform_export_test";
  std::filesystem::remove_all(dir);
  const TrajectoryLog log = run(wedge("circle3.scn", 0.5));
  export_csv(log, dir / "nested" / "c.csv");
  export_svg(log, dir / "nested" / "c.svg");
  std::ifstream in(dir / "nested" / "c.csv");
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str(), trajectory_csv(log));
  EXPECT_TRUE(std::filesystem::exists(dir / "nested" / "c.svg"));
  try {
    export_csv(log, "/proc/definitely/not/writable.csv");
    FAIL() << "expected IoError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
  std::filesystem::remove_all(dir);
}
