#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "support.hpp"

using namespace rti;

namespace {

const char* kMinimal = R"(
# comment line
[scenario]
name = tiny
duration = 2
step = 0.01

[profile]
kind = helix
speed = 4
omega = 0 0.1 0.2   # trailing comment

[uav 0]
position = 1 2 3

[uav 1]
parents = 0
offset = 0 4 0
roll = 0.25
initial_error = 0 0 0 0.1 0 0
)";

ErrorCode parse_code(const std::string& text) {
  try {
    (void)parse_scenario(text, "t.scn");
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST(Profile, TableScheduleValues) {
  const LeaderProfile p = LeaderProfile::table_schedule(5.0);
  EXPECT_NO_THROW(p.validate(100.0));
  EXPECT_LE(leader_twist_at(p, 10.0).angular.norm(), 1e-15);
  EXPECT_LE((leader_twist_at(p, 60.0).angular - Vec3(0.1, 0.15, 0.2)).norm(), 0.0);
  EXPECT_LE((leader_twist_at(p, 5.0).angular - Vec3(0, -0.15, 0)).norm(), 1e-15);
  EXPECT_LE((leader_twist_at(p, 25.0).angular - Vec3(0, 0, -0.25)).norm(), 1e-15);
  EXPECT_EQ(leader_twist_at(p, 40.0).angular, Vec3::Zero());
  EXPECT_EQ(leader_twist_at(p, 33.0).linear, Vec3(5, 0, 0));
  EXPECT_EQ(p.breakpoints(), (std::vector<double>{20, 30, 50, 55}));
}

TEST(Profile, ScheduleIsContinuousAtBreakpoints) {
  const LeaderProfile p = LeaderProfile::table_schedule(5.0);
  for (double b : p.breakpoints()) {
    const Vec3 before = leader_twist_at(p, b).angular;
    const Vec3 after = leader_twist_at(p, std::nextafter(b, 1e9)).angular;
    EXPECT_LE((before - after).norm(), 1e-12) << "t = " << b;
  }
}

TEST(Profile, LineAndHelix) {
  EXPECT_EQ(leader_twist_at(LeaderProfile::line(5), 17.0).angular, Vec3::Zero());
  const Twist h = leader_twist_at(LeaderProfile::helix(5, Vec3(0, 0.05, 0.2)), 3.0);
  EXPECT_EQ(h.angular, Vec3(0, 0.05, 0.2));
  EXPECT_EQ(h.linear, Vec3(5, 0, 0));
}

TEST(Profile, OutOfSchedule) {
  const LeaderProfile p = LeaderProfile::piecewise(
      5, {{0, 10, SegmentShape::kConstant, 0, Vec3::Zero()}});
  try {
    (void)leader_twist_at(p, 10.5);
    FAIL() << "expected OutOfSchedule";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfSchedule);
  }
  EXPECT_THROW((void)leader_twist_at(p, -1.0), Error);
  EXPECT_THROW(p.validate(20.0), Error);
}

TEST(Profile, ValidationCatchesGapsAndBadSpeed) {
  const LeaderProfile gap = LeaderProfile::piecewise(
      5, {{0, 10, SegmentShape::kConstant, 0, Vec3::Zero()},
          {11, 20, SegmentShape::kConstant, 0, Vec3::Zero()}});
  EXPECT_THROW(gap.validate(20.0), Error);
  EXPECT_THROW(LeaderProfile::line(0.0).validate(1.0), Error);
  EXPECT_THROW(LeaderProfile::line(-3.0).validate(1.0), Error);
}

TEST(ScenarioParser, ReadsEveryField) {
  const Scenario sc = parse_scenario(kMinimal);
  EXPECT_EQ(sc.name, "tiny");
  EXPECT_EQ(sc.duration, 2.0);
  EXPECT_EQ(sc.tick_count(), 200u);
  EXPECT_EQ(sc.profile.kind, ProfileKind::kHelix);
  EXPECT_EQ(sc.profile.omega, Vec3(0, 0.1, 0.2));
  EXPECT_EQ(sc.leader_initial.position, Vec3(1, 2, 3));
  ASSERT_EQ(sc.followers.size(), 1u);
  EXPECT_EQ(sc.followers[0].offset, Vec3(0, 4, 0));
  EXPECT_EQ(sc.followers[0].roll, 0.25);
  EXPECT_EQ(sc.followers[0].initial_error(3), 0.1);
  EXPECT_FALSE(sc.limits.has_value());
  EXPECT_EQ(sc.gains.k_p, 1.0);
  EXPECT_NO_THROW(sc.validate());
}

TEST(ScenarioParser, PiecewiseSegmentsAndLimits) {
  const std::string text = R"(
[profile]
kind = piecewise
speed = 5
segment = 0 10 sin 0.5 0 0.1 0
segment = 10 inf const 0 0 0 0.2
[limits]
leader_alpha = 0.5
leader_beta_low = 4
leader_beta_up = 6
follower_alpha = 0.5
follower_beta_low = 3
follower_beta_up = 8
[gains]
kp = 2
ka = 0.5
[uav 0]
[uav 1]
parents = 0
offset = 0 -3 0
initial = explicit
position = -1 -3 0
attitude = 0 0 0.1
)";
  const Scenario sc = parse_scenario(text);
  ASSERT_EQ(sc.profile.segments.size(), 2u);
  EXPECT_EQ(sc.profile.segments[0].shape, SegmentShape::kSine);
  EXPECT_TRUE(std::isinf(sc.profile.segments[1].end));
  ASSERT_TRUE(sc.limits.has_value());
  EXPECT_EQ(sc.limits->follower.linear_upper, 8.0);
  EXPECT_EQ(sc.gains.k_p, 2.0);
  EXPECT_EQ(sc.gains.k_a, 0.5);
  ASSERT_TRUE(sc.followers[0].initial_pose.has_value());
  EXPECT_EQ(sc.followers[0].initial_pose->position, Vec3(-1, -3, 0));
  EXPECT_NO_THROW(sc.validate());
}

TEST(ScenarioParser, ErrorsCarryLineNumbers) {
  try {
    (void)parse_scenario("[profile]\nkind = line\nspeed = fast\n[uav 0]\n", "bad.scn");
    FAIL() << "expected ParseError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("bad.scn:3"), std::string::npos) << e.what();
  }
}

TEST(ScenarioParser, RejectsMalformedInput) {
  EXPECT_EQ(parse_code("[uav 0]\n"), ErrorCode::kParseError);  // no profile
  EXPECT_EQ(parse_code("[profile]\nkind = line\nspeed = 5\n"), ErrorCode::kParseError);  // no leader
  EXPECT_EQ(parse_code("[profile]\nkind = orbit\nspeed = 5\n[uav 0]\n"), ErrorCode::kParseError);
  EXPECT_EQ(parse_code("[profile]\nkind = line\nspeed = 5\ncolour = red\n[uav 0]\n"),
            ErrorCode::kParseError);
  EXPECT_EQ(parse_code("[profile]\nkind = line\nspeed = 5\n[uav 0]\n[uav 2]\nparents = 0\n"
                       "offset = 0 1 0\n"),
            ErrorCode::kParseError);  // ids not contiguous
  EXPECT_EQ(parse_code("speed = 5\n"), ErrorCode::kParseError);
  EXPECT_EQ(parse_code("[profile\n"), ErrorCode::kParseError);
  EXPECT_EQ(parse_code("[profile]\nkind = line\nspeed = 5\n[uav 0]\n[uav 1]\nparents = 0\n"
                       "offset = 0 1\n"),
            ErrorCode::kParseError);
}

TEST(ScenarioValidate, RejectsCyclesAndBadLimits) {
  Scenario sc = parse_scenario(R"(
[profile]
kind = line
speed = 5
[uav 0]
[uav 1]
parents = 0 2
offset = 0 1 0
[uav 2]
parents = 1
offset = 0 1 0
)");
  try {
    sc.validate();
    FAIL() << "expected CycleDetected";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCycleDetected);
  }
  Scenario lim = parse_scenario(kMinimal);
  lim.limits = VelocityLimitPair{{0.5, 4, 6}, {0.4, 3, 8}};
  EXPECT_THROW(lim.validate(), Error);
  Scenario step = parse_scenario(kMinimal);
  step.step = 0.0;
  EXPECT_THROW(step.validate(), Error);
}

TEST(ScenarioFiles, ShippedScenariosLoadAndValidate) {
  for (const char* name : {"wedge5_line.scn", "wedge5_helix.scn", "tree5_helix3d.scn",
                           "circle3.scn", "swarm10_piecewise.scn"}) {
    SCOPED_TRACE(name);
    const Scenario sc = load_scenario(test::scenario_path(name));
    EXPECT_NO_THROW(sc.validate());
    for (const auto& f : sc.followers) EXPECT_LE(f.initial_error.norm(), 0.5);
  }
}

TEST(ScenarioFiles, MissingFileIsAnIoError) {
  try {
    (void)load_scenario("/nonexistent/dir/none.scn");
    FAIL() << "expected IoError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
}

TEST(ScenarioFiles, SwarmUsesTheTableSchedule) {
  const Scenario sc = load_scenario(test::scenario_path("swarm10_piecewise.scn"));
  const LeaderProfile table = LeaderProfile::table_schedule(sc.profile.speed);
  EXPECT_EQ(sc.node_count(), 10u);
  for (double t = 0.0; t <= 100.0; t += 0.37) {
    EXPECT_LE((leader_twist_at(sc.profile, t).angular - leader_twist_at(table, t).angular).norm(),
              1e-15) << "t = " << t;
  }
}
