#include <doctest.h>

#include <fstream>
#include <set>

#include "support.hpp"

using namespace plcsim;
using plant::FaultKind;

namespace {

plant::Plant default_plant() {
  std::map<std::string, actuators::CylinderKind> kinds;
  for (const auto& [rel, k] : plant::PlantConfig{}.cylinder_kinds) {
    kinds["xPPU/" + rel] = k == "Monostable" ? actuators::CylinderKind::Monostable : actuators::CylinderKind::Bistable;
  }
  return plant::Plant(plant::PlantConfig{}, kinds);
}

std::vector<Snapshot> collect(const scenario::Scenario& s, StrategyKind kind) {
  std::vector<Snapshot> out;
  test::run(s, test::options_for(kind), [&](const Snapshot& snap) { out.push_back(snap); });
  return out;
}

}  // namespace

TEST_SUITE("plant") {
  TEST_CASE("default config validates and round-trips through json") {
    const plant::PlantConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(plant::PlantConfig::from_json(c.to_json()) == c);
    std::ifstream in(std::string(PLCSIM_TEST_CONFIG_DIR) + "/plant_default.json");
    REQUIRE(in.good());
    CHECK(plant::PlantConfig::from_json(nlohmann::json::parse(in)) == c);
  }

  TEST_CASE("config invariants are enforced") {
    auto bad = [](auto mutate) {
      plant::PlantConfig c;
      mutate(c);
      return c;
    };
    CHECK_THROWS_AS(bad([](auto& c) { c.recipe.push_back({1, plant::Material::Plastic, plant::Color::White}); }).validate(),
                    std::invalid_argument);
    CHECK_THROWS_AS(bad([](auto& c) { c.recipe[0].color = plant::Color::Metallic; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](auto& c) { c.stack_capacity = 3; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](auto& c) { c.separator_positions = {40.0, 120.0}; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](auto& c) { c.separator_positions = {40.0}; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](auto& c) { c.sensor_position = 50.0; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](auto& c) { c.ramp_for_color[plant::Color::Black] = 3; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](auto& c) { c.stamp_angle = 400.0; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](auto& c) { c.timeout_ticks = c.travel_ticks; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](auto& c) { c.application_reactions["Stack"][12] = errors::LocalAction::AbortNow; })
                        .validate(),
                    std::invalid_argument);
    CHECK_THROWS_AS(plant::PlantConfig::from_json(nlohmann::json{{"beltLenght", 10}}), std::invalid_argument);
  }

  TEST_CASE("fault specs parse and reject missing fields") {
    const auto f = plant::FaultSpec::from_json(
        nlohmann::json{{"id", "d"}, {"kind", "DragDisturbance"}, {"target", "xPPU/Crane/Base"}, {"magnitude", 2.0}});
    CHECK(plant::FaultSpec::from_json(f.to_json()) == f);
    CHECK_THROWS_AS(plant::FaultSpec::from_json(nlohmann::json{{"id", "d"}, {"kind", "DragDisturbance"},
                                                               {"target", "xPPU/Crane/Base"}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(plant::FaultSpec::from_json(nlohmann::json{{"id", "l"}, {"kind", "WpLostFromBelt"}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(plant::FaultSpec::from_json(nlohmann::json{{"id", "x"}, {"kind", "Gremlins"}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(plant::FaultSpec::from_json(nlohmann::json{
                        {"id", "j"}, {"kind", "MotorJam"}, {"target", "xPPU/Crane/Base"}, {"activeFrom", 5}, {"activeUntil", 5}}),
                    std::invalid_argument);
  }

  TEST_CASE("fault injection rejects unknown targets and overlaps") {
    auto p = default_plant();
    CHECK_FALSE(p.inject(test::fault("a", FaultKind::JammedWorkPiece, "xPPU/Crane/Base"), 0).accepted);
    CHECK_FALSE(p.inject(test::fault("a", FaultKind::MotorJam, "xPPU/Stack/Pusher"), 0).accepted);
    CHECK_FALSE(p.inject(test::fault("a", FaultKind::GripperSensorFail, "xPPU/Stamp/Press"), 0).accepted);
    auto lost = test::fault("a", FaultKind::WpLostFromBelt, "");
    lost.wp_id = 99;
    CHECK_FALSE(p.inject(lost, 0).accepted);
    CHECK_FALSE(p.inject(test::fault("", FaultKind::MotorJam, "xPPU/Crane/Base"), 0).accepted);

    auto first = test::fault("a", FaultKind::MotorJam, "xPPU/Crane/Base");
    first.active_from = 10;
    first.active_until = 20;
    REQUIRE(p.inject(first, 0).accepted);
    CHECK_FALSE(p.inject(first, 0).accepted);
    auto overlap = test::fault("b", FaultKind::DragDisturbance, "xPPU/Crane/Base");
    overlap.magnitude = 1;
    overlap.active_from = 19;
    const auto r = p.inject(overlap, 0);
    CHECK_FALSE(r.accepted);
    CHECK(r.reason.find("overlapping") != std::string::npos);
    overlap.active_from = 20;
    CHECK(p.inject(overlap, 0).accepted);
    CHECK_FALSE(p.any_fault_active(9));
    CHECK(p.any_fault_active(10));
    CHECK(p.inject(test::fault("c", FaultKind::GripperSensorFail, ""), 0).accepted);
    CHECK(p.clear("a").accepted);
    CHECK_FALSE(p.clear("a").accepted);
  }

  TEST_CASE("work pieces are conserved in every snapshot") {
    const plant::PlantConfig config;
    std::multiset<int> expected;
    for (const auto& w : config.recipe) expected.insert(w.id);
    for (const auto& name : test::bundled_scenarios()) {
      for (const auto kind : {StrategyKind::Procedural, StrategyKind::OO}) {
        CAPTURE(name);
        std::int64_t violations = 0;
        std::int64_t gripped = 0;
        test::run(name, kind, [&](const Snapshot& s) {
          std::multiset<int> ids;
          int in_gripper = 0;
          for (const auto& w : s.plant.workpieces) {
            ids.insert(w.id);
            if (w.location.kind == plant::LocationKind::CraneGripper) ++in_gripper;
            if (w.location.kind == plant::LocationKind::Belt &&
                (w.location.belt_position < 0.0 || w.location.belt_position > config.belt_length)) {
              ++violations;
            }
          }
          if (ids != expected || in_gripper > 1) ++violations;
          gripped += in_gripper;
        });
        CHECK(violations == 0);
        CHECK(gripped > 0);
      }
    }
  }

  TEST_CASE("nominal run sorts by color and stamps only metal") {
    const plant::PlantConfig config;
    for (const auto kind : {StrategyKind::Procedural, StrategyKind::OO}) {
      const auto snaps = collect(test::load("nominal_sort_6wp"), kind);
      const auto& last = snaps.back();
      for (const auto& spec : config.recipe) {
        CAPTURE(spec.id);
        const auto* w = test::wp(last, spec.id);
        REQUIRE(w != nullptr);
        CHECK(w->location.kind == plant::LocationKind::Ramp);
        CHECK(w->location.ramp == config.ramp_for_color.at(spec.color));
        CHECK(w->stamped == (spec.material == plant::Material::Metal));
      }
    }
  }

  TEST_CASE("a different ramp mapping is honored") {
    auto s = test::load("nominal_sort_6wp");
    s.assertions.clear();
    s.plant_config.ramp_for_color = {{plant::Color::White, 2}, {plant::Color::Black, 0}, {plant::Color::Metallic, 1}};
    const auto snaps = collect(s, StrategyKind::Procedural);
    for (const auto& spec : s.plant_config.recipe) {
      const auto* w = test::wp(snaps.back(), spec.id);
      REQUIRE(w != nullptr);
      CHECK(w->location.kind == plant::LocationKind::Ramp);
      CHECK(w->location.ramp == s.plant_config.ramp_for_color.at(spec.color));
    }
  }

  TEST_CASE("a fault is first sensed inside the subtree of its target") {
    struct Case {
      plant::FaultSpec fault;
      std::string subtree;
    };
    auto drag = test::fault("f", FaultKind::DragDisturbance, "xPPU/Crane/Base");
    drag.magnitude = 3.5;
    auto lost = test::fault("f", FaultKind::WpLostFromBelt, "");
    lost.wp_id = 1;
    const std::vector<Case> cases{
        {test::fault("f", FaultKind::JammedWorkPiece, "xPPU/Stack/Pusher"), "xPPU/Stack"},
        {test::fault("f", FaultKind::MotorJam, "xPPU/Crane/Base"), "xPPU/Crane"},
        {drag, "xPPU/Crane"},
        {test::fault("f", FaultKind::GripperSensorFail, "xPPU/Crane/Gripper"), "xPPU/Crane"},
        {lost, "xPPU/SortingConveyor"},
    };
    const auto base = collect(test::nominal_with(900), StrategyKind::Procedural);
    for (const auto& c : cases) {
      CAPTURE(c.fault.kind);
      const auto subtree = ModulePath::parse(c.subtree);
      const auto faulted = collect(test::nominal_with(900, {{25, cmd::InjectFault{c.fault}}}), StrategyKind::Procedural);
      REQUIRE(faulted.size() == base.size());
      bool found = false;
      for (std::size_t i = 0; i < base.size() && !found; ++i) {
        std::vector<std::string> differing;
        const auto& ia = base[i].io;
        const auto& ib = faulted[i].io;
        for (const auto& [name, v] : ia.digital_inputs) {
          if (ib.digital_inputs.at(name) != v) differing.push_back(name);
        }
        for (const auto& [name, v] : ia.analog_inputs) {
          if (ib.analog_inputs.at(name) != v) differing.push_back(name);
        }
        if (differing.empty()) continue;
        found = true;
        CAPTURE(base[i].tick);
        for (const auto& name : differing) {
          CAPTURE(name);
          CHECK(subtree.contains(ModulePath::parse(name.substr(0, name.find('.')))));
        }
        CHECK(base[i - 1].modules == faulted[i - 1].modules);
        CHECK(base[i].machine_state == faulted[i].machine_state);
      }
      CHECK(found);
    }
  }

  TEST_CASE("a warning never changes the machine state") {
    auto lost = test::fault("lost", FaultKind::WpLostFromBelt, "");
    lost.wp_id = 1;
    for (const auto kind : {StrategyKind::Procedural, StrategyKind::OO}) {
      const auto base = collect(test::nominal_with(1100), kind);
      const auto warned = collect(test::nominal_with(1100, {{25, cmd::InjectFault{lost}}}), kind);
      REQUIRE(base.size() == warned.size());
      bool saw_warning = false;
      std::int64_t differing = 0;
      for (std::size_t i = 0; i < base.size(); ++i) {
        if (base[i].machine_state != warned[i].machine_state) ++differing;
        for (const auto& r : warned[i].errors) {
          saw_warning |= r.event.severity == errors::Severity::Warning;
          CHECK(r.event.severity == errors::Severity::Warning);
        }
      }
      CHECK(saw_warning);
      CHECK(differing == 0);
    }
  }

  TEST_CASE("emergency stop is visible in the plant view") {
    auto p = default_plant();
    CHECK_FALSE(p.view(0).estop_pressed);
    p.press_estop();
    CHECK(p.view(0).estop_pressed);
    p.release_estop();
    CHECK_FALSE(p.estop_pressed());
    CHECK(p.view(0).workpieces.size() == plant::PlantConfig{}.recipe.size());
  }
}
