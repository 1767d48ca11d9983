#include <doctest.h>

#include <fstream>
#include <map>
#include <random>

#include "support.hpp"

using namespace plcsim;
using errors::ReactionCode;
using errors::Severity;

namespace {

scenario::Scenario random_fault_run(std::mt19937& rng) {
  const std::vector<std::pair<plant::FaultKind, std::string>> targets{
      {plant::FaultKind::JammedWorkPiece, "xPPU/Stack/Pusher"},
      {plant::FaultKind::JammedWorkPiece, "xPPU/Stamp/Press"},
      {plant::FaultKind::JammedWorkPiece, "xPPU/Crane/Lift"},
      {plant::FaultKind::JammedWorkPiece, "xPPU/SortingConveyor/Separator1"},
      {plant::FaultKind::MotorJam, "xPPU/Crane/Base"},
      {plant::FaultKind::MotorJam, "xPPU/SortingConveyor/Belt"},
      {plant::FaultKind::DragDisturbance, "xPPU/Crane/Base"},
      {plant::FaultKind::GripperSensorFail, "xPPU/Crane/Gripper"},
      {plant::FaultKind::WpLostFromBelt, ""},
  };
  std::vector<scenario::ScheduleEntry> extra;
  for (int k = 0; k < 3; ++k) {
    const auto& [kind, target] = targets[rng() % targets.size()];
    auto f = test::fault("f" + std::to_string(k), kind, target);
    if (kind == plant::FaultKind::WpLostFromBelt) f.wp_id = 1 + static_cast<int>(rng() % 6);
    if (kind == plant::FaultKind::DragDisturbance) f.magnitude = 1.0 + rng() % 4;
    const std::int64_t at = 21 + static_cast<std::int64_t>(rng() % 500);
    extra.push_back({at, cmd::InjectFault{f}});
    if (rng() % 2) extra.push_back({at + 40 + static_cast<std::int64_t>(rng() % 60), cmd::Acknowledge{}});
    if (rng() % 2) extra.push_back({at + 120, cmd::ClearFault{f.id}});
  }
  if (rng() % 3 == 0) extra.push_back({static_cast<std::int64_t>(30 + rng() % 400), cmd::EStop{}});
  return test::nominal_with(700, std::move(extra));
}

}  // namespace

TEST_SUITE("errors") {
  TEST_CASE("severities are totally ordered and only the critical ones demand a reaction") {
    CHECK(Severity::Message < Severity::Warning);
    CHECK(Severity::Warning < Severity::Malfunction);
    CHECK(Severity::Malfunction < Severity::Error);
    CHECK_FALSE(errors::requires_reaction(Severity::Message));
    CHECK_FALSE(errors::requires_reaction(Severity::Warning));
    CHECK(errors::requires_reaction(Severity::Malfunction));
    CHECK(errors::requires_reaction(Severity::Error));
    for (auto s : {Severity::Message, Severity::Warning, Severity::Malfunction, Severity::Error}) {
      CHECK(errors::parse_severity(errors::to_string(s)) == s);
    }
    CHECK_FALSE(errors::parse_severity("Fatal").has_value());
  }

  TEST_CASE("reaction codes span 0..63") {
    CHECK(ReactionCode::kWidth == 64);
    CHECK_NOTHROW(ReactionCode(0));
    CHECK_NOTHROW(ReactionCode(63));
    CHECK_THROWS_AS(ReactionCode(-1), std::out_of_range);
    CHECK_THROWS_AS(ReactionCode(64), std::out_of_range);
    CHECK(ReactionCode(0).is_none());
    for (int c = 1; c <= 5; ++c) CHECK(ReactionCode(c).is_standard());
    for (int c = 6; c <= 31; ++c) {
      CHECK_FALSE(ReactionCode(c).is_standard());
      CHECK_FALSE(ReactionCode(c).is_application_specific());
    }
    for (int c = 32; c <= 63; ++c) CHECK(ReactionCode(c).is_application_specific());
  }

  TEST_CASE("the code space is wider than the reactions in use") {
    std::set<int> defined{1, 2, 3, 4, 5};
    for (const auto& [em, table] : plant::PlantConfig{}.application_reactions) {
      for (const auto& [code, action] : table) defined.insert(code);
    }
    CHECK(static_cast<int>(defined.size()) < ReactionCode::kWidth);
  }

  TEST_CASE("default reactions follow severity") {
    CHECK(errors::default_reaction_for(Severity::Message) == ReactionCode::none());
    CHECK(errors::default_reaction_for(Severity::Warning) == ReactionCode::none());
    CHECK(errors::default_reaction_for(Severity::Malfunction) == ReactionCode::stop_controlled());
    CHECK(errors::default_reaction_for(Severity::Error) == ReactionCode::abort_immediate());
  }

  TEST_CASE("standard codes map to local actions and rank by severity") {
    using errors::LocalAction;
    const std::map<int, LocalAction> expected{{0, LocalAction::Ignore},      {1, LocalAction::AbortNow},
                                              {2, LocalAction::StopEndOfCycle}, {3, LocalAction::Hold},
                                              {4, LocalAction::Suspend},     {5, LocalAction::FinishCycle},
                                              {6, LocalAction::Ignore},      {32, LocalAction::Ignore},
                                              {63, LocalAction::Ignore}};
    for (const auto& [code, action] : expected) CHECK(errors::standard_action_for(ReactionCode(code)) == action);
    CHECK(errors::reaction_priority(ReactionCode(1)) < errors::reaction_priority(ReactionCode(2)));
    CHECK(errors::reaction_priority(ReactionCode(2)) < errors::reaction_priority(ReactionCode(0)));
    CHECK(action_rank(LocalAction::AbortNow) < action_rank(LocalAction::StopEndOfCycle));
    CHECK(action_rank(LocalAction::StopEndOfCycle) < action_rank(LocalAction::Ignore));
    for (auto a : {LocalAction::Ignore, LocalAction::AbortNow, LocalAction::StopEndOfCycle, LocalAction::Hold,
                   LocalAction::Suspend, LocalAction::FinishCycle}) {
      CHECK(errors::parse_local_action(errors::to_string(a)) == a);
    }
  }

  TEST_CASE("catalog documents round-trip and reject duplicates") {
    const auto& c = errors::default_catalog();
    CHECK(errors::ErrorCatalog::from_json(c.to_json()) == c);
    CHECK(c.severity_of(2001) == Severity::Warning);
    CHECK(c.severity_of(2002) == Severity::Error);
    CHECK(c.severity_of(1001) == Severity::Malfunction);
    CHECK(c.severity_of(4242) == Severity::Error);
    CHECK(c.reaction_for(1003) == ReactionCode::stop_controlled());

    const auto custom = errors::ErrorCatalog::from_json(
        R"([{"number": 7, "message": "m", "severity": "Warning", "reactionOverride": 3}])");
    CHECK(custom.reaction_for(7) == ReactionCode::hold());
    CHECK(errors::ErrorCatalog::from_json(custom.to_json()) == custom);

    CHECK_THROWS_AS(errors::ErrorCatalog::from_json(
                        R"([{"number": 7, "message": "a", "severity": "Warning"},
                            {"number": 7, "message": "b", "severity": "Error"}])"),
                    std::runtime_error);
    CHECK_THROWS_AS(errors::ErrorCatalog::from_json("{}"), std::runtime_error);
    CHECK_THROWS_AS(errors::ErrorCatalog::from_json("[{\"number\": 1}]"), std::runtime_error);
    CHECK_THROWS_AS(errors::ErrorCatalog::from_json(
                        R"([{"number": 1, "message": "a", "severity": "Bad"}])"),
                    std::runtime_error);
    CHECK_THROWS_AS(errors::ErrorCatalog::from_json(
                        R"([{"number": 1, "message": "a", "severity": "Error", "reactionOverride": 99}])"),
                    std::runtime_error);
    CHECK_THROWS_AS(errors::ErrorCatalog::from_json(R"([{"number": "x", "severity": "Error"}])"), std::runtime_error);
    CHECK_THROWS_AS(errors::ErrorCatalog::from_json("not json"), std::runtime_error);
  }

  TEST_CASE("bundled config documents equal the built-in defaults") {
    const std::string dir = PLCSIM_TEST_CONFIG_DIR;
    CHECK(errors::ErrorCatalog::from_file(dir + "/error_catalog.json") == errors::default_catalog());
    auto rt = build_runtime(plant::PlantConfig{});
    std::vector<std::string> warnings;
    const auto matrix = procedural::ReactionMatrix::from_file(dir + "/reaction_matrix.json", &warnings);
    CHECK(warnings.empty());
    CHECK(matrix == procedural::ReactionMatrix::derive_default(rt->root()));
  }

  TEST_CASE("record ids are unique and states only move forward") {
    std::mt19937 rng(99);
    for (const auto kind : {StrategyKind::Procedural, StrategyKind::OO}) {
      for (int run = 0; run < 6; ++run) {
        std::map<errors::RecordId, errors::RecordState> last;
        std::map<errors::RecordId, errors::ErrorEvent> events;
        errors::RecordId high = 0;
        std::int64_t violations = 0;
        test::run(random_fault_run(rng), test::options_for(kind), [&](const Snapshot& s) {
          std::set<errors::RecordId> seen;
          errors::RecordId prev = 0;
          for (const auto& r : s.errors) {
            if (!seen.insert(r.id).second || r.id <= prev) ++violations;
            prev = r.id;
            const auto it = last.find(r.id);
            if (it == last.end()) {
              if (r.id <= high || r.state != errors::RecordState::Active) ++violations;
              high = std::max(high, r.id);
              events[r.id] = r.event;
            } else {
              if (static_cast<int>(r.state) < static_cast<int>(it->second)) ++violations;
              if (events[r.id] != r.event) ++violations;
            }
            last[r.id] = r.state;
          }
          for (const auto& [id, state] : last) {
            if (!seen.count(id) && state == errors::RecordState::Active) ++violations;
          }
        });
        CHECK(violations == 0);
      }
    }
  }

  TEST_CASE("every raised number is cataloged") {
    std::mt19937 rng(2718);
    const auto& catalog = errors::default_catalog();
    std::set<int> raised;
    for (int run = 0; run < 16; ++run) {
      const auto s = random_fault_run(rng);
      for (const auto kind : {StrategyKind::Procedural, StrategyKind::OO}) {
        test::run(s, test::options_for(kind), [&](const Snapshot& snap) {
          for (const auto& r : snap.errors) {
            raised.insert(r.event.number);
            CHECK(catalog.contains(r.event.number));
            CHECK(r.event.severity == catalog.severity_of(r.event.number));
            CHECK(r.event.message == catalog.find(r.event.number)->message);
          }
          for (const auto& line : snap.audit) CHECK(line.find("uncataloged") == std::string::npos);
        });
      }
    }
    CHECK(raised.size() >= 4);
  }

  TEST_CASE("both strategies execute every scenario unchanged") {
    for (const auto& name : test::bundled_scenarios()) {
      CAPTURE(name);
      const auto s = test::load(name);
      for (const auto kind : {StrategyKind::Procedural, StrategyKind::OO}) {
        const auto r = test::run(s, test::options_for(kind));
        CHECK(r.ticks == s.run_ticks);
      }
    }
  }

  TEST_CASE("recovery gate sequence") {
    RecoveryGate gate;
    errors::ErrorRecord rec;
    rec.id = 1;
    rec.event.number = 1003;
    rec.event.severity = Severity::Malfunction;
    CHECK(gate.check({rec}).open);
    gate.arm();
    CHECK_FALSE(gate.check({rec}).open);
    rec.state = errors::RecordState::Acknowledged;
    CHECK(gate.check({rec}).reason.find("manual") != std::string::npos);
    gate.observe(modes::MachineState::ABORTED, modes::OperatingMode::Manual);
    CHECK(gate.check({rec}).reason.find("cleared") != std::string::npos);
    gate.observe(modes::MachineState::CLEARING, modes::OperatingMode::Manual);
    CHECK(gate.check({rec}).open);

    errors::ErrorRecord warn;
    warn.event.severity = Severity::Warning;
    gate.arm();
    gate.observe(modes::MachineState::RESETTING, modes::OperatingMode::Jog);
    CHECK(gate.check({warn}).open);
  }
}
