#include <doctest.h>

#include <random>
#include <type_traits>

#include "plcsim/procedural/exception_list.hpp"
#include "support.hpp"

using namespace plcsim;
using errors::LocalAction;
using errors::Severity;
using oo::ErrorManager;
using oo::ErrorSink;

namespace {

// Everything a module can reach of the error handling is an ErrorSink.
template <class T>
concept ReadsRecords = requires(T& t) { t.published(); };
template <class T>
concept ExposesStore = requires(T& t) { t.records_; };
template <class T>
concept Acknowledges = requires(T& t) { t.acknowledge(std::nullopt); };

static_assert(!ReadsRecords<ErrorSink>);
static_assert(!Acknowledges<ErrorSink>);
static_assert(!ExposesStore<ErrorSink>);
static_assert(!ExposesStore<ErrorManager>);
static_assert(!ReadsRecords<oo::NeighborStatusQuery>);
static_assert(!std::is_convertible_v<ErrorSink*, ErrorManager*>);
static_assert(std::is_same_v<decltype(std::declval<oo::SinkSlot&>().get()), ErrorSink&>);
static_assert(std::is_same_v<decltype(std::declval<const ErrorManager&>().published()), std::vector<errors::ErrorRecord>>);
static_assert(std::is_abstract_v<ErrorSink>);
static_assert(std::is_base_of_v<ErrorManager, oo::ExtendedErrorManager>);

class FakeQuery : public oo::NeighborStatusQuery {
 public:
  std::map<std::string, Severity> errors;
  [[nodiscard]] oo::NeighborStatus status_of(const ModulePath& path) const override {
    oo::NeighborStatus s;
    for (const auto& [origin, sev] : errors) {
      if (!path.contains(ModulePath::parse(origin))) continue;
      s.has_error = true;
      if (!s.severity_max || sev > *s.severity_max) s.severity_max = sev;
    }
    return s;
  }
};

std::vector<std::string> body(const scenario::RunReport& r) { return {r.trace.begin() + 1, r.trace.end()}; }

}  // namespace

TEST_SUITE("oo") {
  TEST_CASE("every module reports to the one manager instance") {
    for (const auto manager : {oo::ManagerKind::Base, oo::ManagerKind::Extended, oo::ManagerKind::Noop}) {
      auto rt = build_runtime(plant::PlantConfig{}, test::options_for(StrategyKind::OO, manager));
      const auto& strategy = dynamic_cast<const oo::OoStrategy&>(rt->strategy());
      std::set<const ErrorSink*> identities;
      std::size_t control_modules = 0;
      for (const auto& p : rt->module_paths()) {
        const Module* m = rt->find(p);
        identities.insert(m->binding().slot().identity());
        CHECK(m->binding().kind() == "ErrorSink");
        if (m->level() == ModuleLevel::ControlModule) ++control_modules;
      }
      CHECK(control_modules >= 8);
      REQUIRE(identities.size() == 1);
      CHECK(*identities.begin() == &strategy.sink());
      if (manager != oo::ManagerKind::Noop) {
        CHECK(*identities.begin() == static_cast<const ErrorSink*>(&strategy.manager()));
      }
    }
  }

  TEST_CASE("every report reaches the manager") {
    scenario::RunOptions o;
    o.runtime = test::options_for(StrategyKind::OO);
    std::uint64_t dispatches = 0;
    std::size_t records = 0;
    o.observer = [&](const Runtime& rt, const Snapshot& s) {
      const auto& strategy = dynamic_cast<const oo::OoStrategy&>(rt.strategy());
      dispatches = strategy.manager().dispatch_count();
      records = std::max<std::size_t>(records, strategy.manager().last_id());
      for (const auto& m : s.modules) CHECK(m.reporting == "ErrorSink");
    };
    scenario::run_scenario(test::load("drag_fault_crane"), o);
    CHECK(records > 0);
    CHECK(dispatches >= records);
  }

  TEST_CASE("sink slots are set exactly once") {
    oo::SinkSlot slot;
    CHECK_FALSE(slot.is_set());
    CHECK_THROWS_AS((void)slot.get(), BuildError);
    oo::NullErrorSink a;
    oo::NullErrorSink b;
    slot.set(a);
    CHECK(slot.identity() == &a);
    CHECK_THROWS_AS(slot.set(b), BuildError);
    CHECK(slot.identity() == &a);

    auto rt = build_runtime(plant::PlantConfig{}, test::options_for(StrategyKind::OO));
    Module& pusher = *rt->find(ModulePath::parse("xPPU/Stack/Pusher"));
    CHECK_THROWS_AS(oo::inject_sink(pusher, b), BuildError);
    procedural::CentralExceptionList list;
    CHECK_THROWS_AS(pusher.binding().bind_template(list), BuildError);

    ReportBinding unbound;
    CHECK(unbound.kind() == "unbound");
    CHECK_THROWS_AS(unbound.report(errors::ErrorEvent{}), BuildError);
  }

  TEST_CASE("add_error stores, deduplicates and orders") {
    ErrorManager m(errors::default_catalog());
    m.set_tick(7);
    const auto pusher = ModulePath::parse("xPPU/Stack/Pusher");
    const auto press = ModulePath::parse("xPPU/Stamp/Press");
    CHECK(m.add_error(Severity::Message, pusher, "timeout", 1003, "") == 1);
    CHECK(m.add_error(Severity::Message, pusher, "timeout", 1003, "") == 1);
    CHECK(m.add_error(Severity::Message, press, "timeout", 1003, "") == 2);
    const auto list = m.published();
    REQUIRE(list.size() == 2);
    CHECK(list[0].event.severity == Severity::Malfunction);
    CHECK(list[0].event.tick == 7);
    CHECK(list[0].event.cause == "timeout");
    CHECK_FALSE(list[0].event.message.empty());
    CHECK(m.dispatch_count() == 3);
    CHECK(m.published_since(1).size() == 1);

    CHECK(m.add_error(Severity::Warning, press, "x", 4711, "odd") == 3);
    CHECK(m.published().back().event.severity == Severity::Error);
    const auto audit = m.take_audit();
    REQUIRE(audit.size() == 1);
    CHECK(audit[0].find("uncataloged") != std::string::npos);

    CHECK(m.acknowledge(1).accepted);
    CHECK_FALSE(m.acknowledge(1).accepted);
    CHECK_FALSE(m.acknowledge(42).accepted);
    m.clear_acknowledged();
    CHECK(m.published().size() == 2);
    CHECK(m.add_error(Severity::Message, pusher, "timeout", 1003, "") == 4);
  }

  TEST_CASE("records of one scan follow evaluation order") {
    std::mt19937 rng(17);
    auto rt0 = build_runtime(plant::PlantConfig{});
    std::map<ModulePath, std::size_t> index;
    for (const auto& p : rt0->module_paths()) index[p] = index.size();
    const std::vector<std::string> cylinders{"xPPU/Stack/Pusher", "xPPU/Stamp/Press", "xPPU/Crane/Lift"};
    std::size_t same_tick_pairs = 0;
    for (int run = 0; run < 10; ++run) {
      std::vector<scenario::ScheduleEntry> extra;
      const std::int64_t at = 21 + static_cast<std::int64_t>(rng() % 300);
      for (std::size_t k = 0; k < cylinders.size(); ++k) {
        extra.push_back({at, cmd::InjectFault{test::fault("j" + std::to_string(k), plant::FaultKind::JammedWorkPiece,
                                                          cylinders[k])}});
      }
      extra.push_back({at, cmd::InjectFault{test::fault("m", plant::FaultKind::MotorJam, "xPPU/Crane/Base")}});
      const auto r = test::run(test::nominal_with(at + 120, extra), test::options_for(StrategyKind::OO));
      const auto last = nlohmann::json::parse(r.trace.back());
      std::vector<std::pair<std::int64_t, std::size_t>> seq;
      for (const auto& rec : last["errors"]) {
        seq.emplace_back(rec["tick"].get<std::int64_t>(), index.at(ModulePath::parse(rec["origin"].get<std::string>())));
      }
      for (std::size_t i = 1; i < seq.size(); ++i) {
        CHECK(seq[i - 1].first <= seq[i].first);
        if (seq[i - 1].first == seq[i].first) {
          ++same_tick_pairs;
          CHECK(seq[i - 1].second < seq[i].second);
        }
      }
    }
    CHECK(same_tick_pairs > 0);
  }

  TEST_CASE("neighbors are siblings plus the parent equipment module") {
    auto rt = build_runtime(plant::PlantConfig{});
    auto names = [&](const std::string& p) {
      std::set<std::string> out;
      for (const auto& n : neighbors_of(*rt->find(ModulePath::parse(p)))) out.insert(n.str());
      return out;
    };
    CHECK(names("xPPU").empty());
    CHECK(names("xPPU/Crane") == std::set<std::string>{"xPPU/Stack", "xPPU/Stamp", "xPPU/SortingConveyor"});
    CHECK(names("xPPU/Crane/Base") == std::set<std::string>{"xPPU/Crane", "xPPU/Crane/Lift", "xPPU/Crane/Gripper"});
    CHECK(names("xPPU/Stack/Pusher") == std::set<std::string>{"xPPU/Stack"});
  }

  TEST_CASE("local reaction decisions") {
    auto rt = build_runtime(plant::PlantConfig{});
    auto decide = [&](const FakeQuery& q, const std::string& p) {
      return oo::decide_local_reaction(*rt->find(ModulePath::parse(p)), q);
    };
    FakeQuery none;
    for (const auto& p : rt->module_paths()) CHECK(decide(none, p.str()) == LocalAction::Ignore);

    FakeQuery gripper;
    gripper.errors["xPPU/Crane"] = Severity::Error;
    CHECK(decide(gripper, "xPPU/Crane") == LocalAction::AbortNow);
    CHECK(decide(gripper, "xPPU/SortingConveyor") == LocalAction::StopEndOfCycle);
    CHECK(decide(gripper, "xPPU/Stack") == LocalAction::StopEndOfCycle);
    CHECK(decide(gripper, "xPPU/Crane/Base") == LocalAction::StopEndOfCycle);

    FakeQuery belt;
    belt.errors["xPPU/SortingConveyor"] = Severity::Warning;
    for (const auto& p : rt->module_paths()) CHECK(decide(belt, p.str()) == LocalAction::Ignore);

    FakeQuery drag;
    drag.errors["xPPU/Crane/Base"] = Severity::Malfunction;
    CHECK(decide(drag, "xPPU/Crane/Base") == LocalAction::StopEndOfCycle);
    CHECK(decide(drag, "xPPU/Crane/Lift") == LocalAction::StopEndOfCycle);
    CHECK(decide(drag, "xPPU/Stack") == LocalAction::StopEndOfCycle);
    CHECK(decide(drag, "xPPU/Stack/Pusher") == LocalAction::Ignore);

    ErrorManager m(errors::default_catalog());
    CHECK(m.status_of(ModulePath::parse("xPPU/Nowhere")) == oo::NeighborStatus{});
  }

  TEST_CASE("manager status aggregates the subtree and ignores acknowledged records") {
    ErrorManager m(errors::default_catalog());
    m.add_error(Severity::Error, ModulePath::parse("xPPU/Crane/Base"), "c", 1001, "");
    m.add_error(Severity::Error, ModulePath::parse("xPPU/Crane"), "c", 2002, "");
    auto s = m.status_of(ModulePath::parse("xPPU/Crane"));
    CHECK(s.has_error);
    CHECK(s.severity_max == Severity::Error);
    CHECK(m.status_of(ModulePath::parse("xPPU/Crane/Base")).severity_max == Severity::Malfunction);
    CHECK_FALSE(m.status_of(ModulePath::parse("xPPU/Stack")).has_error);
    m.acknowledge(2);
    CHECK(m.status_of(ModulePath::parse("xPPU/Crane")).severity_max == Severity::Malfunction);
  }

  TEST_CASE("process logic runs unchanged without error handling") {
    const auto s = test::load("nominal_sort_6wp");
    const auto base = test::run(s, test::options_for(StrategyKind::OO));
    const auto noop = test::run(s, test::options_for(StrategyKind::OO, oo::ManagerKind::Noop));
    CHECK(body(base) == body(noop));
    CHECK(base.passed());
  }

  TEST_CASE("the extended manager is a drop-in replacement") {
    for (const auto& name : test::bundled_scenarios()) {
      CAPTURE(name);
      const auto s = test::load(name);
      const auto base = test::run(s, test::options_for(StrategyKind::OO));
      const auto ext = test::run(s, test::options_for(StrategyKind::OO, oo::ManagerKind::Extended));
      CHECK(body(base) == body(ext));
    }
    scenario::RunOptions o;
    o.runtime = test::options_for(StrategyKind::OO, oo::ManagerKind::Extended);
    std::vector<std::string> channel;
    std::size_t critical = 0;
    o.observer = [&](const Runtime& rt, const Snapshot&) {
      const auto& m = dynamic_cast<const oo::ExtendedErrorManager&>(
          dynamic_cast<const oo::OoStrategy&>(rt.strategy()).manager());
      channel = m.audit_channel();
      critical = m.published_at_least(Severity::Malfunction).size();
    };
    scenario::run_scenario(test::load("fig1_estop_recovery"), o);
    REQUIRE_FALSE(channel.empty());
    CHECK(channel[0].find("2002") != std::string::npos);
    CHECK(critical == 0);
  }

  TEST_CASE("recovery follows the same contract as the procedural bit") {
    SUBCASE("estop recovery under both strategies") {
      for (const auto kind : {StrategyKind::Procedural, StrategyKind::OO}) {
        scenario::RunOptions o;
        o.runtime = test::options_for(kind);
        std::vector<bool> pending;
        o.observer = [&](const Runtime& rt, const Snapshot&) { pending.push_back(rt.strategy().recovery_pending()); };
        const auto r = scenario::run_scenario(test::load("fig1_estop_recovery"), o);
        CHECK(r.passed());
        CHECK(pending[60]);
        CHECK_FALSE(pending.back());
      }
    }
    SUBCASE("an open malfunction blocks automatic") {
      RecoveryGate gate;
      gate.arm();
      gate.observe(modes::MachineState::STOPPED, modes::OperatingMode::Manual);
      gate.observe(modes::MachineState::RESETTING, modes::OperatingMode::Manual);
      ErrorManager m(errors::default_catalog());
      m.add_error(Severity::Malfunction, ModulePath::parse("xPPU/Crane/Base"), "drag", 1001, "");
      const auto d = oo::oo_recover(gate, m);
      CHECK_FALSE(d.open);
      CHECK(d.reason.find("1001") != std::string::npos);
      m.acknowledge(std::nullopt);
      CHECK(oo::oo_recover(gate, m).open);
    }
    SUBCASE("warnings leave the gate alone") {
      scenario::RunOptions o;
      o.runtime = test::options_for(StrategyKind::OO);
      bool ever = false;
      o.observer = [&](const Runtime& rt, const Snapshot&) { ever |= rt.strategy().recovery_pending(); };
      scenario::run_scenario(test::load("belt_wp_lost_warning"), o);
      CHECK_FALSE(ever);
    }
  }
}
