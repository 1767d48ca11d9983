#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "plcsim/procedural/procedural_strategy.hpp"
#include "support.hpp"

using namespace plcsim;
using errors::LocalAction;
using errors::ReactionCode;
using procedural::CentralExceptionList;

namespace {

errors::ErrorEvent event(int number, const std::string& origin, std::int64_t tick = 1) {
  errors::ErrorEvent e;
  e.number = number;
  e.origin = ModulePath::parse(origin);
  e.cause = "test";
  e.tick = tick;
  return e;
}

std::map<std::string, bool> outputs_under(const Snapshot& s, const ModulePath& root) {
  std::map<std::string, bool> out;
  for (const auto& [name, v] : s.io.digital_outputs) {
    if (root.contains(ModulePath::parse(name.substr(0, name.find('.'))))) out[name] = v;
  }
  for (const auto& [name, v] : s.io.analog_outputs) {
    if (root.contains(ModulePath::parse(name.substr(0, name.find('.'))))) out[name + "#" + std::to_string(v)] = true;
  }
  return out;
}

std::vector<Snapshot> collect(const scenario::Scenario& s, RuntimeOptions o = {}) {
  std::vector<Snapshot> out;
  test::run(s, o, [&](const Snapshot& snap) { out.push_back(snap); });
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class L>
concept ListIsOpen = requires(L& l) {
  l.records.clear();
  l.next_id = 1;
};
static_assert(ListIsOpen<CentralExceptionList>);

}  // namespace

TEST_SUITE("procedural") {
  TEST_CASE("set exception assigns ids, suppresses duplicates and keeps call order") {
    CentralExceptionList list;
    list.catalog = &errors::default_catalog();
    CHECK(procedural::fc_set_exception(list, event(1003, "xPPU/Stack/Pusher")) == 1);
    CHECK(list.records.size() == 1);
    CHECK(list.records[0].event.severity == errors::Severity::Malfunction);
    CHECK_FALSE(list.records[0].event.message.empty());
    CHECK(procedural::fc_set_exception(list, event(1003, "xPPU/Stack/Pusher", 2)) == 1);
    CHECK(list.records.size() == 1);
    CHECK(procedural::fc_set_exception(list, event(1003, "xPPU/Stamp/Press", 2)) == 2);
    CHECK(procedural::fc_set_exception(list, event(1001, "xPPU/Crane/Base", 2)) == 3);
    CHECK(list.records[1].event.origin.str() == "xPPU/Stamp/Press");

    CHECK(procedural::fc_acknowledge(list, 1).accepted);
    CHECK(procedural::fc_set_exception(list, event(1003, "xPPU/Stack/Pusher", 3)) == 4);
  }

  TEST_CASE("uncataloged numbers are stored as errors and audited") {
    CentralExceptionList list;
    list.catalog = &errors::default_catalog();
    auto e = event(4711, "xPPU/Crane");
    e.severity = errors::Severity::Message;
    procedural::fc_set_exception(list, e);
    CHECK(list.records.back().event.severity == errors::Severity::Error);
    REQUIRE(list.audit.size() == 1);
    CHECK(list.audit[0].find("uncataloged") != std::string::npos);
  }

  TEST_CASE("acknowledge and clear") {
    CentralExceptionList list;
    list.catalog = &errors::default_catalog();
    procedural::fc_set_exception(list, event(1003, "xPPU/Stack/Pusher"));
    procedural::fc_set_exception(list, event(2001, "xPPU/SortingConveyor"));
    CHECK_FALSE(procedural::fc_acknowledge(list, 9).accepted);
    CHECK(procedural::fc_acknowledge(list, 2).accepted);
    const auto again = procedural::fc_acknowledge(list, 2);
    CHECK_FALSE(again.accepted);
    CHECK(again.reason.find("not active") != std::string::npos);
    CHECK(procedural::fc_acknowledge(list, std::nullopt).acknowledged == 1);
    procedural::fc_clear_acknowledged(list);
    CHECK(procedural::fc_active_records(list).empty());
    CHECK(list.records.size() == 2);
  }

  TEST_CASE("matrix loading only warns about problems") {
    std::vector<std::string> warnings;
    const auto m = procedural::ReactionMatrix::from_json(R"({
      "xPPU/Stack": {"effectiveRange": [1, 2, 99, "x"], "rows": {"2": "Hold", "7": "Hold", "abc": "Hold", "3": "Explode"}, "colour": 1},
      "xPPU/Crane": {"rows": {}},
      "xPPU/Nowhere": {"effectiveRange": [1]},
      "xPPU/Bad": 5
    })",
                                                          &warnings);
    auto has = [&](const std::string& needle) {
      return std::any_of(warnings.begin(), warnings.end(),
                         [&](const std::string& w) { return w.find(needle) != std::string::npos; });
    };
    CHECK(has("effectiveRange value 99"));
    CHECK(has("effectiveRange value \"x\""));
    CHECK(has("row abc"));
    CHECK(has("row 3"));
    CHECK(has("row 7 lies outside"));
    CHECK(has("unknown field colour"));
    CHECK(has("xPPU/Crane has no effectiveRange"));
    CHECK(has("xPPU/Bad is not an object"));
    const auto* stack = m.find("xPPU/Stack");
    REQUIRE(stack != nullptr);
    CHECK(stack->effective_range == std::set<int>{1, 2});

    auto rt = build_runtime(plant::PlantConfig{});
    const auto structural = m.check_against(rt->root());
    CHECK(std::count_if(structural.begin(), structural.end(),
                        [](const std::string& w) { return w.find("no line set") != std::string::npos; }) == 11);
    CHECK(std::count_if(structural.begin(), structural.end(),
                        [](const std::string& w) { return w.find("unknown module") != std::string::npos; }) == 1);

    CHECK_THROWS_AS(procedural::ReactionMatrix::from_json("[1, 2]"), std::runtime_error);
    CHECK_THROWS_AS(procedural::ReactionMatrix::from_json("{"), std::runtime_error);
  }

  TEST_CASE("an incomplete matrix still builds and is audited") {
    procedural::ReactionMatrix m;
    m.set("xPPU", procedural::MatrixRow{{1, 2}, {}});
    RuntimeOptions o;
    o.matrix = m;
    auto rt = build_runtime(plant::PlantConfig{}, o);
    const auto& snap = rt->snapshot();
    CHECK(std::count_if(snap.audit.begin(), snap.audit.end(),
                        [](const std::string& w) { return w.find("no line set") != std::string::npos; }) == 12);
  }

  TEST_CASE("matrix json round-trips") {
    auto rt = build_runtime(plant::PlantConfig{});
    const auto m = procedural::ReactionMatrix::derive_default(rt->root());
    std::vector<std::string> warnings;
    CHECK(procedural::ReactionMatrix::from_json(m.to_json(), &warnings) == m);
    CHECK(warnings.empty());
    CHECK(m.entries().size() == rt->module_paths().size());
    CHECK(m.find("xPPU/SortingConveyor")->rows.at(32) == LocalAction::StopEndOfCycle);
    CHECK_FALSE(m.find("xPPU/Stack")->effective_range.count(32));
  }

  TEST_CASE("codes resolve through the line set") {
    procedural::ReactionMatrix m;
    m.set("xPPU/A", procedural::MatrixRow{{1, 2, 3, 4, 5}, {}});
    m.set("xPPU/B", procedural::MatrixRow{{1, 2, 3, 4, 5, 32}, {{32, LocalAction::Hold}, {2, LocalAction::AbortNow}}});
    const auto a = ModulePath::parse("xPPU/A");
    const auto b = ModulePath::parse("xPPU/B");
    CHECK(m.resolve(a, ReactionCode(2)) == LocalAction::StopEndOfCycle);
    CHECK(m.resolve(a, ReactionCode(32)) == LocalAction::Ignore);
    CHECK(m.resolve(b, ReactionCode(32)) == LocalAction::Hold);
    CHECK(m.resolve(b, ReactionCode(2)) == LocalAction::AbortNow);
    CHECK(m.resolve(b, ReactionCode(0)) == LocalAction::Ignore);
    CHECK(m.resolve(ModulePath::parse("xPPU/C"), ReactionCode(1)) == LocalAction::Ignore);
  }

  TEST_CASE("broadcast examples") {
    SUBCASE("code 2 reaches every module") {
      auto rt = build_runtime(plant::PlantConfig{});
      const auto m = procedural::ReactionMatrix::derive_default(rt->root());
      const auto r = procedural::broadcast_reaction(rt->root(), ReactionCode(2), m, 1, "operator");
      REQUIRE(r.deliveries.size() == 13);
      for (const auto& d : r.deliveries) CHECK(d.action == LocalAction::StopEndOfCycle);
    }
    SUBCASE("code 32 only reaches a module that maps it") {
      auto rt = build_runtime(plant::PlantConfig{});
      procedural::ReactionMatrix m;
      for (const auto& p : rt->module_paths()) m.set(p.str(), procedural::MatrixRow{{1, 2, 3, 4, 5}, {}});
      m.set("xPPU/SortingConveyor", procedural::MatrixRow{{1, 2, 3, 4, 5, 32}, {{32, LocalAction::StopEndOfCycle}}});
      const auto r = procedural::broadcast_reaction(rt->root(), ReactionCode(32), m, 1, "operator");
      for (const auto& d : r.deliveries) {
        CAPTURE(d.path.str());
        CHECK(d.action == (d.path.str() == "xPPU/SortingConveyor" ? LocalAction::StopEndOfCycle : LocalAction::Ignore));
      }
      CHECK(rt->find(ModulePath::parse("xPPU/SortingConveyor"))->reaction() == LocalAction::StopEndOfCycle);
      CHECK(rt->find(ModulePath::parse("xPPU/Stack"))->reaction() == LocalAction::Ignore);
    }
    SUBCASE("code 0 is ignored everywhere") {
      auto rt = build_runtime(plant::PlantConfig{});
      const auto m = procedural::ReactionMatrix::derive_default(rt->root());
      const auto r = procedural::broadcast_reaction(rt->root(), ReactionCode(0), m, 1, "operator");
      for (const auto& d : r.deliveries) CHECK(d.action == LocalAction::Ignore);
    }
  }

  TEST_CASE("every delivery covers each module once in evaluation order") {
    std::size_t reports = 0;
    for (const auto& name : test::bundled_scenarios()) {
      CAPTURE(name);
      std::int64_t bad = 0;
      scenario::RunOptions o;
      o.runtime = test::options_for(StrategyKind::Procedural);
      o.observer = [&](const Runtime& rt, const Snapshot&) {
        const auto order = rt.module_paths();
        for (const auto& r : rt.last_deliveries()) {
          ++reports;
          if (r.deliveries.size() != order.size()) {
            ++bad;
            continue;
          }
          for (std::size_t i = 0; i < order.size(); ++i) {
            if (r.deliveries[i].path != order[i]) ++bad;
          }
        }
      };
      scenario::run_scenario(test::load(name), o);
      CHECK(bad == 0);
    }
    CHECK(reports > 0);
  }

  TEST_CASE("a code outside every line set leaves all outputs untouched") {
    const auto base = collect(test::nominal_with(900));
    const auto whole = ModulePath::parse("xPPU");
    for (const int code : {6, 17, 31, 33, 48, 63}) {
      CAPTURE(code);
      const auto other = collect(test::nominal_with(900, {{300, cmd::ReactionOverride{code}}}));
      REQUIRE(other.size() == base.size());
      std::int64_t differing = 0;
      for (std::size_t i = 0; i < base.size(); ++i) {
        if (outputs_under(base[i], whole) != outputs_under(other[i], whole)) ++differing;
        for (const auto& m : other[i].modules) CHECK(m.reaction == LocalAction::Ignore);
      }
      CHECK(differing == 0);
    }
  }

  TEST_CASE("code 32 is ignored by modules without the line") {
    const auto stack = ModulePath::parse("xPPU/Stack");
    const auto base = collect(test::nominal_with(1000));
    for (const std::int64_t at : {150, 400, 690}) {
      CAPTURE(at);
      const auto other = collect(test::nominal_with(1000, {{at, cmd::ReactionOverride{32}}}));
      bool acted = false;
      for (const auto& s : other) {
        for (const auto& m : s.modules) {
          if (m.path.str() == "xPPU/SortingConveyor") {
            acted |= m.reaction == LocalAction::StopEndOfCycle;
          } else {
            CHECK(m.reaction == LocalAction::Ignore);
          }
        }
      }
      CHECK(acted);
    }
    // Once the stack has fed its last piece nothing couples it to the conveyor.
    const auto late = collect(test::nominal_with(1000, {{690, cmd::ReactionOverride{32}}}));
    std::int64_t differing = 0;
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (outputs_under(base[i], stack) != outputs_under(late[i], stack)) ++differing;
    }
    CHECK(differing == 0);
  }

  TEST_CASE("the recovery bit follows critical reactions only") {
    SUBCASE("warnings never set it") {
      scenario::RunOptions o;
      bool ever = false;
      o.observer = [&](const Runtime& rt, const Snapshot&) { ever |= rt.strategy().recovery_pending(); };
      scenario::run_scenario(test::load("belt_wp_lost_warning"), o);
      CHECK_FALSE(ever);
    }
    SUBCASE("an error sets it until the operator recovered") {
      scenario::RunOptions o;
      std::vector<bool> bit;
      o.observer = [&](const Runtime& rt, const Snapshot&) {
        bit.push_back(dynamic_cast<const procedural::ProceduralStrategy&>(rt.strategy()).recovery_bit());
      };
      scenario::run_scenario(test::load("fig1_estop_recovery"), o);
      CHECK_FALSE(bit[29]);
      CHECK(bit[60]);
      CHECK(bit[150]);
      CHECK_FALSE(bit.back());
    }
  }

  TEST_CASE("modules only touch the exception list through the set-exception routine") {
    namespace fs = std::filesystem;
    const fs::path src = PLCSIM_TEST_SOURCE_DIR;
    const std::regex list_access(R"(\.records\b|->records\b|next_id|CentralExceptionList|fc_acknowledge|fc_clear_acknowledged)");
    const std::regex set_call(R"(fc_set_exception)");
    std::vector<std::string> callers;
    for (const auto& dir : {"src/actuators", "src/plant", "include/plcsim/actuators", "include/plcsim/plant"}) {
      for (const auto& entry : fs::recursive_directory_iterator(src / dir)) {
        const auto text = read_file(entry.path());
        CAPTURE(entry.path().string());
        CHECK_FALSE(std::regex_search(text, list_access));
        CHECK_FALSE(std::regex_search(text, set_call));
      }
    }
    for (const auto& entry : fs::recursive_directory_iterator(src / "src")) {
      if (entry.path().parent_path().filename() == "procedural") continue;
      if (std::regex_search(read_file(entry.path()), set_call)) callers.push_back(entry.path().filename().string());
    }
    CHECK(callers == std::vector<std::string>{"module.cpp"});
  }

  TEST_CASE("the list is reachable by anyone holding the strategy") {
    auto rt = build_runtime(plant::PlantConfig{}, test::options_for(StrategyKind::Procedural));
    auto& strategy = dynamic_cast<procedural::ProceduralStrategy&>(rt->strategy());
    procedural::fc_set_exception(strategy.exception_list(), event(2001, "xPPU/SortingConveyor"));
    const auto& snap = rt->scan();
    REQUIRE(snap.errors.size() == 1);
    CHECK(snap.errors[0].event.number == 2001);
    strategy.exception_list().records.clear();
    CHECK(rt->scan().errors.empty());
    for (const auto& m : rt->snapshot().modules) CHECK(m.reporting == "FC_SetException");
  }
}
