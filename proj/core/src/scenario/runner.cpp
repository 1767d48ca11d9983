#include "plcsim/scenario/runner.hpp"

#include <algorithm>

#include "plcsim/runtime/trace.hpp"

namespace plcsim::scenario {

using nlohmann::json;

bool RunReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const auto& a) { return a.passed; });
}

namespace {

void check_path(const std::vector<ModulePath>& known, const ModulePath& p, const std::string& where) {
  if (std::find(known.begin(), known.end(), p) == known.end()) {
    throw ValidationError(where + ": unknown module path " + p.str());
  }
}

void check_predicate_paths(const json& p, const std::vector<ModulePath>& known, const std::string& label) {
  const std::string key = p.begin().key();
  const json& arg = p.begin().value();
  if (key == "hasError" || key == "signal" || key == "reaction") {
    check_path(known, ModulePath::parse(arg.at("path").get<std::string>()), "assertion '" + label + "'");
  }
  if (key == "error" || key == "noError") {
    if (arg.contains("origin")) {
      check_path(known, ModulePath::parse(arg.at("origin").get<std::string>()), "assertion '" + label + "'");
    }
  }
  if (key == "not") check_predicate_paths(arg, known, label);
  if (key == "allOf" || key == "anyOf") {
    for (const auto& q : arg) check_predicate_paths(q, known, label);
  }
}

struct Tracker {
  const Assertion* a;
  bool passed;
  bool decided = false;
  std::optional<std::int64_t> tick;
};

}  // namespace

void validate_against_runtime(const Scenario& s, const Runtime& rt) {
  const auto known = rt.module_paths();
  for (const auto& e : s.schedule) {
    const std::string where = "schedule tick " + std::to_string(e.tick);
    if (const auto* m = std::get_if<cmd::ManualOutput>(&e.command)) check_path(known, m->path, where);
    if (const auto* j = std::get_if<cmd::Jog>(&e.command)) check_path(known, j->path, where);
    if (const auto* f = std::get_if<cmd::InjectFault>(&e.command)) {
      if (f->spec.target && !rt.plant().has_path(*f->spec.target)) {
        throw ValidationError(where + ": fault target " + f->spec.target->str() + " is not in the plant");
      }
    }
  }
  for (const auto& a : s.assertions) {
    try {
      check_predicate_paths(a.predicate, known, a.label);
    } catch (const std::invalid_argument& e) {
      throw ValidationError("assertion '" + a.label + "': " + e.what());
    }
  }
}

RunReport run_scenario(const Scenario& s, RunOptions options) {
  std::unique_ptr<Runtime> rt;
  try {
    rt = build_runtime(s.plant_config, options.runtime);
  } catch (const BuildError& e) {
    throw ValidationError(e.what());
  }
  validate_against_runtime(s, *rt);
  if (options.on_built) options.on_built(*rt);

  RunReport report;
  report.scenario = s.name;
  report.strategy = std::string(rt->strategy().name());
  report.ticks = s.run_ticks;

  const std::string header = trace_header(s.name, report.strategy).dump();
  if (options.trace_out) *options.trace_out << header << '\n';
  if (options.keep_trace) report.trace.push_back(header);

  std::vector<Tracker> trackers;
  for (const auto& a : s.assertions) {
    // Eventually starts out failing; the rest start out passing.
    trackers.push_back({&a, a.when != When::Eventually, false, std::nullopt});
  }
  auto in_window = [&](const Assertion& a, std::int64_t t) {
    return t >= a.from.value_or(1) && t <= a.until.value_or(s.run_ticks);
  };

  std::size_t next = 0;
  for (std::int64_t t = 0; t < s.run_ticks; ++t) {
    while (next < s.schedule.size() && s.schedule[next].tick == t) {
      rt->enqueue(s.schedule[next].command, CommandSource::Scenario);
      ++next;
    }
    if (options.before_scan) options.before_scan(t);
    const Snapshot& snap = rt->scan();
    const std::string line = trace_line(snap);
    if (options.trace_out) *options.trace_out << line << '\n';
    if (options.keep_trace) report.trace.push_back(line);
    if (options.observer) options.observer(*rt, snap);

    for (auto& tr : trackers) {
      if (tr.decided) continue;
      const Assertion& a = *tr.a;
      switch (a.when) {
        case When::At:
          if (snap.tick == *a.tick) {
            tr.passed = evaluate_predicate(a.predicate, snap, s.plant_config);
            tr.decided = true;
            if (!tr.passed) tr.tick = snap.tick;
          }
          break;
        case When::Always:
          if (in_window(a, snap.tick) && !evaluate_predicate(a.predicate, snap, s.plant_config)) {
            tr.passed = false;
            tr.decided = true;
            tr.tick = snap.tick;
          }
          break;
        case When::Eventually:
          if (in_window(a, snap.tick) && evaluate_predicate(a.predicate, snap, s.plant_config)) {
            tr.passed = true;
            tr.decided = true;
            tr.tick = snap.tick;
          }
          break;
        case When::Final:
          if (snap.tick == s.run_ticks) {
            tr.passed = evaluate_predicate(a.predicate, snap, s.plant_config);
            tr.decided = true;
            if (!tr.passed) tr.tick = snap.tick;
          }
          break;
      }
    }
  }

  for (auto& tr : trackers) {
    const Assertion& a = *tr.a;
    AssertionResult r{a.label, tr.passed, std::nullopt, {}};
    if (s.run_ticks == 0 && !a.tick) {
      r.passed = true;
      r.detail = "vacuous: no scans";
    } else if (a.when == When::Eventually && !tr.passed) {
      r.detail = "never held";
    } else if (!tr.passed) {
      r.tick = tr.tick;
      r.detail = "failed at tick " + std::to_string(*tr.tick);
    } else if (a.when == When::Eventually) {
      r.detail = "held at tick " + std::to_string(*tr.tick);
    }
    report.assertions.push_back(std::move(r));
  }

  if (options.linger) {
    while (options.linger(rt->tick())) {
      if (options.before_scan) options.before_scan(rt->tick());
      const Snapshot& snap = rt->scan();
      if (options.observer) options.observer(*rt, snap);
    }
  }
  return report;
}

}  // namespace plcsim::scenario
