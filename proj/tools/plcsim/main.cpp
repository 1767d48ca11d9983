#include <algorithm>
#include <atomic>
#include <csignal>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "plcsim/errors/catalog.hpp"
#include "plcsim/family/family_model.hpp"
#include "plcsim/gateway/gateway.hpp"
#include "plcsim/scenario/compare.hpp"
#include "plcsim/scenario/runner.hpp"

namespace fs = std::filesystem;
using namespace plcsim;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kInvalid = 2;

/// Accepts a path or a bare scenario name from the bundled directory.
std::string resolve_scenario(const std::string& arg, const std::string& dir) {
  if (fs::exists(arg)) return arg;
  const auto bundled = fs::path(dir) / (arg + ".json");
  if (fs::exists(bundled)) return bundled.string();
  return arg;
}

struct RunArgs {
  std::string scenario;
  std::string strategy = "procedural";
  std::string manager = "base";
  std::string trace;
  std::string matrix;
  std::string catalog;
  std::string serve;
  bool realtime = false;
  bool linger = false;
  bool quiet = false;
};

std::atomic<bool> g_interrupted{false};

extern "C" void on_interrupt(int) { g_interrupted = true; }

int cmd_run(const RunArgs& a, const std::string& scenario_dir) {
  scenario::Scenario s;
  scenario::RunOptions opts;
  errors::ErrorCatalog catalog;
  try {
    s = scenario::load_scenario(resolve_scenario(a.scenario, scenario_dir));
    opts.runtime.strategy = *parse_strategy_kind(a.strategy);
    if (a.manager == "extended") opts.runtime.manager = oo::ManagerKind::Extended;
    if (a.manager == "noop") opts.runtime.manager = oo::ManagerKind::Noop;
    if (!a.catalog.empty()) {
      catalog = errors::ErrorCatalog::from_file(a.catalog);
      opts.runtime.catalog = &catalog;
    }
    if (!a.matrix.empty()) {
      std::vector<std::string> warnings;
      opts.runtime.matrix = procedural::ReactionMatrix::from_file(a.matrix, &warnings);
      for (const auto& w : warnings) std::cerr << "matrix warning: " << w << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kInvalid;
  }

  std::ofstream trace_file;
  if (!a.trace.empty()) {
    trace_file.open(a.trace);
    if (!trace_file) {
      std::cerr << "cannot write trace " << a.trace << '\n';
      return kInvalid;
    }
    opts.trace_out = &trace_file;
  }
  opts.keep_trace = false;
  if (a.realtime || !a.serve.empty()) {
    const auto period = std::chrono::milliseconds(opts.runtime.period_ms);
    auto next = std::chrono::steady_clock::now();
    opts.before_scan = [period, next](std::int64_t) mutable {
      next += period;
      std::this_thread::sleep_until(next);
    };
  }
  std::unique_ptr<gateway::Gateway> gw;
  if (!a.serve.empty()) {
    gateway::GatewayOptions gopts;
    try {
      gopts = gateway::parse_endpoint(a.serve);
    } catch (const std::invalid_argument& e) {
      std::cerr << e.what() << '\n';
      return kInvalid;
    }
    opts.on_built = [&gw, gopts](Runtime& rt) {
      gw = std::make_unique<gateway::Gateway>(
          [&rt](CommandBody body, CommandSource source) { return rt.enqueue(std::move(body), source); }, gopts);
      gw->start();
      std::cerr << "gateway listening on " << gopts.host << ":" << gw->port() << '\n';
    };
    opts.observer = [&gw](const Runtime&, const Snapshot& snap) { gw->publish(snap); };
    if (a.linger) {
      std::signal(SIGINT, on_interrupt);
      std::signal(SIGTERM, on_interrupt);
      opts.linger = [](std::int64_t) { return !g_interrupted.load(); };
    }
  }

  scenario::RunReport report;
  try {
    report = scenario::run_scenario(s, std::move(opts));
  } catch (const scenario::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kInvalid;
  }
  for (const auto& r : report.assertions) {
    if (a.quiet && r.passed) continue;
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.label;
    if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
    std::cout << '\n';
  }
  std::cout << report.scenario << " [" << report.strategy << "]: " << (report.passed() ? "passed" : "FAILED") << " after "
            << report.ticks << " ticks\n";
  return report.passed() ? kPass : kFail;
}

int cmd_compare(const std::string& a, const std::string& b, const std::string& projection) {
  try {
    const auto p = projection == "full" ? scenario::Projection::Full : scenario::Projection::Behavioral;
    const auto diff = scenario::compare_traces(scenario::read_trace(a), scenario::read_trace(b), p);
    std::cout << diff.describe() << '\n';
    return diff.empty() ? kPass : kFail;
  } catch (const std::exception& e) {
    std::cerr << "compare: " << e.what() << '\n';
    return kInvalid;
  }
}

int cmd_list(const std::string& dir) {
  try {
    for (const auto& path : scenario::list_scenarios(dir)) {
      try {
        const auto s = scenario::load_scenario(path);
        std::cout << s.name << "\t" << s.run_ticks << " ticks\t" << s.description << '\n';
      } catch (const scenario::ValidationError& e) {
        std::cout << fs::path(path).stem().string() << "\tinvalid: " << e.what() << '\n';
      }
    }
  } catch (const fs::filesystem_error& e) {
    std::cerr << e.what() << '\n';
    return kInvalid;
  }
  return kPass;
}

int cmd_print_config(const std::string& what) {
  if (what == "catalog") {
    std::cout << errors::default_catalog().to_json() << '\n';
    return kPass;
  }
  const auto rt = build_runtime(plant::PlantConfig{});
  if (what == "matrix") {
    std::cout << procedural::ReactionMatrix::derive_default(rt->root()).to_json() << '\n';
  } else {
    std::cout << plant::PlantConfig{}.to_json().dump(2) << '\n';
  }
  return kPass;
}

int cmd_manifest(const std::string& scenario_arg, const std::string& scenario_dir) {
  try {
    plant::PlantConfig config;
    if (!scenario_arg.empty()) config = scenario::load_scenario(resolve_scenario(scenario_arg, scenario_dir)).plant_config;
    const auto rt = build_runtime(config);
    auto out = nlohmann::ordered_json::array();
    for (const auto& m : rt->manifests()) out.push_back(family::manifest_to_json(m));
    std::cout << out.dump(2) << '\n';
    return kPass;
  } catch (const std::exception& e) {
    std::cerr << "manifest: " << e.what() << '\n';
    return kInvalid;
  }
}

int cmd_family_validate(const std::string& model_path) {
  try {
    const auto model = family::load_model_file(model_path);
    const auto violations = family::validate(model);
    for (const auto& v : violations) std::cout << v << '\n';
    std::cout << model.name << ": " << violations.size() << " violation" << (violations.size() == 1 ? "" : "s") << '\n';
    return violations.empty() ? kPass : kFail;
  } catch (const family::ModelError& e) {
    std::cerr << e.what() << '\n';
    return kInvalid;
  }
}

int cmd_family_derive(const std::string& model_path, const std::vector<std::string>& select) {
  try {
    const auto model = family::load_model_file(model_path);
    const auto config = family::derive(model, family::VariantSelection::parse(select));
    std::cout << family::config_to_json(model, config).dump(2) << '\n';
    return kPass;
  } catch (const family::SelectionError& e) {
    std::cerr << "selection: " << e.what() << '\n';
    return kFail;
  } catch (const family::ModelError& e) {
    std::cerr << e.what() << '\n';
    return kInvalid;
  }
}

std::vector<ModuleManifest> read_manifests(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw family::ModelError("cannot open manifest " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw family::ModelError(path + ": " + e.what());
  }
  std::vector<ModuleManifest> out;
  if (doc.is_array()) {
    for (const auto& m : doc) out.push_back(family::manifest_from_json(m));
  } else {
    out.push_back(family::manifest_from_json(doc));
  }
  return out;
}

std::string describe_selection(const family::VariantSelection& s) {
  std::string out;
  for (const auto& [k, v] : s.choices) out += (out.empty() ? "" : ",") + k + "=" + v;
  return out;
}

/// Without a selection every module is checked against the variant its
/// manifest names.
int cmd_family_conform(const std::string& model_path, const std::string& manifest_path,
                       const std::vector<std::string>& select, const std::string& module) {
  try {
    const auto model = family::load_model_file(model_path);
    std::vector<ModuleManifest> targets;
    for (const auto& m : read_manifests(manifest_path)) {
      if (!module.empty() ? m.path.str() == module : (model.module_kind.empty() || m.kind == model.module_kind ||
                                                       m.kind.empty())) {
        targets.push_back(m);
      }
    }
    if (targets.empty()) {
      std::cerr << "no " << (module.empty() ? model.module_kind + " module" : module) << " in " << manifest_path << '\n';
      return kInvalid;
    }
    std::optional<family::VariantSelection> fixed;
    if (!select.empty()) fixed = family::VariantSelection::parse(select);
    const auto variants = family::enumerate_variants(model);

    bool all_ok = true;
    for (const auto& m : targets) {
      std::optional<family::VariantSelection> sel = fixed;
      if (!sel) {
        for (const auto& v : variants) {
          for (const auto& [k, choice] : v.choices) {
            std::string lv = m.variant;
            std::transform(lv.begin(), lv.end(), lv.begin(), [](unsigned char c) { return std::tolower(c); });
            if (choice == lv) sel = v;
          }
        }
      }
      const std::string name = m.path.empty() ? std::string("<manifest>") : m.path.str();
      if (!sel) {
        std::cout << name << ": no variant of " << model.name << " named '" << m.variant << "'\n";
        all_ok = false;
        continue;
      }
      const auto report = family::check_conformance(model, family::derive(model, *sel), m);
      std::cout << name << " vs " << describe_selection(*sel) << ": " << (report.ok ? "OK" : "MISMATCH");
      for (const auto& mm : report.mismatches) std::cout << "; " << mm;
      std::cout << '\n';
      all_ok = all_ok && report.ok;
    }
    return all_ok ? kPass : kFail;
  } catch (const family::SelectionError& e) {
    std::cerr << "selection: " << e.what() << '\n';
    return kInvalid;
  } catch (const family::ModelError& e) {
    std::cerr << e.what() << '\n';
    return kInvalid;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Soft-PLC scan-cycle runtime for the simulated xPPU"};
  app.require_subcommand(1);
  std::string scenario_dir = PLCSIM_DEFAULT_SCENARIO_DIR;
  app.add_option("--scenario-dir", scenario_dir, "Directory of bundled scenarios");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Execute a scenario headless");
  run_cmd->add_option("--scenario", run.scenario, "Scenario file or bundled name")->required();
  run_cmd->add_option("--strategy", run.strategy)->check(CLI::IsMember({"procedural", "oo"}));
  run_cmd->add_option("--manager", run.manager, "OO error manager")->check(CLI::IsMember({"base", "extended", "noop"}));
  run_cmd->add_option("--trace", run.trace, "JSON-lines trace output");
  run_cmd->add_option("--matrix", run.matrix, "Reaction matrix for the procedural strategy");
  run_cmd->add_option("--catalog", run.catalog, "Error catalog");
  run_cmd->add_option("--serve", run.serve, "Attach the gateway at HOST:PORT");
  run_cmd->add_flag("--realtime", run.realtime, "Pace scans at the scan period (implied by --serve)");
  run_cmd->add_flag("--linger", run.linger, "With --serve, keep scanning after the script until interrupted");
  run_cmd->add_flag("-q,--quiet", run.quiet, "Only print failing assertions");

  std::string trace_a, trace_b, projection = "behavioral";
  auto* cmp_cmd = app.add_subcommand("compare", "Compare two traces");
  cmp_cmd->add_option("A", trace_a)->required();
  cmp_cmd->add_option("B", trace_b)->required();
  cmp_cmd->add_option("--projection", projection)->check(CLI::IsMember({"behavioral", "full"}));

  auto* list_cmd = app.add_subcommand("list-scenarios", "List bundled scenarios");

  std::string config_what;
  auto* cfg_cmd = app.add_subcommand("print-config", "Print a built-in default document");
  cfg_cmd->add_option("what", config_what)->required()->check(CLI::IsMember({"catalog", "matrix", "plant"}));

  std::string manifest_scenario;
  auto* man_cmd = app.add_subcommand("manifest", "Print the runtime module manifests as JSON");
  man_cmd->add_option("--scenario", manifest_scenario, "Use this scenario's plant configuration");

  std::string model_path, manifest_path, module_path;
  std::vector<std::string> select;
  auto* fam_cmd = app.add_subcommand("family", "Family model tools");
  fam_cmd->require_subcommand(1);
  auto* fam_validate = fam_cmd->add_subcommand("validate", "Check model invariants");
  fam_validate->add_option("model", model_path)->required()->check(CLI::ExistingFile);
  auto* fam_derive = fam_cmd->add_subcommand("derive", "Derive a variant configuration");
  fam_derive->add_option("model", model_path)->required()->check(CLI::ExistingFile);
  fam_derive->add_option("--select", select, "group=child or optional=on")->expected(1, -1);
  auto* fam_conform = fam_cmd->add_subcommand("conform", "Check runtime manifests against the model");
  fam_conform->add_option("model", model_path)->required()->check(CLI::ExistingFile);
  fam_conform->add_option("--manifest", manifest_path, "Manifest JSON (object or array)")->required();
  fam_conform->add_option("--select", select, "Fixed selection instead of each module's own variant")->expected(1, -1);
  fam_conform->add_option("--module", module_path, "Only check this module path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kInvalid;
  }

  if (*run_cmd) return cmd_run(run, scenario_dir);
  if (*cmp_cmd) return cmd_compare(trace_a, trace_b, projection);
  if (*list_cmd) return cmd_list(scenario_dir);
  if (*cfg_cmd) return cmd_print_config(config_what);
  if (*man_cmd) return cmd_manifest(manifest_scenario, scenario_dir);
  if (*fam_validate) return cmd_family_validate(model_path);
  if (*fam_derive) return cmd_family_derive(model_path, select);
  if (*fam_conform) return cmd_family_conform(model_path, manifest_path, select, module_path);
  return kInvalid;
}
