#include "skymission_cli/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "skymission/analyzer.hpp"
#include "skymission/dot.hpp"
#include "skymission/flightscript.hpp"
#include "skymission/parser.hpp"
#include "skymission/registry.hpp"
#include "skymission/scenario.hpp"
#include "skymission/simulator.hpp"
#include "skymission/trace.hpp"

namespace skymission::cli {

namespace {

// Carries an exit code out of a subcommand.
struct Exit {
  int code;
};

class Session {
 public:
  Session(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  std::string read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      err_ << "error: cannot read '" << path << "'\n";
      throw Exit{kIo};
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write(const std::string& path, const std::string& text) {
    std::ofstream outf(path, std::ios::binary);
    if (!outf || !(outf << text)) {
      err_ << "error: cannot write '" << path << "'\n";
      throw Exit{kIo};
    }
  }

  void emit(const std::optional<std::string>& path, const std::string& text) {
    if (path) {
      write(*path, text);
    } else {
      out_ << text;
    }
  }

  // Built-in catalog plus definitions from $SKYMISSION_ACTIONS.
  const Registry& registry() {
    if (reg_) return *reg_;
    reg_ = builtin_catalog();
    if (const char* path = std::getenv("SKYMISSION_ACTIONS"); path && *path) {
      std::string text = read(path);
      try {
        load_extensions(*reg_, text);
      } catch (const RegistryError& e) {
        err_ << path << ": " << e.what() << "\n";
        throw Exit{kDiagnostics};
      }
    }
    return *reg_;
  }

  struct Checked {
    std::optional<Mission> mission;
    std::vector<Diagnostic> diagnostics;
  };

  Checked check(const std::string& path) {
    std::string source = read(path);
    const Registry& reg = registry();
    auto parsed = parse(source);
    Checked c{std::move(parsed.mission), std::move(parsed.diagnostics)};
    if (c.mission) c.diagnostics = analyze(*c.mission, reg).diagnostics;
    return c;
  }

  void print_diagnostics(const std::string& path, const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags) out_ << render(d, path) << "\n";
    std::size_t errors = count(diags, Severity::Error);
    std::size_t warnings = count(diags, Severity::Warning);
    out_ << errors << (errors == 1 ? " error" : " errors");
    if (warnings) out_ << ", " << warnings << (warnings == 1 ? " warning" : " warnings");
    out_ << "\n";
  }

  // The mission at `path`, or exit 1 after printing its diagnostics.
  Mission accepted(const std::string& path) {
    auto c = check(path);
    if (!c.mission || has_errors(c.diagnostics)) {
      print_diagnostics(path, c.diagnostics);
      throw Exit{kDiagnostics};
    }
    return std::move(*c.mission);
  }

  int cmd_check(const std::string& path, bool json) {
    auto c = check(path);
    if (json) {
      nlohmann::ordered_json doc;
      doc["file"] = path;
      auto list = nlohmann::ordered_json::array();
      for (const auto& d : c.diagnostics) {
        nlohmann::ordered_json j;
        j["code"] = d.code;
        j["severity"] = to_string(d.severity);
        j["line"] = d.line;
        j["column"] = d.column;
        j["message"] = d.message;
        list.push_back(std::move(j));
      }
      doc["diagnostics"] = std::move(list);
      doc["errors"] = count(c.diagnostics, Severity::Error);
      doc["warnings"] = count(c.diagnostics, Severity::Warning);
      out_ << doc.dump(2) << "\n";
    } else {
      print_diagnostics(path, c.diagnostics);
    }
    return has_errors(c.diagnostics) ? kDiagnostics : kOk;
  }

  int cmd_run(const std::string& path, const std::string& scenario_path, const std::optional<std::string>& trace_path,
              std::optional<double> max_time) {
    SimConfig cfg;
    if (max_time) {
      if (!(*max_time > 0.0)) {
        err_ << "error: --max-time must be positive\n";
        return kUsage;
      }
      cfg.max_time_s = *max_time;
    }
    std::string scenario_text = read(scenario_path);
    Scenario scenario;
    try {
      scenario = parse_scenario(scenario_text);
    } catch (const ScenarioError& e) {
      out_ << scenario_path << ": " << e.what() << "\n";
      return kDiagnostics;
    }

    Trace trace;
    bool script = path.size() >= 4 && path.compare(path.size() - 4, 4, ".fls") == 0;
    if (script) {
      std::string text = read(path);
      const Registry& reg = registry();
      try {
        auto program = parse_flightscript(text);
        trace = run_script(program, scenario, reg, cfg);
      } catch (const FlightScriptError& e) {
        out_ << path << ":" << e.line() << ": " << e.message() << "\n";
        return kDiagnostics;
      }
    } else {
      Mission m = accepted(path);
      trace = run(m, scenario, registry(), cfg);
    }
    if (trace_path) write(*trace_path, to_jsonl(trace));
    out_ << trace.outcome.text() << "\n";
    return trace.outcome.kind == Outcome::Kind::Error ? kDiagnostics : kOk;
  }

  int cmd_gen(const std::string& path, const std::optional<std::string>& out_path) {
    Mission m = accepted(path);
    emit(out_path, gen_flightscript(m, registry()).text());
    return kOk;
  }

  int cmd_graph(const std::string& path, const std::optional<std::string>& out_path) {
    Mission m = accepted(path);
    emit(out_path, gen_dot(m));
    return kOk;
  }

  int cmd_fmt(const std::string& path, bool write_back) {
    auto parsed = parse(read(path));
    if (!parsed.mission) {
      print_diagnostics(path, parsed.diagnostics);
      return kDiagnostics;
    }
    std::string text = format(*parsed.mission);
    if (write_back) {
      write(path, text);
    } else {
      out_ << text;
    }
    return kOk;
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
  std::optional<Registry> reg_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mission language toolchain for autonomous quadrotors", "skymission"};
  app.require_subcommand(1);

  std::string file;
  bool json = false;
  auto* check = app.add_subcommand("check", "Parse and analyze a mission, print diagnostics");
  check->add_option("mission", file, "Mission source (.msn)")->required();
  check->add_flag("--json", json, "Machine-readable diagnostics");

  std::string scenario;
  std::optional<std::string> trace_path;
  std::optional<double> max_time;
  auto* run_cmd = app.add_subcommand("run", "Simulate a mission (.msn) or flight script (.fls)");
  run_cmd->add_option("mission", file, "Mission source or flight script")->required();
  run_cmd->add_option("--scenario", scenario, "Scenario JSON")->required();
  run_cmd->add_option("--trace", trace_path, "Write the JSONL trace here");
  run_cmd->add_option("--max-time", max_time, "Simulated time limit in seconds");

  std::optional<std::string> out_path;
  auto* gen = app.add_subcommand("gen", "Generate a flight script");
  gen->add_option("mission", file, "Mission source (.msn)")->required();
  gen->add_option("--out", out_path, "Output file (default: standard output)");

  auto* graph = app.add_subcommand("graph", "Generate a Graphviz DOT graph");
  graph->add_option("mission", file, "Mission source (.msn)")->required();
  graph->add_option("--out", out_path, "Output file (default: standard output)");

  bool write_back = false;
  auto* fmt = app.add_subcommand("fmt", "Print the canonical form of a mission");
  fmt->add_option("mission", file, "Mission source (.msn)")->required();
  fmt->add_flag("--write", write_back, "Rewrite the file in place");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  Session s(out, err);
  try {
    if (check->parsed()) return s.cmd_check(file, json);
    if (run_cmd->parsed()) return s.cmd_run(file, scenario, trace_path, max_time);
    if (gen->parsed()) return s.cmd_gen(file, out_path);
    if (graph->parsed()) return s.cmd_graph(file, out_path);
    if (fmt->parsed()) return s.cmd_fmt(file, write_back);
  } catch (const Exit& e) {
    return e.code;
  }
  err << app.help();
  return kUsage;
}

}  // namespace skymission::cli
