#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "provis/bench.hpp"
#include "provis/synth.hpp"

using namespace provis;

namespace {

double num(const Json& j) { return j.get<double>(); }

void print_text(const Json& r) {
  std::cout << std::fixed << std::setprecision(2) << "rows:";
  for (const auto& [t, n] : r.at("rows").items()) std::cout << ' ' << t << '=' << n;
  std::cout << "\nguard: " << r.at("guard").at("checked") << " view refreshes equal the predicate rewrite\n";
  const auto& b = r.at("build");
  std::cout << "build: lineage " << num(b.at("lineage_ms")) << " ms, reference " << num(b.at("reference_ms"))
            << " ms, overhead " << num(b.at("overhead_ratio")) << "x\n";
  const auto& t = r.at("trace");
  std::cout << "trace: backward " << num(t.at("backward_ms")) << " ms, forward " << num(t.at("forward_ms"))
            << " ms\n";
  const auto& c = r.at("crossfilter");
  std::cout << "crossfilter: p50 " << num(c.at("p50_ms")) << " ms, p95 " << num(c.at("p95_ms")) << " ms over "
            << c.at("samples") << " runs\n";
  if (r.contains("http")) {
    std::cout << "http: p50 " << num(r.at("http").at("p50_ms")) << " ms, p95 " << num(r.at("http").at("p95_ms"))
              << " ms\n";
  }
  const auto& e = r.at("environment");
  std::cout << "environment: " << e.at("cpu").get<std::string>() << ", " << e.at("hardware_threads")
            << " hardware threads, " << e.at("compiler").get<std::string>() << ' '
            << e.at("build").get<std::string>() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic flight data and interaction latency harness"};
  app.require_subcommand(1);

  SynthOptions synth;
  std::string out_dir;
  auto* gen = app.add_subcommand("generate", "write synthetic ontime/airlines/airports/shapes CSVs");
  gen->add_option("--rows", synth.rows, "ontime rows")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", synth.seed, "random seed")->capture_default_str();
  gen->add_option("--airlines", synth.airlines, "airline count")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--airports", synth.airports, "airport count")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--out", out_dir, "output directory")->required();

  std::size_t steps = 20;
  std::uint64_t script_seed = 1;
  std::string script_out;
  auto* script = app.add_subcommand("script", "write a random brush script over the dashboard views");
  script->add_option("--steps", steps)->capture_default_str();
  script->add_option("--seed", script_seed)->capture_default_str();
  script->add_option("--out", script_out, "script file; stdout when omitted");

  BenchOptions opts;
  std::string data_dir, script_file;
  bool json = false, no_http = false;
  auto* run = app.add_subcommand("run", "time the dashboard session over a dataset");
  run->add_option("--data", data_dir, "dataset directory")->required()->check(CLI::ExistingDirectory);
  run->add_option("--script", script_file, "interaction script (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--reps", opts.reps, "repetitions; the first is discarded")->capture_default_str();
  run->add_option("--guard-rows", opts.guard_rows)->capture_default_str();
  run->add_flag("--json", json, "print the JSON report");
  run->add_flag("--no-http", no_http, "skip the HTTP measurement");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      generate(synth, out_dir);
    } else if (*script) {
      const auto text = script_to_json(random_script(steps, script_seed)).dump(1);
      if (script_out.empty()) {
        std::cout << text << '\n';
      } else {
        std::ofstream(script_out) << text << '\n';
      }
    } else {
      std::ifstream in(script_file);
      opts.script = script_from_json(Json::parse(in));
      opts.data = data_dir;
      opts.http = !no_http;
      const auto report = run_bench(opts);
      if (json) {
        std::cout << report.dump(2) << '\n';
      } else {
        print_text(report);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
