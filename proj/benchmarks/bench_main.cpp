#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "skymission/analyzer.hpp"
#include "skymission/flightscript.hpp"
#include "skymission/parser.hpp"
#include "skymission/scenario.hpp"
#include "skymission/simulator.hpp"

using namespace skymission;

namespace {

std::string slurp(const std::string& rel) {
  std::ifstream in(std::string(SKYMISSION_CORPUS_DIR) + "/" + rel);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A long flow of hover/branch pairs, to see how parsing and analysis scale.
std::string long_mission(int pairs) {
  std::string src = "mission \"long\" {\n  flow {\n    takeoff(altitude = 5.0)\n";
  for (int i = 0; i < pairs; ++i) {
    auto n = std::to_string(i);
    src += "    h" + n + ": hover(duration_s = 1.0) {\n      v" + n + ": read_sensor(name = \"t\")\n    }\n";
    src += "    if v" + n + " > 30.0 -> h" + n + " else -> n" + n + "\n";
    src += "    n" + n + ": fly_to(target = point(" + std::to_string(i % 7) + ".0, 1.0, 5.0))\n";
  }
  return src + "    touchdown()\n  }\n}\n";
}

void BM_ParseCropSurvey(benchmark::State& state) {
  auto src = slurp("valid/crop_survey.msn");
  for (auto _ : state) benchmark::DoNotOptimize(parse(src));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * src.size()));
}
BENCHMARK(BM_ParseCropSurvey);

void BM_ParseLong(benchmark::State& state) {
  auto src = long_mission(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parse(src));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ParseLong)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_AnalyzeLong(benchmark::State& state) {
  auto m = *parse(long_mission(static_cast<int>(state.range(0)))).mission;
  auto reg = builtin_catalog();
  for (auto _ : state) benchmark::DoNotOptimize(analyze(m, reg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AnalyzeLong)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_SimulateCropSurvey(benchmark::State& state) {
  auto m = *parse(slurp("valid/crop_survey.msn")).mission;
  auto s = parse_scenario(slurp("scenarios/field.json"));
  auto reg = builtin_catalog();
  for (auto _ : state) benchmark::DoNotOptimize(run(m, s, reg));
}
BENCHMARK(BM_SimulateCropSurvey)->Unit(benchmark::kMillisecond);

void BM_SimulateObstacle(benchmark::State& state) {
  auto m = *parse(slurp("valid/obstacle_headon.msn")).mission;
  auto s = parse_scenario(slurp("scenarios/obstacle.json"));
  auto reg = builtin_catalog();
  for (auto _ : state) benchmark::DoNotOptimize(run(m, s, reg));
}
BENCHMARK(BM_SimulateObstacle)->Unit(benchmark::kMillisecond);

void BM_GenerateAndInterpret(benchmark::State& state) {
  auto m = *parse(slurp("valid/crop_survey.msn")).mission;
  auto s = parse_scenario(slurp("scenarios/field.json"));
  auto reg = builtin_catalog();
  for (auto _ : state) {
    auto program = parse_flightscript(gen_flightscript(m, reg).text());
    benchmark::DoNotOptimize(run_script(program, s, reg));
  }
}
BENCHMARK(BM_GenerateAndInterpret)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
