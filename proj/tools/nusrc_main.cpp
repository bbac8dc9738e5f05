// Copyright 2026 The nusrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nusrc/converter.hpp"
#include "nusrc/csv.hpp"
#include "nusrc/filter_design.hpp"
#include "nusrc/oracle.hpp"
#include "nusrc/specs.hpp"
#include "nusrc/time_grid.hpp"
#include "nusrc/wav.hpp"

namespace {

using nlohmann::json;

struct DesignArgs {
  int order = 3;
  double cutoff_hz = 20000.0;
  std::string out_path;
  bool check_reference = false;
};

struct IoArgs {
  std::string filter_path;
  std::string input_path;
  std::string input_grid_path;
  std::string output_grid_path;
  std::string output_path;
};

struct ConvertArgs {
  IoArgs io;
  std::string ordering = "rebased";
  std::uint64_t reanchor = 0;
  bool verify = false;
  double verify_tol = 1e-8;
  std::string report_path;
};

struct ResponseArgs {
  std::string filter_path;
  double start_hz = 10.0;
  double stop_hz = 40000.0;
  std::size_t points = 200;
  std::string out_path;
};

struct BenchArgs {
  std::string filter_path;
  std::string input_grid_path;
  std::string output_grid_path;
  std::string ordering = "rebased";
  std::uint64_t seed = 1;
};

double rel_close(double actual, double expected) {
  return std::abs(actual - expected) / std::abs(expected);
}

// Reference design constants for the 3rd-order, 20 kHz lowpass: overall gain,
// real pole, upper complex pole, and the first-order section's gain.
int check_reference_design() {
  const nusrc::RationalTF tf = nusrc::butterworth_lowpass(3, 20000.0);
  const nusrc::ParallelForm form = nusrc::partial_fractions(tf);

  constexpr double kGain = 1984401707539188.5;
  constexpr double kRealPole = -125663.70614359;
  constexpr double kPairRe = -62831.8530718;
  constexpr double kPairIm = 108827.96185405;
  constexpr double kFirstOrderGain = 125663.70614360292;
  constexpr double kTol = 1e-10;

  double real_pole = 0.0;
  std::complex<double> upper(0.0, 0.0);
  for (const auto& p : tf.poles) {
    if (p.imag() == 0.0) {
      real_pole = p.real();
    } else if (p.imag() > 0.0) {
      upper = p;
    }
  }
  const auto& fo = std::get<nusrc::FirstOrderSection>(form.sections.at(0));

  struct Row {
    const char* name;
    double actual;
    double expected;
  };
  const Row rows[] = {
      {"gain", tf.gain, kGain},
      {"real_pole", real_pole, kRealPole},
      {"pair_re", upper.real(), kPairRe},
      {"pair_im", upper.imag(), kPairIm},
      {"first_order_gain", fo.gain, kFirstOrderGain},
  };
  int failures = 0;
  for (const Row& r : rows) {
    const double err = rel_close(r.actual, r.expected);
    const bool ok = err <= kTol;
    if (!ok) ++failures;
    std::cout << (ok ? "PASS" : "FAIL") << "  " << r.name << "  computed "
              << nusrc::format_double(r.actual) << "  reference "
              << nusrc::format_double(r.expected) << "  rel_err " << nusrc::format_double(err)
              << "\n";
  }
  return failures == 0 ? 0 : 1;
}

int run_design(const DesignArgs& args) {
  if (args.check_reference) {
    return check_reference_design();
  }
  const nusrc::RationalTF tf = nusrc::butterworth_lowpass(args.order, args.cutoff_hz);
  const nusrc::ParallelForm form = nusrc::partial_fractions(tf);
  const json j = nusrc::filter_json(tf, form);
  if (args.out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(args.out_path);
    if (!out) throw std::runtime_error("cannot open " + args.out_path + " for writing");
    out << j.dump(2) << "\n";
  }
  return 0;
}

struct LoadedScenario {
  std::vector<double> input;
  nusrc::TimeGrid input_grid;
  nusrc::TimeGrid output_grid;
  nusrc::ParallelForm form;
  nusrc::RationalTF tf;
  std::optional<std::uint32_t> wav_rate;
};

json grid_spec_with_count(json spec, std::size_t count) {
  const std::string kind = spec.value("kind", std::string{});
  const bool has_explicit = spec.contains("factors") || spec.contains("offsets") ||
                            spec.contains("times");
  if (!spec.contains("count") && !has_explicit) {
    spec["count"] = count;
  }
  return spec;
}

// Output grid covering the input span when the spec omits "count".
json output_spec_with_span(json spec, double t_last) {
  if (spec.contains("count") || spec.contains("factors") || spec.contains("offsets") ||
      spec.contains("times")) {
    return spec;
  }
  double period = 0.0;
  if (spec.contains("period")) {
    period = spec.at("period").get<double>();
  } else if (spec.contains("rate")) {
    period = 1.0 / spec.at("rate").get<double>();
  }
  if (!(period > 0.0)) {
    throw std::invalid_argument("output grid spec needs \"count\" or a positive rate/period");
  }
  spec["count"] = static_cast<std::size_t>(std::floor(t_last / period)) + 1;
  return spec;
}

LoadedScenario load_scenario(const IoArgs& io) {
  LoadedScenario s{
      {}, nusrc::TimeGrid::uniform(1.0, 0), nusrc::TimeGrid::uniform(1.0, 0), {}, {}, {}};
  if (io.filter_path.empty()) throw std::invalid_argument("--filter is required");
  if (io.input_path.empty()) throw std::invalid_argument("--input is required");

  s.tf = nusrc::tf_from_spec(nusrc::load_json_file(io.filter_path));
  s.form = nusrc::partial_fractions(s.tf);

  std::vector<double> times;
  const bool is_wav = io.input_path.size() >= 4 &&
                      io.input_path.compare(io.input_path.size() - 4, 4, ".wav") == 0;
  if (is_wav) {
    const nusrc::WavData wav = nusrc::read_wav(io.input_path);
    s.input = wav.samples;
    s.wav_rate = wav.sample_rate;
  } else {
    nusrc::TimedSeries series = nusrc::read_csv_file(io.input_path);
    s.input = std::move(series.values);
    times = std::move(series.times);
  }

  if (!io.input_grid_path.empty()) {
    s.input_grid = nusrc::grid_from_spec(
        grid_spec_with_count(nusrc::load_json_file(io.input_grid_path), s.input.size()));
  } else if (!times.empty()) {
    s.input_grid = nusrc::TimeGrid::from_timestamps(std::move(times));
  } else if (s.wav_rate) {
    s.input_grid = nusrc::TimeGrid::uniform(1.0 / *s.wav_rate, s.input.size());
  } else {
    throw std::invalid_argument(
        "--input-grid is required for values-only input (no times column, not a wav)");
  }
  if (s.input.size() != s.input_grid.size()) {
    throw std::invalid_argument("input has " + std::to_string(s.input.size()) +
                                " samples but the grid has " +
                                std::to_string(s.input_grid.size()) + " instants");
  }

  if (io.output_grid_path.empty()) throw std::invalid_argument("--output-grid is required");
  const double t_last = s.input_grid.empty() ? 0.0 : s.input_grid[s.input_grid.size() - 1];
  s.output_grid = nusrc::grid_from_spec(
      output_spec_with_span(nusrc::load_json_file(io.output_grid_path), t_last));
  return s;
}

void write_outputs(const std::string& path, const nusrc::TimeGrid& grid,
                   const std::vector<double>& values) {
  if (path.empty()) return;
  const bool is_wav = path.size() >= 4 && path.compare(path.size() - 4, 4, ".wav") == 0;
  if (is_wav) {
    if (grid.kind() != nusrc::GridKind::kUniform) {
      throw std::invalid_argument("wav output requires a uniform output grid");
    }
    nusrc::WavData wav;
    wav.sample_rate = static_cast<std::uint32_t>(std::llround(1.0 / grid.period()));
    wav.samples = values;
    nusrc::write_wav(path, wav);
    return;
  }
  nusrc::TimedSeries series;
  series.times.assign(grid.timestamps().begin(), grid.timestamps().end());
  series.values = values;
  nusrc::write_csv_file(path, series);
}

int run_convert(const ConvertArgs& args) {
  const LoadedScenario s = load_scenario(args.io);
  nusrc::ConvertOptions opts;
  opts.ordering = nusrc::parse_ordering(args.ordering);
  opts.reanchor_interval = args.reanchor;

  nusrc::ConversionReport report =
      nusrc::convert_offline(s.input, s.input_grid, s.output_grid, s.form, opts);

  int status = 0;
  if (args.verify) {
    const std::vector<double> ref =
        nusrc::oracle_convert(s.input, s.input_grid, s.output_grid, s.form);
    const double err = nusrc::relative_error_vs_rms(report.outputs, ref);
    report.max_relative_error = err;
    if (err > args.verify_tol) status = 1;
  }

  write_outputs(args.io.output_path, s.output_grid, report.outputs);
  if (!args.report_path.empty()) {
    std::ofstream out(args.report_path);
    if (!out) throw std::runtime_error("cannot open " + args.report_path + " for writing");
    out << nusrc::report_json(report).dump(2) << "\n";
  }

  std::cout << nusrc::report_json(report).dump(2) << "\n";
  return status;
}

int run_oracle(const IoArgs& io) {
  const LoadedScenario s = load_scenario(io);
  const std::vector<double> y = nusrc::oracle_convert(s.input, s.input_grid, s.output_grid, s.form);
  write_outputs(io.output_path, s.output_grid, y);
  if (io.output_path.empty()) {
    nusrc::TimedSeries series;
    series.times.assign(s.output_grid.timestamps().begin(), s.output_grid.timestamps().end());
    series.values = y;
    nusrc::write_csv(std::cout, series);
  }
  std::cout.flush();
  return 0;
}

int run_response(const ResponseArgs& args) {
  if (args.filter_path.empty()) throw std::invalid_argument("--filter is required");
  const nusrc::RationalTF tf = nusrc::tf_from_spec(nusrc::load_json_file(args.filter_path));
  if (args.points < 2) throw std::invalid_argument("--points must be at least 2");
  if (!(args.start_hz > 0.0) || !(args.stop_hz > args.start_hz)) {
    throw std::invalid_argument("need 0 < start < stop");
  }
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!args.out_path.empty()) {
    file.open(args.out_path);
    if (!file) throw std::runtime_error("cannot open " + args.out_path + " for writing");
    out = &file;
  }
  *out << "freq_hz,magnitude,magnitude_db,phase_rad\n";
  const double log_start = std::log10(args.start_hz);
  const double log_step =
      (std::log10(args.stop_hz) - log_start) / static_cast<double>(args.points - 1);
  for (std::size_t i = 0; i < args.points; ++i) {
    const double f = std::pow(10.0, log_start + log_step * static_cast<double>(i));
    const std::complex<double> h = nusrc::frequency_response(tf, 2.0 * std::numbers::pi * f);
    const double mag = std::abs(h);
    *out << nusrc::format_double(f) << ',' << nusrc::format_double(mag) << ','
         << nusrc::format_double(20.0 * std::log10(mag)) << ','
         << nusrc::format_double(std::arg(h)) << "\n";
  }
  out->flush();
  return 0;
}

int run_bench(const BenchArgs& args) {
  if (args.filter_path.empty()) throw std::invalid_argument("--filter is required");
  if (args.input_grid_path.empty() || args.output_grid_path.empty()) {
    throw std::invalid_argument("--input-grid and --output-grid are required");
  }
  const nusrc::RationalTF tf = nusrc::tf_from_spec(nusrc::load_json_file(args.filter_path));
  const nusrc::ParallelForm form = nusrc::partial_fractions(tf);
  const nusrc::TimeGrid grid_in = nusrc::grid_from_spec(nusrc::load_json_file(args.input_grid_path));
  const nusrc::TimeGrid grid_out =
      nusrc::grid_from_spec(nusrc::load_json_file(args.output_grid_path));

  std::mt19937_64 rng(args.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> input(grid_in.size());
  for (double& v : input) v = dist(rng);

  nusrc::ConvertOptions opts;
  opts.ordering = nusrc::parse_ordering(args.ordering);

  const auto t0 = std::chrono::steady_clock::now();
  const nusrc::ConversionReport report =
      nusrc::convert_offline(input, grid_in, grid_out, form, opts);
  const auto t1 = std::chrono::steady_clock::now();
  const double seconds = std::chrono::duration<double>(t1 - t0).count();

  json j = nusrc::report_json(report);
  j["seconds"] = seconds;
  j["outputs_per_second"] =
      seconds > 0.0 ? static_cast<double>(report.outputs.size()) / seconds : 0.0;
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming nonuniform sampling-rate converter"};
  app.require_subcommand(1);

  DesignArgs design;
  CLI::App* cmd_design = app.add_subcommand("design", "Design a lowpass filter bank");
  cmd_design->add_option("--order", design.order, "Filter order")->check(CLI::PositiveNumber);
  cmd_design->add_option("--cutoff-hz", design.cutoff_hz, "Cutoff frequency in Hz")
      ->check(CLI::PositiveNumber);
  cmd_design->add_option("--json", design.out_path, "Write the design to this file");
  cmd_design->add_flag("--check-reference", design.check_reference,
                       "Verify the 3rd-order 20 kHz design against its reference constants");

  ConvertArgs convert;
  CLI::App* cmd_convert = app.add_subcommand("convert", "Convert a signal between grids");
  cmd_convert->add_option("--filter", convert.io.filter_path, "Filter JSON spec")->required();
  cmd_convert->add_option("--input", convert.io.input_path, "Input samples (.csv or .wav)")
      ->required();
  cmd_convert->add_option("--input-grid", convert.io.input_grid_path, "Input grid JSON spec");
  cmd_convert->add_option("--output-grid", convert.io.output_grid_path, "Output grid JSON spec")
      ->required();
  cmd_convert->add_option("--output", convert.io.output_path, "Output samples (.csv or .wav)");
  cmd_convert->add_option("--ordering", convert.ordering, "rebased (default) or indexed");
  cmd_convert->add_option("--reanchor", convert.reanchor,
                          "Rebased repeated-pole origin shift interval (0 = off)");
  cmd_convert->add_flag("--verify", convert.verify,
                        "Compare against the direct-summation reference");
  cmd_convert->add_option("--verify-tol", convert.verify_tol,
                          "Max allowed relative error for --verify");
  cmd_convert->add_option("--report", convert.report_path, "Write the conversion report JSON");

  IoArgs oracle;
  CLI::App* cmd_oracle = app.add_subcommand("oracle", "Direct-summation reference conversion");
  cmd_oracle->add_option("--filter", oracle.filter_path, "Filter JSON spec")->required();
  cmd_oracle->add_option("--input", oracle.input_path, "Input samples (.csv or .wav)")->required();
  cmd_oracle->add_option("--input-grid", oracle.input_grid_path, "Input grid JSON spec");
  cmd_oracle->add_option("--output-grid", oracle.output_grid_path, "Output grid JSON spec")
      ->required();
  cmd_oracle->add_option("--output", oracle.output_path, "Output samples (.csv or .wav)");

  ResponseArgs response;
  CLI::App* cmd_response = app.add_subcommand("response", "Tabulate the frequency response");
  cmd_response->add_option("--filter", response.filter_path, "Filter JSON spec")->required();
  cmd_response->add_option("--start-hz", response.start_hz, "First frequency");
  cmd_response->add_option("--stop-hz", response.stop_hz, "Last frequency");
  cmd_response->add_option("--points", response.points, "Number of log-spaced points");
  cmd_response->add_option("--output", response.out_path, "Write CSV here instead of stdout");

  BenchArgs bench;
  CLI::App* cmd_bench = app.add_subcommand("bench", "Time a conversion on generated noise");
  cmd_bench->add_option("--filter", bench.filter_path, "Filter JSON spec")->required();
  cmd_bench->add_option("--input-grid", bench.input_grid_path, "Input grid JSON spec")->required();
  cmd_bench->add_option("--output-grid", bench.output_grid_path, "Output grid JSON spec")
      ->required();
  cmd_bench->add_option("--ordering", bench.ordering, "rebased (default) or indexed");
  cmd_bench->add_option("--seed", bench.seed, "Noise seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_design->parsed()) return run_design(design);
    if (cmd_convert->parsed()) return run_convert(convert);
    if (cmd_oracle->parsed()) return run_oracle(oracle);
    if (cmd_response->parsed()) return run_response(response);
    if (cmd_bench->parsed()) return run_bench(bench);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
