// Copyright 2026 The dpmedian Authors
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

#ifndef DPMEDIAN_CLI_HPP_
#define DPMEDIAN_CLI_HPP_

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "dpmedian/core.hpp"
#include "dpmedian/envelope.hpp"
#include "dpmedian/estimator.hpp"
#include "dpmedian/io.hpp"
#include "dpmedian/lab.hpp"

namespace dpmedian {

enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 2,
  kExitParameter = 3,
  kExitIo = 4,
};

namespace cli_detail {

struct ParamFlags {
  double L = 0.5;
  double r = 1.0;
  double R = 10.0;
  double epsilon = 0.5;
  double c = 6.0;
  double c0 = 0;
  std::vector<CLI::Option*> c0_opts;

  void attach(CLI::App* app) {
    app->add_option("--L", L, "density lower bound")->capture_default_str();
    app->add_option("--r", r, "density radius")->capture_default_str();
    app->add_option("--R", R, "median range bound")->capture_default_str();
    app->add_option("--epsilon", epsilon, "privacy budget in (0,1)")
        ->capture_default_str();
    auto* c_opt =
        app->add_option("--C", c, "constant C policy")->capture_default_str();
    auto* c0_opt =
        app->add_option("--C0-logn", c0, "use C = max(C_min, C0 ln n)");
    c_opt->excludes(c0_opt);
    c0_opts.push_back(c0_opt);
  }

  MechanismParams params(std::size_t n) const {
    MechanismParams p;
    p.L = L;
    p.r = r;
    p.R = R;
    p.epsilon = epsilon;
    const bool logn = std::any_of(c0_opts.begin(), c0_opts.end(),
                                  [](CLI::Option* o) { return o->count() > 0; });
    if (logn) {
      p.c_policy = LogNC{c0};
    } else {
      p.c_policy = ConstantC{c};
    }
    p.n = n;
    return p;
  }
};

struct DistFlags {
  std::string dist = "UniformSlab";
  double m = 0;
  double sigma = 1;
  double p = 0.5;

  void attach(CLI::App* app) {
    app->add_option("--dist", dist,
                    "UniformSlab, GaussianKnownVar, TailMixture or "
                    "BernoulliEmbedded")
        ->capture_default_str();
    app->add_option("--m", m, "location")->capture_default_str();
    app->add_option("--sigma", sigma, "Gaussian scale")->capture_default_str();
    app->add_option("--p", p, "Bernoulli weight")->capture_default_str();
  }

  AdmissibleDistribution build(const ParamFlags& pf) const {
    const auto kind = parse_distribution_kind(dist);
    if (!kind) {
      throw Error(ErrorCode::kParameterViolation,
                  "unknown distribution '" + dist + "'");
    }
    switch (*kind) {
      case DistributionKind::kUniformSlab:
        return AdmissibleDistribution::uniform_slab(m, pf.r, pf.R);
      case DistributionKind::kGaussianKnownVar:
        return AdmissibleDistribution::gaussian(m, sigma, pf.r, pf.R);
      case DistributionKind::kTailMixture:
        return AdmissibleDistribution::tail_mixture(m, pf.L, pf.r, pf.R);
      case DistributionKind::kBernoulliEmbedded:
        return AdmissibleDistribution::bernoulli_embedded(p, pf.L, pf.r, pf.R);
    }
    throw Error(ErrorCode::kParameterViolation, "unknown distribution");
  }
};

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("DPMEDIAN_SEED")) {
    std::uint64_t v = 0;
    const std::string s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ParseError(0, "DPMEDIAN_SEED is not an unsigned integer");
    }
    return v;
  }
  return 0;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw IoError("write to '" + path + "' failed");
}

inline void emit(const std::string& path, const std::string& text,
                 std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_text(path, text);
  }
}

}  // namespace cli_detail

// Entry point of the dpmedian tool. Writes results to out and diagnostics to
// err; returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out,
                   std::ostream& err) {
  using cli_detail::DistFlags;
  using cli_detail::ParamFlags;

  CLI::App app{"Pure epsilon-DP median estimation and verification tools"};
  app.require_subcommand(1);

  ParamFlags pf;
  DistFlags df;
  std::vector<std::string> inputs;
  std::string output;
  std::string summary;
  std::optional<std::uint64_t> seed_flag;
  std::size_t grid = 2001;
  std::vector<std::size_t> n_list{256, 1024, 4096};
  std::size_t trials = 500;
  double alpha = 0.25;
  std::size_t n = 100;

  auto* est = app.add_subcommand("estimate", "private median of a data file");
  est->add_option("--input", inputs, "data file")->required();
  est->add_option("--seed", seed_flag, "RNG seed");
  pf.attach(est);

  auto* dump = app.add_subcommand("density-dump",
                                  "emit the sampling density as JSON");
  dump->add_option("--input", inputs, "data file")->required();
  dump->add_option("--output", output, "output path (default stdout)");
  pf.attach(dump);

  auto* audit = app.add_subcommand("audit", "density-ratio privacy audit");
  audit->add_option("--input", inputs, "two data files")->required();
  audit->add_option("--grid", grid, "grid points")->capture_default_str();
  audit->add_option("--output", output, "report path (default stdout)");
  pf.attach(audit);

  auto* exp = app.add_subcommand("experiment", "Monte-Carlo accuracy table");
  exp->add_option("--n-list", n_list, "sample sizes")
      ->delimiter(',')
      ->capture_default_str();
  exp->add_option("--trials", trials, "trials per n")->capture_default_str();
  exp->add_option("--alpha", alpha, "accuracy radius")->capture_default_str();
  exp->add_option("--seed", seed_flag, "RNG seed");
  exp->add_option("--output", output, "CSV path")->required();
  exp->add_option("--summary", summary, "JSON summary path");
  pf.attach(exp);
  df.attach(exp);

  auto* gen = app.add_subcommand("gen-data", "write synthetic admissible data");
  gen->add_option("--n", n, "sample size")->capture_default_str();
  gen->add_option("--seed", seed_flag, "RNG seed");
  gen->add_option("--output", output, "data path")->required();
  pf.attach(gen);
  df.attach(gen);

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    const std::size_t want = audit->parsed() ? 2 : 1;
    if ((est->parsed() || dump->parsed() || audit->parsed()) &&
        inputs.size() != want) {
      err << "expected " << want << " --input file(s)\n";
      return kExitParse;
    }
    if (est->parsed()) {
      const Dataset x(read_values(inputs.at(0)));
      const MechanismConfig cfg = validate_config(pf.params(x.size()));
      RandomSource rng(cli_detail::resolve_seed(seed_flag));
      const EstimateReport rep = private_median(x, cfg, rng);
      out << dump_json(report_to_json(rep, cfg)) << '\n';
    } else if (dump->parsed()) {
      const Dataset x(read_values(inputs.at(0)));
      const MechanismConfig cfg = validate_config(pf.params(x.size()));
      const PiecewiseExpDensity d = build_envelope(x, cfg);
      cli_detail::emit(output, dump_json(density_to_json(d)) + "\n", out);
    } else if (audit->parsed()) {
      std::vector<std::pair<Dataset, Dataset>> pairs;
      pairs.emplace_back(Dataset(read_values(inputs[0])),
                         Dataset(read_values(inputs[1])));
      const MechanismConfig cfg =
          validate_config(pf.params(pairs[0].first.size()));
      const AuditReport rep = audit_privacy(pairs, cfg, grid);
      cli_detail::emit(output, dump_json(audit_to_json(rep)) + "\n", out);
      if (!output.empty()) {
        out << (rep.pass ? "PASS" : "FAIL") << " max_excess="
            << format_double(std::max(rep.max_mechanism_excess,
                                      rep.max_envelope_excess))
            << '\n';
      }
    } else if (exp->parsed()) {
      const AdmissibleDistribution dist = df.build(pf);
      const std::uint64_t seed = cli_detail::resolve_seed(seed_flag);
      const auto rows = run_accuracy_experiment(dist, pf.params(0), n_list,
                                                trials, alpha, seed);
      std::ostringstream csv;
      write_accuracy_csv(csv, rows);
      cli_detail::write_text(output, csv.str());
      if (!summary.empty()) {
        cli_detail::write_text(
            summary, dump_json(accuracy_to_json(rows, alpha, seed)) + "\n");
      }
      out << "experiment: " << rows.size() << " rows written to " << output
          << '\n';
    } else if (gen->parsed()) {
      if (n < 1) throw Error(ErrorCode::kParameterViolation, "n must be >= 1");
      const AdmissibleDistribution dist = df.build(pf);
      RandomSource rng(cli_detail::resolve_seed(seed_flag));
      std::vector<double> v(n);
      for (auto& x : v) x = dist.sample(rng);
      std::ostringstream text;
      write_values(text, v);
      cli_detail::write_text(output, text.str());
      out << "gen-data: " << n << " values written to " << output << '\n';
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitParameter;
  }
  return kExitOk;
}

}  // namespace dpmedian

#endif  // DPMEDIAN_CLI_HPP_
