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

#ifndef DPMEDIAN_IO_HPP_
#define DPMEDIAN_IO_HPP_

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dpmedian/core.hpp"
#include "dpmedian/envelope.hpp"
#include "dpmedian/estimator.hpp"
#include "dpmedian/lab.hpp"

namespace dpmedian {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// %.17g, which round-trips every double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// One finite value per line. Blank lines and lines starting with '#' are
// skipped.
inline std::vector<double> read_values(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv(line);
    const auto first = sv.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    sv.remove_prefix(first);
    sv = sv.substr(0, sv.find_last_not_of(" \t\r") + 1);
    if (sv.front() == '#') continue;
    double v = 0;
    const char* end = sv.data() + sv.size();
    auto [ptr, ec] = std::from_chars(sv.data(), end, v);
    if (ec != std::errc() || ptr != end) {
      throw ParseError(lineno, "not a number: '" + std::string(sv) + "'");
    }
    if (!std::isfinite(v)) {
      throw ParseError(lineno, "value is not finite");
    }
    out.push_back(v);
  }
  return out;
}

inline std::vector<double> read_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_values(in);
}

inline void write_values(std::ostream& out, std::span<const double> values) {
  for (double v : values) out << format_double(v) << '\n';
}

inline nlohmann::ordered_json params_to_json(const MechanismConfig& cfg) {
  nlohmann::ordered_json j;
  j["L"] = cfg.L();
  j["r"] = cfg.r();
  j["R"] = cfg.R();
  j["epsilon"] = cfg.epsilon();
  if (const auto* c = std::get_if<ConstantC>(&cfg.params().c_policy)) {
    j["C_policy"] = "Constant";
    j["C_value"] = c->value;
  } else {
    j["C_policy"] = "LogN";
    j["C_value"] = std::get<LogNC>(cfg.params().c_policy).c0;
  }
  j["C"] = cfg.C();
  j["K"] = cfg.bucket_count();
  j["B"] = cfg.support_bound();
  return j;
}

inline nlohmann::ordered_json report_to_json(const EstimateReport& rep,
                                             const MechanismConfig& cfg) {
  nlohmann::ordered_json j;
  j["estimate"] = rep.estimate;
  j["branch"] = rep.branch == Branch::kRestricted ? "Restricted" : "General";
  j["n"] = rep.n;
  j["seed"] = rep.seed;
  j["params"] = params_to_json(cfg);
  return j;
}

inline nlohmann::ordered_json density_to_json(
    const PiecewiseExpDensity& density) {
  nlohmann::ordered_json segs = nlohmann::ordered_json::array();
  for (const auto& sg : density.segments()) {
    nlohmann::ordered_json s;
    s["lo"] = sg.lo;
    s["hi"] = sg.hi;
    s["alpha"] = sg.alpha;
    s["beta"] = sg.beta;
    s["log_mass"] = sg.log_mass;
    segs.push_back(std::move(s));
  }
  nlohmann::ordered_json j;
  j["segments"] = std::move(segs);
  j["log_Z"] = density.log_z();
  return j;
}

// Rebuilds a density from a dump. Masses and log_Z are recomputed.
inline PiecewiseExpDensity density_from_json(const nlohmann::json& j) {
  std::vector<ExpSegment> segs;
  for (const auto& s : j.at("segments")) {
    segs.push_back({s.at("lo").get<double>(), s.at("hi").get<double>(),
                    s.at("alpha").get<double>(), s.at("beta").get<double>(),
                    0});
  }
  return PiecewiseExpDensity(std::move(segs));
}

inline nlohmann::ordered_json audit_to_json(const AuditReport& rep) {
  nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
  for (const auto& p : rep.pairs) {
    nlohmann::ordered_json e;
    e["distance"] = p.distance;
    e["both_typical"] = p.both_typical;
    e["mechanism_excess"] = p.mechanism_excess;
    e["envelope_excess"] = p.envelope_excess;
    pairs.push_back(std::move(e));
  }
  nlohmann::ordered_json j;
  j["pass"] = rep.pass;
  j["max_mechanism_excess"] = rep.max_mechanism_excess;
  j["max_envelope_excess"] = rep.max_envelope_excess;
  j["pairs"] = std::move(pairs);
  return j;
}

inline void write_accuracy_csv(std::ostream& out,
                               std::span<const AccuracyRow> rows) {
  out << "n,trials,failures,rate\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.trials << ',' << r.failures << ','
        << format_double(r.rate) << '\n';
  }
}

inline nlohmann::ordered_json accuracy_to_json(
    std::span<const AccuracyRow> rows, double alpha, std::uint64_t seed) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json e;
    e["n"] = r.n;
    e["trials"] = r.trials;
    e["failures"] = r.failures;
    e["rate"] = r.rate;
    e["restricted"] = r.restricted;
    arr.push_back(std::move(e));
  }
  nlohmann::ordered_json j;
  j["alpha"] = alpha;
  j["seed"] = seed;
  j["rows"] = std::move(arr);
  return j;
}

// JSON text with every double printed as %.17g.
inline std::string dump_json(const nlohmann::ordered_json& j) {
  std::string out;
  auto emit = [&](auto&& self, const nlohmann::ordered_json& v) -> void {
    if (v.is_object()) {
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ", ";
        first = false;
        out += nlohmann::ordered_json(it.key()).dump();
        out += ": ";
        self(self, it.value());
      }
      out += '}';
    } else if (v.is_array()) {
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        self(self, v[i]);
      }
      out += ']';
    } else if (v.is_number_float()) {
      const double d = v.get<double>();
      out += std::isfinite(d) ? format_double(d) : "null";
    } else {
      out += v.dump();
    }
  };
  emit(emit, j);
  return out;
}

}  // namespace dpmedian

#endif  // DPMEDIAN_IO_HPP_
