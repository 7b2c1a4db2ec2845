// Copyright 2026 The catrep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Talks to the library only through its C interface.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "catrep/catrep.h"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CliError {
  int code;
  std::string message;
};

int exit_code_for(catrep_status s) {
  switch (s) {
    case CATREP_OK:
      return kExitOk;
    case CATREP_ERR_CONFIG:
      return kExitConfig;
    case CATREP_ERR_NUMERIC:
      return kExitNumeric;
    default:
      return kExitFailure;
  }
}

void check(catrep_status s, const std::string &context) {
  if (s != CATREP_OK) {
    throw CliError{exit_code_for(s), context + ": " + catrep_status_name(s) + ": " + catrep_last_error()};
  }
}

// Owns a string returned by the library.
class LibString {
 public:
  LibString() = default;
  LibString(const LibString &) = delete;
  LibString &operator=(const LibString &) = delete;
  ~LibString() { catrep_string_free(p_); }
  char **out() { return &p_; }
  std::string str() const { return p_ ? std::string(p_) : std::string(); }

 private:
  char *p_ = nullptr;
};

template <class T, void (*Free)(T *)>
class Handle {
 public:
  Handle() = default;
  Handle(const Handle &) = delete;
  Handle &operator=(const Handle &) = delete;
  ~Handle() { Free(p_); }
  T **out() { return &p_; }
  T *get() const { return p_; }

 private:
  T *p_ = nullptr;
};

using ModelHandle = Handle<catrep_noise_model, catrep_noise_model_free>;
using BatchHandle = Handle<catrep_batch, catrep_batch_free>;
using GraphHandle = Handle<catrep_graph, catrep_graph_free>;

std::string read_file(const std::string &path, int code_on_failure) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{code_on_failure, "cannot read '" + path + "'"};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw CliError{kExitFailure, "cannot write '" + path.string() + "'"};
  std::cout << path.string() << "\n";
}

struct Common {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<unsigned> workers;
  std::string out = ".";
  std::optional<std::string> decoder;
};

// Loads the configuration and applies command-line overrides.
std::string load_config(const Common &c) {
  if (c.config.empty()) throw CliError{kExitConfig, "--config is required"};
  Json j;
  try {
    j = Json::parse(read_file(c.config, kExitConfig), nullptr, true, true);
  } catch (const nlohmann::json::exception &e) {
    throw CliError{kExitConfig, c.config + ": not valid JSON: " + e.what()};
  }
  if (!j.is_object()) throw CliError{kExitConfig, c.config + ": expected a JSON object"};
  if (c.seed) j["seed"] = *c.seed;
  if (c.workers) j["workers"] = *c.workers;
  if (c.decoder) j["decoder"] = *c.decoder;
  return j.dump();
}

Json normalized_config(const std::string &text) {
  LibString s;
  check(catrep_config_check(text.c_str(), s.out()), "config");
  return Json::parse(s.str());
}

fs::path out_dir(const Common &c) {
  fs::path p(c.out);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw CliError{kExitFailure, "cannot create output directory '" + c.out + "': " + ec.message()};
  return p;
}

std::string number_tag(double x) {
  std::ostringstream os;
  os << x;
  std::string s = os.str();
  for (char &ch : s) {
    if (ch == '.') ch = 'p';
  }
  return s;
}

std::string csv_field(const Json &v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string to_csv(const std::vector<std::string> &header, const std::vector<std::vector<std::string>> &rows) {
  std::ostringstream os;
  for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto &r : rows) {
    for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << "\n";
  }
  return os.str();
}

catrep_decoder decoder_from_name(const std::string &s) {
  if (s == "none") return CATREP_DECODER_NONE;
  if (s == "naive") return CATREP_DECODER_NAIVE;
  if (s == "merged") return CATREP_DECODER_MERGED;
  throw CliError{kExitConfig, "unknown decoder '" + s + "'"};
}

// ---------------------------------------------------------------------------

void cmd_sample(const Common &c, bool text) {
  const std::string cfg_text = load_config(c);
  const Json cfg = normalized_config(cfg_text);
  if (cfg["cycles"].empty()) throw CliError{kExitConfig, "sample: the config must list explicit cycles"};
  const fs::path dir = out_dir(c);
  for (const auto &dj : cfg["distances"]) {
    const uint32_t d = dj.get<uint32_t>();
    for (const auto &xj : cfg["alpha_sq"]) {
      const double x = xj.get<double>();
      ModelHandle model;
      check(catrep_noise_model_from_config(cfg_text.c_str(), d, x, model.out()), "sample");
      for (const auto &bj : cfg["bases"]) {
        const std::string b = bj.get<std::string>();
        for (const auto &nj : cfg["cycles"]) {
          const uint32_t n = nj.get<uint32_t>();
          BatchHandle batch;
          check(catrep_sample(model.get(), n, b == "X" ? CATREP_BASIS_X : CATREP_BASIS_Z, cfg["shots"].get<uint64_t>(),
                              cfg["seed"].get<uint64_t>(), cfg["workers"].get<unsigned>(), batch.out()),
                "sample");
          const std::string stem = "syndromes_d" + std::to_string(d) + "_a" + number_tag(x) + "_n" +
                                   std::to_string(n) + "_" + b;
          const fs::path bin = dir / (stem + ".bin");
          check(catrep_batch_write(batch.get(), bin.string().c_str()), "sample");
          std::cout << bin.string() << "\n";
          if (text) {
            const fs::path txt = dir / (stem + ".txt");
            check(catrep_batch_write_text(batch.get(), txt.string().c_str()), "sample");
            std::cout << txt.string() << "\n";
          }
        }
      }
    }
  }
}

void cmd_weigh(const Common &c, const std::string &input, double fraction, double p_floor) {
  BatchHandle batch;
  check(catrep_batch_read(input.c_str(), batch.out()), "weigh");
  const fs::path dir = out_dir(c);
  const std::string stem = fs::path(input).stem().string();
  for (int conditioned = 0; conditioned < 2; ++conditioned) {
    GraphHandle g;
    check(catrep_weigh(batch.get(), fraction, p_floor, conditioned, g.out()), "weigh");
    LibString text;
    check(catrep_graph_to_text(g.get(), text.out()), "weigh");
    write_file(dir / (stem + (conditioned ? ".baseline.graph" : ".correlation.graph")), text.str());
  }
}

void cmd_decode(const Common &c, const std::string &input, const std::string &graph_path, double fraction,
                bool write_matchings) {
  BatchHandle batch;
  check(catrep_batch_read(input.c_str(), batch.out()), "decode");
  GraphHandle g;
  if (!graph_path.empty()) {
    const std::string text = read_file(graph_path, kExitFailure);
    check(catrep_graph_from_text(text.c_str(), g.out()), "decode");
  }
  const catrep_decoder kind = decoder_from_name(c.decoder.value_or("merged"));
  LibString summary, matchings;
  check(catrep_decode_batch(batch.get(), g.get(), kind, fraction, summary.out(), write_matchings ? matchings.out() : nullptr),
        "decode");
  const fs::path dir = out_dir(c);
  const std::string stem = fs::path(input).stem().string();
  write_file(dir / (stem + ".decode.json"), summary.str() + "\n");
  if (write_matchings) write_file(dir / (stem + ".matchings.txt"), matchings.str());
}

Json read_points(const std::string &path) {
  const std::string text = read_file(path, kExitFailure);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') return Json::parse(text);
  Json pts = Json::array();
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double t, v, s;
    if (!(ls >> t >> v >> s)) continue;  // header or malformed line
    pts.push_back({{"t", t}, {"value", v}, {"sigma", s}});
  }
  return pts;
}

void cmd_fit(const Common &c, const std::string &input, bool offset) {
  const Json pts = read_points(input);
  LibString out;
  check(catrep_fit_decay(pts.dump().c_str(), offset ? 1 : 0, out.out()), "fit");
  const fs::path dir = out_dir(c);
  write_file(dir / (fs::path(input).stem().string() + ".fit.json"), out.str() + "\n");
}

void cmd_budget(const Common &c) {
  const std::string cfg = load_config(c);
  LibString out;
  check(catrep_run_budget(cfg.c_str(), out.out()), "budget");
  const Json j = Json::parse(out.str());
  std::vector<std::vector<std::string>> rows;
  for (const auto &b : j["budget"]) {
    for (const auto &it : b["items"]) {
      rows.push_back({csv_field(b["d"]), csv_field(b["alpha_sq"]), csv_field(it["class"]), csv_field(it["label"]),
                      csv_field(it["nominal"]), csv_field(it["contribution"])});
    }
  }
  const fs::path dir = out_dir(c);
  write_file(dir / "budget.json", out.str() + "\n");
  write_file(dir / "budget.csv", to_csv({"d", "alpha_sq", "class", "mechanism", "nominal", "contribution"}, rows));
}

void cmd_sweep_lindblad(const Common &c) {
  const std::string cfg = load_config(c);
  LibString out;
  check(catrep_run_lindblad_sweep(cfg.c_str(), out.out()), "sweep-lindblad");
  const Json j = Json::parse(out.str());
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  if (j["sweep"] == "chi_ratio") {
    header = {"chi_ratio", "bitflip", "error"};
    for (const auto &r : j["rows"]) {
      rows.push_back({csv_field(r["chi_ratio"]), csv_field(r["bitflip"]), r.contains("error") ? csv_field(r["error"]) : ""});
    }
  } else {
    header = {"delta_b_hz", "p_plus", "p_minus", "error"};
    for (const auto &r : j["rows"]) {
      rows.push_back({csv_field(r["delta_b_hz"]), csv_field(r["p_plus"]), csv_field(r["p_minus"]),
                      r.contains("error") ? csv_field(r["error"]) : ""});
    }
  }
  for (auto &r : rows) {
    for (auto &f : r) {
      if (f.find(',') != std::string::npos) f = "\"" + f + "\"";
    }
  }
  const fs::path dir = out_dir(c);
  write_file(dir / "lindblad.json", out.str() + "\n");
  write_file(dir / "lindblad.csv", to_csv(header, rows));
}

void cmd_project_overhead(const Common &c, uint32_t d, double t_cycle, double t1, double alpha_sq, double t_z) {
  double ep = 0, eb = 0, et = 0;
  check(catrep_project_overhead(d, t_cycle, t1, alpha_sq, t_z, &ep, &eb, &et), "project-overhead");
  Json j{{"version", catrep_version()},
         {"d", d},
         {"t_cycle", t_cycle},
         {"t1", t1},
         {"alpha_sq", alpha_sq},
         {"t_z", t_z},
         {"eps_phase", ep},
         {"eps_bit", eb},
         {"eps_L", et}};
  const fs::path dir = out_dir(c);
  write_file(dir / "overhead.json", j.dump(2) + "\n");
}

void cmd_report(const Common &c) {
  const std::string cfg = load_config(c);
  LibString out;
  check(catrep_run_memory_experiment(cfg.c_str(), out.out()), "report");
  const Json j = Json::parse(out.str());
  const fs::path dir = out_dir(c);
  write_file(dir / "run.json", out.str() + "\n");

  std::vector<std::vector<std::string>> summary;
  for (const auto &r : j["summary"]) {
    summary.push_back({csv_field(r["d"]), csv_field(r["alpha_sq"]), csv_field(r["eps_phase"]),
                       csv_field(r["eps_phase_sigma"]), csv_field(r["eps_bit"]), csv_field(r["eps_bit_sigma"]),
                       csv_field(r["eps_L"])});
  }
  write_file(dir / "summary.csv",
             to_csv({"d", "alpha_sq", "eps_phase", "eps_phase_sigma", "eps_bit", "eps_bit_sigma", "eps_L"}, summary));

  std::vector<std::vector<std::string>> points;
  for (const auto &p : j["points"]) {
    for (size_t k = 0; k < p["cycles"].size(); ++k) {
      points.push_back({csv_field(p["d"]), csv_field(p["alpha_sq"]), csv_field(p["basis"]), csv_field(p["cycles"][k]),
                        csv_field(p["values"][k]), csv_field(p["sigmas"][k])});
    }
  }
  write_file(dir / "points.csv", to_csv({"d", "alpha_sq", "basis", "cycles", "value", "sigma"}, points));

  std::vector<std::vector<std::string>> det;
  for (const auto &t : j["detection"]) {
    const uint32_t d = t["d"].get<uint32_t>();
    const auto &probs = t["probabilities"];
    for (size_t k = 0; k < probs.size(); ++k) {
      det.push_back({csv_field(t["d"]), csv_field(t["alpha_sq"]), std::to_string(k / (d - 1)),
                     std::to_string(k % (d - 1)), csv_field(probs[k])});
    }
  }
  write_file(dir / "detection.csv", to_csv({"d", "alpha_sq", "time", "ancilla", "probability"}, det));

  std::vector<std::vector<std::string>> gam;
  for (const auto &g : j["gamma"]) {
    gam.push_back({csv_field(g["d"]), csv_field(g["gamma"]), g.contains("gamma_sigma") ? csv_field(g["gamma_sigma"]) : ""});
  }
  write_file(dir / "gamma.csv", to_csv({"d", "gamma", "gamma_sigma"}, gam));
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Cat-qubit repetition-code simulator, decoder and analysis toolkit"};
  app.set_version_flag("--version", std::string(catrep_version()));
  app.require_subcommand(1);

  Common c;
  auto add_common = [&](CLI::App *sub, bool needs_config) {
    auto *opt = sub->add_option("--config", c.config, "Experiment configuration (JSON, // comments allowed)");
    if (needs_config) opt->required();
    sub->add_option("--seed", c.seed, "Override the experiment seed");
    sub->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", c.out, "Output directory")->capture_default_str();
    sub->add_option("--decoder", c.decoder, "Decoder variant")->check(CLI::IsMember({"none", "naive", "merged"}));
  };

  bool text = false;
  auto *sample = app.add_subcommand("sample", "Sample syndrome records for every configured point");
  add_common(sample, true);
  sample->add_flag("--text", text, "Also write a human-readable export");

  std::string input, graph_path;
  double fraction = 0.25, p_floor = 1e-6;
  auto *weigh = app.add_subcommand("weigh", "Estimate edge weights from a syndrome file");
  add_common(weigh, false);
  weigh->add_option("--input", input, "Syndrome file")->required();
  weigh->add_option("--fraction", fraction, "Leading fraction of shots used")->capture_default_str();
  weigh->add_option("--p-floor", p_floor, "Lower clamp for edge probabilities")->capture_default_str();

  bool matchings = false;
  auto *decode = app.add_subcommand("decode", "Decode a syndrome file and score logical flips");
  add_common(decode, false);
  decode->add_option("--input", input, "Syndrome file")->required();
  decode->add_option("--graph", graph_path, "Baseline graph; weighed from the file when omitted");
  decode->add_option("--fraction", fraction, "Calibration fraction when no graph is given")->capture_default_str();
  decode->add_flag("--matchings", matchings, "Write matched pairs for every scored shot");

  bool offset = false;
  auto *fit = app.add_subcommand("fit", "Fit an exponential decay to (t, value, sigma) points");
  add_common(fit, false);
  fit->add_option("--input", input, "Points as CSV or a JSON array")->required();
  fit->add_flag("--offset", offset, "Fit a constant offset");

  auto *budget = app.add_subcommand("budget", "Error budget of the configured point");
  add_common(budget, true);

  auto *sweep = app.add_subcommand("sweep-lindblad", "Master-equation sweep from the lindblad section");
  add_common(sweep, true);

  uint32_t d = 11;
  double t_cycle = 1e-6, t1 = 300e-6, alpha_sq = 5.0, t_z = 1.0;
  auto *overhead = app.add_subcommand("project-overhead", "Closed-form logical error projection");
  add_common(overhead, false);
  overhead->add_option("--d", d, "Code distance")->capture_default_str();
  overhead->add_option("--t-cycle", t_cycle, "Cycle time (s)")->capture_default_str();
  overhead->add_option("--t1", t1, "Effective single-photon lifetime (s)")->capture_default_str();
  overhead->add_option("--alpha-sq", alpha_sq, "Mean photon number")->capture_default_str();
  overhead->add_option("--t-z", t_z, "Cat bit-flip time (s)")->capture_default_str();

  auto *report = app.add_subcommand("report", "Full memory experiment with CSV tables");
  add_common(report, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sample) {
      cmd_sample(c, text);
    } else if (*weigh) {
      cmd_weigh(c, input, fraction, p_floor);
    } else if (*decode) {
      cmd_decode(c, input, graph_path, fraction, matchings);
    } else if (*fit) {
      cmd_fit(c, input, offset);
    } else if (*budget) {
      cmd_budget(c);
    } else if (*sweep) {
      cmd_sweep_lindblad(c);
    } else if (*overhead) {
      cmd_project_overhead(c, d, t_cycle, t1, alpha_sq, t_z);
    } else if (*report) {
      cmd_report(c);
    }
  } catch (const CliError &e) {
    std::cerr << "catrep: " << e.message << "\n";
    return e.code;
  } catch (const std::exception &e) {
    std::cerr << "catrep: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
