// Copyright 2026 The rltask Authors. All Rights Reserved.
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

#include "rltask/workflow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>

#include "rltask/csv.hpp"
#include "rltask/error.hpp"

namespace rltask {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kDecimals = 9;

std::string num(double v) { return format_fixed(v, kDecimals); }

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProtocolError("cannot open '" + path.string() + "'");
  try {
    json doc;
    in >> doc;
    return doc;
  } catch (const json::exception& e) {
    throw ProtocolError("'" + path.string() + "' is not valid JSON: " +
                        e.what());
  }
}

void write_json(const fs::path& path, const json& doc) {
  write_text_file(path.string(), doc.dump(2) + "\n");
}

std::string trial_name(std::size_t t) {
  std::string s = std::to_string(t);
  if (s.size() < 3) s.insert(0, 3 - s.size(), '0');
  return "trial_" + s;
}

std::vector<fs::path> trial_dirs(const fs::path& dir) {
  std::vector<fs::path> out;
  const fs::path root = dir / "trials";
  if (!fs::is_directory(root)) return out;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory() && e.path().filename().string().rfind("trial_", 0) == 0) {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string seeds_field(const json& seeds) {
  std::string out;
  for (const auto& [role, seed] : seeds.items()) {
    if (!out.empty()) out += ';';
    out += role + "=" + seed.get<std::string>();
  }
  return out;
}

CsvTable steps_table(const TrialResult& r, const std::string& hash) {
  CsvTable t{{"trial", "step", "episode", "run_time", "valid", "episode_end",
              "improvement", "config_hash"},
             {}};
  for (const auto& s : r.train.steps) {
    t.rows.push_back(
        {std::to_string(r.trial), std::to_string(s.step),
         std::to_string(s.episode), num(s.run_time), s.valid ? "1" : "0",
         s.episode_end ? "1" : "0",
         num(relative_improvement(r.train.initial_run_time, s.run_time)),
         hash});
  }
  return t;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ProtocolError("bad number '" + s + "' in column " + what);
  }
}

std::size_t to_size(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ProtocolError("bad integer '" + s + "' in column " + what);
  }
}

json summarize(const ExperimentConfig& config, const std::string& hash,
               const std::vector<json>& trials) {
  std::vector<double> fin, best;
  std::vector<std::size_t> n;
  for (const auto& t : trials) {
    fin.push_back(t.at("improvement_final").get<double>());
    best.push_back(t.at("improvement_best").get<double>());
    n.push_back(t.at("n").get<std::size_t>());
  }
  const std::vector<double>& used = config.classify_best ? best : fin;
  ClassificationRecord rec =
      classify(used, n, config.threshold, config.protocol_class);
  rec.criterion += config.classify_best ? " (best-seen)" : " (final)";
  const Aggregate af = aggregate(fin);
  const Aggregate ab = aggregate(best);
  return {{"spec_version", config.spec_version},
          {"experiment_id", config.experiment_id},
          {"config_hash", hash},
          {"class", config.protocol_class},
          {"record", format_record(rec)},
          {"criterion", rec.criterion},
          {"threshold", config.threshold},
          {"s", rec.s},
          {"successes", rec.successes},
          {"f", rec.f()},
          {"n_min", rec.n_min},
          {"n_max", rec.n_max},
          {"n_flagged", rec.n_varies()},
          {"improvement_final", {{"mean", af.mean}, {"std", af.std}}},
          {"improvement_best", {{"mean", ab.mean}, {"std", ab.std}}},
          {"trials", trials}};
}

}  // namespace

fs::path experiment_dir(const ExperimentConfig& config) {
  const char* env = std::getenv(kOutputRootEnv);
  const fs::path root = env && *env ? fs::path(env) : fs::path(config.output_dir);
  return root / config.experiment_id;
}

WorkflowResult run_workflow(const ExperimentConfig& config,
                            const WorkflowOptions& options) {
  validate(config);
  const std::string hash = config_hash(config);
  WorkflowResult out;
  out.dir = experiment_dir(config);
  const fs::path cfg_path = out.dir / "config.json";
  if (fs::exists(cfg_path)) {
    const json existing = read_json(cfg_path);
    if (existing.value("config_hash", std::string()) != hash) {
      throw ConfigError("'" + out.dir.string() +
                        "' holds a different experiment (config hash " +
                        existing.value("config_hash", std::string("?")) +
                        ")");
    }
  } else {
    json doc = to_json(config);
    doc["config_hash"] = hash;
    write_json(cfg_path, doc);
  }

  std::vector<json> trials;
  for (std::size_t t = 0; t < config.trials; ++t) {
    const fs::path tdir = out.dir / "trials" / trial_name(t);
    const fs::path result_path = tdir / "result.json";
    if (fs::exists(result_path)) {
      json done = read_json(result_path);
      if (done.value("config_hash", std::string()) == hash) {
        trials.push_back(std::move(done));
        ++out.trials_resumed;
        continue;
      }
    }
    if (out.trials_run >= options.max_new_trials) return out;
    if (options.log) {
      *options.log << "trial " << t << "/" << config.trials << "\n";
    }
    const TrialResult r = run_trial(config, t);
    write_csv_file((tdir / "steps.csv").string(), steps_table(r, hash));
    json ckpt = r.checkpoint;
    ckpt["experiment_id"] = config.experiment_id;
    ckpt["trial"] = t;
    ckpt["update_step"] = r.train.placer_updates;
    ckpt["config_hash"] = hash;
    write_json(tdir / "checkpoint.json", ckpt);
    json res = summary_json(r);
    res["config_hash"] = hash;
    res["checkpoint"] = "checkpoint.json";
    write_json(result_path, res);
    trials.push_back(std::move(res));
    ++out.trials_run;
  }

  CsvTable results{{"trial", "step", "run_time", "valid", "improvement_final",
                    "improvement_best", "n", "seeds", "config_hash"},
                   {}};
  for (std::size_t t = 0; t < config.trials; ++t) {
    const json& res = trials[t];
    const CsvTable steps = read_csv_file(
        (out.dir / "trials" / trial_name(t) / "steps.csv").string());
    const std::size_t c_step = steps.column("step");
    const std::size_t c_rt = steps.column("run_time");
    const std::size_t c_valid = steps.column("valid");
    for (const auto& row : steps.rows) {
      results.rows.push_back(
          {std::to_string(t), row[c_step], row[c_rt], row[c_valid],
           num(res.at("improvement_final").get<double>()),
           num(res.at("improvement_best").get<double>()),
           std::to_string(res.at("n").get<std::size_t>()),
           seeds_field(res.at("seeds")), hash});
    }
  }
  write_csv_file((out.dir / "results.csv").string(), results);
  out.summary = summarize(config, hash, trials);
  write_json(out.dir / "summary.json", out.summary);
  out.finished = true;
  return out;
}

ClassifyReport classify_results_csv(const std::string& path, double threshold,
                                    int k, bool use_best) {
  const CsvTable t = read_csv_file(path);
  const std::size_t c_trial = t.column("trial");
  const std::size_t c_fin = t.column("improvement_final");
  const std::size_t c_n = t.column("n");
  const bool has_best = t.has_column("improvement_best");
  if (use_best && !has_best) {
    throw ProtocolError("CSV has no improvement_best column");
  }
  std::map<std::string, std::size_t> first_row;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (first_row.emplace(t.rows[i][c_trial], i).second) rows.push_back(i);
  }
  if (rows.empty()) throw ProtocolError("no trials in '" + path + "'");
  std::vector<double> fin, best;
  std::vector<std::size_t> n;
  for (std::size_t i : rows) {
    const auto& r = t.rows[i];
    fin.push_back(to_double(r[c_fin], "improvement_final"));
    if (has_best) {
      best.push_back(to_double(r[t.column("improvement_best")],
                               "improvement_best"));
    }
    n.push_back(to_size(r[c_n], "n"));
  }
  ClassifyReport rep;
  rep.record = classify(use_best ? best : fin, n, threshold, k);
  rep.record.criterion += use_best ? " (best-seen)" : " (final)";
  rep.formatted = format_record(rep.record);
  rep.improvement_final = aggregate(fin);
  rep.has_best = has_best;
  if (has_best) rep.improvement_best = aggregate(best);
  rep.n_flagged = rep.record.n_varies();
  return rep;
}

EvaluateResult evaluate_checkpoints(const std::vector<std::string>& dirs,
                                    const std::string& instances,
                                    const std::string& out_dir,
                                    double threshold, int k) {
  if (dirs.empty()) throw ProtocolError("no experiment directories given");
  EvaluateResult out;
  std::vector<std::unique_ptr<HierarchicalAgent>> agents;
  std::vector<std::string> model_ids;
  std::vector<std::size_t> model_n;
  std::vector<json> provenance;
  std::vector<std::string> provenance_ids;
  std::optional<DeviceSet> devices;
  double penalty = kDefaultInvalidPenalty;
  std::set<std::string> hashes;

  for (const auto& d : dirs) {
    const fs::path dir(d);
    json cfg_doc = read_json(dir / "config.json");
    hashes.insert(cfg_doc.value("config_hash", std::string()));
    cfg_doc.erase("config_hash");
    const ExperimentConfig cfg = config_from_json(cfg_doc);
    if (!devices) {
      devices = cfg.distribution.devices;
      penalty = cfg.converter.invalid_penalty;
    }
    for (const auto& tdir : trial_dirs(dir)) {
      const std::string id =
          cfg.experiment_id + "/" + tdir.filename().string();
      const fs::path result_path = tdir / "result.json";
      json result;
      if (fs::exists(result_path)) result = read_json(result_path);
      if (result.contains("instance")) {
        provenance.push_back(result.at("instance"));
        provenance_ids.push_back(id);
      }
      const fs::path ckpt = tdir / "checkpoint.json";
      model_ids.push_back(id);
      model_n.push_back(result.value("n", std::size_t{0}));
      if (!fs::exists(ckpt)) {
        out.warnings.push_back("missing checkpoint for " + id +
                               "; row marked absent");
        agents.push_back(nullptr);
        continue;
      }
      agents.push_back(std::make_unique<HierarchicalAgent>(
          HierarchicalAgent::from_checkpoint(read_json(ckpt))));
    }
  }
  if (model_ids.empty()) throw ProtocolError("no trials found");

  std::vector<TaskInstance> inst;
  std::vector<std::string> inst_ids;
  if (instances == "trials") {
    for (std::size_t i = 0; i < provenance.size(); ++i) {
      inst.push_back(instance_from_provenance(provenance[i], *devices));
      inst_ids.push_back(provenance_ids[i]);
    }
  } else {
    const json doc = read_json(instances);
    if (!doc.is_array()) {
      throw ProtocolError("instance file must hold a JSON array");
    }
    for (std::size_t i = 0; i < doc.size(); ++i) {
      inst.push_back(instance_from_provenance(doc[i], *devices));
      inst_ids.push_back(doc[i].value("id", "instance_" + std::to_string(i)));
    }
  }
  if (inst.empty()) throw ProtocolError("no instances to evaluate on");

  std::vector<const HierarchicalAgent*> ptrs;
  for (const auto& a : agents) ptrs.push_back(a.get());
  out.matrix = generalization_matrix(ptrs, model_ids, inst, inst_ids, penalty);

  std::vector<double> values;
  std::vector<std::size_t> ns;
  CsvTable csv{{"model", "instance", "improvement", "present", "error",
                "config_hash"},
               {}};
  const std::string hash_field = hashes.size() == 1 ? *hashes.begin() : "mixed";
  for (std::size_t i = 0; i < model_ids.size(); ++i) {
    for (std::size_t j = 0; j < inst.size(); ++j) {
      const MatrixCell& c = out.matrix.cells[i][j];
      csv.rows.push_back({model_ids[i], inst_ids[j],
                          c.improvement ? num(*c.improvement) : "",
                          c.improvement ? "1" : "0", c.error, hash_field});
      if (c.improvement) {
        values.push_back(*c.improvement);
        ns.push_back(std::max<std::size_t>(1, model_n[i]));
      } else if (!c.error.empty() && agents[i] != nullptr) {
        out.warnings.push_back("cell " + model_ids[i] + " x " + inst_ids[j] +
                               " absent: " + c.error);
      }
    }
  }
  if (values.empty()) throw ProtocolError("every matrix cell is absent");
  out.record = classify(values, ns, threshold, k);
  out.formatted = format_record(out.record);
  const fs::path od = out_dir.empty() ? fs::path(dirs.front()) : fs::path(out_dir);
  out.matrix_csv = od / "matrix.csv";
  write_csv_file(out.matrix_csv.string(), csv);
  write_json(od / "evaluation.json",
             {{"record", out.formatted},
              {"threshold", threshold},
              {"models", model_ids},
              {"instances", inst_ids},
              {"config_hashes", std::vector<std::string>(hashes.begin(),
                                                         hashes.end())},
              {"warnings", out.warnings}});
  return out;
}

ReportResult report(const std::string& dir_str) {
  const fs::path dir(dir_str);
  const json cfg = read_json(dir / "config.json");
  const std::string hash = cfg.value("config_hash", std::string());
  auto note = [&](const std::string& h, const fs::path& where) {
    if (h != hash) {
      throw ProtocolError("mixed config hashes: '" + where.string() +
                          "' has " + h + ", config.json has " + hash);
    }
  };
  if (fs::exists(dir / "summary.json")) {
    note(read_json(dir / "summary.json").value("config_hash", std::string()),
         dir / "summary.json");
  }

  ReportResult out;
  out.out_dir = dir / "report";
  out.config_hash = hash;
  CsvTable curves{{"trial", "step", "run_time", "improvement",
                   "best_improvement", "episode_end", "config_hash"},
                  {}};
  CsvTable trials{{"trial", "improvement_final", "improvement_best",
                   "greedy_improvement", "n", "evaluations",
                   "invalid_evaluations", "config_hash"},
                  {}};
  std::vector<double> fin, best;
  for (const auto& tdir : trial_dirs(dir)) {
    if (!fs::exists(tdir / "result.json")) continue;  // unfinished trial
    const json res = read_json(tdir / "result.json");
    note(res.value("config_hash", std::string()), tdir / "result.json");
    const CsvTable steps = read_csv_file((tdir / "steps.csv").string());
    const std::size_t c_hash = steps.column("config_hash");
    const std::size_t c_imp = steps.column("improvement");
    const std::size_t c_valid = steps.column("valid");
    double best_so_far = -std::numeric_limits<double>::infinity();
    for (const auto& row : steps.rows) {
      note(row[c_hash], tdir / "steps.csv");
      const double imp = to_double(row[c_imp], "improvement");
      if (row[c_valid] == "1") best_so_far = std::max(best_so_far, imp);
      curves.rows.push_back(
          {row[steps.column("trial")], row[steps.column("step")],
           row[steps.column("run_time")], row[c_imp],
           std::isfinite(best_so_far) ? num(best_so_far) : "",
           row[steps.column("episode_end")], hash});
    }
    fin.push_back(res.at("improvement_final").get<double>());
    best.push_back(res.at("improvement_best").get<double>());
    trials.rows.push_back(
        {std::to_string(res.at("trial").get<std::size_t>()), num(fin.back()),
         num(best.back()), num(res.at("greedy_improvement").get<double>()),
         std::to_string(res.at("n").get<std::size_t>()),
         std::to_string(res.at("evaluations").get<std::size_t>()),
         std::to_string(res.at("invalid_evaluations").get<std::size_t>()),
         hash});
  }
  if (trials.rows.empty()) {
    throw ProtocolError("no completed trials under '" + dir.string() + "'");
  }
  out.curve_rows = curves.rows.size();
  out.improvement_final = aggregate(fin);
  out.improvement_best = aggregate(best);
  CsvTable agg{{"metric", "mean", "std", "trials", "config_hash"}, {}};
  agg.rows.push_back({"improvement_final", num(out.improvement_final.mean),
                      num(out.improvement_final.std),
                      std::to_string(fin.size()), hash});
  agg.rows.push_back({"improvement_best", num(out.improvement_best.mean),
                      num(out.improvement_best.std),
                      std::to_string(best.size()), hash});
  write_csv_file((out.out_dir / "curves.csv").string(), curves);
  write_csv_file((out.out_dir / "trials.csv").string(), trials);
  write_csv_file((out.out_dir / "aggregate.csv").string(), agg);
  return out;
}

}  // namespace rltask
