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


#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rltask/config.hpp"
#include "rltask/csv.hpp"
#include "rltask/error.hpp"
#include "rltask/workflow.hpp"

using namespace rltask;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rltask_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig small_run(const fs::path& out, int k, std::size_t trials) {
  ExperimentConfig c;
  c.experiment_id = "wf";
  c.output_dir = out.string();
  c.protocol_class = k;
  c.trials = trials;
  c.budget = 10;
  c.final_window = 2;
  c.distribution.base.unroll_length = 3;
  c.distribution.devices = default_device_set(2);
  c.grouper.num_groups = 4;
  c.grouper.update_iterations = 1;
  c.placer.num_groups = 4;
  c.placer.aggregation_rounds = 1;
  c.placer.layer_size = 4;
  return c;
}

}  // namespace

TEST_CASE("csv quoting round trip") {
  CsvTable t{{"a", "b"}, {{"x,y", "he said \"hi\""}, {"line\nbreak", ""}}};
  std::stringstream ss;
  write_csv(ss, t);
  const CsvTable back = read_csv(ss);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(csv_escape("plain") == "plain");
  CHECK_THROWS_AS(back.column("c"), ProtocolError);
}

TEST_CASE("config json round trip and hash stability") {
  ExperimentConfig c = small_run("/tmp/x", 2, 3);
  c.noise_sigma = 0.05;
  c.distribution.held_out_family = GraphFamily::kCnnLike;
  const nlohmann::json doc = to_json(c);
  const ExperimentConfig back = config_from_json(doc);
  CHECK(to_json(back) == doc);
  CHECK(config_hash(back) == config_hash(c));

  // reordered keys parse to the same hash
  std::string text = doc.dump();
  const nlohmann::json reordered = nlohmann::json::parse(text);
  CHECK(config_hash(config_from_json(reordered)) == config_hash(c));

  ExperimentConfig moved = c;
  moved.output_dir = "/elsewhere";
  CHECK(config_hash(moved) == config_hash(c));
  ExperimentConfig other = c;
  other.budget += 1;
  CHECK(config_hash(other) != config_hash(c));

  nlohmann::json unknown = doc;
  unknown["surprise"] = 1;
  CHECK_THROWS_AS(config_from_json(unknown), ConfigError);
  nlohmann::json unversioned = doc;
  unversioned.erase("spec_version");
  CHECK_THROWS_AS(config_from_json(unversioned), ConfigError);
}

TEST_CASE("validation catches inconsistencies") {
  ExperimentConfig c = small_run("/tmp/x", 1, 2);
  validate(c);
  ExperimentConfig bad = c;
  bad.schema_devices = {"cpu0", "gpu0", "gpu1", "gpu2"};
  try {
    validate(bad);
    FAIL("expected a validation error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("schema devices") != std::string::npos);
  }
  bad = c;
  bad.placer.num_groups = 5;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.protocol_class = 9;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.task_graph.nodes[1].children = {"grouper"};
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.threshold = 0.0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.spec_version = "0.1";
  CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("C0 run writes artifacts and reruns byte-identically") {
  const fs::path a = scratch("c0a");
  const fs::path b = scratch("c0b");
  const WorkflowResult ra = run_workflow(small_run(a, 0, 1));
  const WorkflowResult rb = run_workflow(small_run(b, 0, 1));
  CHECK(ra.finished);
  CHECK(fs::exists(ra.dir / "config.json"));
  CHECK(fs::exists(ra.dir / "results.csv"));
  CHECK(fs::exists(ra.dir / "trials" / "trial_000" / "steps.csv"));
  CHECK(fs::exists(ra.dir / "trials" / "trial_000" / "checkpoint.json"));
  CHECK(slurp(ra.dir / "summary.json") == slurp(rb.dir / "summary.json"));
  CHECK(slurp(ra.dir / "results.csv") == slurp(rb.dir / "results.csv"));
  CHECK(slurp(ra.dir / "trials/trial_000/steps.csv") ==
        slurp(rb.dir / "trials/trial_000/steps.csv"));
  const std::string record = ra.summary.at("record");
  CHECK(record.rfind("C_0(n=", 0) == 0);

  // every artifact carries the hash
  const std::string hash = ra.summary.at("config_hash");
  const CsvTable results = read_csv_file((ra.dir / "results.csv").string());
  for (const auto& row : results.rows) {
    CHECK(row[results.column("config_hash")] == hash);
  }

  // a rerun in place resumes everything
  const WorkflowResult again = run_workflow(small_run(a, 0, 1));
  CHECK(again.trials_resumed == 1);
  CHECK(again.trials_run == 0);
  CHECK(slurp(again.dir / "summary.json") == slurp(rb.dir / "summary.json"));

  // a different config in the same directory is refused
  ExperimentConfig changed = small_run(a, 0, 1);
  changed.budget = 11;
  CHECK_THROWS_AS(run_workflow(changed), ConfigError);
}

TEST_CASE("interrupted runs resume to the same summary") {
  const fs::path a = scratch("resume_a");
  const fs::path b = scratch("resume_b");
  WorkflowOptions stop;
  stop.max_new_trials = 1;
  const WorkflowResult partial = run_workflow(small_run(a, 1, 3), stop);
  CHECK_FALSE(partial.finished);
  CHECK(partial.trials_run == 1);
  CHECK_FALSE(fs::exists(partial.dir / "summary.json"));
  const WorkflowResult resumed = run_workflow(small_run(a, 1, 3));
  CHECK(resumed.finished);
  CHECK(resumed.trials_resumed == 1);
  CHECK(resumed.trials_run == 2);
  const WorkflowResult whole = run_workflow(small_run(b, 1, 3));
  CHECK(slurp(resumed.dir / "summary.json") == slurp(whole.dir / "summary.json"));
  CHECK(slurp(resumed.dir / "results.csv") == slurp(whole.dir / "results.csv"));
  const std::string record = whole.summary.at("record");
  CHECK(record.find(",s=3,") != std::string::npos);
}

TEST_CASE("output root override") {
  const fs::path root = scratch("env_root");
  ::setenv(kOutputRootEnv, root.c_str(), 1);
  const fs::path dir = experiment_dir(small_run("/nonexistent", 0, 1));
  ::unsetenv(kOutputRootEnv);
  CHECK(dir == root / "wf");
}

TEST_CASE("report emits one curve row per step and refuses mixed hashes") {
  const fs::path a = scratch("report");
  const WorkflowResult r = run_workflow(small_run(a, 1, 2));
  const ReportResult rep = report(r.dir.string());
  const CsvTable results = read_csv_file((r.dir / "results.csv").string());
  CHECK(rep.curve_rows == results.rows.size());
  const CsvTable curves = read_csv_file((rep.out_dir / "curves.csv").string());
  CHECK(curves.rows.size() == rep.curve_rows);
  CHECK(fs::exists(rep.out_dir / "aggregate.csv"));

  const fs::path steps = r.dir / "trials" / "trial_001" / "steps.csv";
  CsvTable t = read_csv_file(steps.string());
  t.rows[0][t.column("config_hash")] = "feedface";
  write_csv_file(steps.string(), t);
  CHECK_THROWS_AS(report(r.dir.string()), ProtocolError);
}

TEST_CASE("classify reads a results csv") {
  const fs::path dir = scratch("classify");
  const std::string path = (dir / "t.csv").string();
  write_text_file(path,
                  "trial,improvement_final,n\n0,0.57,1000\n1,0.67,1000\n"
                  "2,0.25,1000\n3,0.51,1000\n4,0.05,1000\n5,0.70,1000\n"
                  "6,0.69,1000\n7,0.47,1000\n8,0.68,1000\n9,0.66,1000\n");
  const ClassifyReport r = classify_results_csv(path, 0.30, 1);
  CHECK(r.formatted == "C_1(n=1000,s=10,f=0.80)");
  CHECK(r.improvement_final.mean == doctest::Approx(0.525));
  CHECK_FALSE(r.has_best);
  CHECK_THROWS_AS(classify_results_csv(path, 0.30, 1, true), ProtocolError);
}

TEST_CASE("evaluate builds the cross matrix and flags missing checkpoints") {
  const fs::path a = scratch("evaluate");
  const WorkflowResult r = run_workflow(small_run(a, 2, 2));
  const EvaluateResult e =
      evaluate_checkpoints({r.dir.string()}, "trials", (a / "eval").string());
  CHECK(e.matrix.present().size() == 4);
  const CsvTable m = read_csv_file(e.matrix_csv.string());
  CHECK(m.rows.size() == 4);
  // diagonal equals the logged greedy improvement
  const nlohmann::json res = nlohmann::json::parse(
      slurp(r.dir / "trials" / "trial_000" / "result.json"));
  CHECK(*e.matrix.cells[0][0].improvement ==
        res.at("greedy_improvement").get<double>());
  CHECK(e.formatted.rfind("C_4(", 0) == 0);

  fs::remove(r.dir / "trials" / "trial_001" / "checkpoint.json");
  const EvaluateResult missing =
      evaluate_checkpoints({r.dir.string()}, "trials", (a / "eval2").string());
  CHECK(missing.warnings.size() == 1);
  CHECK(missing.matrix.present().size() == 2);
  CHECK(missing.record.s == 2);
}
