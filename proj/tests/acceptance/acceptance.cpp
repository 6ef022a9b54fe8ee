/* Copyright 2026 The Neural Transducer Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any requested criterion fails.
//
//   nt_acceptance            all criteria
//   nt_acceptance 2 5        only criteria 2 and 5

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nt/kv_config.hpp"
#include "nt/training.hpp"
#include "nt/verify.hpp"
#include "run_config.hpp"

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fixed(double v, int digits = 4) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

ntrans::RunConfig load_config(const std::string& name, const fs::path& out_dir) {
  const fs::path path = fs::path(NT_CONFIG_DIR) / name;
  nt::KeyValues kv = nt::KeyValues::load(path.string());
  kv.set("checkpoint_dir", out_dir.string());
  kv.set("metrics_path", (out_dir / "metrics.csv").string());
  return ntrans::RunConfig::from(kv);
}

struct TrainedRun {
  nt::EvalReport test;
  double seconds = 0;
  std::size_t examples = 0;
  std::size_t presented = 0;
  fs::path dir;
};

TrainedRun train_and_test(const std::string& config, const std::string& tag) {
  const fs::path dir = fs::current_path() / "acceptance_work" / tag;
  fs::remove_all(dir);
  const ntrans::RunConfig r = load_config(config, dir);
  const ntrans::Splits data = r.load_data();
  nt::TrainConfig tc = r.train;
  tc.annotations.set("task", r.task);

  const auto t0 = Clock::now();
  nt::Model model(r.model, tc.seed, static_cast<nt::Real>(r.init_range));
  const nt::TrainResult res = nt::train(model, data.train, data.val, tc, std::nullopt,
                                        [&](const std::string& s) { std::cerr << "  [" << tag << "] " << s << "\n"; });
  TrainedRun out;
  out.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  out.examples = data.train.size();
  out.presented = res.state.sequences_seen;
  out.dir = dir;
  const nt::Model best(r.model, res.best_params);
  out.test = nt::eval_model(best, data.test, r.beam, tc.workers);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// --- criteria ---------------------------------------------------------------

std::string describe(const TrainedRun& r) {
  return "seq_err " + fixed(r.test.sequence_error_rate) + " on " + std::to_string(r.test.count) + " from " +
         std::to_string(r.examples) + " generated examples (" + std::to_string(r.presented) + " presented) in " +
         fixed(r.seconds, 0) + "s";
}

Verdict addition() {
  const TrainedRun smoke = train_and_test("addition_smoke.cfg", "addition_smoke");
  const bool smoke_ok = smoke.test.sequence_error_rate <= 0.02 && smoke.examples <= 50000 && smoke.seconds <= 300;
  const TrainedRun full = train_and_test("addition.cfg", "addition");
  const bool full_ok = full.test.sequence_error_rate <= 0.01 && full.examples <= 500000 && full.seconds <= 7200;
  const std::string d = "smoke " + describe(smoke) + " (limit 0.02, 50000, 300s); full " + describe(full) +
                        " (limit 0.01, 500000, 7200s)";
  return {smoke_ok && full_ok, d};
}

Verdict from_checks(const nt::verify::SuiteResult& suite, const std::vector<std::string>& names) {
  Verdict v{true, ""};
  for (const auto& n : names) {
    const nt::verify::Check* c = suite.find(n);
    const bool ok = c != nullptr && c->pass;
    v.pass = v.pass && ok;
    if (!v.detail.empty()) v.detail += "; ";
    v.detail += n + (ok ? " ok" : " FAILED") + (c != nullptr ? " (" + c->detail + ")" : " (missing)");
  }
  return v;
}

const nt::verify::SuiteResult& oracle_suite() {
  static const nt::verify::SuiteResult suite = nt::verify::run_oracle_suite(nt::verify::OracleOptions{50, 100, 7});
  return suite;
}

Verdict gradients() {
  return from_checks(nt::verify::run_gradcheck_suite(nt::verify::GradcheckOptions{20, 1, 1e-4, 1e-4}),
                     {"gradcheck_none", "gradcheck_dot", "gradcheck_mlp", "gradcheck_lstm"});
}

Verdict marginalization() { return from_checks(oracle_suite(), {"marginal_mass", "zero_weight_closed_form"}); }
Verdict dp_vs_exact() { return from_checks(oracle_suite(), {"dp_vs_exact"}); }
Verdict beam_vs_exhaustive() { return from_checks(oracle_suite(), {"beam_vs_exhaustive", "beam_monotone"}); }
Verdict online_offline() { return from_checks(oracle_suite(), {"online_offline", "prefix_stability"}); }

Verdict recurrence_ablation() {
  const TrainedRun on = train_and_test("probe_recurrent.cfg", "probe_recurrent");
  const TrainedRun off = train_and_test("probe_reset.cfg", "probe_reset");
  const double acc_on = 1 - on.test.token_error_rate;
  const double acc_off = 1 - off.test.token_error_rate;
  return {acc_on - acc_off >= 0.20, "token accuracy with state carried " + fixed(acc_on) + ", reset per block " +
                                        fixed(acc_off) + ", gap " + fixed(100 * (acc_on - acc_off), 1) +
                                        " points (need 20)"};
}

Verdict determinism() {
  const TrainedRun a = train_and_test("addition_smoke.cfg", "determinism_a");
  const TrainedRun b = train_and_test("addition_smoke.cfg", "determinism_b");
  const std::string ca = slurp(a.dir / "metrics.csv");
  const std::string cb = slurp(b.dir / "metrics.csv");
  const bool same = !ca.empty() && ca == cb;
  return {same, std::string(same ? "identical" : "different") + " metrics CSV (" + std::to_string(ca.size()) +
                    " and " + std::to_string(cb.size()) + " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<std::string, std::function<Verdict()>>> criteria{
      {1, {"addition", addition}},
      {2, {"gradient_check", gradients}},
      {3, {"marginalization", marginalization}},
      {4, {"dp_vs_exact_alignment", dp_vs_exact}},
      {5, {"beam_vs_exhaustive_decode", beam_vs_exhaustive}},
      {6, {"online_offline_decode", online_offline}},
      {7, {"block_recurrence_ablation", recurrence_ablation}},
      {8, {"training_determinism", determinism}},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (criteria.count(n) == 0) {
      std::cerr << "unknown criterion '" << argv[i] << "'\n";
      return 2;
    }
    wanted.push_back(n);
  }
  if (wanted.empty()) {
    for (const auto& [n, c] : criteria) wanted.push_back(n);
  }

  bool all = true;
  for (int n : wanted) {
    const auto& [name, run] = criteria.at(n);
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    all = all && v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << n << " " << name << ": " << v.detail << std::endl;
  }
  return all ? 0 : 1;
}
