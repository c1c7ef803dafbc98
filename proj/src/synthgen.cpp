// Copyright 2026 The RANalyzer Authors
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

#include "ranalyzer/synthgen.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "ranalyzer/error.hpp"
#include "ranalyzer/ingest.hpp"
#include "ranalyzer/rng.hpp"
#include "ranalyzer/text.hpp"

namespace ranalyzer::synthgen {

using commitcat::Category;
using commitcat::CategoryMask;
using json = nlohmann::json;

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }
double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

/// Value as it reads back from the fixed-decimal text.
double printed(double v, int decimals) { return std::stod(fixed(v, decimals)); }

std::chrono::sys_days parse_date(std::string_view s) {
  const auto id = ingest::TestId::parse(s, "000000");
  if (!id) throw ConfigError("scenario start_date must be yyyymmdd: " + std::string(s));
  return std::chrono::sys_days{std::chrono::year{id->year} / id->month / id->day};
}

std::string stamp(std::chrono::sys_days day, int seconds_of_day) {
  const std::chrono::year_month_day ymd{day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d%02u%02u/%02d%02d%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), seconds_of_day / 3600,
                seconds_of_day / 60 % 60, seconds_of_day % 60);
  return buf;
}

std::string commit_hash(std::uint64_t seed, std::size_t index) {
  std::string h;
  for (std::uint64_t k = 0; h.size() < 40; ++k) h += text::hex64(derive_seed(derive_seed(seed, 0xc0ffee), index * 4 + k));
  return h.substr(0, 40);
}

std::string load_name(double load) { return text::format_double(load); }

/// Keyword spelling as written in the rule text, keyed by its lower-case form.
const std::map<std::string, std::string>& keyword_spelling() {
  static const std::map<std::string, std::string> spelling = [] {
    std::map<std::string, std::string> m;
    for (const auto& raw : text::split(commitcat::default_keyword_rules_text(), '\n')) {
      const auto line = std::string(text::trim(raw));
      if (line.rfind("kw ", 0) != 0) continue;
      const auto p1 = line.find(' ', 3);
      const auto p2 = line.find(' ', p1 + 1);
      std::string kw(text::trim(std::string_view(line).substr(p2 + 1)));
      if (kw.size() >= 2 && kw.front() == '"' && kw.back() == '"') kw = kw.substr(1, kw.size() - 2);
      m.emplace(text::lower(kw), kw);
    }
    return m;
  }();
  return spelling;
}

const std::vector<std::string>& distractors() {
  static const std::vector<std::string> words{"handling", "path",  "logic", "config",  "update", "minor",
                                              "corner case", "init", "values", "state", "check", "when",
                                              "for",       "in",    "of",    "the",     "on",     "during"};
  return words;
}

const std::vector<std::string>& type_words() {
  static const std::vector<std::string> words{"fix", "optimize", "add", "refactor"};
  return words;
}

}  // namespace

// ---------------------------------------------------------------------------
// Scenario

std::pair<double, double> ScenarioSpec::logistic() const {
  if (sigmoid_a != 0.0 || sigmoid_b != 0.0) return {sigmoid_a, sigmoid_b};
  const double b = logit(eff_at_min_sinr);
  const double a = (logit(eff_at_max_sinr) - b) / sinr_max;
  return {a, b};
}

void ScenarioSpec::validate() const {
  if (n_commits == 0 || tests_per_commit == 0) throw ConfigError("scenario needs commits and tests");
  if (tests_per_commit > 24) throw ConfigError("at most 24 tests per commit");
  if (!(rsrp_max > rsrp_min)) throw ConfigError("rsrp range is empty");
  if (!(sinr_max > 0.0) || sinr_sd < 0.0) throw ConfigError("bad SINR law");
  if (!(eff_at_min_sinr > 0.0 && eff_at_min_sinr < eff_at_max_sinr && eff_at_max_sinr < 1.0))
    throw ConfigError("efficiency anchors must satisfy 0 < min < max < 1");
  if (loads.empty()) throw ConfigError("load set is empty");
  for (double l : loads)
    if (!(l > 0.0)) throw ConfigError("loads must be positive");
  if (!(link_capacity > 0.0) || noise_sd < 0.0 || bler_scale < 0.0 || !(bler_decay > 0.0))
    throw ConfigError("bad environment law parameters");
  if (intervals == 0 || reports == 0) throw ConfigError("intervals and reports must be positive");
  for (const auto& inj : injections) {
    if (inj.commit >= n_commits) throw ConfigError("injection commit index out of range");
    if (!(inj.drop > 0.0 && inj.drop < 1.0)) throw ConfigError("injection drop must lie in (0, 1)");
    if (inj.onset_delay < 0) throw ConfigError("injection onset delay must be >= 0");
    if (inj.layers.empty()) throw ConfigError("injection needs at least one layer");
    for (const auto& l : inj.layers) {
      const auto c = commitcat::category_from_name(l);
      if (!c || !commitcat::is_layer(*c)) throw ConfigError("injection layer is not a protocol layer: " + l);
    }
  }
  for (const auto& r : plant_rules) {
    const auto c = commitcat::category_from_name(r.layer);
    if (!c || !commitcat::is_layer(*c)) throw ConfigError("plant rule layer is not a protocol layer: " + r.layer);
    if (!(r.drop > 0.0 && r.drop < 1.0)) throw ConfigError("plant rule drop must lie in (0, 1)");
  }
  parse_date(start_date);
}

ScenarioSpec parse_scenario(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  ScenarioSpec s;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    get("seed", s.seed);
    get("n_commits", s.n_commits);
    get("tests_per_commit", s.tests_per_commit);
    get("start_date", s.start_date);
    get("rsrp_min", s.rsrp_min);
    get("rsrp_max", s.rsrp_max);
    get("sinr_max", s.sinr_max);
    get("sinr_sd", s.sinr_sd);
    get("sigmoid_a", s.sigmoid_a);
    get("sigmoid_b", s.sigmoid_b);
    get("eff_at_min_sinr", s.eff_at_min_sinr);
    get("eff_at_max_sinr", s.eff_at_max_sinr);
    get("bler_scale", s.bler_scale);
    get("bler_decay", s.bler_decay);
    get("loads", s.loads);
    get("link_capacity", s.link_capacity);
    get("noise_sd", s.noise_sd);
    get("intervals", s.intervals);
    get("reports", s.reports);
    if (j.contains("injections"))
      for (const auto& e : j.at("injections")) {
        Injection inj;
        inj.commit = e.at("commit").get<std::size_t>();
        inj.layers = e.at("layers").get<std::vector<std::string>>();
        inj.drop = e.at("drop").get<double>();
        inj.onset_delay = e.value("onset_delay", 0);
        s.injections.push_back(std::move(inj));
      }
    if (j.contains("plant_rules"))
      for (const auto& e : j.at("plant_rules")) {
        PlantRule r;
        r.layer = e.at("layer").get<std::string>();
        r.min_load = e.value("min_load", 0.0);
        r.drop = e.at("drop").get<double>();
        s.plant_rules.push_back(std::move(r));
      }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad scenario field: ") + e.what());
  }
  s.validate();
  return s;
}

std::string scenario_to_json(const ScenarioSpec& s) {
  json j;
  j["seed"] = s.seed;
  j["n_commits"] = s.n_commits;
  j["tests_per_commit"] = s.tests_per_commit;
  j["start_date"] = s.start_date;
  j["rsrp_min"] = s.rsrp_min;
  j["rsrp_max"] = s.rsrp_max;
  j["sinr_max"] = s.sinr_max;
  j["sinr_sd"] = s.sinr_sd;
  j["sigmoid_a"] = s.sigmoid_a;
  j["sigmoid_b"] = s.sigmoid_b;
  j["eff_at_min_sinr"] = s.eff_at_min_sinr;
  j["eff_at_max_sinr"] = s.eff_at_max_sinr;
  j["bler_scale"] = s.bler_scale;
  j["bler_decay"] = s.bler_decay;
  j["loads"] = s.loads;
  j["link_capacity"] = s.link_capacity;
  j["noise_sd"] = s.noise_sd;
  j["intervals"] = s.intervals;
  j["reports"] = s.reports;
  j["injections"] = json::array();
  for (const auto& i : s.injections)
    j["injections"].push_back({{"commit", i.commit}, {"layers", i.layers}, {"drop", i.drop}, {"onset_delay", i.onset_delay}});
  j["plant_rules"] = json::array();
  for (const auto& r : s.plant_rules)
    j["plant_rules"].push_back({{"layer", r.layer}, {"min_load", r.min_load}, {"drop", r.drop}});
  return j.dump(2) + "\n";
}

double environment_efficiency(const ScenarioSpec& spec, double sinr, double load) {
  const auto [a, b] = spec.logistic();
  const double capacity = std::min(1.0, spec.link_capacity / load);
  return std::clamp(logistic(a * sinr + b) * capacity, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Commit messages

std::string synthesize_message(const CategoryMask& planted, std::uint64_t seed, const commitcat::RuleSet& rules) {
  const auto& spelling = keyword_spelling();
  Rng rng(seed);
  for (int attempt = 0; attempt < 500; ++attempt) {
    std::vector<std::string> words;
    words.push_back(type_words()[rng.below(type_words().size())]);
    for (std::size_t c = 0; c < commitcat::kNumCategories; ++c) {
      if (!planted[c]) continue;
      std::vector<const commitcat::KeywordRule*> pool;
      for (const auto& r : rules.keywords)
        if (commitcat::index_of(r.category) == c) pool.push_back(&r);
      if (pool.empty()) throw ConfigError("no keywords for planted category");
      const std::size_t take = 1 + rng.below(std::min<std::size_t>(3, pool.size()));
      for (std::size_t t = 0; t < take; ++t) {
        const auto j = t + rng.below(pool.size() - t);
        std::swap(pool[t], pool[j]);
        const auto it = spelling.find(pool[t]->keyword);
        words.push_back(it != spelling.end() ? it->second : pool[t]->keyword);
      }
    }
    const std::size_t n_distract = 1 + rng.below(3);
    for (std::size_t d = 0; d < n_distract; ++d) {
      const auto& w = distractors()[rng.below(distractors().size())];
      words.insert(words.begin() + 1 + static_cast<std::ptrdiff_t>(rng.below(words.size())), w);
    }
    std::string msg;
    for (const auto& w : words) {
      if (!msg.empty()) msg += ' ';
      msg += w;
    }
    msg += " (!" + std::to_string(1000 + rng.below(9000)) + ")";
    commitcat::CommitText ct;
    ct.message = msg;
    if (commitcat::categorize_keywords(ct, rules).affected == planted) return msg;
  }
  throw ConfigError("could not synthesize a commit message for the planted categories");
}

// ---------------------------------------------------------------------------
// Artifacts

namespace {

struct TestArtifacts {
  std::string csv;
  std::string log;
};

/// Traffic CSV whose interval rates average to `efficiency * load`.
void emit_traffic(const ScenarioSpec& spec, Rng& rng, double efficiency, double load, TestTruth& truth,
                  TestArtifacts& out) {
  const std::size_t n = spec.intervals;
  const double rate_bps = efficiency * load * 1e6;
  std::vector<double> wobble(n);
  double mean_w = 0.0;
  for (auto& w : wobble) {
    w = rng.normal(0.0, 0.02);
    mean_w += w;
  }
  mean_w /= static_cast<double>(n);
  const double offered_packets = load * 1e6 / 8.0 / 1470.0;
  const double loss = std::clamp(1.0 - efficiency, 0.0, 1.0);
  out.csv = "interval_start,interval_end,bytes,bits_per_second,jitter_ms,lost_packets,total_packets\n";
  double bps_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double bps = printed(std::max(0.0, rate_bps * (1.0 + wobble[i] - mean_w)), 1);
    const double bytes = std::round(bps / 8.0);
    const double jitter = printed(std::max(0.01, 0.3 + 2.0 * loss + rng.normal(0.0, 0.05)), 3);
    const double total = std::round(offered_packets);
    const double lost = std::round(total * loss);
    bps_sum += bps;
    truth.total_bytes += bytes;
    truth.total_packets += total;
    truth.lost_packets += lost;
    out.csv += fixed(static_cast<double>(i), 1) + "," + fixed(static_cast<double>(i + 1), 1) + "," + fixed(bytes, 0) +
               "," + fixed(bps, 1) + "," + fixed(jitter, 3) + "," + fixed(lost, 0) + "," + fixed(total, 0) + "\n";
  }
  truth.measured_efficiency = bps_sum / static_cast<double>(n) / 1e6 / load;
}

void emit_log(const ScenarioSpec& spec, Rng& rng, const std::string& hash, double rsrp, double sinr,
              TestTruth& truth, TestArtifacts& out) {
  std::string& log = out.log;
  log += "[GNB_APP]   I OAI-style gNB build, commit hash: " + hash + "\n";
  log += "[NR_PHY]   I Initializing L1 instance 0\n";
  std::int64_t rrc_setup = 1 + static_cast<std::int64_t>(rng.below(2));
  std::int64_t pdu = rrc_setup;
  std::int64_t msg2 = static_cast<std::int64_t>(rng.below(3));
  std::int64_t warnings = static_cast<std::int64_t>(rng.below(4));
  std::int64_t errors = static_cast<std::int64_t>(rng.below(2));
  std::int64_t release = static_cast<std::int64_t>(rng.below(2));
  for (std::int64_t i = 0; i < msg2; ++i) log += "[NR_MAC]   I UE 4a2c: Msg2 failed, retrying RA\n";
  for (std::int64_t i = 0; i < rrc_setup; ++i) log += "[NR_RRC]   I UE 4a2c: received RRCSetupComplete\n";
  for (std::int64_t i = 0; i < pdu; ++i) log += "[NGAP]   I PDU Session established for UE 4a2c\n";

  double s_rsrp = 0, s_sinr = 0, s_cqi = 0, s_dl = 0, s_ul = 0, s_r1 = 0, s_tot = 0;
  const double n = static_cast<double>(spec.reports);
  for (std::size_t r = 0; r < spec.reports; ++r) {
    const double v_rsrp = printed(rsrp + rng.normal(0.0, 0.5), 1);
    const double v_sinr = printed(std::clamp(sinr + rng.normal(0.0, 0.5), 0.0, spec.sinr_max + 5.0), 1);
    const double v_cqi = std::clamp(std::round(v_sinr / 2.0), 0.0, 15.0);
    const double bler = spec.bler_scale * std::exp(-v_sinr / spec.bler_decay);
    const double v_dl = printed(std::clamp(bler * (1.0 + rng.normal(0.0, 0.05)), 0.0, 1.0), 5);
    const double v_ul = printed(std::clamp(0.8 * bler * (1.0 + rng.normal(0.0, 0.05)), 0.0, 1.0), 5);
    const double first = 1000.0 + std::round(rng.uniform(0.0, 50.0));
    const double r1 = std::round(first * v_dl);
    const double r2 = std::round(r1 * v_dl);
    const double total = r1 + r2;
    s_rsrp += v_rsrp;
    s_sinr += v_sinr;
    s_cqi += v_cqi;
    s_dl += v_dl;
    s_ul += v_ul;
    s_r1 += r1;
    s_tot += total;
    log += "[NR_MAC]   I Frame.Slot " + std::to_string(128 * r) + ".0\n";
    log += "[NR_MAC]   I UE 4a2c: average RSRP " + fixed(v_rsrp, 1) + " (16 meas)\n";
    log += "[NR_MAC]   I UE 4a2c: UL SNR " + fixed(v_sinr, 1) + " dB, CQI " + fixed(v_cqi, 0) + "\n";
    log += "[NR_MAC]   I UE 4a2c: dlsch_rounds " + fixed(first, 0) + "/" + fixed(r1, 0) + "/" + fixed(r2, 0) +
           "/0, dlsch_errors 0, BLER " + fixed(v_dl, 5) + " MCS 27\n";
    log += "[NR_MAC]   I UE 4a2c: ulsch_rounds " + fixed(first, 0) + "/0/0/0, ulsch_errors 0, BLER " + fixed(v_ul, 5) +
           " MCS 20\n";
    log += "[NR_MAC]   I UE 4a2c: HARQ retransmissions " + fixed(total, 0) + "\n";
  }
  for (std::int64_t i = 0; i < warnings; ++i) log += "[NR_MAC]   W UE 4a2c: no free PUCCH resource\n";
  for (std::int64_t i = 0; i < errors; ++i) log += "[PHY]   E late slot indication\n";
  for (std::int64_t i = 0; i < release; ++i) log += "[NR_RRC]   I UE 4a2c: sending RRCRelease\n";

  truth.kpm = {{"rsrp", s_rsrp / n},      {"sinr", s_sinr / n},         {"cqi_mean", s_cqi / n},
               {"dl_bler", s_dl / n},     {"ul_bler", s_ul / n},        {"harq_retx_round1", s_r1 / n},
               {"harq_retx_total", s_tot / n}};
  truth.events = {{"pdu_sessions_active", pdu}, {"msg2_failures", msg2},     {"rrc_setup", rrc_setup},
                  {"rrc_release", release},     {"scheduler_warnings", warnings}, {"error_lines", errors}};
}

}  // namespace

Corpus generate(const ScenarioSpec& spec) {
  spec.validate();
  Corpus corpus;
  const auto start = parse_date(spec.start_date);
  const auto& rules = commitcat::default_keyword_rules();

  // Planted categories: 1-2 layers and at most one component per commit.
  corpus.commits.resize(spec.n_commits);
  for (std::size_t c = 0; c < spec.n_commits; ++c) {
    auto& ct = corpus.commits[c];
    Rng rng(derive_seed(spec.seed, 0x100000 + c));
    ct.index = c;
    ct.hash = commit_hash(spec.seed, c);
    const std::size_t n_layers = 1 + rng.below(2);
    while (commitcat::layer_count(ct.categories) < n_layers) ct.categories.set(rng.below(commitcat::kNumLayers));
    if (rng.uniform() < 0.4) ct.categories.set(commitcat::kNumLayers + rng.below(commitcat::kNumComponents));
    ct.files_changed = 1 + static_cast<std::int64_t>(rng.below(20));
    ct.lines_added = 5 + static_cast<std::int64_t>(rng.below(500));
    ct.lines_deleted = static_cast<std::int64_t>(rng.below(300));
    ct.deployed_at = stamp(start + std::chrono::days(static_cast<int>(c * spec.tests_per_commit)), 0);
  }
  for (const auto& inj : spec.injections) {
    auto& ct = corpus.commits[inj.commit];
    for (std::size_t l = 0; l < commitcat::kNumLayers; ++l) ct.categories.reset(l);
    for (const auto& name : inj.layers) ct.categories.set(commitcat::index_of(*commitcat::category_from_name(name)));
    ct.injected = true;
  }
  for (auto& ct : corpus.commits) ct.message = synthesize_message(ct.categories, derive_seed(spec.seed, 0x200000 + ct.index), rules);

  std::string commits_jsonl;
  for (const auto& ct : corpus.commits) {
    json j;
    j["hash"] = ct.hash;
    j["message"] = ct.message;
    j["files_changed"] = ct.files_changed;
    j["lines_added"] = ct.lines_added;
    j["lines_deleted"] = ct.lines_deleted;
    j["deployed_at"] = ct.deployed_at;
    commits_jsonl += j.dump() + "\n";
  }
  corpus.files["commits.jsonl"] = std::move(commits_jsonl);

  for (std::size_t c = 0; c < spec.n_commits; ++c) {
    auto& ct = corpus.commits[c];
    for (std::size_t t = 0; t < spec.tests_per_commit; ++t) {
      Rng rng(derive_seed(spec.seed, 0x300000 + c * spec.tests_per_commit + t));
      TestTruth tt;
      tt.commit_index = c;
      tt.commit = ct.hash;
      tt.test_index = t;
      const int seconds = 2 * 3600;
      tt.test_id = stamp(start + std::chrono::days(static_cast<int>(c * spec.tests_per_commit + t)), seconds);
      tt.delta_t_hours = 24.0 * static_cast<double>(t) + 2.0;
      tt.load = spec.loads[rng.below(spec.loads.size())];
      const double rsrp = rng.uniform(spec.rsrp_min, spec.rsrp_max);
      tt.sinr_true = std::clamp(spec.sinr_max * (rsrp - spec.rsrp_min) / (spec.rsrp_max - spec.rsrp_min) +
                                    rng.normal(0.0, spec.sinr_sd),
                                0.0, spec.sinr_max);
      tt.expected_efficiency = environment_efficiency(spec, tt.sinr_true, tt.load);
      for (const auto& inj : spec.injections)
        if (inj.commit == c && t >= static_cast<std::size_t>(inj.onset_delay)) tt.multiplier *= 1.0 - inj.drop;
      for (const auto& r : spec.plant_rules)
        if (ct.categories[commitcat::index_of(*commitcat::category_from_name(r.layer))] && tt.load >= r.min_load) {
          tt.multiplier *= 1.0 - r.drop;
          ct.injected = true;
        }
      tt.degraded = tt.multiplier < 1.0;
      const double eff = std::max(0.0, tt.expected_efficiency * tt.multiplier + rng.normal(0.0, spec.noise_sd));

      TestArtifacts art;
      emit_traffic(spec, rng, eff, tt.load, tt, art);
      emit_log(spec, rng, ct.hash, rsrp, tt.sinr_true, tt, art);
      corpus.files["dataset/" + tt.test_id + "/iperf3_dl_" + load_name(tt.load) + "Mbps.csv"] = std::move(art.csv);
      corpus.files["dataset/" + tt.test_id + "/gnb.log"] = std::move(art.log);
      corpus.tests.push_back(std::move(tt));
    }
  }
  corpus.files["truth_tests.csv"] = truth_tests_csv(corpus.tests);
  corpus.files["truth_commits.csv"] = truth_commits_csv(corpus.commits);
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& out_dir) {
  for (const auto& [rel, content] : corpus.files) text::write_file((out_dir / rel).string(), content);
}

std::string truth_tests_csv(const std::vector<TestTruth>& tests) {
  std::string out =
      "test_id,commit_index,commit,test_index,delta_t_hours,load,sinr_true,expected_efficiency,multiplier,"
      "measured_efficiency,degraded\n";
  for (const auto& t : tests) {
    out += t.test_id + "," + std::to_string(t.commit_index) + "," + t.commit + "," + std::to_string(t.test_index) + "," +
           text::format_double(t.delta_t_hours) + "," + text::format_double(t.load) + "," +
           text::format_double(t.sinr_true) + "," + text::format_double(t.expected_efficiency) + "," +
           text::format_double(t.multiplier) + "," + text::format_double(t.measured_efficiency) + "," +
           (t.degraded ? "1" : "0") + "\n";
  }
  return out;
}

std::string truth_commits_csv(const std::vector<CommitTruth>& commits) {
  std::string out = "commit_index,commit,deployed_at,categories,injected\n";
  for (const auto& c : commits) {
    std::string cats;
    for (const auto& n : commitcat::category_names(c.categories)) cats += (cats.empty() ? "" : ";") + n;
    out += std::to_string(c.index) + "," + c.hash + "," + c.deployed_at + "," + cats + "," + (c.injected ? "1" : "0") +
           "\n";
  }
  return out;
}

}  // namespace ranalyzer::synthgen
