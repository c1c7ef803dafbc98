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

#include "ranalyzer/ingest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <system_error>

#include "ranalyzer/error.hpp"
#include "ranalyzer/text.hpp"

namespace ranalyzer::ingest {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// TestId

namespace {

std::optional<int> digits(std::string_view s) {
  int v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

}  // namespace

std::optional<TestId> TestId::parse(std::string_view day_dir, std::string_view time_dir) {
  if (day_dir.size() != 8 || time_dir.size() != 6) return std::nullopt;
  const auto y = digits(day_dir.substr(0, 4));
  const auto mo = digits(day_dir.substr(4, 2));
  const auto d = digits(day_dir.substr(6, 2));
  const auto h = digits(time_dir.substr(0, 2));
  const auto mi = digits(time_dir.substr(2, 2));
  const auto s = digits(time_dir.substr(4, 2));
  if (!y || !mo || !d || !h || !mi || !s) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*y},
                                        std::chrono::month{static_cast<unsigned>(*mo)},
                                        std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  if (*h > 23 || *mi > 59 || *s > 59) return std::nullopt;
  return TestId{*y, *mo, *d, *h * 3600 + *mi * 60 + *s};
}

std::optional<TestId> TestId::parse(std::string_view joined) {
  const auto slash = joined.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  return parse(joined.substr(0, slash), joined.substr(slash + 1));
}

std::string TestId::str() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d%02d%02d/%02d%02d%02d", year, month, day,
                seconds_of_day / 3600, (seconds_of_day / 60) % 60, seconds_of_day % 60);
  return buf;
}

std::int64_t TestId::epoch_seconds() const {
  const std::chrono::sys_days days{std::chrono::year_month_day{
      std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
      std::chrono::day{static_cast<unsigned>(day)}}};
  return static_cast<std::int64_t>(days.time_since_epoch().count()) * 86400 + seconds_of_day;
}

// ---------------------------------------------------------------------------
// Scanning

ScanResult scan_dataset(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw DataError("dataset root is not a readable directory: " + root.string());
  fs::directory_iterator day_it(root, ec);
  if (ec) throw DataError("cannot read dataset root " + root.string() + ": " + ec.message());

  ScanResult result;
  std::vector<fs::path> day_dirs;
  for (const auto& e : day_it) {
    if (e.is_directory()) day_dirs.push_back(e.path());
  }
  std::sort(day_dirs.begin(), day_dirs.end());

  for (const auto& day : day_dirs) {
    const std::string day_name = day.filename().string();
    std::vector<fs::path> time_dirs;
    for (const auto& e : fs::directory_iterator(day, ec)) {
      if (e.is_directory()) time_dirs.push_back(e.path());
    }
    if (ec) {
      result.warnings.push_back({day.string(), "unreadable directory: " + ec.message()});
      continue;
    }
    std::sort(time_dirs.begin(), time_dirs.end());
    if (time_dirs.empty() && !TestId::parse(day_name, "000000")) {
      result.warnings.push_back({day.string(), "directory name is not yyyymmdd"});
      continue;
    }
    for (const auto& t : time_dirs) {
      const auto id = TestId::parse(day_name, t.filename().string());
      if (!id) {
        result.warnings.push_back({t.string(), "directory is not <yyyymmdd>/<hhmmss>"});
        continue;
      }
      DatasetEntry entry{*id, t, {}, {}};
      for (const auto& f : fs::directory_iterator(t, ec)) {
        if (!f.is_regular_file()) continue;
        const auto ext = text::lower(f.path().extension().string());
        if (ext == ".csv") entry.csv_files.push_back(f.path());
        if (ext == ".log") entry.log_files.push_back(f.path());
      }
      if (entry.csv_files.empty() && entry.log_files.empty()) {
        result.warnings.push_back({t.string(), "no recognized artifacts"});
        continue;
      }
      std::sort(entry.csv_files.begin(), entry.csv_files.end());
      std::sort(entry.log_files.begin(), entry.log_files.end());
      result.entries.push_back(std::move(entry));
    }
  }
  std::stable_sort(result.entries.begin(), result.entries.end(),
                   [](const DatasetEntry& a, const DatasetEntry& b) { return a.id < b.id; });
  return result;
}

// ---------------------------------------------------------------------------
// Rules

std::string_view default_rules_text() {
  return R"(# field, regex (one capture group for mean rules), unit, kind
rsrp, average RSRP (-?[0-9]+(?:\.[0-9]+)?), dBm, mean
sinr, SNR (-?[0-9]+(?:\.[0-9]+)?) dB, dB, mean
cqi_mean, CQI ([0-9]+(?:\.[0-9]+)?), index, mean
dl_bler, dlsch_rounds .*BLER ([0-9]+(?:\.[0-9]+)?), fraction, mean
ul_bler, ulsch_rounds .*BLER ([0-9]+(?:\.[0-9]+)?), fraction, mean
harq_retx_round1, dlsch_rounds [0-9]+/([0-9]+)/, retransmissions, mean
harq_retx_total, HARQ retransmissions ([0-9]+), retransmissions, mean
pdu_sessions_active, PDU Session established, sessions, count
msg2_failures, Msg2 failed, events, count
rrc_setup, RRCSetupComplete, events, count
rrc_release, RRCRelease, events, count
scheduler_warnings, \[NR_MAC\]\s+W\s, lines, count
error_lines, \]\s+E\s, lines, count
)";
}

std::vector<ParseRule> parse_rules(std::string_view text_in) {
  std::vector<ParseRule> rules;
  std::set<std::string> seen;
  int line_no = 0;
  for (const auto& raw : text::split(text_in, '\n')) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto where = "parse rule line " + std::to_string(line_no) + ": ";
    const auto first = line.find(',');
    const auto last = line.rfind(',');
    const auto second_last = last == std::string_view::npos ? last : line.rfind(',', last - 1);
    if (first == std::string_view::npos || second_last == std::string_view::npos || second_last <= first)
      throw ConfigError(where + "expected `field, regex, unit, kind`");
    ParseRule rule;
    rule.field = std::string(text::trim(line.substr(0, first)));
    rule.pattern = std::string(text::trim(line.substr(first + 1, second_last - first - 1)));
    rule.unit = std::string(text::trim(line.substr(second_last + 1, last - second_last - 1)));
    const auto kind = text::trim(line.substr(last + 1));
    if (rule.field.empty() || rule.pattern.empty() || rule.unit.empty())
      throw ConfigError(where + "empty field, pattern or unit");
    if (kind == "mean") {
      rule.kind = RuleKind::mean;
    } else if (kind == "count") {
      rule.kind = RuleKind::count;
    } else {
      throw ConfigError(where + "kind must be mean or count");
    }
    try {
      rule.regex = std::regex(rule.pattern, std::regex::ECMAScript | std::regex::optimize);
    } catch (const std::regex_error& e) {
      throw ConfigError(where + "bad regex: " + e.what());
    }
    if (rule.kind == RuleKind::mean && rule.regex.mark_count() != 1)
      throw ConfigError(where + "mean rule needs exactly one capture group");
    if (!seen.insert(rule.field).second) throw ConfigError(where + "duplicate field " + rule.field);
    rules.push_back(std::move(rule));
  }
  if (rules.empty()) throw ConfigError("parse rule set is empty");
  return rules;
}

std::vector<ParseRule> load_rules(const fs::path& file) {
  std::string content;
  try {
    content = text::read_file(file.string());
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse_rules(content);
}

const std::vector<ParseRule>& default_rules() {
  static const std::vector<ParseRule> rules = parse_rules(default_rules_text());
  return rules;
}

// ---------------------------------------------------------------------------
// Records

namespace {

struct OptionalField {
  const char* name;
  std::optional<double> TrafficKpi::*traffic = nullptr;
  std::optional<double> RadioKpm::*radio = nullptr;
};

const std::vector<OptionalField>& traffic_fields() {
  static const std::vector<OptionalField> f{
      {"measured_throughput", &TrafficKpi::measured_throughput},
      {"packet_loss", &TrafficKpi::packet_loss},
      {"jitter", &TrafficKpi::jitter},
      {"total_bytes", &TrafficKpi::total_bytes},
      {"total_packets", &TrafficKpi::total_packets},
      {"duration_s", &TrafficKpi::duration_s},
      {"throughput_efficiency", &TrafficKpi::throughput_efficiency},
  };
  return f;
}

const std::vector<OptionalField>& radio_fields() {
  static const std::vector<OptionalField> f{
      {"rsrp", nullptr, &RadioKpm::rsrp},
      {"sinr", nullptr, &RadioKpm::sinr},
      {"dl_bler", nullptr, &RadioKpm::dl_bler},
      {"ul_bler", nullptr, &RadioKpm::ul_bler},
      {"harq_retx_round1", nullptr, &RadioKpm::harq_retx_round1},
      {"harq_retx_total", nullptr, &RadioKpm::harq_retx_total},
      {"cqi_mean", nullptr, &RadioKpm::cqi_mean},
  };
  return f;
}

std::optional<double> RadioKpm::*radio_member(std::string_view name) {
  for (const auto& f : radio_fields())
    if (name == f.name) return f.radio;
  return nullptr;
}

bool in_range(std::string_view field, double v) {
  if (!std::isfinite(v)) return false;
  if (field == "dl_bler" || field == "ul_bler") return v >= 0.0 && v <= 1.0;
  if (field == "cqi_mean") return v >= 0.0 && v <= 15.0;
  if (field == "harq_retx_round1" || field == "harq_retx_total") return v >= 0.0;
  return true;
}

}  // namespace

std::set<std::string> TestRecord::missing_fields() const {
  std::set<std::string> out = missing_extra;
  for (const auto& f : traffic_fields())
    if (!(traffic.*f.traffic)) out.insert(f.name);
  for (const auto& f : radio_fields())
    if (!(radio.*f.radio)) out.insert(f.name);
  for (const auto& e : required_events())
    if (!events.contains(e)) out.insert(e);
  return out;
}

bool TestRecord::operator==(const TestRecord& o) const {
  if (id != o.id || commit_hash != o.commit_hash || events != o.events || radio.extra != o.radio.extra ||
      missing_extra != o.missing_extra || traffic.target_rate != o.traffic.target_rate)
    return false;
  for (const auto& f : traffic_fields())
    if (traffic.*f.traffic != o.traffic.*f.traffic) return false;
  for (const auto& f : radio_fields())
    if (radio.*f.radio != o.radio.*f.radio) return false;
  return true;
}

bool is_valid_commit_hash(std::string_view hash) {
  if (hash.size() < 4 || hash.size() > 64) return false;
  return std::all_of(hash.begin(), hash.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
  });
}

// ---------------------------------------------------------------------------
// iperf CSV

TrafficKpi parse_iperf_csv_text(std::string_view content, double target_rate) {
  if (!(target_rate > 0.0)) throw DataError("target rate must be positive");
  TrafficKpi kpi;
  kpi.target_rate = target_rate;

  static const std::vector<std::string> kColumns{"interval_start", "interval_end", "bytes",
                                                 "bits_per_second", "jitter_ms", "lost_packets",
                                                 "total_packets"};
  std::map<std::string, int> index;
  std::map<std::string, std::vector<double>> cols;
  bool have_header = false;
  std::size_t rows = 0;
  for (const auto& raw : text::split(content, '\n')) {
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = text::split(line, ',');
    if (!have_header) {
      for (std::size_t i = 0; i < cells.size(); ++i) index[text::lower(text::trim(cells[i]))] = static_cast<int>(i);
      have_header = true;
      continue;
    }
    ++rows;
    for (const auto& name : kColumns) {
      const auto it = index.find(name);
      if (it == index.end()) continue;
      if (static_cast<std::size_t>(it->second) >= cells.size())
        throw DataError("short CSV row " + std::to_string(rows));
      const auto v = text::parse_double(cells[static_cast<std::size_t>(it->second)]);
      if (!v) throw DataError("non-numeric value in column " + name);
      cols[name].push_back(*v);
    }
  }
  if (rows == 0) throw DataError("empty measurement");

  auto has = [&](const std::string& n) { return index.contains(n); };
  auto sum = [&](const std::string& n) {
    double s = 0.0;
    for (double v : cols[n]) s += v;
    return s;
  };
  const double n = static_cast<double>(rows);
  if (has("bits_per_second")) {
    kpi.measured_throughput = sum("bits_per_second") / n / 1e6;
    kpi.throughput_efficiency = *kpi.measured_throughput / target_rate;
  }
  if (has("jitter_ms")) kpi.jitter = sum("jitter_ms") / n;
  if (has("bytes")) kpi.total_bytes = sum("bytes");
  if (has("total_packets")) kpi.total_packets = sum("total_packets");
  if (has("lost_packets") && has("total_packets")) {
    const double total = sum("total_packets");
    kpi.packet_loss = total > 0.0 ? sum("lost_packets") / total : 0.0;
  }
  if (has("interval_start") && has("interval_end")) {
    const auto& s = cols["interval_start"];
    const auto& e = cols["interval_end"];
    kpi.duration_s = *std::max_element(e.begin(), e.end()) - *std::min_element(s.begin(), s.end());
  }
  return kpi;
}

TrafficKpi parse_iperf_csv(const fs::path& file, double target_rate) {
  return parse_iperf_csv_text(text::read_file(file.string()), target_rate);
}

std::optional<double> target_rate_from_name(const fs::path& file) {
  static const std::regex re(R"(([0-9]+(?:\.[0-9]+)?)\s*(?:M|Mbps|mbps)(?:[^A-Za-z]|$))");
  const std::string stem = file.stem().string();
  std::smatch m;
  if (!std::regex_search(stem, m, re)) return std::nullopt;
  const auto v = text::parse_double(m[1].str());
  if (!v || !(*v > 0.0)) return std::nullopt;
  return v;
}

// ---------------------------------------------------------------------------
// gNB log

LogParse parse_gnb_log_text(std::string_view content, const std::vector<ParseRule>& rules) {
  if (rules.empty()) throw ConfigError("parse rule set is empty");
  if (content.find('\0') != std::string_view::npos) throw DataError("unreadable log");

  struct Acc {
    double sum = 0.0;
    std::int64_t n = 0;
  };
  std::vector<Acc> acc(rules.size());
  std::size_t start = 0;
  while (start <= content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    const std::string_view line = content.substr(start, end - start);
    std::match_results<std::string_view::const_iterator> m;
    for (std::size_t r = 0; r < rules.size(); ++r) {
      if (!std::regex_search(line.begin(), line.end(), m, rules[r].regex)) continue;
      if (rules[r].kind == RuleKind::count) {
        ++acc[r].n;
        continue;
      }
      const auto v = text::parse_double(std::string_view(&*m[1].first, static_cast<std::size_t>(m[1].length())));
      if (!v || !std::isfinite(*v)) continue;
      acc[r].sum += *v;
      ++acc[r].n;
    }
    if (end == content.size()) break;
    start = end + 1;
  }

  LogParse out;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const auto& rule = rules[r];
    if (rule.kind == RuleKind::count) {
      out.events[rule.field] = acc[r].n;
      continue;
    }
    if (acc[r].n == 0) {
      out.missing.push_back(rule.field);
      continue;
    }
    const double mean = acc[r].sum / static_cast<double>(acc[r].n);
    if (!in_range(rule.field, mean)) {
      out.missing.push_back(rule.field);
      continue;
    }
    if (auto member = radio_member(rule.field)) {
      out.radio.*member = mean;
    } else {
      out.radio.extra[rule.field] = mean;
    }
  }
  return out;
}

LogParse parse_gnb_log(const fs::path& file, const std::vector<ParseRule>& rules) {
  return parse_gnb_log_text(text::read_file(file.string()), rules);
}

std::optional<std::string> find_commit_hash(std::string_view log_text, const std::regex& pattern) {
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(log_text.begin(), log_text.end(), m, pattern) || m.size() < 2) return std::nullopt;
  return std::string(m[1].first, m[1].second);
}

TestRecord build_test_record(const DatasetEntry& entry, const std::vector<ParseRule>& rules,
                             const std::string& commit_hash) {
  if (!is_valid_commit_hash(commit_hash))
    throw DataError("record rejected: invalid commit hash '" + commit_hash + "'");
  TestRecord rec;
  rec.id = entry.id;
  rec.commit_hash = commit_hash;

  std::string traffic_error = "no CSV artifact";
  bool traffic_ok = false;
  for (const auto& csv : entry.csv_files) {
    const auto rate = target_rate_from_name(csv);
    if (!rate) {
      traffic_error = "no target rate in file name " + csv.filename().string();
      continue;
    }
    try {
      rec.traffic = parse_iperf_csv(csv, *rate);
      traffic_ok = true;
      break;
    } catch (const DataError& e) {
      traffic_error = e.what();
    }
  }

  std::string radio_error = "no log artifact";
  bool radio_ok = false;
  if (!entry.log_files.empty()) {
    try {
      std::string all;
      for (const auto& log : entry.log_files) {
        all += text::read_file(log.string());
        all += '\n';
      }
      auto parsed = parse_gnb_log_text(all, rules);
      rec.radio = std::move(parsed.radio);
      rec.events = std::move(parsed.events);
      for (const auto& m : parsed.missing)
        if (!radio_member(m)) rec.missing_extra.insert(m);
      radio_ok = true;
    } catch (const DataError& e) {
      radio_error = e.what();
    }
  }
  if (!traffic_ok && !radio_ok)
    throw DataError("record rejected: traffic (" + traffic_error + ") and radio (" + radio_error + ") both failed");
  return rec;
}

// ---------------------------------------------------------------------------
// Dataset

IngestResult ingest_dataset(const fs::path& root, const IngestOptions& options) {
  ScanResult scan = scan_dataset(root);
  const std::regex commit_re(options.commit_pattern);
  const auto n = static_cast<std::ptrdiff_t>(scan.entries.size());
  std::vector<std::optional<TestRecord>> records(scan.entries.size());
  std::vector<std::string> errors(scan.entries.size());

  auto work = [&](std::ptrdiff_t i) {
    const auto& entry = scan.entries[static_cast<std::size_t>(i)];
    try {
      std::string hash;
      if (const auto it = options.commit_map.find(entry.id.str()); it != options.commit_map.end()) {
        hash = it->second;
      } else {
        for (const auto& log : entry.log_files) {
          if (auto h = find_commit_hash(text::read_file(log.string()), commit_re)) {
            hash = *h;
            break;
          }
        }
      }
      if (hash.empty()) throw DataError("record rejected: no commit hash found");
      records[static_cast<std::size_t>(i)] = build_test_record(entry, options.rules, hash);
    } catch (const Error& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  };

  if (options.parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) work(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) work(i);
  }

  IngestResult out;
  out.warnings = std::move(scan.warnings);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i]) {
      out.records.push_back(std::move(*records[i]));
    } else {
      out.rejected.push_back({scan.entries[i].id.str(), errors[i]});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Store format

std::string to_store_line(const TestRecord& r) {
  json j;
  j["schema_version"] = kTestSchemaVersion;
  j["kind"] = "test";
  j["id"] = r.id.str();
  j["commit"] = r.commit_hash;
  json traffic = json::object();
  traffic["target_rate"] = r.traffic.target_rate;
  for (const auto& f : traffic_fields())
    if (const auto& v = r.traffic.*f.traffic) traffic[f.name] = *v;
  json radio = json::object();
  for (const auto& f : radio_fields())
    if (const auto& v = r.radio.*f.radio) radio[f.name] = *v;
  for (const auto& [k, v] : r.radio.extra) radio[k] = v;
  j["traffic"] = traffic;
  j["radio"] = radio;
  j["events"] = json(r.events);
  j["missing"] = json(r.missing_fields());
  return j.dump();
}

TestRecord test_record_from_store_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed test record: ") + e.what());
  }
  try {
    if (j.value("kind", "") != "test" || j.at("schema_version").get<int>() != kTestSchemaVersion)
      throw DataError("test record schema mismatch");
    TestRecord r;
    const auto id = TestId::parse(j.at("id").get<std::string>());
    if (!id) throw DataError("bad test id");
    r.id = *id;
    r.commit_hash = j.at("commit").get<std::string>();
    const auto& traffic = j.at("traffic");
    r.traffic.target_rate = traffic.at("target_rate").get<double>();
    for (const auto& f : traffic_fields())
      if (traffic.contains(f.name)) r.traffic.*f.traffic = traffic[f.name].get<double>();
    for (const auto& [k, v] : j.at("radio").items()) {
      if (auto m = radio_member(k)) {
        r.radio.*m = v.get<double>();
      } else {
        r.radio.extra[k] = v.get<double>();
      }
    }
    r.events = j.at("events").get<EventCounts>();
    for (const auto& m : j.at("missing")) {
      const auto name = m.get<std::string>();
      bool core = radio_member(name) != nullptr;
      for (const auto& f : traffic_fields()) core = core || name == f.name;
      for (const auto& e : required_events()) core = core || name == e;
      if (!core) r.missing_extra.insert(name);
    }
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed test record: ") + e.what());
  }
}

}  // namespace ranalyzer::ingest
