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

#include <doctest.h>

#include <cmath>
#include <regex>

#include "ranalyzer/error.hpp"
#include "ranalyzer/ingest.hpp"
#include "ranalyzer/rng.hpp"
#include "ranalyzer/synthgen.hpp"
#include "ranalyzer/text.hpp"
#include "support.hpp"

using namespace ranalyzer;
using namespace ranalyzer::ingest;
namespace fs = std::filesystem;

namespace {

const char* kCsvHeader = "interval_start,interval_end,bytes,bits_per_second,jitter_ms,lost_packets,total_packets\n";

std::string csv_at(double mbps, int rows) {
  std::string s = kCsvHeader;
  for (int i = 0; i < rows; ++i)
    s += std::to_string(i) + "," + std::to_string(i + 1) + ",1000," + text::format_double(mbps * 1e6) + ",0.5,1,100\n";
  return s;
}

const char* kLog =
    "[GNB_APP]   I commit hash: 0123abcd\n"
    "[NR_MAC]   I UE 1: average RSRP -80 (16 meas)\n"
    "[NR_MAC]   I UE 1: average RSRP -90 (16 meas)\n"
    "[NR_MAC]   I UE 1: UL SNR 20.0 dB, CQI 10\n"
    "[NR_MAC]   I UE 1: dlsch_rounds 100/5/1/0, dlsch_errors 0, BLER 0.05000 MCS 27\n"
    "[NR_MAC]   I UE 1: ulsch_rounds 100/0/0/0, ulsch_errors 0, BLER 0.01000 MCS 20\n"
    "[NR_MAC]   I UE 1: HARQ retransmissions 6\n"
    "[NGAP]   I PDU Session established for UE 1\n"
    "[NR_RRC]   I UE 1: received RRCSetupComplete\n"
    "[NR_RRC]   I UE 1: sending RRCRelease\n";

}  // namespace

TEST_SUITE("ingest") {
  TEST_CASE("test id parsing") {
    const auto id = TestId::parse("20250913", "040124");
    REQUIRE(id);
    CHECK(id->year == 2025);
    CHECK(id->month == 9);
    CHECK(id->day == 13);
    CHECK(id->seconds_of_day == 4 * 3600 + 1 * 60 + 24);
    CHECK(id->str() == "20250913/040124");
    CHECK(TestId::parse("20250913/040124") == id);
    CHECK_FALSE(TestId::parse("20250230", "000000"));
    CHECK_FALSE(TestId::parse("20250913", "246000"));
    CHECK_FALSE(TestId::parse("2025091", "040124"));
    CHECK_FALSE(TestId::parse("20250913", "abc"));
    CHECK(TestId::parse("20240229", "000000"));
    CHECK(TestId::parse("20250101/000001")->epoch_seconds() - TestId::parse("20241231/235959")->epoch_seconds() == 2);
  }

  TEST_CASE("scan: dated directory with a CSV") {
    testing::TempDir dir("scan");
    text::write_file((dir / "20250913/040124/iperf3_dl_30Mbps.csv").string(), csv_at(30, 2));
    const auto r = scan_dataset(dir.path());
    REQUIRE(r.entries.size() == 1);
    CHECK(r.entries[0].id.str() == "20250913/040124");
    CHECK(r.entries[0].csv_files.size() == 1);
    CHECK(r.warnings.empty());
  }

  TEST_CASE("scan: empty root and malformed names") {
    testing::TempDir dir("scan");
    CHECK(scan_dataset(dir.path()).entries.empty());
    text::write_file((dir / "20250913/abc/x.csv").string(), csv_at(30, 2));
    const auto r = scan_dataset(dir.path());
    CHECK(r.entries.empty());
    CHECK(r.warnings.size() == 1);
    CHECK_THROWS_AS(scan_dataset(dir / "nope"), DataError);
  }

  TEST_CASE("scan output is chronological") {
    testing::TempDir dir("scan");
    Rng rng(9);
    for (int i = 0; i < 30; ++i) {
      char day[16], tod[16];
      std::snprintf(day, sizeof day, "2024%02d%02d", 1 + static_cast<int>(rng.below(12)), 1 + static_cast<int>(rng.below(28)));
      std::snprintf(tod, sizeof tod, "%02d%02d%02d", static_cast<int>(rng.below(24)), static_cast<int>(rng.below(60)),
                    static_cast<int>(rng.below(60)));
      text::write_file((dir / (std::string(day) + "/" + tod + "/gnb.log")).string(), kLog);
    }
    const auto r = scan_dataset(dir.path());
    CHECK(r.entries.size() >= 25);
    for (std::size_t i = 1; i < r.entries.size(); ++i) CHECK(r.entries[i - 1].id < r.entries[i].id);
  }

  TEST_CASE("iperf efficiency") {
    const auto full = parse_iperf_csv_text(csv_at(30, 5), 30);
    CHECK(full.throughput_efficiency == doctest::Approx(1.0).epsilon(1e-15));
    const auto half = parse_iperf_csv_text(csv_at(15, 5), 30);
    CHECK(*half.throughput_efficiency == 0.5);
    CHECK(*half.measured_throughput == 15.0);
    CHECK(*half.packet_loss == 0.01);
    CHECK(*half.total_bytes == 5000.0);
    CHECK(*half.duration_s == 5.0);
    CHECK(*half.jitter == 0.5);
  }

  TEST_CASE("iperf errors and missing columns") {
    CHECK_THROWS_WITH_AS(parse_iperf_csv_text(kCsvHeader, 30), "empty measurement", DataError);
    CHECK_THROWS_AS(parse_iperf_csv_text("bits_per_second\nabc\n", 30), DataError);
    const auto k = parse_iperf_csv_text("interval_start,interval_end,bits_per_second\n0,1,1e6\n", 10);
    CHECK(k.throughput_efficiency == doctest::Approx(0.1));
    CHECK_FALSE(k.jitter);
    CHECK_FALSE(k.packet_loss);
  }

  TEST_CASE("target rate from file name") {
    CHECK(target_rate_from_name("iperf3_dl_30Mbps.csv") == 30.0);
    CHECK(target_rate_from_name("udp_12.5M.csv") == 12.5);
    CHECK_FALSE(target_rate_from_name("iperf3_dl.csv"));
  }

  TEST_CASE("log means and counts") {
    const auto p = parse_gnb_log_text(kLog, default_rules());
    CHECK(*p.radio.rsrp == -85.0);
    CHECK(*p.radio.sinr == 20.0);
    CHECK(*p.radio.cqi_mean == 10.0);
    CHECK(*p.radio.dl_bler == 0.05);
    CHECK(*p.radio.ul_bler == 0.01);
    CHECK(*p.radio.harq_retx_round1 == 5.0);
    CHECK(*p.radio.harq_retx_total == 6.0);
    CHECK(p.events.at("msg2_failures") == 0);
    CHECK(p.events.at("pdu_sessions_active") == 1);
    CHECK(p.events.at("rrc_setup") == 1);
    CHECK(p.events.at("rrc_release") == 1);
    CHECK(p.missing.empty());
  }

  TEST_CASE("log errors") {
    CHECK_THROWS_WITH_AS(parse_gnb_log_text(std::string("abc\0def", 7), default_rules()), "unreadable log", DataError);
    CHECK_THROWS_AS(parse_gnb_log_text(kLog, {}), ConfigError);
  }

  TEST_CASE("out-of-range BLER becomes missing") {
    const auto p = parse_gnb_log_text("dlsch_rounds 1/1/0/0 BLER 1.5\n", default_rules());
    CHECK_FALSE(p.radio.dl_bler);
    CHECK(std::find(p.missing.begin(), p.missing.end(), "dl_bler") != p.missing.end());
  }

  TEST_CASE("mean aggregation matches a single-pass oracle") {
    Rng rng(17);
    const std::regex re(R"(average RSRP (-?[0-9]+(?:\.[0-9]+)?))");
    for (int trial = 0; trial < 50; ++trial) {
      std::string log;
      const auto lines = 1 + rng.below(40);
      for (std::uint64_t i = 0; i < lines; ++i) {
        if (rng.uniform() < 0.3) log += "[NR_MAC]   I unrelated line\n";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f", rng.uniform(-120.0, -60.0));
        log += std::string("[NR_MAC]   I UE 1: average RSRP ") + buf + " (16 meas)\n";
      }
      double sum = 0.0;
      int n = 0;
      for (const auto& line : text::split(log, '\n')) {
        std::smatch m;
        if (std::regex_search(line, m, re)) {
          sum += std::stod(m[1].str());
          ++n;
        }
      }
      const auto p = parse_gnb_log_text(log, default_rules());
      CHECK(*p.radio.rsrp == doctest::Approx(sum / n).epsilon(1e-9));
    }
  }

  TEST_CASE("parse rule grammar") {
    const auto rules = parse_rules("# c\nfoo, value=([0-9]+), x, mean\nbar, a,b, n, count\n");
    REQUIRE(rules.size() == 2);
    CHECK(rules[1].pattern == "a,b");
    CHECK(rules[1].kind == RuleKind::count);
    CHECK_THROWS_AS(parse_rules("foo, ([0-9]+)([0-9]+), x, mean\n"), ConfigError);
    CHECK_THROWS_AS(parse_rules("foo, x, y, avg\n"), ConfigError);
    CHECK_THROWS_AS(parse_rules("foo, ([, x, mean\n"), ConfigError);
    CHECK_THROWS_AS(parse_rules("a, (1), x, mean\na, (2), x, mean\n"), ConfigError);
    const auto p = parse_gnb_log_text("value=7\nvalue=9\n", rules);
    CHECK(p.radio.extra.at("foo") == 8.0);
  }

  TEST_CASE("commit hash discovery and validation") {
    const std::regex re{std::string(kDefaultCommitPattern)};
    CHECK(find_commit_hash(kLog, re) == std::string("0123abcd"));
    CHECK_FALSE(find_commit_hash("no hash", re));
    CHECK(is_valid_commit_hash("0123abcd"));
    CHECK_FALSE(is_valid_commit_hash("xyz"));
    CHECK_FALSE(is_valid_commit_hash(""));
  }

  TEST_CASE("complete and partial records") {
    testing::TempDir dir("rec");
    text::write_file((dir / "20250913/040124/iperf3_dl_30Mbps.csv").string(), csv_at(30, 3));
    text::write_file((dir / "20250913/040124/gnb.log").string(), kLog);
    text::write_file((dir / "20250913/050000/iperf3_dl_30Mbps.csv").string(), csv_at(15, 3));
    const auto scan = scan_dataset(dir.path());
    REQUIRE(scan.entries.size() == 2);
    const auto full = build_test_record(scan.entries[0], default_rules(), "0123abcd");
    CHECK(full.missing_fields().empty());
    const auto partial = build_test_record(scan.entries[1], default_rules(), "0123abcd");
    const auto missing = partial.missing_fields();
    for (const char* f : {"rsrp", "sinr", "dl_bler", "ul_bler", "harq_retx_round1", "harq_retx_total", "cqi_mean"})
      CHECK(missing.count(f) == 1);
    CHECK_THROWS_AS(build_test_record(scan.entries[0], default_rules(), "zz"), DataError);
  }

  TEST_CASE("record rejected when both artifacts fail") {
    testing::TempDir dir("rej");
    text::write_file((dir / "20250913/040124/iperf3_dl_30Mbps.csv").string(), kCsvHeader);
    text::write_file((dir / "20250913/040124/gnb.log").string(), std::string("\0\0", 2));
    const auto scan = scan_dataset(dir.path());
    CHECK_THROWS_AS(build_test_record(scan.entries[0], default_rules(), "0123abcd"), DataError);
  }

  TEST_CASE("field is in missing_fields or has a value, never both") {
    testing::TempDir dir("mf");
    text::write_file((dir / "20250913/040124/gnb.log").string(), "average RSRP -80\n");
    const auto scan = scan_dataset(dir.path());
    const auto r = build_test_record(scan.entries[0], default_rules(), "0123abcd");
    const auto missing = r.missing_fields();
    CHECK(missing.count("rsrp") == 0);
    CHECK(missing.count("sinr") == 1);
    CHECK(missing.count("measured_throughput") == 1);
  }

  TEST_CASE("synthetic corpus: planted values, round trip, idempotence") {
    synthgen::ScenarioSpec spec;
    spec.n_commits = 4;
    spec.tests_per_commit = 5;
    spec.seed = 23;
    const auto corpus = synthgen::generate(spec);
    testing::TempDir dir("synth");
    synthgen::write_corpus(corpus, dir.path());
    IngestOptions opt;
    const auto a = ingest_dataset(dir / "dataset", opt);
    opt.parallel = false;
    const auto b = ingest_dataset(dir / "dataset", opt);
    REQUIRE(a.records.size() == corpus.tests.size());
    CHECK(a.rejected.empty());
    CHECK(a.records == b.records);
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      const auto& r = a.records[i];
      const auto& t = corpus.tests[i];
      CHECK(r.id.str() == t.test_id);
      CHECK(r.commit_hash == t.commit);
      CHECK(*r.traffic.throughput_efficiency == doctest::Approx(t.measured_efficiency).epsilon(1e-12));
      CHECK(*r.traffic.total_bytes == t.total_bytes);
      CHECK(*r.traffic.total_packets == t.total_packets);
      CHECK(*r.traffic.packet_loss == doctest::Approx(t.lost_packets / t.total_packets).epsilon(1e-12));
      CHECK(std::fabs(*r.traffic.throughput_efficiency * r.traffic.target_rate - *r.traffic.measured_throughput) <=
            1e-9 * r.traffic.target_rate);
      CHECK(*r.radio.rsrp == doctest::Approx(t.kpm.at("rsrp")).epsilon(1e-12));
      CHECK(*r.radio.sinr == doctest::Approx(t.kpm.at("sinr")).epsilon(1e-12));
      CHECK(*r.radio.dl_bler == doctest::Approx(t.kpm.at("dl_bler")).epsilon(1e-12));
      CHECK(*r.radio.ul_bler == doctest::Approx(t.kpm.at("ul_bler")).epsilon(1e-12));
      CHECK(*r.radio.cqi_mean == doctest::Approx(t.kpm.at("cqi_mean")).epsilon(1e-12));
      CHECK(*r.radio.harq_retx_round1 == doctest::Approx(t.kpm.at("harq_retx_round1")).epsilon(1e-12));
      CHECK(*r.radio.harq_retx_total == doctest::Approx(t.kpm.at("harq_retx_total")).epsilon(1e-12));
      for (const auto& [k, v] : t.events) CHECK(r.events.at(k) == v);
      CHECK(r.missing_fields().empty());

      const auto line = to_store_line(r);
      const auto back = test_record_from_store_line(line);
      CHECK(back == r);
      CHECK(to_store_line(back) == line);
    }
  }

  TEST_CASE("commit map overrides the log") {
    testing::TempDir dir("map");
    text::write_file((dir / "20250913/040124/gnb.log").string(), kLog);
    IngestOptions opt;
    opt.commit_map["20250913/040124"] = "feedbeef";
    const auto r = ingest_dataset(dir.path(), opt);
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].commit_hash == "feedbeef");
  }

  TEST_CASE("store line schema checks") {
    CHECK_THROWS_AS(test_record_from_store_line("{"), DataError);
    CHECK_THROWS_AS(test_record_from_store_line(R"({"schema_version":2,"kind":"test"})"), DataError);
    CHECK_THROWS_AS(test_record_from_store_line(R"({"schema_version":1,"kind":"row"})"), DataError);
  }
}
