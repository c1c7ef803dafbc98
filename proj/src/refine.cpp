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

#include "ranalyzer/refine.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <future>
#include <set>

#include "ranalyzer/error.hpp"
#include "ranalyzer/text.hpp"

namespace ranalyzer::refine {

using commitcat::CategoryMask;
using commitcat::Category;

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

std::vector<std::string> all_names(bool layers) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < commitcat::kNumCategories; ++i)
    if ((i < commitcat::kNumLayers) == layers) out.emplace_back(commitcat::category_name(commitcat::category_at(i)));
  return out;
}

std::vector<std::string> list_value(std::string_view v) {
  std::vector<std::string> out;
  v = text::trim(v);
  if (v.empty() || text::lower(v) == "none") return out;
  for (const auto& item : text::split(v, ',')) {
    const auto t = text::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

/// Splits `key: value` header lines until `stop_key` (exclusive); returns the map and the remaining body.
std::map<std::string, std::string> header_lines(std::string_view body, std::string_view stop_key,
                                                std::string* rest) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    auto end = body.find('\n', pos);
    if (end == std::string_view::npos) end = body.size();
    const auto line = text::trim(body.substr(pos, end - pos));
    const std::size_t next = end + 1;
    const auto colon = line.find(':');
    if (colon != std::string_view::npos) {
      const auto key = text::lower(text::trim(line.substr(0, colon)));
      if (!stop_key.empty() && key == stop_key) {
        if (rest) *rest = next <= body.size() ? std::string(body.substr(next)) : std::string();
        return out;
      }
      out[key] = std::string(text::trim(line.substr(colon + 1)));
    }
    if (end == body.size()) break;
    pos = next;
  }
  if (rest) rest->clear();
  return out;
}

}  // namespace

std::string format_request(const RefinementRequest& r) {
  std::string out = "ranalyzer-refine/1\n";
  out += "instruction: " + r.instruction + "\n";
  out += "commit: " + r.hash + "\n";
  out += "allowed_layers: " + join(all_names(true)) + "\n";
  out += "allowed_components: " + join(all_names(false)) + "\n";
  out += "draft_layers: " + join(commitcat::category_names(r.draft, true, false)) + "\n";
  out += "draft_components: " + join(commitcat::category_names(r.draft, false, true)) + "\n";
  out += "draft_change_type: " + std::string(commitcat::change_type_name(r.draft_change_type)) + "\n";
  out += "text:\n";
  out += r.text;
  return out;
}

RefinementRequest parse_request(std::string_view body) {
  if (!body.starts_with("ranalyzer-refine/1")) throw DataError("not a refinement request");
  std::string rest;
  auto h = header_lines(body, "text", &rest);
  RefinementRequest r;
  r.instruction = h["instruction"];
  r.hash = h["commit"];
  r.text = rest;
  for (const char* key : {"draft_layers", "draft_components"}) {
    for (const auto& name : list_value(h[key])) {
      const auto c = commitcat::category_from_name(name);
      if (!c) throw DataError("unknown draft category " + name);
      r.draft.set(commitcat::index_of(*c));
    }
  }
  const auto t = commitcat::change_type_from_name(h["draft_change_type"]);
  if (!t) throw DataError("bad draft change type");
  r.draft_change_type = *t;
  return r;
}

std::string format_response(const std::vector<std::string>& layers, const std::vector<std::string>& components,
                            std::string_view change_type, std::string_view rationale) {
  std::string out;
  out += "layers: " + join(layers) + "\n";
  out += "components: " + join(components) + "\n";
  out += "change_type: " + std::string(change_type) + "\n";
  out += "rationale: " + std::string(rationale) + "\n";
  return out;
}

ParsedResponse parse_response(std::string_view body) {
  ParsedResponse p;
  auto h = header_lines(body, "", nullptr);
  for (const char* key : {"layers", "components", "change_type", "rationale"}) {
    if (!h.contains(key)) {
      p.error = std::string("missing key ") + key;
      return p;
    }
  }
  int layers = 0;
  for (const auto& [key, want_layer] : {std::pair{"layers", true}, std::pair{"components", false}}) {
    for (const auto& name : list_value(h[key])) {
      const auto c = commitcat::category_from_name(name);
      if (!c || commitcat::is_layer(*c) != want_layer) {
        p.error = "category outside vocabulary: " + name;
        return p;
      }
      if (!p.value.categories[commitcat::index_of(*c)] && want_layer) ++layers;
      p.value.categories.set(commitcat::index_of(*c));
    }
  }
  if (layers > kMaxRefinedLayers) {
    p.error = "more than " + std::to_string(kMaxRefinedLayers) + " layers";
    return p;
  }
  const auto t = commitcat::change_type_from_name(text::trim(h["change_type"]));
  if (!t) {
    p.error = "change_type must be exactly one of bugfix, optimization, feature, refactoring";
    return p;
  }
  p.value.change_type = *t;
  p.value.rationale = std::string(text::trim(h["rationale"]));
  if (p.value.rationale.empty()) {
    p.error = "empty rationale";
    return p;
  }
  p.ok = true;
  return p;
}

// ---------------------------------------------------------------------------
// Stub

std::vector<std::pair<std::string, std::string>> StubRefinementService::default_hints() {
  return {
      {"ul payload", "MAC"},   {"dl payload", "MAC"},    {"tmsi", "NAS"},        {"pdu session", "NAS"},
      {"scheduler", "MAC"},    {"sidelink", "MAC"},      {"ciphering", "PDCP"},  {"bearer", "PDCP"},
      {"tx thread", "PHY"},    {"rx thread", "PHY"},     {"cell setup", "RRC"},  {"ue context", "NGAP"},
      {"retransmission", "MAC"},
  };
}

StubRefinementService::StubRefinementService() : hints_(default_hints()) {}

StubRefinementService::StubRefinementService(std::vector<std::pair<std::string, std::string>> hints)
    : hints_(std::move(hints)) {}

std::string StubRefinementService::complete(const std::string& body) {
  const RefinementRequest req = parse_request(body);
  CategoryMask out = req.draft;
  std::vector<std::string> notes;
  const std::string lowered = text::lower(req.text);
  for (const auto& [phrase, name] : hints_) {
    const auto c = commitcat::category_from_name(name);
    if (!c || lowered.find(text::lower(phrase)) == std::string::npos || out[commitcat::index_of(*c)]) continue;
    // Draft layers keep priority; hints only fill remaining layer slots.
    if (commitcat::is_layer(*c) && commitcat::layer_count(out) >= static_cast<std::size_t>(kMaxRefinedLayers)) continue;
    out.set(commitcat::index_of(*c));
    notes.push_back("'" + phrase + "' -> " + name);
  }
  // A draft may itself exceed the bound; keep the first four layers in category order.
  std::size_t kept = 0;
  for (std::size_t i = 0; i < commitcat::kNumLayers; ++i) {
    if (!out[i]) continue;
    if (++kept > static_cast<std::size_t>(kMaxRefinedLayers)) out.reset(i);
  }
  const std::string rationale =
      notes.empty() ? std::string("stub: draft confirmed") : "stub: draft confirmed; added " + join(notes);
  return format_response(commitcat::category_names(out, true, false), commitcat::category_names(out, false, true),
                         commitcat::change_type_name(req.draft_change_type), rationale);
}

// ---------------------------------------------------------------------------
// HTTP

HttpRefinementService::HttpRefinementService(std::string url, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigError("refinement endpoint must be an http:// URL: " + url);
  const auto slash = url.find('/', scheme + 3);
  base_ = slash == std::string::npos ? url : url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : url.substr(slash);
}

std::string HttpRefinementService::complete(const std::string& body) {
  httplib::Client client(base_);
  if (!client.is_valid()) throw TransportError("unsupported endpoint " + base_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers headers;
  if (const char* key = std::getenv("RANALYZER_API_KEY"); key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);
  auto res = client.Post(path_, headers, body, "text/plain");
  if (!res) throw TransportError("refinement endpoint unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) return "";  // structurally invalid; the caller retries
  return res->body;
}

// ---------------------------------------------------------------------------
// Refinement

commitcat::CategorizationResult refine_with_llm(const commitcat::CommitText& commit,
                                                const commitcat::CategorizationResult& draft,
                                                RefinementService& service, const RefineOptions& options,
                                                RefineLog* log) {
  if (draft.confidence == commitcat::Confidence::high)
    throw std::logic_error("refinement requested for a high-confidence categorization");
  RefineLog local;
  RefineLog& l = log ? *log : local;

  RefinementRequest req{commit.hash, commit.message, draft.affected, draft.change_type};
  const std::string body = format_request(req);
  const int attempts = 1 + std::max(0, options.max_retries);
  bool unreachable = false;
  for (int a = 0; a < attempts; ++a) {
    ++l.attempts;
    std::string reply;
    try {
      reply = service.complete(body);
    } catch (const TransportError& e) {
      unreachable = true;
      l.rejections.push_back(e.what());
      continue;
    }
    unreachable = false;
    auto parsed = parse_response(reply);
    if (!parsed.ok) {
      l.rejections.push_back(parsed.error);
      continue;
    }
    commitcat::CategorizationResult out = draft;
    out.affected = parsed.value.categories;
    out.layers = static_cast<int>(commitcat::layer_count(out.affected));
    out.components = static_cast<int>(commitcat::component_count(out.affected));
    out.change_type = parsed.value.change_type;
    out.rationale = parsed.value.rationale;
    out.refined_by_llm = true;
    out.degraded_mode = false;
    return out;
  }
  l.transport_failure = unreachable;
  commitcat::CategorizationResult out = draft;
  out.refined_by_llm = false;
  out.degraded_mode = unreachable;
  return out;
}

std::vector<commitcat::CategorizationResult> categorize_all(const std::vector<commitcat::CommitText>& commits,
                                                            const commitcat::RuleSet& rules,
                                                            RefinementService* service,
                                                            const RefineOptions& options,
                                                            std::vector<RefineLog>* logs) {
  std::vector<commitcat::CategorizationResult> out(commits.size());
  const auto n = static_cast<std::ptrdiff_t>(commits.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = commitcat::categorize_keywords(commits[static_cast<std::size_t>(i)], rules);

  std::vector<RefineLog> local(commits.size());
  if (service) {
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < out.size(); ++i)
      if (out[i].confidence != commitcat::Confidence::high) pending.push_back(i);
    const std::size_t width = static_cast<std::size_t>(std::max(1, options.max_concurrency));
    for (std::size_t start = 0; start < pending.size(); start += width) {
      std::vector<std::future<commitcat::CategorizationResult>> batch;
      const std::size_t stop = std::min(pending.size(), start + width);
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t i = pending[k];
        batch.push_back(std::async(std::launch::async, [&, i] {
          return refine_with_llm(commits[i], out[i], *service, options, &local[i]);
        }));
      }
      for (std::size_t k = start; k < stop; ++k) out[pending[k]] = batch[k - start].get();
    }
  }
  if (logs) *logs = std::move(local);
  return out;
}

}  // namespace ranalyzer::refine
