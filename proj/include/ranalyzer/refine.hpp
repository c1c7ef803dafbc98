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

#pragma once

// Selective semantic refinement of keyword categorizations through an
// external text-completion service.
//
// Wire format (plain text, one `key: value` per line):
//
//   request                              response
//   ranalyzer-refine/1                   layers: MAC, NAS
//   instruction: <preamble>              components: memory
//   commit: <hash>                       change_type: bugfix
//   allowed_layers: PHY, MAC, ...        rationale: <free text>
//   allowed_components: memory, ...
//   draft_layers: ...
//   draft_components: ...
//   draft_change_type: ...
//   text:
//   <commit text, verbatim, to end of body>

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ranalyzer/commitcat.hpp"

namespace ranalyzer::refine {

inline constexpr int kMaxRefinedLayers = 4;

inline constexpr std::string_view kInstructionPreamble =
    "Validate the candidate RAN protocol layers and functional components for this commit. "
    "Confirm or reject each candidate, add missing ones only from the allowed vocabulary, "
    "return at most four layers and exactly one primary change type, and justify briefly.";

struct RefinementRequest {
  std::string hash;
  std::string text;
  commitcat::CategoryMask draft;
  commitcat::ChangeType draft_change_type = commitcat::ChangeType::refactoring;
  std::string instruction{kInstructionPreamble};
};

std::string format_request(const RefinementRequest& request);
/// Inverse of format_request; throws DataError on a malformed body.
RefinementRequest parse_request(std::string_view body);

struct RefinementResponse {
  commitcat::CategoryMask categories;
  commitcat::ChangeType change_type = commitcat::ChangeType::refactoring;
  std::string rationale;
};

std::string format_response(const std::vector<std::string>& layers, const std::vector<std::string>& components,
                            std::string_view change_type, std::string_view rationale);

/// Structural validation: every key present, every category in its own
/// vocabulary, at most four layers, one known change type, non-empty rationale.
/// Returns the reason on failure.
struct ParsedResponse {
  bool ok = false;
  RefinementResponse value;
  std::string error;
};
ParsedResponse parse_response(std::string_view body);

/// Thrown by a service when the endpoint cannot be reached.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pluggable transport. Implementations must be safe to call concurrently.
class RefinementService {
 public:
  virtual ~RefinementService() = default;
  /// Returns the raw response body; throws TransportError when unreachable.
  virtual std::string complete(const std::string& request_body) = 0;
};

/// Deterministic offline stand-in: echoes the draft and adds categories for
/// configured phrases found in the commit text, keeping at most four layers.
class StubRefinementService : public RefinementService {
 public:
  /// Default phrase hints (lower-case phrase -> category name).
  static std::vector<std::pair<std::string, std::string>> default_hints();

  StubRefinementService();
  explicit StubRefinementService(std::vector<std::pair<std::string, std::string>> hints);

  std::string complete(const std::string& request_body) override;

 private:
  std::vector<std::pair<std::string, std::string>> hints_;
};

/// POSTs the request body to an http URL. The bearer credential comes
/// from the RANALYZER_API_KEY environment variable when set.
class HttpRefinementService : public RefinementService {
 public:
  HttpRefinementService(std::string url, std::chrono::milliseconds timeout);
  std::string complete(const std::string& request_body) override;

 private:
  std::string base_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

struct RefineOptions {
  int max_retries = 2;      // extra attempts after the first
  int max_concurrency = 4;  // simultaneous outbound requests
};

/// Diagnostics of one refinement call.
struct RefineLog {
  int attempts = 0;
  bool transport_failure = false;
  std::vector<std::string> rejections;
};

/// Refines a medium/low-confidence draft. Returns the draft unchanged (with
/// refined_by_llm = false) after retry exhaustion; sets degraded_mode when the
/// service was unreachable. Throws std::logic_error for a high-confidence draft.
commitcat::CategorizationResult refine_with_llm(const commitcat::CommitText& commit,
                                                const commitcat::CategorizationResult& draft,
                                                RefinementService& service, const RefineOptions& options = {},
                                                RefineLog* log = nullptr);

/// Keyword stage for every commit, then refinement for those not labelled
/// high. `service` may be null to skip refinement. Output order follows input.
std::vector<commitcat::CategorizationResult> categorize_all(const std::vector<commitcat::CommitText>& commits,
                                                            const commitcat::RuleSet& rules,
                                                            RefinementService* service,
                                                            const RefineOptions& options = {},
                                                            std::vector<RefineLog>* logs = nullptr);

}  // namespace ranalyzer::refine
