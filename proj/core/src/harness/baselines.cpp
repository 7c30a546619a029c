// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/harness/baselines.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "prober/error.hpp"

namespace prober::harness {

std::string_view to_string(BaselineMode m) {
  switch (m) {
    case BaselineMode::kAllRecs: return "all_recs";
    case BaselineMode::kWrdAnd: return "wrd_and";
    case BaselineMode::kWrdOr: return "wrd_or";
  }
  return "all_recs";
}

BaselineMode baseline_mode_from_string(std::string_view s) {
  if (s == "all_recs") return BaselineMode::kAllRecs;
  if (s == "wrd_and") return BaselineMode::kWrdAnd;
  if (s == "wrd_or") return BaselineMode::kWrdOr;
  throw Error(ErrorCode::kInvalidArgument, "unknown baseline '" + std::string(s) + "'");
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string value_terms(const Value& v) {
  if (v.is_text()) return v.as_text();
  std::string out;
  for (const auto& [k, f] : v.json().items()) {
    if (!out.empty()) out.push_back(' ');
    out += f.is_string() ? f.get<std::string>() : f.dump();
  }
  return out;
}

RecordSet baseline_retrieval(const RecordSet& corpus, const Record& r, BaselineMode mode) {
  if (mode == BaselineMode::kAllRecs) return corpus;
  auto terms = tokenize(value_terms(r.value));
  std::set<std::string> wanted(terms.begin(), terms.end());
  if (wanted.empty()) return {};
  std::vector<Record> out;
  for (const auto& doc : corpus) {
    auto toks = tokenize(value_terms(doc.value));
    std::set<std::string> have(toks.begin(), toks.end());
    std::size_t hits = 0;
    for (const auto& t : wanted) hits += have.count(t);
    bool keep = mode == BaselineMode::kWrdAnd ? hits == wanted.size() : hits > 0;
    if (keep) out.push_back(doc);
  }
  return RecordSet(std::move(out));
}

}  // namespace prober::harness
