// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "prober/budget.hpp"
#include "prober/composition.hpp"
#include "prober/harness/instance_matrix.hpp"
#include "prober/harness/synthetic_ops.hpp"
#include "prober/miset.hpp"
#include "prober/record.hpp"

namespace prober::testing {

inline Record rec(const std::string& local, const std::string& text, std::uint32_t port = 0) {
  return make_text_record(local, text, port);
}

/// Records whose id and value are both the given name.
inline RecordSet named(std::initializer_list<std::string> ids) {
  std::vector<Record> out;
  for (const auto& id : ids) out.push_back(rec(id, id));
  return RecordSet(std::move(out));
}

/// `n` records "<prefix>1".."<prefix>n" all carrying `text`.
inline std::vector<Record> same_text(const std::string& prefix, const std::string& text, std::size_t n) {
  std::vector<Record> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(rec(prefix + std::to_string(i), text));
  return out;
}

inline RecordSet join(std::vector<Record> a, const std::vector<Record>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return RecordSet(std::move(a));
}

inline OperatorHandle threshold_op(std::size_t t, const std::string& claim = "") {
  nlohmann::json params{{"threshold", t}};
  if (!claim.empty()) params["claim"] = claim;
  return harness::make_synthetic_operator("threshold", "support_threshold", params);
}

inline OperatorHandle identity_op() { return harness::make_synthetic_operator("identity", "identity"); }

inline std::vector<std::vector<std::string>> id_sets(const std::vector<MISet>& misets) {
  std::vector<std::vector<std::string>> out;
  for (const auto& m : misets) {
    std::vector<std::string> ids;
    for (const auto& r : m.members) ids.push_back(to_string(r.id));
    out.push_back(ids);
  }
  return out;
}

inline std::vector<std::vector<std::string>> sorted_id_sets(const std::vector<MISet>& misets) {
  auto out = id_sets(misets);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::vector<std::string>> sorted_id_sets(const std::vector<RecordSet>& sets) {
  std::vector<MISet> m;
  for (const auto& s : sets) m.push_back(MISet{s});
  return sorted_id_sets(m);
}

inline std::vector<std::string> ids_of(const RecordSet& s) {
  std::vector<std::string> out;
  for (const auto& r : s) out.push_back(to_string(r.id));
  return out;
}

/// Random subset of `pool` (each member kept with probability 1/2).
inline RecordSet random_subset(std::mt19937_64& rng, const RecordSet& pool) {
  std::vector<Record> out;
  for (const auto& r : pool) {
    if (rng() & 1u) out.push_back(r);
  }
  return RecordSet(std::move(out));
}

/// Subset of `pool` selected by the bits of `mask`.
inline RecordSet mask_subset(const RecordSet& pool, std::uint64_t mask) {
  std::vector<Record> out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (mask & (std::uint64_t{1} << i)) out.push_back(pool[i]);
  }
  return RecordSet(std::move(out));
}

/// Stored provenance of both stages of `chain`, built with the stages' true
/// shapes. `execs` receives the real executions spent.
struct ChainProvenance {
  std::shared_ptr<const StoredProvenance> first;
  std::shared_ptr<const StoredProvenance> second;
  RecordSet mid;
  RecordSet out;
};

inline ChainProvenance stored_for_chain(const harness::TwoChain& chain, std::uint64_t* execs = nullptr) {
  auto op1 = chain.first().with_properties(harness::true_properties(chain.kind1, chain.params1));
  auto op2 = chain.second().with_properties(harness::true_properties(chain.kind2, chain.params2));
  ExecutionBudget budget;
  ExecutionCache cache;
  ChainProvenance cp;
  cp.mid = op1.invoke(std::span<const RecordSet>(&chain.input, 1));
  cp.out = op2.invoke(std::span<const RecordSet>(&cp.mid, 1));
  OperatorProbe p1(op1, budget, &cache);
  OperatorProbe p2(op2, budget, &cache);
  cp.first = std::make_shared<StoredProvenance>(build_stored_provenance(p1, chain.input, cp.mid));
  cp.second = std::make_shared<StoredProvenance>(build_stored_provenance(p2, cp.mid, cp.out));
  if (execs != nullptr) *execs = budget.executions();
  return cp;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "prober-test-XXXXXX").string();
    path_ = mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace prober::testing
