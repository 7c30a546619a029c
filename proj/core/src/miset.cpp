// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/miset.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "prober/error.hpp"

namespace prober {

std::string_view to_string(ProvenanceKind k) {
  switch (k) {
    case ProvenanceKind::kAll: return "all";
    case ProvenanceKind::kAny: return "any";
    case ProvenanceKind::kUni: return "uni";
    case ProvenanceKind::kInt: return "int";
    case ProvenanceKind::kImp: return "imp";
  }
  return "all";
}

ProvenanceKind provenance_kind_from_string(std::string_view s) {
  if (s == "all") return ProvenanceKind::kAll;
  if (s == "any") return ProvenanceKind::kAny;
  if (s == "uni") return ProvenanceKind::kUni;
  if (s == "int") return ProvenanceKind::kInt;
  if (s == "imp") return ProvenanceKind::kImp;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown provenance kind '" + std::string(s) + "' (expected all, any, uni, int, imp)");
}

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::kExact: return "exact";
    case Relation::kSupersetOfTruth: return "superset_of_truth";
    case Relation::kSubsetOfTruth: return "subset_of_truth";
  }
  return "exact";
}

Relation relation_from_string(std::string_view s) {
  if (s == "exact") return Relation::kExact;
  if (s == "superset_of_truth") return Relation::kSupersetOfTruth;
  if (s == "subset_of_truth") return Relation::kSubsetOfTruth;
  throw Error(ErrorCode::kInvalidArgument, "unknown relation '" + std::string(s) + "'");
}

std::string_view to_string(EnumerationEnd e) {
  switch (e) {
    case EnumerationEnd::kExhausted: return "exhausted";
    case EnumerationEnd::kLimitReached: return "limit_reached";
    case EnumerationEnd::kTruncated: return "truncated";
    case EnumerationEnd::kCancelled: return "cancelled";
  }
  return "exhausted";
}

ProvenanceKind ProvenanceResult::kind() const {
  return static_cast<ProvenanceKind>(payload.index());
}

const std::vector<MISet>& ProvenanceResult::misets() const {
  static const std::vector<MISet> kNone;
  if (const auto* all = std::get_if<AllProvenance>(&payload)) return all->misets;
  if (const auto* any = std::get_if<AnyProvenance>(&payload)) return any->misets;
  return kNone;
}

RecordSet union_of(const std::vector<MISet>& misets) {
  std::map<RecordId, Record> merged;
  for (const auto& m : misets) {
    for (const auto& r : m.members) merged.emplace(r.id, r);
  }
  std::vector<Record> out;
  out.reserve(merged.size());
  for (auto& [id, r] : merged) out.push_back(std::move(r));
  return RecordSet(std::move(out));
}

RecordSet intersection_of(const std::vector<MISet>& misets) {
  if (misets.empty()) return {};
  std::vector<Record> out;
  for (const auto& r : misets.front().members) {
    bool everywhere = std::all_of(misets.begin() + 1, misets.end(),
                                  [&](const MISet& m) { return m.members.contains_id(r.id); });
    if (everywhere) out.push_back(r);
  }
  return RecordSet(std::move(out));
}

std::vector<ImpactEntry> impact_of(const std::vector<MISet>& misets) {
  std::map<RecordId, ImpactEntry> counts;
  for (const auto& m : misets) {
    for (const auto& r : m.members) {
      auto [it, inserted] = counts.emplace(r.id, ImpactEntry{r, 0});
      ++it->second.count;
    }
  }
  std::vector<ImpactEntry> out;
  out.reserve(counts.size());
  for (auto& [id, e] : counts) out.push_back(std::move(e));
  std::stable_sort(out.begin(), out.end(),
                   [](const ImpactEntry& a, const ImpactEntry& b) { return a.count > b.count; });
  return out;
}

ProvenanceResult result_from_misets(std::vector<MISet> misets, ProvenanceKind kind, std::size_t k,
                                    bool complete, bool truncated) {
  ProvenanceResult res;
  res.truncated = truncated;
  res.exhausted = complete;
  switch (kind) {
    case ProvenanceKind::kAll:
      res.exact = complete;
      res.relation = complete ? Relation::kExact : Relation::kSubsetOfTruth;
      res.payload = AllProvenance{std::move(misets)};
      break;
    case ProvenanceKind::kAny: {
      // Any-k only needs min(k, |P_all|) MISets.
      res.exact = complete || misets.size() >= k;
      res.relation = res.exact ? Relation::kExact : Relation::kSubsetOfTruth;
      if (misets.size() > k) misets.resize(k);
      res.payload = AnyProvenance{std::move(misets), k};
      break;
    }
    case ProvenanceKind::kUni:
      res.exact = complete;
      res.relation = complete ? Relation::kExact : Relation::kSubsetOfTruth;
      res.payload = UnionProvenance{union_of(misets)};
      break;
    case ProvenanceKind::kInt:
      // The intersection of a prefix can only shrink as MISets are added.
      res.exact = complete;
      res.relation = complete ? Relation::kExact : Relation::kSupersetOfTruth;
      res.payload = IntersectionProvenance{intersection_of(misets)};
      break;
    case ProvenanceKind::kImp:
      res.exact = complete;
      res.relation = complete ? Relation::kExact : Relation::kSubsetOfTruth;
      res.payload = ImpactProvenance{impact_of(misets)};
      break;
  }
  return res;
}

namespace {

using Indices = std::vector<std::size_t>;

bool is_stop(const Error& e) {
  return e.code() == ErrorCode::kBudgetExhausted || e.code() == ErrorCode::kCancelled;
}

Indices all_indices(std::size_t n) {
  Indices out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i;
  return out;
}

Indices indices_of(const RecordSet& input, const RecordSet& subset) {
  Indices out;
  out.reserve(subset.size());
  for (const auto& r : subset) {
    auto idx = input.index_of(r.id);
    if (!idx) {
      throw Error(ErrorCode::kInvalidArgument, "record " + to_string(r.id) + " is not part of the input");
    }
    out.push_back(*idx);
  }
  return out;
}

Indices without_position(const Indices& s, std::size_t pos) {
  Indices out;
  out.reserve(s.size() - 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i != pos) out.push_back(s[i]);
  }
  return out;
}

// Shrinks `start` (already known to produce the target) one record at a time
// in ascending order; each removal is kept when the target survives.
Indices greedy_shrink(const OperatorProbe& probe, const RecordSet& input, Indices start,
                      const Record& target) {
  const Indices snapshot = start;
  Indices current = std::move(start);
  for (std::size_t candidate : snapshot) {
    auto pos = std::find(current.begin(), current.end(), candidate);
    Indices trial = without_position(current, static_cast<std::size_t>(pos - current.begin()));
    if (probe.produces(input.subset(trial), target)) current = std::move(trial);
  }
  return current;
}

bool includes(const Indices& outer, const Indices& inner) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

// Hitting-set search for further MISets. A new MISet avoids at least one
// member of every known MISet, so it lies inside input − H for some set H
// hitting all of them; by monotonicity it suffices to try minimal H.
class NextSearch {
 public:
  NextSearch(const OperatorProbe& probe, const RecordSet& input, const Record& target)
      : probe_(probe), input_(input), target_(target) {}

  void add_found(Indices m) { found_.push_back(std::move(m)); }
  const std::vector<Indices>& found() const { return found_; }

  std::optional<Indices> next() {
    result_.reset();
    Indices chosen;
    dfs(0, chosen);
    if (result_) found_.push_back(*result_);
    return result_;
  }

 private:
  bool dead_superset(const Indices& sorted) const {
    return std::any_of(dead_.begin(), dead_.end(), [&](const Indices& d) { return includes(sorted, d); });
  }

  bool hit(const Indices& m, const Indices& chosen) const {
    return std::any_of(m.begin(), m.end(), [&](std::size_t x) {
      return std::find(chosen.begin(), chosen.end(), x) != chosen.end();
    });
  }

  // Every element of a minimal hitting set is the only one hitting some set.
  bool minimal(const Indices& chosen) const {
    for (std::size_t x : chosen) {
      bool is_private = std::any_of(found_.begin(), found_.end(), [&](const Indices& m) {
        std::size_t hits = 0;
        bool has_x = false;
        for (std::size_t y : m) {
          if (std::find(chosen.begin(), chosen.end(), y) != chosen.end()) {
            ++hits;
            has_x = has_x || y == x;
          }
        }
        return has_x && hits == 1;
      });
      if (!is_private) return false;
    }
    return true;
  }

  bool dfs(std::size_t level, Indices& chosen) {
    if (level == found_.size()) return test(chosen);
    const Indices& m = found_[level];
    if (hit(m, chosen)) return dfs(level + 1, chosen);
    for (std::size_t x : m) {
      chosen.push_back(x);
      Indices sorted = chosen;
      std::sort(sorted.begin(), sorted.end());
      bool pruned = dead_superset(sorted);
      if (!pruned && dfs(level + 1, chosen)) return true;
      chosen.pop_back();
    }
    return false;
  }

  bool test(const Indices& chosen) {
    if (!minimal(chosen)) return false;
    Indices removal = chosen;
    std::sort(removal.begin(), removal.end());
    if (!tested_.insert(removal).second) return false;
    if (dead_superset(removal)) return false;

    Indices rest;
    rest.reserve(input_.size());
    for (std::size_t i = 0, j = 0; i < input_.size(); ++i) {
      if (j < removal.size() && removal[j] == i) {
        ++j;
      } else {
        rest.push_back(i);
      }
    }
    if (!probe_.produces(input_.subset(rest), target_)) {
      dead_.push_back(std::move(removal));
      return false;
    }
    Indices m = greedy_shrink(probe_, input_, std::move(rest), target_);
    // Distinct by construction; checked anyway in case the operator misbehaves.
    if (std::find(found_.begin(), found_.end(), m) != found_.end()) return false;
    result_ = std::move(m);
    return true;
  }

  const OperatorProbe& probe_;
  const RecordSet& input_;
  const Record& target_;
  std::vector<Indices> found_;
  std::vector<Indices> dead_;
  std::set<Indices> tested_;
  std::optional<Indices> result_;
};

MISet to_miset(const RecordSet& input, const Indices& idx) { return MISet{input.subset(idx)}; }

Indices sorted_indices(const RecordSet& input, const MISet& m) {
  Indices idx = indices_of(input, m.members);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

MISet find_any_miset(const OperatorProbe& probe, const RecordSet& input, const Record& target) {
  if (!probe.produces(input, target)) {
    throw Error(ErrorCode::kNotProduced, "target record is not produced by the full input");
  }
  return to_miset(input, greedy_shrink(probe, input, all_indices(input.size()), target));
}

UniqueCheck is_unique_miset(const OperatorProbe& probe, const RecordSet& input, const Record& target) {
  UniqueCheck out;
  out.miset = find_any_miset(probe, input, target);
  out.unique = true;
  for (const auto& m : out.miset.members) {
    if (probe.produces(input.without(m.id), target)) {
      out.unique = false;
      break;
    }
  }
  return out;
}

bool is_miset(const OperatorProbe& probe, const RecordSet& input, const RecordSet& subset,
              const Record& target) {
  if (!subset.is_subset_of(input)) {
    throw Error(ErrorCode::kInvalidArgument, "candidate is not a subset of the input");
  }
  if (!probe.produces(subset, target)) return false;
  for (const auto& s : subset) {
    if (probe.produces(subset.without(s.id), target)) return false;
  }
  return true;
}

NextResult find_next_miset(const OperatorProbe& probe, const RecordSet& input, const Record& target,
                           const std::vector<MISet>& found) {
  NextSearch search(probe, input, target);
  for (const auto& m : found) search.add_found(sorted_indices(input, m));
  try {
    auto next = search.next();
    if (!next) return NextResult{NextStatus::kNoneLeft, std::nullopt};
    return NextResult{NextStatus::kFound, to_miset(input, *next)};
  } catch (const Error& e) {
    if (!is_stop(e)) throw;
    return NextResult{NextStatus::kTruncated, std::nullopt};
  }
}

EnumerationOutcome enumerate_misets(const OperatorProbe& probe, const RecordSet& input,
                                    const Record& target, std::optional<std::size_t> k,
                                    const MISetCallback& on_miset) {
  EnumerationOutcome out;
  if (k && *k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  NextSearch search(probe, input, target);
  auto emit = [&](const Indices& idx) {
    out.misets.push_back(to_miset(input, idx));
    return !on_miset || on_miset(out.misets.back());
  };
  try {
    if (!probe.produces(input, target)) {
      throw Error(ErrorCode::kNotProduced, "target record is not produced by the full input");
    }
    Indices first = greedy_shrink(probe, input, all_indices(input.size()), target);
    search.add_found(first);
    if (!emit(first)) {
      out.end = EnumerationEnd::kCancelled;
      return out;
    }
    while (true) {
      if (k && out.misets.size() >= *k) {
        out.end = EnumerationEnd::kLimitReached;
        return out;
      }
      auto next = search.next();
      if (!next) {
        out.end = EnumerationEnd::kExhausted;
        return out;
      }
      if (!emit(*next)) {
        out.end = EnumerationEnd::kCancelled;
        return out;
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBudgetExhausted) {
      out.end = EnumerationEnd::kTruncated;
    } else if (e.code() == ErrorCode::kCancelled) {
      out.end = EnumerationEnd::kCancelled;
    } else {
      throw;
    }
  }
  return out;
}

namespace {

ProvenanceResult enumerate_as(const OperatorProbe& probe, const RecordSet& input, const Record& target,
                              ProvenanceKind kind, std::optional<std::size_t> k) {
  BudgetSnapshot before = probe.budget().snapshot();
  auto outcome = enumerate_misets(probe, input, target, k);
  bool complete = outcome.end == EnumerationEnd::kExhausted;
  bool truncated = outcome.end == EnumerationEnd::kTruncated || outcome.end == EnumerationEnd::kCancelled;
  auto res = result_from_misets(std::move(outcome.misets), kind, k.value_or(0), complete, truncated);
  res.budget_spent = probe.budget().snapshot() - before;
  return res;
}

}  // namespace

ProvenanceResult compute_p_all(const OperatorProbe& probe, const RecordSet& input, const Record& target) {
  return enumerate_as(probe, input, target, ProvenanceKind::kAll, std::nullopt);
}

ProvenanceResult compute_p_any(const OperatorProbe& probe, const RecordSet& input, const Record& target,
                               std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  return enumerate_as(probe, input, target, ProvenanceKind::kAny, k);
}

ProvenanceResult compute_p_uni(const OperatorProbe& probe, const RecordSet& input, const Record& target) {
  return enumerate_as(probe, input, target, ProvenanceKind::kUni, std::nullopt);
}

ProvenanceResult compute_p_imp(const OperatorProbe& probe, const RecordSet& input, const Record& target) {
  return enumerate_as(probe, input, target, ProvenanceKind::kImp, std::nullopt);
}

ProvenanceResult compute_p_int(const OperatorProbe& probe, const RecordSet& input, const Record& target,
                               const MISet* known) {
  BudgetSnapshot before = probe.budget().snapshot();
  ProvenanceResult res;
  std::vector<Record> essential;
  try {
    if (!probe.produces(input, target)) {
      throw Error(ErrorCode::kNotProduced, "target record is not produced by the full input");
    }
    for (const auto& i : input) {
      if (known != nullptr && !known->members.contains_id(i.id)) continue;
      if (!probe.produces(input.without(i.id), target)) essential.push_back(i);
    }
  } catch (const Error& e) {
    if (!is_stop(e)) throw;
    // Records confirmed so far are a subset of the true intersection.
    res.truncated = true;
    res.exact = false;
    res.relation = Relation::kSubsetOfTruth;
  }
  res.payload = IntersectionProvenance{RecordSet(std::move(essential))};
  res.budget_spent = probe.budget().snapshot() - before;
  return res;
}

ProvenanceResult enumerate_bounded(const OperatorProbe& probe, const RecordSet& input,
                                   const Record& target, std::size_t bound) {
  if (bound == 0) throw Error(ErrorCode::kInvalidArgument, "bound must be positive");
  BudgetSnapshot before = probe.budget().snapshot();
  std::vector<Indices> found;
  bool truncated = false;
  const std::size_t n = input.size();
  try {
    if (!probe.produces(input, target)) {
      throw Error(ErrorCode::kNotProduced, "target record is not produced by the full input");
    }
    for (std::size_t size = 0; size <= std::min(bound, n); ++size) {
      // Lexicographic combinations of `size` positions.
      Indices combo(size);
      for (std::size_t i = 0; i < size; ++i) combo[i] = i;
      while (true) {
        bool covers_found = std::any_of(found.begin(), found.end(),
                                        [&](const Indices& f) { return includes(combo, f); });
        if (!covers_found) {
          RecordSet candidate = input.subset(combo);
          if (probe.produces(candidate, target) && is_miset(probe, input, candidate, target)) {
            found.push_back(combo);
          }
        }
        // Advance to the next combination.
        std::size_t i = size;
        while (i > 0 && combo[i - 1] == n - size + i - 1) --i;
        if (i == 0) break;
        ++combo[i - 1];
        for (std::size_t j = i; j < size; ++j) combo[j] = combo[j - 1] + 1;
      }
    }
  } catch (const Error& e) {
    if (!is_stop(e)) throw;
    truncated = true;
  }
  if (!truncated && found.empty()) {
    throw Error(ErrorCode::kBoundViolated,
                "target is produced but has no MISet of size <= " + std::to_string(bound));
  }
  std::vector<MISet> misets;
  misets.reserve(found.size());
  for (const auto& f : found) misets.push_back(to_miset(input, f));
  auto res = result_from_misets(std::move(misets), ProvenanceKind::kAll, 0, !truncated, truncated);
  res.budget_spent = probe.budget().snapshot() - before;
  return res;
}

}  // namespace prober
