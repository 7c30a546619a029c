// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/harness/synthetic_ops.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <thread>

#include "prober/error.hpp"

namespace prober::harness {
namespace {

std::string text_of(const Value& v) {
  if (v.is_text()) return v.as_text();
  if (const auto* t = v.field("text"); t != nullptr && t->is_string()) return t->get<std::string>();
  return v.json().dump();
}

std::optional<std::string> field_of(const Value& v, const std::string& name) {
  if (const auto* f = v.field(name)) {
    if (f->is_string()) return f->get<std::string>();
    return f->dump();
  }
  if (v.is_text()) {
    for (const auto& [k, val] : parse_fields(v.as_text())) {
      if (k == name) return val;
    }
  }
  return std::nullopt;
}

long long score_of(const Value& v) {
  if (const auto* s = v.field("score"); s != nullptr && s->is_number()) return s->get<long long>();
  return text_score(text_of(v));
}

class Synthetic final : public OperatorImpl {
 public:
  Synthetic(std::string kind, nlohmann::json params) : kind_(std::move(kind)), params_(std::move(params)) {
    delay_ms_ = params_.value("delay_ms", 0);
    if (kind_ == "keyed_extractor") (void)params_.at("field").get<std::string>();
    if (kind_ == "support_threshold") (void)params_.at("threshold").get<std::size_t>();
    if (kind_ == "cover") {
      for (const auto& e : params_.at("edges")) {
        edges_.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
      }
    }
  }

  RecordSet apply(std::span<const RecordSet> in) const override {
    if (delay_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
    if (kind_ == "identity") return in[0];
    if (kind_ == "splitter") return split(in[0]);
    if (kind_ == "keyed_extractor") return extract(in[0]);
    if (kind_ == "dedup") return dedup(in[0]);
    if (kind_ == "support_threshold") return threshold(in[0]);
    if (kind_ == "tagged_join") return join(in[0], in[1]);
    if (kind_ == "scorer") return score(in[0]);
    if (kind_ == "top1_by_score") return top1(in[0]);
    if (kind_ == "cover") return cover(in[0]);
    throw Error(ErrorCode::kInvalidArgument, "unknown synthetic kind '" + kind_ + "'");
  }

 private:
  RecordSet split(const RecordSet& in) const {
    const std::string sep = params_.value("sep", std::string("|"));
    std::vector<Record> out;
    for (const auto& r : in) {
      std::string text = text_of(r.value);
      std::size_t k = 0, start = 0;
      while (true) {
        std::size_t pos = text.find(sep, start);
        std::string seg = text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
        if (!seg.empty()) out.push_back(make_text_record(r.id.local + "#" + std::to_string(k++), seg));
        if (pos == std::string::npos) break;
        start = pos + sep.size();
      }
    }
    return RecordSet(std::move(out));
  }

  RecordSet extract(const RecordSet& in) const {
    const std::string field = params_.at("field").get<std::string>();
    const bool emit_source = params_.value("emit_source", false);
    std::vector<Record> out;
    for (const auto& r : in) {
      auto v = field_of(r.value, field);
      if (!v) continue;
      if (emit_source) {
        out.push_back(make_record(r.id.local, Value::object({{field, *v}, {"src_id", r.id.local}})));
      } else {
        out.push_back(make_text_record(r.id.local, *v));
      }
    }
    return RecordSet(std::move(out));
  }

  std::string key_of(const Value& v) const {
    if (params_.contains("key") && params_.at("key").is_string()) {
      return field_of(v, params_.at("key").get<std::string>()).value_or("");
    }
    return text_of(v);
  }

  RecordSet dedup(const RecordSet& in) const {
    const std::size_t min_support = params_.value("min_support", std::size_t{1});
    std::map<std::string, std::size_t> support;
    for (const auto& r : in) {
      std::string k = key_of(r.value);
      if (!k.empty()) ++support[k];
    }
    std::vector<Record> out;
    for (const auto& [k, n] : support) {
      if (n >= min_support) out.push_back(make_text_record("k:" + k, k));
    }
    return RecordSet(std::move(out));
  }

  RecordSet threshold(const RecordSet& in) const {
    const std::size_t t = params_.at("threshold").get<std::size_t>();
    std::map<std::string, std::size_t> support;
    for (const auto& r : in) {
      if (params_.contains("claim_field")) {
        auto v = field_of(r.value, params_.at("claim_field").get<std::string>());
        if (!v) continue;
        if (params_.contains("claim") && *v != params_.at("claim").get<std::string>()) continue;
        ++support[*v];
      } else if (params_.contains("claim")) {
        std::string claim = params_.at("claim").get<std::string>();
        if (text_of(r.value) == claim) ++support[claim];
      } else {
        ++support["all"];
      }
    }
    std::vector<Record> out;
    for (const auto& [claim, n] : support) {
      if (n >= t) out.push_back(make_text_record("claim:" + claim, claim));
    }
    return RecordSet(std::move(out));
  }

  RecordSet join(const RecordSet& left, const RecordSet& right) const {
    const std::string key = params_.value("key", std::string("key"));
    std::vector<Record> out;
    for (const auto& l : left) {
      auto lk = field_of(l.value, key);
      if (!lk) continue;
      for (const auto& r : right) {
        auto rk = field_of(r.value, key);
        if (!rk || *rk != *lk) continue;
        out.push_back(make_record(l.id.local + "+" + r.id.local,
                                  Value::object({{"key", *lk}, {"left", text_of(l.value)}, {"right", text_of(r.value)}})));
      }
    }
    return RecordSet(std::move(out));
  }

  RecordSet score(const RecordSet& in) const {
    std::vector<Record> out;
    for (const auto& r : in) {
      std::string t = text_of(r.value);
      out.push_back(make_record(r.id.local, Value::object({{"text", t}, {"score", text_score(t)}})));
    }
    return RecordSet(std::move(out));
  }

  RecordSet top1(const RecordSet& in) const {
    const Record* best = nullptr;
    for (const auto& r : in) {
      if (best == nullptr || score_of(r.value) > score_of(best->value)) best = &r;
    }
    if (best == nullptr) return {};
    return RecordSet({*best});
  }

  RecordSet cover(const RecordSet& in) const {
    std::set<std::string> present;
    for (const auto& r : in) present.insert(r.id.local);
    for (const auto& [a, b] : edges_) {
      if (!present.count(a) && !present.count(b)) return {};
    }
    return RecordSet({make_text_record("covered", "covered")});
  }

  std::string kind_;
  nlohmann::json params_;
  int delay_ms_ = 0;
  std::vector<std::pair<std::string, std::string>> edges_;
};

class Chain final : public OperatorImpl {
 public:
  Chain(OperatorHandle first, OperatorHandle second) : first_(std::move(first)), second_(std::move(second)) {}

  RecordSet apply(std::span<const RecordSet> in) const override {
    RecordSet mid = first_.invoke(in);
    return second_.invoke(std::span<const RecordSet>(&mid, 1));
  }

 private:
  OperatorHandle first_;
  OperatorHandle second_;
};

}  // namespace

std::vector<std::string> synthetic_kinds() {
  return {"identity", "splitter", "keyed_extractor", "dedup", "support_threshold",
          "tagged_join", "scorer", "top1_by_score", "cover"};
}

std::size_t synthetic_arity(const std::string& kind, const nlohmann::json&) {
  return kind == "tagged_join" ? 2 : 1;
}

long long text_score(const std::string& text) {
  long long s = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    s = (s + static_cast<long long>(i + 1) * static_cast<unsigned char>(text[i])) % 997;
  }
  return s;
}

std::vector<std::pair<std::string, std::string>> parse_fields(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(';', start);
    std::string part = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
    std::size_t eq = part.find('=');
    if (eq != std::string::npos && eq > 0) {
      std::string k = part.substr(0, eq);
      if (seen.insert(k).second) out.emplace_back(k, part.substr(eq + 1));
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

PropertyClass true_properties(const std::string& kind, const nlohmann::json& params) {
  PropertyClass p;
  p.shape_evidence = EvidenceSource::kDeclared;
  if (kind == "identity" || kind == "keyed_extractor" || kind == "scorer") {
    p.shape = Shape::kOneToOne;
  } else if (kind == "splitter") {
    p.shape = Shape::kOneToMany;
  } else if (kind == "dedup") {
    p.shape = params.value("min_support", 1) <= 1 ? Shape::kOneToOne : Shape::kManyToOne;
  } else if (kind == "support_threshold") {
    p.shape = params.value("threshold", 1) <= 1 ? Shape::kOneToOne : Shape::kArbitrary;
  } else if (kind == "top1_by_score") {
    p.monotone = MonotoneVerdict::kViolated;
    p.shape = Shape::kArbitrary;
  } else {
    p.shape = Shape::kArbitrary;
  }
  if (p.shape == Shape::kArbitrary) p.shape_evidence = EvidenceSource::kNone;
  return p;
}

OperatorHandle make_synthetic_operator(const std::string& name, const std::string& kind,
                                       const nlohmann::json& params, SpecLevel spec, PropertyClass properties) {
  auto kinds = synthetic_kinds();
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
    throw Error(ErrorCode::kInvalidPipeline, "unknown operator kind '" + kind + "'");
  }
  try {
    auto impl = std::make_shared<Synthetic>(kind, params.is_null() ? nlohmann::json::object() : params);
    return OperatorHandle(name, synthetic_arity(kind, params), std::move(impl), Backing::kSynthetic,
                          std::move(spec), std::move(properties));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidPipeline, "bad params for '" + name + "': " + e.what());
  }
}

OperatorHandle chain_operator(const OperatorHandle& first, const OperatorHandle& second) {
  return OperatorHandle(first.name() + ">" + second.name(), first.arity(),
                        std::make_shared<Chain>(first, second), Backing::kSynthetic);
}

}  // namespace prober::harness
