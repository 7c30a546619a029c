// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/harness/instance_matrix.hpp"

#include "prober/error.hpp"
#include "prober/harness/oracle.hpp"
#include "prober/harness/synthetic_ops.hpp"

namespace prober::harness {
namespace {

using nlohmann::json;

Record t(const std::string& local, const std::string& text, std::uint32_t port = 0) {
  return make_text_record(local, text, port);
}

std::vector<Record> texts(const std::string& prefix, const std::vector<std::string>& values) {
  std::vector<Record> out;
  for (std::size_t i = 0; i < values.size(); ++i) out.push_back(t(prefix + std::to_string(i + 1), values[i]));
  return out;
}

std::vector<Record> named(const std::vector<std::string>& ids) {
  std::vector<Record> out;
  for (const auto& id : ids) out.push_back(t(id, id));
  return out;
}

std::vector<Record> repeat(const std::string& prefix, const std::string& text, std::size_t n) {
  return texts(prefix, std::vector<std::string>(n, text));
}

std::vector<Record> operator+(std::vector<Record> a, const std::vector<Record>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

RecordSet run(const OperatorHandle& op, const RecordSet& flat) {
  if (op.arity() == 1) return op.invoke(std::span<const RecordSet>(&flat, 1));
  auto parts = unflatten_ports(flat, op.arity());
  return op.invoke(parts);
}

class Builder {
 public:
  void add(std::string name, std::string kind, json params, std::vector<Record> input, const Value& target) {
    Instance inst;
    inst.name = std::move(name);
    inst.kind = std::move(kind);
    inst.params = std::move(params);
    inst.input = RecordSet(std::move(input));
    RecordSet out = run(inst.op(), inst.input);
    const Record* r = out.find_value(target);
    if (r == nullptr) {
      throw Error(ErrorCode::kNotProduced, "instance '" + inst.name + "' does not produce its target");
    }
    inst.target = *r;
    list.push_back(std::move(inst));
  }
  void add(std::string name, std::string kind, json params, std::vector<Record> input, const std::string& target) {
    add(std::move(name), std::move(kind), std::move(params), std::move(input), Value::text(target));
  }
  std::vector<Instance> list;
};

json edges(const std::vector<std::pair<std::string, std::string>>& es) {
  json out = json::array();
  for (const auto& [a, b] : es) out.push_back({a, b});
  return out;
}

}  // namespace

OperatorHandle Instance::op() const { return make_synthetic_operator(name, kind, params); }

Shape Instance::true_shape() const { return true_properties(kind, params).shape; }

std::vector<Instance> builtin_instance_matrix() {
  Builder b;
  const json none = json::object();

  b.add("identity_single", "identity", none, named({"x"}), "x");
  b.add("identity_five", "identity", none, named({"a", "b", "c", "d", "e"}), "c");
  b.add("identity_twelve", "identity", none,
        texts("r", {"v1", "v2", "v3", "v4", "v5", "v6", "v7", "v8", "v9", "v10", "v11", "v12"}), "v7");
  b.add("identity_duplicates", "identity", none, texts("i", {"same", "same", "other"}), "same");

  b.add("splitter_single", "splitter", none, {t("d1", "a|b|c")}, "b");
  b.add("splitter_duplicate_segments", "splitter", none, {t("d1", "a|b"), t("d2", "b|c"), t("d3", "c")}, "b");
  b.add("splitter_shared_segment", "splitter", none, texts("d", {"x|p", "q|x", "x", "r|x|s"}), "x");
  {
    std::vector<std::string> docs;
    for (int i = 1; i <= 12; ++i) docs.push_back("s" + std::to_string(i) + "|t" + std::to_string(i % 3));
    b.add("splitter_twelve", "splitter", none, texts("d", docs), "t1");
  }
  b.add("splitter_custom_sep", "splitter", json{{"sep", ";"}}, texts("d", {"a;b", "b;c;d", "e"}), "d");
  b.add("splitter_single_segment_docs", "splitter", none, texts("d", {"alpha", "beta", "alpha"}), "alpha");

  b.add("extractor_basic", "keyed_extractor", json{{"field", "addr"}},
        texts("p", {"name=A;addr=1 Oak St", "name=B;addr=2 Elm St", "name=C;addr=3 Ash Rd"}), "2 Elm St");
  b.add("extractor_duplicates", "keyed_extractor", json{{"field", "addr"}},
        texts("p", {"name=A;addr=1 Oak St", "name=B;addr=1 Oak St", "name=C;addr=3 Ash Rd"}), "1 Oak St");
  {
    std::vector<std::string> docs;
    for (int i = 1; i <= 10; ++i) {
      docs.push_back("name=N" + std::to_string(i) + ";addr=" + (i % 4 == 0 ? std::string("9 Main St") : std::to_string(i) + " Side Rd"));
    }
    b.add("extractor_ten", "keyed_extractor", json{{"field", "addr"}}, texts("p", docs), "9 Main St");
  }
  b.add("extractor_missing_field", "keyed_extractor", json{{"field", "addr"}},
        texts("p", {"name=A", "name=B;addr=5 Fir Ave", "addr=5 Fir Ave", "name=D"}), "5 Fir Ave");
  b.add("extractor_emit_source", "keyed_extractor", json{{"field", "addr"}, {"emit_source", true}},
        texts("p", {"name=A;addr=1 Oak St", "name=B;addr=1 Oak St"}),
        Value::object(json{{"addr", "1 Oak St"}, {"src_id", "p2"}}));

  b.add("dedup_min1", "dedup", none, texts("r", {"a", "a", "b"}), "a");
  b.add("dedup_min2_three", "dedup", json{{"min_support", 2}}, texts("r", {"a", "a", "a", "b"}), "a");
  b.add("dedup_min2_four", "dedup", json{{"min_support", 2}}, texts("r", {"a", "a", "a", "a", "b", "b"}), "a");
  b.add("dedup_key_field", "dedup", json{{"key", "k"}}, texts("r", {"k=x;v=1", "k=x;v=2", "k=y;v=3"}), "x");
  b.add("dedup_min3", "dedup", json{{"min_support", 3}}, repeat("a", "a", 5) + texts("o", {"b", "c"}), "a");

  for (int threshold = 1; threshold <= 4; ++threshold) {
    b.add("threshold_t" + std::to_string(threshold) + "_five_supporters", "support_threshold",
          json{{"threshold", threshold}, {"claim", "yes"}}, repeat("s", "yes", 5) + repeat("n", "no", 2), "yes");
  }
  b.add("threshold_t2_abc", "support_threshold", json{{"threshold", 2}}, named({"a", "b", "c"}), "all");
  b.add("threshold_t3_five_identical", "support_threshold", json{{"threshold", 3}, {"claim", "yes"}},
        repeat("s", "yes", 5), "yes");
  b.add("threshold_t3_six_of_nine", "support_threshold", json{{"threshold", 3}, {"claim", "yes"}},
        repeat("s", "yes", 6) + repeat("n", "no", 3), "yes");
  b.add("threshold_t5_seven", "support_threshold", json{{"threshold", 5}, {"claim", "yes"}},
        repeat("s", "yes", 7), "yes");
  b.add("threshold_t2_ten_of_twelve", "support_threshold", json{{"threshold", 2}, {"claim", "yes"}},
        repeat("s", "yes", 10) + repeat("n", "no", 2), "yes");
  b.add("threshold_claim_field", "support_threshold", json{{"threshold", 2}, {"claim_field", "claim"}},
        texts("r", {"claim=red;src=1", "claim=red;src=2", "claim=blue;src=3", "claim=red;src=4", "claim=blue;src=5"}),
        "red");

  b.add("join_basic", "tagged_join", json{{"key", "key"}},
        {t("l1", "key=1;n=a", 0), t("l2", "key=2;n=b", 0), t("r1", "key=1;m=x", 1), t("r2", "key=3;m=y", 1)},
        Value::object(json{{"key", "1"}, {"left", "key=1;n=a"}, {"right", "key=1;m=x"}}));
  b.add("join_duplicate_left", "tagged_join", json{{"key", "key"}},
        {t("l1", "key=1;n=a", 0), t("l2", "key=1;n=a", 0), t("r1", "key=1;m=x", 1)},
        Value::object(json{{"key", "1"}, {"left", "key=1;n=a"}, {"right", "key=1;m=x"}}));
  b.add("join_many", "tagged_join", json{{"key", "key"}},
        {t("l1", "key=1;n=a", 0), t("l2", "key=1;n=b", 0), t("l3", "key=2;n=c", 0), t("r1", "key=1;m=x", 1),
         t("r2", "key=1;m=y", 1), t("r3", "key=2;m=z", 1)},
        Value::object(json{{"key", "1"}, {"left", "key=1;n=b"}, {"right", "key=1;m=y"}}));

  b.add("scorer_basic", "scorer", none, texts("r", {"alpha", "beta", "gamma", "delta"}),
        Value::object(json{{"text", "gamma"}, {"score", text_score("gamma")}}));
  b.add("scorer_duplicates", "scorer", none, texts("r", {"alpha", "alpha", "beta"}),
        Value::object(json{{"text", "alpha"}, {"score", text_score("alpha")}}));

  b.add("cover_path3", "cover", json{{"edges", edges({{"a", "b"}, {"b", "c"}})}}, named({"a", "b", "c"}), "covered");
  b.add("cover_triangle", "cover", json{{"edges", edges({{"a", "b"}, {"b", "c"}, {"a", "c"}})}},
        named({"a", "b", "c"}), "covered");
  b.add("cover_star", "cover", json{{"edges", edges({{"c", "l1"}, {"c", "l2"}, {"c", "l3"}, {"c", "l4"}})}},
        named({"c", "l1", "l2", "l3", "l4"}), "covered");
  b.add("cover_c4", "cover", json{{"edges", edges({{"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "a"}})}},
        named({"a", "b", "c", "d"}), "covered");
  b.add("cover_k4", "cover",
        json{{"edges", edges({{"a", "b"}, {"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}, {"c", "d"}})}},
        named({"a", "b", "c", "d"}), "covered");
  b.add("cover_path5", "cover", json{{"edges", edges({{"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "e"}})}},
        named({"a", "b", "c", "d", "e"}), "covered");
  b.add("cover_c6", "cover",
        json{{"edges", edges({{"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "e"}, {"e", "f"}, {"f", "a"}})}},
        named({"a", "b", "c", "d", "e", "f"}), "covered");
  b.add("cover_path3_isolated", "cover", json{{"edges", edges({{"a", "b"}, {"b", "c"}})}},
        named({"a", "b", "c", "x", "y", "z"}), "covered");
  b.add("cover_two_triangles", "cover",
        json{{"edges", edges({{"a", "b"}, {"b", "c"}, {"a", "c"}, {"d", "e"}, {"e", "f"}, {"d", "f"}})}},
        named({"a", "b", "c", "d", "e", "f", "u", "v", "w", "x", "y", "z"}), "covered");
  return b.list;
}

json matrix_to_json(const std::vector<Instance>& instances) {
  json out = json::array();
  for (const auto& inst : instances) {
    json input = json::array();
    for (const auto& r : inst.input) input.push_back(record_to_json(r));
    json expected = json::array();
    for (const auto& s : brute_force_pall(inst.op(), inst.input, inst.target)) {
      json ids = json::array();
      for (const auto& id : s.ids()) ids.push_back(id_to_json(id));
      expected.push_back(ids);
    }
    out.push_back(json{{"name", inst.name},
                       {"kind", inst.kind},
                       {"params", inst.params},
                       {"input", input},
                       {"target", record_to_json(inst.target)},
                       {"expected_pall", expected}});
  }
  return json{{"version", 1}, {"instances", out}};
}

std::vector<Instance> matrix_from_json(const json& j) {
  std::vector<Instance> out;
  for (const auto& e : j.at("instances")) {
    Instance inst;
    inst.name = e.at("name").get<std::string>();
    inst.kind = e.at("kind").get<std::string>();
    inst.params = e.value("params", json::object());
    std::vector<Record> input;
    for (const auto& r : e.at("input")) input.push_back(record_from_json(r));
    inst.input = RecordSet(std::move(input));
    inst.target = record_from_json(e.at("target"));
    out.push_back(std::move(inst));
  }
  return out;
}

OperatorHandle TwoChain::first() const { return make_synthetic_operator(name + ".1", kind1, params1); }
OperatorHandle TwoChain::second() const { return make_synthetic_operator(name + ".2", kind2, params2); }
OperatorHandle TwoChain::composite() const { return chain_operator(first(), second()); }
Shape TwoChain::shape1() const { return true_properties(kind1, params1).shape; }
Shape TwoChain::shape2() const { return true_properties(kind2, params2).shape; }

std::vector<TwoChain> builtin_two_chains() {
  std::vector<TwoChain> out;
  const json none = json::object();
  const json yes2{{"threshold", 2}, {"claim_field", "claim"}, {"claim", "yes"}};

  out.push_back({"splitter_extractor", "splitter", none, "keyed_extractor", json{{"field", "addr"}},
                 RecordSet(texts("d", {"name=A;addr=101 Oak St|name=B;addr=118 Pine Ave", "name=C;addr=135 Elm Rd",
                                       "name=D;addr=152 Ash Blvd|name=E;addr=169 Fir St"}))});
  out.push_back({"splitter_threshold", "splitter", none, "support_threshold", yes2,
                 RecordSet(texts("d", {"claim=yes;src=a|claim=no;src=b", "claim=yes;src=c",
                                       "claim=yes;src=d|claim=yes;src=e", "claim=no;src=f"}))});
  out.push_back({"identity_identity", "identity", none, "identity", none, RecordSet(named({"a", "b", "c", "d"}))});
  out.push_back({"extractor_scorer", "keyed_extractor", json{{"field", "addr"}}, "scorer", none,
                 RecordSet(texts("p", {"name=A;addr=1 Oak St", "name=B;addr=2 Elm St", "name=C;addr=3 Ash Rd"}))});
  out.push_back({"threshold_identity", "support_threshold", yes2, "identity", none,
                 RecordSet(texts("d", {"claim=yes;n=1", "claim=yes;n=2", "claim=yes;n=3", "claim=no;n=4",
                                       "claim=yes;n=5"}))});
  out.push_back({"threshold_per_key_threshold", "support_threshold", json{{"threshold", 2}, {"claim_field", "claim"}},
                 "support_threshold", json{{"threshold", 2}},
                 RecordSet(texts("d", {"claim=red;n=1", "claim=red;n=2", "claim=blue;n=3", "claim=blue;n=4",
                                       "claim=green;n=5", "claim=red;n=6"}))});
  out.push_back({"dedup2_threshold", "dedup", json{{"key", "k"}, {"min_support", 2}}, "support_threshold",
                 json{{"threshold", 2}},
                 RecordSet(texts("d", {"k=x;n=1", "k=x;n=2", "k=y;n=3", "k=y;n=4", "k=z;n=5"}))});
  out.push_back({"extractor_dedup2", "keyed_extractor", json{{"field", "k"}, {"emit_source", true}}, "dedup",
                 json{{"key", "k"}, {"min_support", 2}},
                 RecordSet(texts("d", {"k=x;n=1", "k=x;n=2", "k=x;n=3", "k=y;n=4", "k=z;n=5"}))});
  out.push_back({"splitter_dedup2", "splitter", none, "dedup", json{{"key", "k"}, {"min_support", 2}},
                 RecordSet(texts("d", {"k=x;src=a|k=y;src=b", "k=x;src=c", "k=y;src=d|k=x;src=e", "k=z;src=f"}))});
  out.push_back({"splitter_threshold_ten", "splitter", none, "support_threshold", yes2,
                 RecordSet(texts("d", {"claim=yes;src=1|claim=no;src=2", "claim=no;src=3", "claim=yes;src=4",
                                       "claim=no;src=5|claim=no;src=6", "claim=yes;src=7|claim=no;src=8",
                                       "claim=no;src=9", "claim=yes;src=10", "claim=no;src=11|claim=no;src=12",
                                       "claim=yes;src=13", "claim=no;src=14"}))});
  return out;
}

}  // namespace prober::harness
