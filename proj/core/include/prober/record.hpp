// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace prober {

/// Identifier of a record. `port` tags which operator input the record was
/// fed through once several input sets are flattened into one; records
/// produced by an operator always carry port 0.
struct RecordId {
  std::uint32_t port = 0;
  std::string local;

  friend auto operator<=>(const RecordId&, const RecordId&) = default;
  friend bool operator==(const RecordId&, const RecordId&) = default;
};

/// "local" for port 0, "<port>:local" otherwise. Display only.
std::string to_string(const RecordId& id);

/// Wire form: a bare string for port 0, `[port, "local"]` otherwise.
nlohmann::json id_to_json(const RecordId& id);
RecordId id_from_json(const nlohmann::json& j);

/// Canonically serialized record value: UTF-8 text, or an object whose
/// members are scalars. Equality is byte equality of the canonical form
/// (no case folding, no whitespace normalization). Copies share storage.
class Value {
 public:
  Value();
  static Value text(std::string utf8);
  /// Throws kInvalidArgument unless `object` is an object of scalars.
  static Value object(nlohmann::json object);
  /// Accepts a JSON string or a JSON object of scalars.
  static Value from_json(const nlohmann::json& j);

  bool is_text() const;
  const std::string& as_text() const;
  const nlohmann::json& json() const;

  /// Field of an object value; nullptr for text values or missing fields.
  const nlohmann::json* field(const std::string& name) const;

  /// Type-tagged canonical bytes ("t:" + text, or "m:" + sorted-key dump).
  const std::string& canonical() const;
  /// SHA-256 of canonical().
  const std::string& digest() const;

  friend bool operator==(const Value& a, const Value& b) {
    return a.canonical() == b.canonical();
  }

 private:
  struct Rep;
  explicit Value(std::shared_ptr<const Rep> rep);
  static std::shared_ptr<const Rep> make_rep(nlohmann::json data);
  std::shared_ptr<const Rep> rep_;
};

struct Record {
  RecordId id;
  Value value;

  /// Digest over (port, local, canonical value); stable across processes.
  std::string digest() const;

  friend bool operator==(const Record& a, const Record& b) {
    return a.id == b.id && a.value == b.value;
  }
};

Record make_record(std::string local, Value value, std::uint32_t port = 0);
Record make_text_record(std::string local, std::string text, std::uint32_t port = 0);

nlohmann::json record_to_json(const Record& r);
/// Parses {"id": ..., "value": ...}; `id` may be a string or [port, local].
Record record_from_json(const nlohmann::json& j);

/// Immutable set of records ordered by ascending (port, local) with a
/// canonical-value digest index. Duplicate ids are rejected.
class RecordSet {
 public:
  using const_iterator = std::vector<Record>::const_iterator;

  RecordSet() = default;
  explicit RecordSet(std::vector<Record> records);
  RecordSet(std::initializer_list<Record> records);

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const_iterator begin() const { return records_.begin(); }
  const_iterator end() const { return records_.end(); }
  const Record& operator[](std::size_t i) const { return records_[i]; }
  const std::vector<Record>& records() const { return records_; }

  const Record* find(const RecordId& id) const;
  std::optional<std::size_t> index_of(const RecordId& id) const;
  bool contains_id(const RecordId& id) const { return index_of(id).has_value(); }
  bool contains_value(const Value& v) const;
  /// First member (in id order) whose value equals `v`.
  const Record* find_value(const Value& v) const;

  RecordSet without(const RecordId& id) const;
  /// Members at ascending positions `indices`.
  RecordSet subset(std::span<const std::size_t> indices) const;
  bool is_subset_of(const RecordSet& other) const;  // by id

  /// SHA-256 over the ordered member digests; identifies the set content.
  std::string content_digest() const;

  std::vector<RecordId> ids() const;

  friend bool operator==(const RecordSet& a, const RecordSet& b) {
    return a.records_ == b.records_;
  }

 private:
  struct Sorted {};
  RecordSet(Sorted, std::vector<Record> records);
  void build_index();

  std::vector<Record> records_;
  std::unordered_map<std::string, std::size_t> value_index_;  // digest -> first position
};

/// True iff some member has the same canonical value as `probe`; ids are ignored.
bool contains_by_value(const RecordSet& set, const Record& probe);

/// Disjoint union of a tuple of record sets; members of input i get port i.
/// Inputs must carry port-0 ids.
RecordSet flatten_ports(std::span<const RecordSet> inputs);
/// Inverse of flatten_ports for an operator with `arity` inputs.
std::vector<RecordSet> unflatten_ports(const RecordSet& flat, std::size_t arity);

/// JSON Lines I/O for record files.
std::vector<Record> read_jsonl_records(std::istream& in);
void write_jsonl_records(std::ostream& out, const RecordSet& records);

std::ostream& operator<<(std::ostream& os, const RecordId& id);
std::ostream& operator<<(std::ostream& os, const Record& r);

}  // namespace prober
