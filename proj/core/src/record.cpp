// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/record.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "prober/digest.hpp"
#include "prober/error.hpp"

namespace prober {

std::string to_string(const RecordId& id) {
  if (id.port == 0) return id.local;
  return std::to_string(id.port) + ":" + id.local;
}

nlohmann::json id_to_json(const RecordId& id) {
  if (id.port == 0) return id.local;
  return nlohmann::json::array({id.port, id.local});
}

RecordId id_from_json(const nlohmann::json& j) {
  if (j.is_string()) return RecordId{0, j.get<std::string>()};
  if (j.is_array() && j.size() == 2 && j[0].is_number_unsigned() && j[1].is_string()) {
    return RecordId{j[0].get<std::uint32_t>(), j[1].get<std::string>()};
  }
  throw Error(ErrorCode::kInvalidArgument, "record id must be a string or [port, id]: " + j.dump());
}

struct Value::Rep {
  nlohmann::json data;
  std::string canonical;
  std::string digest;
};

std::shared_ptr<const Value::Rep> Value::make_rep(nlohmann::json data) {
  auto rep = std::make_shared<Value::Rep>();
  try {
    if (data.is_string()) {
      // dump() validates UTF-8.
      (void)data.dump();
      rep->canonical = "t:" + data.get<std::string>();
    } else {
      rep->canonical = "m:" + data.dump();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("value is not valid UTF-8: ") + e.what());
  }
  rep->digest = sha256_hex(rep->canonical);
  rep->data = std::move(data);
  return rep;
}

Value::Value() : Value(make_rep(nlohmann::json(""))) {}

Value::Value(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}

Value Value::text(std::string utf8) { return Value(make_rep(nlohmann::json(std::move(utf8)))); }

Value Value::object(nlohmann::json object) {
  if (!object.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "object value expected, got " + object.dump());
  }
  for (const auto& [key, v] : object.items()) {
    if (v.is_object() || v.is_array() || v.is_discarded()) {
      throw Error(ErrorCode::kInvalidArgument, "field '" + key + "' must be a scalar");
    }
  }
  return Value(make_rep(std::move(object)));
}

Value Value::from_json(const nlohmann::json& j) {
  if (j.is_string()) return text(j.get<std::string>());
  if (j.is_object()) return object(j);
  throw Error(ErrorCode::kInvalidArgument, "value must be a string or an object: " + j.dump());
}

bool Value::is_text() const { return rep_->data.is_string(); }

const std::string& Value::as_text() const {
  if (!is_text()) throw Error(ErrorCode::kInvalidArgument, "value is not text");
  return rep_->data.get_ref<const std::string&>();
}

const nlohmann::json& Value::json() const { return rep_->data; }

const nlohmann::json* Value::field(const std::string& name) const {
  if (!rep_->data.is_object()) return nullptr;
  auto it = rep_->data.find(name);
  return it == rep_->data.end() ? nullptr : &*it;
}

const std::string& Value::canonical() const { return rep_->canonical; }
const std::string& Value::digest() const { return rep_->digest; }

std::string Record::digest() const {
  Sha256 h;
  h.update(std::to_string(id.port)).update("\x1f").update(id.local).update("\x1f").update(value.canonical());
  return h.hex_digest();
}

Record make_record(std::string local, Value value, std::uint32_t port) {
  return Record{RecordId{port, std::move(local)}, std::move(value)};
}

Record make_text_record(std::string local, std::string text, std::uint32_t port) {
  return make_record(std::move(local), Value::text(std::move(text)), port);
}

nlohmann::json record_to_json(const Record& r) {
  return nlohmann::json{{"id", id_to_json(r.id)}, {"value", r.value.json()}};
}

Record record_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("id") || !j.contains("value")) {
    throw Error(ErrorCode::kInvalidArgument, "record must be an object with 'id' and 'value'");
  }
  return Record{id_from_json(j.at("id")), Value::from_json(j.at("value"))};
}

RecordSet::RecordSet(std::vector<Record> records) {
  std::sort(records.begin(), records.end(),
            [](const Record& a, const Record& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].id == records[i - 1].id) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate record id " + to_string(records[i].id));
    }
  }
  records_ = std::move(records);
  build_index();
}

RecordSet::RecordSet(std::initializer_list<Record> records)
    : RecordSet(std::vector<Record>(records)) {}

RecordSet::RecordSet(Sorted, std::vector<Record> records) : records_(std::move(records)) {
  build_index();
}

void RecordSet::build_index() {
  value_index_.clear();
  value_index_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    value_index_.emplace(records_[i].value.digest(), i);
  }
}

std::optional<std::size_t> RecordSet::index_of(const RecordId& id) const {
  auto it = std::lower_bound(records_.begin(), records_.end(), id,
                             [](const Record& r, const RecordId& key) { return r.id < key; });
  if (it == records_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - records_.begin());
}

const Record* RecordSet::find(const RecordId& id) const {
  auto idx = index_of(id);
  return idx ? &records_[*idx] : nullptr;
}

bool RecordSet::contains_value(const Value& v) const {
  auto it = value_index_.find(v.digest());
  // Digest equality is checked against the canonical bytes to rule out collisions.
  return it != value_index_.end() && records_[it->second].value == v;
}

const Record* RecordSet::find_value(const Value& v) const {
  auto it = value_index_.find(v.digest());
  if (it == value_index_.end() || !(records_[it->second].value == v)) return nullptr;
  return &records_[it->second];
}

RecordSet RecordSet::without(const RecordId& id) const {
  std::vector<Record> out;
  out.reserve(records_.size());
  for (const auto& r : records_) {
    if (r.id != id) out.push_back(r);
  }
  return RecordSet(Sorted{}, std::move(out));
}

RecordSet RecordSet::subset(std::span<const std::size_t> indices) const {
  std::vector<Record> out;
  out.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= records_.size() || (i > 0 && indices[i] <= indices[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "subset indices must be ascending and in range");
    }
    out.push_back(records_[indices[i]]);
  }
  return RecordSet(Sorted{}, std::move(out));
}

bool RecordSet::is_subset_of(const RecordSet& other) const {
  return std::all_of(records_.begin(), records_.end(),
                     [&](const Record& r) { return other.contains_id(r.id); });
}

std::string RecordSet::content_digest() const {
  Sha256 h;
  for (const auto& r : records_) {
    h.update(std::to_string(r.id.port)).update("\x1f").update(r.id.local).update("\x1f");
    h.update(r.value.digest()).update("\x1e");
  }
  return h.hex_digest();
}

std::vector<RecordId> RecordSet::ids() const {
  std::vector<RecordId> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.id);
  return out;
}

bool contains_by_value(const RecordSet& set, const Record& probe) {
  return set.contains_value(probe.value);
}

RecordSet flatten_ports(std::span<const RecordSet> inputs) {
  std::vector<Record> out;
  for (std::size_t port = 0; port < inputs.size(); ++port) {
    for (const auto& r : inputs[port]) {
      if (r.id.port != 0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "cannot flatten record " + to_string(r.id) + " that already carries a port tag");
      }
      out.push_back(Record{RecordId{static_cast<std::uint32_t>(port), r.id.local}, r.value});
    }
  }
  return RecordSet(std::move(out));
}

std::vector<RecordSet> unflatten_ports(const RecordSet& flat, std::size_t arity) {
  std::vector<std::vector<Record>> parts(arity);
  for (const auto& r : flat) {
    if (r.id.port >= arity) {
      throw Error(ErrorCode::kInvalidArgument,
                  "record " + to_string(r.id) + " has port beyond arity " + std::to_string(arity));
    }
    parts[r.id.port].push_back(Record{RecordId{0, r.id.local}, r.value});
  }
  std::vector<RecordSet> out;
  out.reserve(arity);
  for (auto& p : parts) out.emplace_back(std::move(p));
  return out;
}

std::vector<Record> read_jsonl_records(std::istream& in) {
  std::vector<Record> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidArgument, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_jsonl_records(std::ostream& out, const RecordSet& records) {
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

std::ostream& operator<<(std::ostream& os, const RecordId& id) { return os << to_string(id); }

std::ostream& operator<<(std::ostream& os, const Record& r) {
  return os << to_string(r.id) << "=" << r.value.json().dump();
}

}  // namespace prober
