// Copyright 2026 The Decoy Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "json_util.hpp"

#include <cmath>
#include <limits>

namespace decoy::detail {

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Translate the byte offset into line:column for humans.
    const std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorCode::kParseError,
                source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": malformed JSON");
  }
}

std::string type_name(const Json& j) { return j.type_name(); }

void type_error(const std::string& path, const std::string& expected, const Json& got) {
  throw Error(ErrorCode::kParseError, path + ": expected " + expected + ", got " + type_name(got));
}

double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) type_error(path, "number", j);
  return j.get<double>();
}

int as_integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) type_error(path, "integer", j);
  const auto v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw Error(ErrorCode::kParseError, path + ": integer out of range");
  }
  return static_cast<int>(v);
}

std::uint64_t as_unsigned(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) type_error(path, "integer", j);
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  const auto v = j.get<std::int64_t>();
  if (v < 0) throw Error(ErrorCode::kParseError, path + ": expected a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

ObjectReader::ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) type_error(path_, "object", j_);
}

const Json& ObjectReader::at(const std::string& key) {
  if (!j_.contains(key)) throw Error(ErrorCode::kParseError, child(key) + ": missing required field");
  seen_.insert(key);
  return j_.at(key);
}

const Json* ObjectReader::find(const std::string& key) {
  if (!j_.contains(key)) return nullptr;
  seen_.insert(key);
  return &j_.at(key);
}

double ObjectReader::number(const std::string& key) { return as_number(at(key), child(key)); }

double ObjectReader::number_or(const std::string& key, double fallback) {
  const Json* j = find(key);
  return j ? as_number(*j, child(key)) : fallback;
}

int ObjectReader::integer(const std::string& key) { return as_integer(at(key), child(key)); }

int ObjectReader::integer_or(const std::string& key, int fallback) {
  const Json* j = find(key);
  return j ? as_integer(*j, child(key)) : fallback;
}

std::uint64_t ObjectReader::unsigned_or(const std::string& key, std::uint64_t fallback) {
  const Json* j = find(key);
  return j ? as_unsigned(*j, child(key)) : fallback;
}

bool ObjectReader::boolean_or(const std::string& key, bool fallback) {
  const Json* j = find(key);
  if (!j) return fallback;
  if (!j->is_boolean()) type_error(child(key), "boolean", *j);
  return j->get<bool>();
}

std::string ObjectReader::string(const std::string& key) {
  const Json& j = at(key);
  if (!j.is_string()) type_error(child(key), "string", j);
  return j.get<std::string>();
}

std::string ObjectReader::string_or(const std::string& key, const std::string& fallback) {
  return has(key) ? string(key) : fallback;
}

void ObjectReader::finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (!seen_.count(it.key())) throw Error(ErrorCode::kParseError, child(it.key()) + ": unknown field");
  }
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Matrix matrix_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) type_error(path, "non-empty array of rows", j);
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) type_error(path + "[0]", "non-empty array", j[0]);
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array()) type_error(row_path, "array", j[i]);
    if (j[i].size() != cols) throw Error(ErrorCode::kParseError, row_path + ": ragged row");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          as_number(j[i][c], row_path + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) type_error(path, "non-empty array", j);
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = as_number(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

}  // namespace decoy::detail
