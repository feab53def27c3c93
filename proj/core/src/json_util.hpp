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

#pragma once

// Strict JSON helpers shared by the document readers and the config loader.

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "decoy/error.hpp"
#include "decoy/mdp.hpp"

namespace decoy::detail {

using Json = nlohmann::ordered_json;

Json parse_json(const std::string& text, const std::string& source);

std::string type_name(const Json& j);

// Reads fields of one JSON object and remembers which ones were consumed so
// finish() can reject the rest.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path);

  bool has(const std::string& key) const { return j_.contains(key); }
  const Json& at(const std::string& key);  // required
  const Json* find(const std::string& key);

  double number(const std::string& key);
  double number_or(const std::string& key, double fallback);
  int integer(const std::string& key);
  int integer_or(const std::string& key, int fallback);
  std::uint64_t unsigned_or(const std::string& key, std::uint64_t fallback);
  bool boolean_or(const std::string& key, bool fallback);
  std::string string(const std::string& key);
  std::string string_or(const std::string& key, const std::string& fallback);

  std::string child(const std::string& key) const { return path_ + "." + key; }
  const std::string& path() const { return path_; }

  void finish() const;

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

[[noreturn]] void type_error(const std::string& path, const std::string& expected, const Json& got);

double as_number(const Json& j, const std::string& path);
int as_integer(const Json& j, const std::string& path);
std::uint64_t as_unsigned(const Json& j, const std::string& path);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& path);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& path);

}  // namespace decoy::detail
