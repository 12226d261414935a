// Copyright 2026 The psc Authors
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

#ifndef PSC_CONFIG_HPP
#define PSC_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace psc {

/// Flat `key = value` settings. Lines starting with '#' and blank lines are ignored;
/// list values are comma separated. Keys are [a-z0-9_]+ and unique within a file.
class Config {
public:
    static Config parse(const std::string &text);
    static Config load(const std::string &path);

    /// Adds or replaces an entry (command-line overrides).
    void set(const std::string &key, const std::string &value);
    bool has(const std::string &key) const;

    std::string get_string(const std::string &key) const;
    std::string get_string(const std::string &key, const std::string &fallback) const;
    int get_int(const std::string &key) const;
    int get_int(const std::string &key, int fallback) const;
    double get_double(const std::string &key) const;
    double get_double(const std::string &key, double fallback) const;
    uint64_t get_seed() const;  // `seed` is mandatory
    bool get_bool(const std::string &key, bool fallback) const;
    std::vector<int> get_int_list(const std::string &key) const;
    std::vector<double> get_double_list(const std::string &key) const;

    const std::map<std::string, std::string> &entries() const { return entries_; }

    /// One `# key = value` line per entry, sorted by key.
    std::string provenance() const;
    nlohmann::json to_json() const;

private:
    std::map<std::string, std::string> entries_;
};

}  // namespace psc

#endif  // PSC_CONFIG_HPP
