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

#include "psc/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "psc/error.hpp"

namespace psc {

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string &key) {
    return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    });
}

template <class T>
T parse_number(const std::string &key, const std::string &text) {
    const std::string t = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ParameterError("config: key '" + key + "' has malformed number '" + t + "'");
    return value;
}

std::vector<std::string> split_list(const std::string &value) {
    std::vector<std::string> parts;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));
    return parts;
}

}  // namespace

Config Config::parse(const std::string &text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        if (!valid_key(key))
            throw ParameterError("config line " + std::to_string(lineno) + ": invalid key '" + key + "'");
        if (cfg.entries_.count(key))
            throw ParameterError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        cfg.entries_[key] = trim(t.substr(eq + 1));
    }
    return cfg;
}

Config Config::load(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void Config::set(const std::string &key, const std::string &value) {
    if (!valid_key(key)) throw ParameterError("config: invalid key '" + key + "'");
    entries_[key] = trim(value);
}

bool Config::has(const std::string &key) const { return entries_.count(key) > 0; }

std::string Config::get_string(const std::string &key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ParameterError("config: missing key '" + key + "'");
    return it->second;
}

std::string Config::get_string(const std::string &key, const std::string &fallback) const {
    return has(key) ? get_string(key) : fallback;
}

int Config::get_int(const std::string &key) const { return parse_number<int>(key, get_string(key)); }

int Config::get_int(const std::string &key, int fallback) const { return has(key) ? get_int(key) : fallback; }

double Config::get_double(const std::string &key) const { return parse_number<double>(key, get_string(key)); }

double Config::get_double(const std::string &key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

uint64_t Config::get_seed() const { return parse_number<uint64_t>("seed", get_string("seed")); }

bool Config::get_bool(const std::string &key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ParameterError("config: key '" + key + "' expects true or false, got '" + v + "'");
}

std::vector<int> Config::get_int_list(const std::string &key) const {
    std::vector<int> out;
    for (const auto &p : split_list(get_string(key))) out.push_back(parse_number<int>(key, p));
    return out;
}

std::vector<double> Config::get_double_list(const std::string &key) const {
    std::vector<double> out;
    for (const auto &p : split_list(get_string(key))) out.push_back(parse_number<double>(key, p));
    return out;
}

std::string Config::provenance() const {
    std::string out;
    for (const auto &[k, v] : entries_) out += "# " + k + " = " + v + "\n";
    return out;
}

nlohmann::json Config::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto &[k, v] : entries_) j[k] = v;
    return j;
}

}  // namespace psc
