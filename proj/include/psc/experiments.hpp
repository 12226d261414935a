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

#ifndef PSC_EXPERIMENTS_HPP
#define PSC_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include "json.hpp"
#include "psc/config.hpp"

namespace psc {

inline constexpr const char *kVersion = "0.1.0";

/// CSV text (provenance comments, header row, data rows) and a JSON document
/// holding the same rows plus fits. Both depend only on the config.
struct ExperimentOutput {
    std::string name;
    std::string csv;
    nlohmann::json json;
};

/// fig2a, fig2b, fig3a, fig3c, fig4a, fig4b.
const std::vector<std::string> &experiment_names();

/// Runs one figure driver. Missing keys fall back to the desk-scale defaults
/// shipped in configs/; `seed` is mandatory. Independent grid points run on
/// up to `workers` threads.
ExperimentOutput run_experiment(const std::string &name, const Config &config, int workers = 0);

/// `# experiment`, `# version` and the config echo, one comment line each.
std::string provenance_header(const std::string &name, const Config &config);

}  // namespace psc

#endif  // PSC_EXPERIMENTS_HPP
