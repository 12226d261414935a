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

#include <gtest/gtest.h>

#include "psc/config.hpp"
#include "psc/error.hpp"
#include "psc/experiments.hpp"

namespace psc {
namespace {

TEST(Config, ParsesValuesListsAndComments) {
    const Config c = Config::parse("# comment\nseed = 7\n\nn = 8, 10\np1 = 5e-4\nname = fig4b  \nflag = true\n");
    EXPECT_EQ(c.get_seed(), 7u);
    EXPECT_EQ(c.get_int_list("n"), (std::vector<int>{8, 10}));
    EXPECT_DOUBLE_EQ(c.get_double("p1"), 5e-4);
    EXPECT_EQ(c.get_string("name"), "fig4b");
    EXPECT_TRUE(c.get_bool("flag", false));
    EXPECT_EQ(c.get_int("missing", 3), 3);
}

TEST(Config, RejectsMalformedInput) {
    EXPECT_THROW(Config::parse("seed 7\n"), ParameterError);
    EXPECT_THROW(Config::parse("seed = 1\nseed = 2\n"), ParameterError);
    EXPECT_THROW(Config::parse("Bad-Key = 1\n"), ParameterError);
    EXPECT_THROW(Config::parse("n = 8x\n").get_int("n"), ParameterError);
    EXPECT_THROW(Config::parse("n = 8\n").get_seed(), ParameterError);
    EXPECT_THROW(Config::parse("n = 8\n").get_int("m"), ParameterError);
}

TEST(Config, OverridesAndProvenance) {
    Config c = Config::parse("seed = 1\nn = 8\n");
    c.set("n", "12");
    EXPECT_EQ(c.get_int("n"), 12);
    EXPECT_EQ(c.provenance(), "# n = 12\n# seed = 1\n");
    EXPECT_EQ(c.to_json()["n"], "12");
}

TEST(Experiments, RequireSeedAndKnownName) {
    EXPECT_THROW(run_experiment("fig4b", Config::parse("n = 10\n")), ParameterError);
    EXPECT_THROW(run_experiment("fig9", Config::parse("seed = 1\n")), ParameterError);
    EXPECT_EQ(experiment_names().size(), 6u);
}

TEST(Experiments, OutputEmbedsProvenance) {
    const Config c = Config::parse("seed = 3\nn = 64\nbw_m = 2, 3\nps_m = 1\nps_l = 4, 8\nsamples = 50\n");
    const ExperimentOutput out = run_experiment("fig4b", c, 1);
    EXPECT_EQ(out.csv.rfind("# experiment = fig4b\n# version = ", 0), 0u);
    EXPECT_NE(out.csv.find("# seed = 3\n"), std::string::npos);
    EXPECT_NE(out.csv.find("layout_id,family,n,m,l,q,depth,p1,samples,eta_over_n,stderr\n"), std::string::npos);
    EXPECT_EQ(out.json["seed"], 3u);
    EXPECT_EQ(out.json["version"], kVersion);
    EXPECT_EQ(out.json["rows"].size(), 4u);
}

TEST(Experiments, PhaseScanIsWorkerCountIndependent) {
    const Config c = Config::parse(
        "seed = 2\nn = 4\nm = 1, 2\nl = 2, 3\np1 = 0, 0.01\np2 = 0, 0.01\nfit_grid = 0, 0.01\nrestarts = 2\n");
    const ExperimentOutput a = run_experiment("fig3c", c, 1);
    const ExperimentOutput b = run_experiment("fig3c", c, 3);
    EXPECT_EQ(a.csv, b.csv);
    EXPECT_EQ(a.json.dump(), b.json.dump());
}

}  // namespace
}  // namespace psc
