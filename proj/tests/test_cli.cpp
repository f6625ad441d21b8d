// SPDX-License-Identifier: Apache-2.0
//
// thzsim - short-range 300 GHz channel and human-shadowing simulation toolkit
// Copyright (C) 2026 The thzsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <catch2/catch_amalgamated.hpp>

#include "thzsim/scenario.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace thz;
namespace fs = std::filesystem;

namespace
{
    fs::path scratch(const std::string &name)
    {
        auto d = fs::temp_directory_path() / ("thzsim_test_cli_" + name);
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }

    int cli(const std::string &args)
    {
        std::string cmd = std::string("\"") + THZSIM_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    }

    std::string slurp(const fs::path &p)
    {
        std::ifstream f(p, std::ios::binary);
        std::ostringstream s;
        s << f.rdbuf();
        return s.str();
    }

    void write(const fs::path &p, const std::string &text) { std::ofstream(p) << text; }
} // namespace

TEST_CASE("CLI - Config overrides")
{
    nlohmann::json doc = {{"mode", "qd_gen"}};
    apply_override(doc, "preset=corridor");
    apply_override(doc, "seed=12");
    apply_override(doc, "tx=[3,0,1.6]");
    apply_override(doc, "tolerances.babinet=0.01");
    CHECK(doc["preset"] == "corridor");
    CHECK(doc["seed"] == 12);
    CHECK(doc["tx"].size() == 3);
    CHECK(doc["tolerances"]["babinet"] == 0.01);
    CHECK_THROWS_AS(apply_override(doc, "novalue"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "=3"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "seed.x=1"), ConfigError);
}

TEST_CASE("CLI - Schema checks")
{
    auto key_of = [](const nlohmann::json &doc) {
        try
        {
            parse_config(doc);
        }
        catch (const ConfigError &e)
        {
            return e.key();
        }
        return std::string("<none>");
    };
    CHECK(key_of({{"mode", "qd_gen"}, {"preset", "corridor"}}) == "<none>");
    CHECK(key_of({{"mode", "qd_gen"}}) == "preset");
    CHECK(key_of({{"preset", "corridor"}}) == "mode");
    CHECK(key_of({{"mode", "qd_gen"}, {"preset", "corridor"}, {"sedd", 1}}) == "sedd");
    CHECK(key_of({{"mode", "qd_gen"}, {"preset", "corridor"}, {"seed", -1}}) == "seed");
    CHECK(key_of({{"mode", "qd_gen"}, {"preset", "corridor"}, {"fs_hz", 100.0}}) == "fs_hz");
    CHECK(key_of({{"mode", "qd_gen"}, {"preset", "corridor"}, {"tx", {1, 2}}}) == "tx");
    CHECK(key_of({{"mode", "hbs_run"}}) == "frames");
    CHECK(key_of({{"mode", "hbs_run"}, {"frames", "a.csv"}, {"phantom", {{"kind", "box"}}}}) == "frames");
    CHECK(key_of({{"mode", "hbs_run"}, {"phantom", {{"kind", "robot"}}}}) == "phantom.kind");
    CHECK(key_of({{"mode", "hbs_run"}, {"phantom", {{"kind", "box"}, {"colour", 1}}}}) == "phantom.colour");
    CHECK(key_of({{"mode", "hbs_run"}, {"phantom", {{"kind", "box"}}}, {"screen_model", "disk"}}) == "screen_model");
    CHECK(key_of({{"mode", "hbs_doppler"}, {"phantom", {{"kind", "box"}}}, {"overlap", 1.0}}) == "overlap");
    CHECK(key_of({{"mode", "validate"}, {"tolerances", {{"lit", 1}}}}) == "tolerances.lit");
    CHECK_THROWS_AS(scenario_mode_from_string("train"), ConfigError);
}

TEST_CASE("CLI - Manifest and checksums")
{
    // FIPS 180-2 test vector
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

    auto cfg = parse_config({{"mode", "qd_gen"}, {"preset", "corridor"}, {"seed", 4}});
    auto a = run_scenario(cfg), b = run_scenario(cfg);
    REQUIRE(a.artifacts.size() == 3);
    CHECK(a.artifacts.back().name == "manifest.json");
    for (std::size_t k = 0; k < a.artifacts.size(); ++k)
        CHECK(a.artifacts[k].content == b.artifacts[k].content);
    auto m = nlohmann::json::parse(a.artifacts.back().content);
    CHECK(m["status"] == 0);
    CHECK(m["artifacts"][0]["sha256"] == sha256_hex(a.artifacts[0].content));
    CHECK(!m.contains("timestamp"));
}

TEST_CASE("CLI - Deterministic runs")
{
    auto d = scratch("det");
    const std::string args = " --set preset=conference_medium --set seed=9 --set seeds=20 -q";
    REQUIRE(cli("qd_stats --out \"" + (d / "a").string() + "\"" + args) == 0);
    REQUIRE(cli("qd_stats --jobs 3 --out \"" + (d / "b").string() + "\"" + args) == 0);
    std::size_t files = 0;
    for (const auto &e : fs::directory_iterator(d / "a"))
    {
        ++files;
        CHECK(slurp(e.path()) == slurp(d / "b" / e.path().filename()));
    }
    CHECK(files == 7);
    CHECK(!fs::exists(d / "a" / ".thzsim-staging"));

    // a config file plus overrides gives the same result as overrides alone
    write(d / "cfg.json", R"({"mode": "qd_stats", "preset": "conference_medium", "seed": 1, "seeds": 20})");
    REQUIRE(cli("run --config \"" + (d / "cfg.json").string() + "\" --set seed=9 -q --out \"" + (d / "c").string() + "\"") == 0);
    CHECK(slurp(d / "a" / "summary.json") == slurp(d / "c" / "summary.json"));
    fs::remove_all(d);
}

TEST_CASE("CLI - Exit codes and atomic outputs")
{
    auto d = scratch("codes");
    auto out = [&](const char *n) { return " --out \"" + (d / n).string() + "\""; };

    // configuration errors: 2, nothing written
    CHECK(cli("qd_gen --set preset=corridor --set bogus=1" + out("e1")) == 2);
    CHECK(!fs::exists(d / "e1"));
    CHECK(cli("qd_gen --set preset=atrium" + out("e2")) == 2);
    CHECK(!fs::exists(d / "e2"));
    CHECK(cli("hbs_run --set frames=/nonexistent/walk.csv" + out("e3")) == 2);
    CHECK(!fs::exists(d / "e3"));
    CHECK(cli("frobnicate") == 2);
    CHECK(cli("qd_gen --jobs 0 --set preset=corridor" + out("e4")) == 2);

    // body outside the link: unusable input, nothing written
    write(d / "far.csv", "t_s,point_id,x,y,z\n0,0,-5,0,1\n0,1,-5,0.1,1\n0.1,0,-5,0,1\n0.1,1,-5,0.1,1\n");
    CHECK(cli("hbs_run --set frames=\"" + (d / "far.csv").string() + "\"" + out("e5")) == 2);
    CHECK(!fs::exists(d / "e5"));

    // failed validation: 3, with the report
    CHECK(cli("validate --set tolerances.knife_edge_db=1e-15" + out("v")) == 3);
    REQUIRE(fs::exists(d / "v" / "validation.json"));
    auto v = nlohmann::json::parse(slurp(d / "v" / "validation.json"));
    CHECK(nlohmann::json::parse(slurp(d / "v" / "manifest.json"))["status"] == 3);
    CHECK(v.dump().find("false") != std::string::npos);

    CHECK(cli("preset corridor") == 0);
    CHECK(cli("preset atrium") == 2);
    CHECK(cli("--version") == 0);
    fs::remove_all(d);
}

TEST_CASE("CLI - Failed commit leaves no partial output")
{
    auto d = scratch("commit");
    // the second artifact cannot be written (its parent does not exist)
    std::vector<Artifact> arts = {{"a.csv", "1\n"}, {"missing/b.csv", "2\n"}};
    CHECK_THROWS(commit_artifacts(d / "out", arts));
    CHECK(!fs::exists(d / "out" / "a.csv"));
    CHECK(!fs::exists(d / "out" / ".thzsim-staging"));

    commit_artifacts(d / "out", {{"a.csv", "1\n"}});
    CHECK(slurp(d / "out" / "a.csv") == "1\n");
    fs::remove_all(d);
}

TEST_CASE("CLI - Default output directory")
{
    auto d = scratch("env");
    std::string cmd = "cd \"" + d.string() + "\" && THZSIM_OUT=\"" + (d / "envout").string() + "\" \"" + THZSIM_CLI_PATH +
                      "\" qd_gen --set preset=corridor -q >/dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(d / "envout" / "cir.json"));
    cmd = "cd \"" + d.string() + "\" && env -u THZSIM_OUT \"" + THZSIM_CLI_PATH + "\" qd_gen --set preset=corridor -q >/dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(d / "thzsim-out" / "manifest.json"));
    fs::remove_all(d);
}
