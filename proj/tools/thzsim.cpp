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

// thzsim command-line front end. All numerics live in the library; this file
// only parses arguments, runs a scenario and commits its artifacts.

#include "thzsim/scenario.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>

namespace
{
    int run(const std::string &mode_override, const std::string &config, const std::vector<std::string> &sets,
            std::string out, unsigned jobs, bool quiet)
    {
        using namespace thz;
        try
        {
            std::vector<std::string> overrides = sets;
            if (!mode_override.empty())
                overrides.insert(overrides.begin(), "mode=\"" + mode_override + "\"");
            ScenarioConfig cfg = load_config(config, overrides);
            if (out.empty())
            {
                const char *env = std::getenv("THZSIM_OUT");
                out = env && *env ? env : "thzsim-out";
            }
            RunResult r = run_scenario(cfg, jobs);
            commit_artifacts(out, r.artifacts);
            if (!quiet)
                std::cout << to_string(cfg.mode) << ": " << r.message << " -> " << out << "\n";
            return int(r.status);
        }
        catch (const ConfigError &e)
        {
            std::cerr << error_json(ExitCode::config_error, e.key(), e.what()) << "\n";
            return int(ExitCode::config_error);
        }
        catch (const std::exception &e)
        {
            std::cerr << error_json(ExitCode::validation_failure, "", e.what()) << "\n";
            return int(ExitCode::validation_failure);
        }
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"thzsim: 300 GHz channel and human-shadowing simulation toolkit"};
    app.set_version_flag("--version", std::string(thz::toolkit_version));
    app.require_subcommand(1);

    std::string config, out;
    std::vector<std::string> sets;
    unsigned jobs = 1;
    bool quiet = false;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", config, "JSON scenario file")->check(CLI::ExistingFile);
        sub->add_option("--set", sets, "Override a config key (key=value, dotted keys for nested objects)");
        sub->add_option("--out", out, "Output directory (default: $THZSIM_OUT or ./thzsim-out)");
        sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1u, 1024u));
        sub->add_flag("-q,--quiet", quiet, "Suppress the summary line");
    };

    std::string mode;
    auto *run_cmd = app.add_subcommand("run", "Run the scenario described by --config (mode taken from the file)");
    add_common(run_cmd);
    for (const char *m : {"qd_gen", "qd_stats", "mimo_cap", "hbs_run", "hbs_doppler", "validate"})
    {
        auto *sub = app.add_subcommand(m, std::string("Run a ") + m + " scenario");
        add_common(sub);
        sub->callback([&mode, m]() { mode = m; });
    }

    std::string preset_name;
    auto *preset_cmd = app.add_subcommand("preset", "Print a built-in environment preset as JSON");
    preset_cmd->add_option("name", preset_name)->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        int rc = app.exit(e);
        return rc == 0 ? 0 : int(thz::ExitCode::config_error);
    }

    if (preset_cmd->parsed())
    {
        try
        {
            std::cout << thz::preset_to_json(thz::builtin_preset(preset_name)).dump(2) << "\n";
            return 0;
        }
        catch (const std::exception &e)
        {
            std::cerr << thz::error_json(thz::ExitCode::config_error, "name", e.what()) << "\n";
            return int(thz::ExitCode::config_error);
        }
    }
    return run(mode, config, sets, out, jobs, quiet);
}
