// SPDX-License-Identifier: Apache-2.0
//
// dmasim: admittance-network simulation of DMA, hybrid and full-digital MIMO downlink
// Copyright (C) 2026 The dmasim authors
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

#include "dmasim/harness/config.hpp"
#include "dmasim/harness/gradcheck.hpp"
#include "dmasim/harness/output.hpp"
#include "dmasim/harness/runner.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace
{
    using namespace dmasim;
    using namespace dmasim::harness;

    constexpr int exit_config = 1;
    constexpr int exit_runtime = 2;

    struct RunArgs
    {
        std::string config;
        std::string scenario;
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> trials;
        std::string out;
        std::optional<std::size_t> parallel;
        std::string format;
    };

    struct SweepArgs
    {
        std::size_t M = 0, N = 0, S = 0;
        std::vector<std::size_t> epw;
        std::vector<double> spacing;
        double waveguide_spacing = 1.0;
        std::vector<std::string> arch{"fd", "hybrid", "dma"};
        std::vector<std::string> loss{"with_loss"};
        std::vector<std::string> coupling{"full"};
        double delta_db = 13.0;
        double r_s = 0.0;
        std::size_t trials = 200;
        std::uint64_t seed = 1;
        std::string out;
        std::size_t parallel = 0;
        std::string format = "csv";
    };

    void emit(const ExperimentConfig &cfg, const std::vector<TrialRecord> &records)
    {
        const std::string hash = hash_hex(config_hash(cfg));
        if (cfg.out.empty())
            write_results(std::cout, records, cfg.format, hash);
        else
            emit_results(records, cfg.format, cfg.out, hash);
    }

    void execute(const ExperimentConfig &cfg)
    {
        if (cfg.scenario == Scenario::Fig3Match)
        {
            const auto table = match_fd_search(cfg);
            if (cfg.out.empty())
                write_match_table(std::cout, table);
            else
            {
                std::ofstream f(cfg.out, std::ios::binary | std::ios::trunc);
                if (!f)
                    throw Error(ErrorCode::Io, "cannot open '" + cfg.out + "' for writing");
                write_match_table(f, table);
            }
            return;
        }
        const auto t0 = std::chrono::steady_clock::now();
        const auto records = run_scenario(cfg);
        emit(cfg, records);
        std::size_t failed = 0;
        for (const auto &r : records)
            failed += !r.error.empty();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::fprintf(stderr, "%zu rows (%zu with errors) in %.1f s\n", records.size(), failed, secs);
    }

    int run_command(const RunArgs &a)
    {
        Overrides o;
        if (!a.scenario.empty())
            o.scenario = parse_scenario(a.scenario);
        o.seed = a.seed;
        o.trials = a.trials;
        if (!a.out.empty())
            o.out = a.out;
        o.parallel = a.parallel;
        if (!a.format.empty())
            o.format = parse_format(a.format);
        std::optional<nlohmann::json> file;
        if (!a.config.empty())
            file = read_config_file(a.config);
        const ExperimentConfig cfg = resolve_config(file, o);
        execute(cfg);
        return 0;
    }

    int sweep_command(const SweepArgs &a)
    {
        nlohmann::json j;
        j["scenario"] = "custom";
        j["M"] = a.M;
        j["N"] = a.N;
        j["S"] = a.S;
        j["elements_per_waveguide"] = a.epw;
        j["element_spacing_wl"] = a.spacing;
        j["waveguide_spacing_wl"] = a.waveguide_spacing;
        j["architectures"] = a.arch;
        j["loss_modes"] = a.loss;
        j["coupling_modes"] = a.coupling;
        j["delta_db"] = a.delta_db;
        j["r_s"] = a.r_s;
        j["trials"] = a.trials;
        j["master_seed"] = a.seed;
        j["parallel"] = a.parallel;
        j["format"] = a.format;
        if (!a.out.empty())
            j["out"] = a.out;
        const ExperimentConfig cfg = resolve_config(j, {});
        execute(cfg);
        return 0;
    }

    int check_grad_command(std::size_t instances, std::uint64_t seed)
    {
        const auto t0 = std::chrono::steady_clock::now();
        const GradCheckResult r = gradient_check(instances, seed);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("instances: %zu\nmax relative error: %.3e\nthreshold: 1e-06\ntime: %.2f s\n", instances,
                    r.max_error, secs);
        return r.max_error < 1e-6 ? 0 : exit_runtime;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"dmasim: DMA, hybrid and full-digital downlink simulation"};
    app.require_subcommand(1);

    RunArgs run;
    auto *run_cmd = app.add_subcommand("run", "Monte Carlo run of a preset or config file");
    run_cmd->add_option("--config", run.config, "json config file");
    run_cmd->add_option("--scenario", run.scenario, "preset: fig2, fig3, fig4, custom");
    run_cmd->add_option("--seed", run.seed, "master seed");
    run_cmd->add_option("--trials", run.trials, "trials per sweep point");
    run_cmd->add_option("--out", run.out, "output path (default stdout)");
    run_cmd->add_option("--parallel", run.parallel, "worker threads");
    run_cmd->add_option("--format", run.format, "csv or jsonl");

    std::size_t instances = 20;
    std::uint64_t grad_seed = 1;
    auto *grad_cmd = app.add_subcommand("check-grad", "audit the DMA gradient against finite differences");
    grad_cmd->add_option("--instances", instances, "random instances")->check(CLI::PositiveNumber);
    grad_cmd->add_option("--seed", grad_seed, "instance seed");

    SweepArgs sw;
    auto *sweep_cmd = app.add_subcommand("sweep", "custom parameter grid");
    sweep_cmd->add_option("--users,-M", sw.M, "users")->required();
    sweep_cmd->add_option("--chains,-N", sw.N, "waveguides / RF chains")->required();
    sweep_cmd->add_option("--hybrid-chains,-S", sw.S, "hybrid RF chains (default N)");
    sweep_cmd->add_option("--epw", sw.epw, "elements per waveguide list")->required();
    sweep_cmd->add_option("--spacing", sw.spacing, "element spacing list (wavelengths)")->required();
    sweep_cmd->add_option("--waveguide-spacing", sw.waveguide_spacing, "waveguide spacing (wavelengths)");
    sweep_cmd->add_option("--arch", sw.arch, "architectures: fd hybrid dma");
    sweep_cmd->add_option("--loss", sw.loss, "loss modes: with_loss no_loss compensated");
    sweep_cmd->add_option("--coupling", sw.coupling, "coupling modes: full no_air no_coupling");
    sweep_cmd->add_option("--delta-db", sw.delta_db, "nominal SNR in dB");
    sweep_cmd->add_option("--r-s", sw.r_s, "element parasitic resistance");
    sweep_cmd->add_option("--trials", sw.trials, "trials per point");
    sweep_cmd->add_option("--seed", sw.seed, "master seed");
    sweep_cmd->add_option("--out", sw.out, "output path (default stdout)");
    sweep_cmd->add_option("--parallel", sw.parallel, "worker threads");
    sweep_cmd->add_option("--format", sw.format, "csv or jsonl");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return exit_config;
    }

    try
    {
        if (*run_cmd)
            return run_command(run);
        if (*grad_cmd)
            return check_grad_command(instances, grad_seed);
        if (*sweep_cmd)
            return sweep_command(sw);
    }
    catch (const Error &e)
    {
        std::fprintf(stderr, "error (%s): %s\n", std::string(to_string(e.code())).c_str(), e.what());
        return e.code() == ErrorCode::Config ? exit_config : exit_runtime;
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_runtime;
    }
    return exit_runtime;
}
