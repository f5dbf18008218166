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
#include "dmasim/harness/output.hpp"
#include "dmasim/harness/runner.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dmasim;
using namespace dmasim::harness;

namespace
{
    ExperimentConfig tiny(std::size_t trials = 2)
    {
        nlohmann::json j = {{"scenario", "custom"},
                            {"M", 2},
                            {"N", 2},
                            {"elements_per_waveguide", {2, 3}},
                            {"element_spacing_wl", {0.5}},
                            {"architectures", {"fd", "hybrid", "dma"}},
                            {"loss_modes", {"with_loss", "no_loss", "compensated"}},
                            {"coupling_modes", {"full", "no_air"}},
                            {"trials", trials},
                            {"master_seed", 3},
                            {"hybrid_max_iters", 300}};
        return resolve_config(j, {});
    }

    std::string to_csv(const std::vector<TrialRecord> &rs)
    {
        std::ostringstream os;
        write_results(os, rs, OutputFormat::Csv, "");
        return os.str();
    }

    std::filesystem::path temp_path(const std::string &name)
    {
        return std::filesystem::temp_directory_path() / ("dmasim_test_" + name);
    }
}

TEST(Config, PresetsEncodeScenarioParameters)
{
    const auto f2 = preset(Scenario::Fig2Sweep);
    EXPECT_EQ(f2.M, 5u);
    EXPECT_EQ(f2.N, 6u);
    EXPECT_EQ(f2.element_spacing_wl, std::vector<double>{0.5});
    EXPECT_EQ(f2.waveguide_spacing_wl, 1.0);
    EXPECT_EQ(f2.delta_db, 13.0);
    EXPECT_EQ(f2.architectures.size(), 3u);
    EXPECT_EQ(f2.loss_modes.size(), 3u);
    const auto f4 = preset(Scenario::Fig4Coupling);
    EXPECT_EQ(f4.M, 4u);
    EXPECT_EQ(f4.N, 4u);
    EXPECT_EQ(f4.element_spacing_wl, (std::vector<double>{0.5, 0.2}));
    EXPECT_EQ(f4.coupling_modes.size(), 3u);
    const auto f3 = preset(Scenario::Fig3Match);
    EXPECT_EQ(f3.fd_rows, 6u);
    EXPECT_EQ(f3.N, 6u);
    EXPECT_EQ(f3.fd_column_spacing_wl, 5.0);
    EXPECT_EQ(f2.trials, 200u);
}

TEST(Config, DefaultPowerCalibratesReferenceLink)
{
    const auto c = preset(Scenario::Fig2Sweep);
    EXPECT_DOUBLE_EQ(c.budget().P_max, reference_transmit_power(c.constants(), 1.0));
    EXPECT_NEAR(c.delta(), std::pow(10.0, 1.3), 1e-12);
}

TEST(Config, UnknownKeyIsError)
{
    nlohmann::json j = {{"scenario", "fig2"}, {"trails", 4}};
    try
    {
        resolve_config(j, {});
        FAIL();
    }
    catch (const Error &e)
    {
        EXPECT_EQ(e.code(), ErrorCode::Config);
        EXPECT_NE(std::string(e.what()).find("trails"), std::string::npos);
    }
}

TEST(Config, MissingFieldIsNamed)
{
    try
    {
        resolve_config(nlohmann::json{{"scenario", "custom"}, {"M", 2}}, {});
        FAIL();
    }
    catch (const Error &e)
    {
        EXPECT_NE(std::string(e.what()).find("'N'"), std::string::npos) << e.what();
    }
    try
    {
        resolve_config(std::nullopt, {});
        FAIL();
    }
    catch (const Error &e)
    {
        EXPECT_NE(std::string(e.what()).find("'scenario'"), std::string::npos);
    }
}

TEST(Config, WrongTypesAndValuesRejected)
{
    EXPECT_THROW(resolve_config(nlohmann::json{{"scenario", "fig2"}, {"trials", "many"}}, {}), Error);
    EXPECT_THROW(resolve_config(nlohmann::json{{"scenario", "fig2"}, {"trials", 0}}, {}), Error);
    EXPECT_THROW(resolve_config(nlohmann::json{{"scenario", "fig2"}, {"element_spacing_wl", {-0.5}}}, {}), Error);
    EXPECT_THROW(resolve_config(nlohmann::json{{"scenario", "fig2"}, {"architectures", {"analog"}}}, {}), Error);
    EXPECT_THROW(resolve_config(nlohmann::json{{"scenario", "fig9"}}, {}), Error);
    EXPECT_THROW(resolve_config(nlohmann::json{{"scenario", "fig2"}, {"M", 7}}, {}), Error);
}

TEST(Config, OverridesTakePrecedence)
{
    Overrides o;
    o.trials = 7;
    o.seed = 11;
    o.scenario = Scenario::Fig4Coupling;
    const auto c = resolve_config(nlohmann::json{{"scenario", "fig2"}, {"trials", 3}}, o);
    EXPECT_EQ(c.scenario, Scenario::Fig4Coupling);
    EXPECT_EQ(c.trials, 7u);
    EXPECT_EQ(c.master_seed, 11u);
}

TEST(Config, HashIgnoresIoSettings)
{
    auto a = tiny();
    auto b = a;
    b.out = "elsewhere.csv";
    b.parallel = 8;
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.trials = 9;
    EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(MonotoneSearch, FindsExactThreshold)
{
    for (std::size_t threshold : {1u, 2u, 7u, 31u, 64u})
    {
        int calls = 0;
        auto f = [&](std::size_t n) {
            ++calls;
            return n >= threshold ? 1.0 + 0.01 * static_cast<double>(n) : 0.001 * static_cast<double>(n);
        };
        const auto got = monotone_search(f, 1.0, 1, 64);
        ASSERT_TRUE(got.has_value());
        EXPECT_EQ(*got, threshold);
        EXPECT_LE(calls, 9);
    }
    EXPECT_FALSE(monotone_search([](std::size_t) { return 0.0; }, 1.0, 1, 10).has_value());
    EXPECT_FALSE(monotone_search([](std::size_t) { return 5.0; }, 1.0, 4, 3).has_value());
}

TEST(Runner, RowCountAndColumns)
{
    const auto cfg = tiny();
    const auto rows = run_scenario(cfg);
    // per point x trial: fd + hybrid + 2 couplings x 3 losses
    EXPECT_EQ(rows.size(), 2u * 2u * 8u);
    for (const auto &r : rows)
    {
        EXPECT_TRUE(r.error.empty()) << r.architecture << " " << r.error;
        EXPECT_EQ(r.per_user_rate.size(), 2u);
        if (r.architecture == "dma")
        {
            EXPECT_EQ(r.N, 2u);
            EXPECT_LE(r.P_t, r.P_s * (1 + 1e-12));
        }
        else
            EXPECT_EQ(r.N, r.L);
    }
}

TEST(Runner, ScheduleIndependent)
{
    auto cfg = tiny(3);
    cfg.parallel = 1;
    const std::string one = to_csv(run_scenario(cfg));
    cfg.parallel = 4;
    EXPECT_EQ(one, to_csv(run_scenario(cfg)));
}

TEST(Runner, SingleTrialReproducesFromRow)
{
    const auto cfg = tiny(2);
    const auto rows = run_scenario(cfg);
    const auto &last = rows.back();
    const auto again = rerun_trial(cfg, last.L / last.N, last.spacing_wl, last.trial_index, last.seed);
    ASSERT_EQ(again.size(), 8u);
    EXPECT_EQ(csv_row(again.back()), csv_row(last));
}

TEST(Runner, AblatedDesignsMeetBudgetOnTrueModel)
{
    const auto cfg = tiny(1);
    for (const auto &r : run_scenario(cfg))
    {
        if (r.architecture != "dma")
            continue;
        const double pmax = cfg.budget().P_max;
        if (r.loss_mode == "no_loss")
            EXPECT_NEAR(r.P_t, pmax, 1e-9 * pmax);
        else
            EXPECT_NEAR(r.P_s, pmax, 1e-9 * pmax);
    }
}

TEST(Runner, TrialErrorsAreRecorded)
{
    // two users on a single waveguide cannot be zero-forced by the DMA
    auto j = nlohmann::json{{"scenario", "custom"},      {"M", 1},          {"N", 1},
                            {"elements_per_waveguide", {2}}, {"element_spacing_wl", {0.5}},
                            {"architectures", {"dma"}},     {"trials", 1}};
    auto cfg = resolve_config(j, {});
    cfg.M = 2;
    const auto ctx = make_point(cfg, {1, 2, 0.5, 1});
    const auto rows = run_trial(ctx, 0, 42);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_FALSE(rows[0].error.empty());
    EXPECT_TRUE(std::isnan(rows[0].mean_rate));
}

TEST(Output, EmptyRecordsCreateNoFile)
{
    const auto p = temp_path("empty.csv");
    std::filesystem::remove(p);
    EXPECT_THROW(emit_results({}, OutputFormat::Csv, p.string()), Error);
    EXPECT_FALSE(std::filesystem::exists(p));
}

TEST(Output, OneRecordIsTwoLines)
{
    TrialRecord r;
    r.scenario = "custom";
    r.architecture = "fd";
    r.per_user_rate = {1.5};
    const auto p = temp_path("one.csv");
    emit_results({r}, OutputFormat::Csv, p.string());
    std::ifstream in(p);
    std::string line;
    int n = 0;
    while (std::getline(in, line))
        ++n;
    EXPECT_EQ(n, 2);
    std::filesystem::remove(p);
}

TEST(Output, HeaderIsFixed)
{
    EXPECT_EQ(csv_header, "scenario,arch,loss_mode,coupling_mode,M,N,S,L,spacing_wl,trial,seed,rate_user_mean,"
                          "rate_users,P_t,P_s,converged,iters,error");
}

TEST(Output, UnwritablePathIsIoError)
{
    TrialRecord r;
    try
    {
        emit_results({r}, OutputFormat::Csv, "/nonexistent-dir/x/y.csv");
        FAIL();
    }
    catch (const Error &e)
    {
        EXPECT_EQ(e.code(), ErrorCode::Io);
    }
}

TEST(Output, CsvRoundTripIsBitExact)
{
    const auto rows = run_scenario(tiny(1));
    std::istringstream in(to_csv(rows));
    std::string line;
    std::getline(in, line);
    for (const auto &r : rows)
    {
        ASSERT_TRUE(std::getline(in, line));
        const TrialRecord b = parse_csv_row(line);
        EXPECT_EQ(std::bit_cast<std::uint64_t>(b.mean_rate), std::bit_cast<std::uint64_t>(r.mean_rate));
        EXPECT_EQ(std::bit_cast<std::uint64_t>(b.P_t), std::bit_cast<std::uint64_t>(r.P_t));
        EXPECT_EQ(std::bit_cast<std::uint64_t>(b.P_s), std::bit_cast<std::uint64_t>(r.P_s));
        EXPECT_EQ(std::bit_cast<std::uint64_t>(b.spacing_wl), std::bit_cast<std::uint64_t>(r.spacing_wl));
        ASSERT_EQ(b.per_user_rate.size(), r.per_user_rate.size());
        for (std::size_t i = 0; i < b.per_user_rate.size(); ++i)
            EXPECT_EQ(std::bit_cast<std::uint64_t>(b.per_user_rate[i]),
                      std::bit_cast<std::uint64_t>(r.per_user_rate[i]));
        EXPECT_EQ(b.seed, r.seed);
        EXPECT_EQ(csv_row(b), csv_row(r));
    }
}

TEST(Output, JsonlMirrorsFields)
{
    const auto rows = run_scenario(tiny(1));
    std::ostringstream os;
    write_results(os, rows, OutputFormat::Jsonl, "abc");
    std::istringstream in(os.str());
    std::string line;
    std::size_t i = 0;
    while (std::getline(in, line))
    {
        const auto j = nlohmann::json::parse(line);
        EXPECT_EQ(j.at("arch"), rows[i].architecture);
        EXPECT_EQ(j.at("rate_user_mean").get<double>(), rows[i].mean_rate);
        EXPECT_EQ(j.at("seed").get<std::uint64_t>(), rows[i].seed);
        EXPECT_EQ(j.at("config_hash"), "abc");
        EXPECT_EQ(j.size(), 19u);
        ++i;
    }
    EXPECT_EQ(i, rows.size());
}

TEST(Output, ShortestRoundTripFormatting)
{
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(2.0), "2");
    EXPECT_EQ(format_double(1.0 / 3.0), "0.3333333333333333");
    EXPECT_EQ(parse_double(format_double(1e-300)), 1e-300);
}
