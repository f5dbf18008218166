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

#ifndef DMASIM_HARNESS_CONFIG_HPP
#define DMASIM_HARNESS_CONFIG_HPP

#include "dmasim/channel.hpp"
#include "dmasim/constants.hpp"
#include "dmasim/errors.hpp"
#include "dmasim/netmodel.hpp"
#include "dmasim/optim.hpp"
#include "dmasim/precoder.hpp"
#include "dmasim/types.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace dmasim::harness
{
    enum class Scenario
    {
        Fig2Sweep,
        Fig3Match,
        Fig4Coupling,
        Custom
    };

    enum class OutputFormat
    {
        Csv,
        Jsonl
    };

    enum class Statistic
    {
        Mean,
        Median
    };

    inline std::string_view to_string(Scenario s)
    {
        switch (s)
        {
        case Scenario::Fig2Sweep: return "fig2";
        case Scenario::Fig3Match: return "fig3";
        case Scenario::Fig4Coupling: return "fig4";
        case Scenario::Custom: return "custom";
        }
        return "?";
    }

    inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "jsonl"; }
    inline std::string_view to_string(Statistic s) { return s == Statistic::Mean ? "mean" : "median"; }

    namespace detail
    {
        template <typename Enum, std::size_t K>
        Enum parse_enum(std::string_view text, const Enum (&values)[K], std::string_view field)
        {
            for (Enum v : values)
                if (to_string(v) == text)
                    return v;
            std::string msg = "field '" + std::string(field) + "': unknown value '" + std::string(text) + "' (expected";
            for (Enum v : values)
                msg += " " + std::string(to_string(v));
            throw Error(ErrorCode::Config, msg + ")");
        }

        inline constexpr Scenario all_scenarios[] = {Scenario::Fig2Sweep, Scenario::Fig3Match,
                                                     Scenario::Fig4Coupling, Scenario::Custom};
        inline constexpr Architecture all_architectures[] = {Architecture::FullDigital, Architecture::Hybrid,
                                                             Architecture::Dma};
        inline constexpr LossMode all_loss_modes[] = {LossMode::WithLoss, LossMode::NoLoss, LossMode::Compensated};
        inline constexpr CouplingMode all_coupling_modes[] = {CouplingMode::Full, CouplingMode::NoAir,
                                                              CouplingMode::NoCoupling};
        inline constexpr OutputFormat all_formats[] = {OutputFormat::Csv, OutputFormat::Jsonl};
        inline constexpr Statistic all_statistics[] = {Statistic::Mean, Statistic::Median};
        inline constexpr optim::HessianMode all_hessians[] = {optim::HessianMode::QuasiNewtonBFGS,
                                                              optim::HessianMode::QuasiNewtonSR1};
    }

    inline Scenario parse_scenario(std::string_view s)
    {
        return detail::parse_enum(s, detail::all_scenarios, "scenario");
    }

    inline OutputFormat parse_format(std::string_view s) { return detail::parse_enum(s, detail::all_formats, "format"); }

    struct ExperimentConfig
    {
        Scenario scenario = Scenario::Custom;
        std::size_t M = 0;
        std::size_t N = 0;
        std::size_t S = 0; // hybrid RF chains; 0 means N
        std::vector<std::size_t> elements_per_waveguide;
        std::vector<double> element_spacing_wl;
        double waveguide_spacing_wl = 1.0;
        double delta_db = 13.0;
        std::optional<double> p_t_max; // unset: reference-link calibration
        double sigma_x2 = 1.0;
        double sigma_n2 = 1.0;
        double r_s = 0.0;
        std::vector<Architecture> architectures;
        std::vector<LossMode> loss_modes{LossMode::WithLoss};
        std::vector<CouplingMode> coupling_modes{CouplingMode::Full};
        std::size_t trials = 200;
        std::uint64_t master_seed = 1;
        double frequency_hz = 10e9;
        double y0 = 35.33;
        double termination_reflection = 0.0;
        Statistic statistic = Statistic::Mean;

        optim::TrSettings tr;
        std::size_t dma_starts = 3;
        double hybrid_step = 1e-2;
        std::size_t hybrid_max_iters = 5000;
        double hybrid_tol = 1e-6;

        // matching search
        std::size_t fd_rows = 6;
        std::vector<std::size_t> fd_columns;
        double fd_column_spacing_wl = 5.0;
        std::size_t max_elements_per_waveguide = 24;

        std::string out;
        OutputFormat format = OutputFormat::Csv;
        std::size_t parallel = 0; // 0: environment or hardware

        std::size_t rf_chains() const { return S == 0 ? N : S; }
        double delta() const { return std::pow(10.0, delta_db / 10.0); }
        PhysicalConstants constants() const { return PhysicalConstants::at_frequency(frequency_hz, y0); }

        PowerBudget budget() const
        {
            PowerBudget b;
            b.sigma_x2 = sigma_x2;
            b.sigma_n2 = sigma_n2;
            b.P_max = p_t_max ? *p_t_max : reference_transmit_power(constants(), sigma_n2);
            return b;
        }

        bool wants(Architecture a) const
        {
            for (auto x : architectures)
                if (x == a)
                    return true;
            return false;
        }

        void validate() const
        {
            auto fail = [](const std::string &m) { throw Error(ErrorCode::Config, m); };
            if (M == 0)
                fail("field 'M' must be >= 1");
            if (N == 0)
                fail("field 'N' must be >= 1");
            if (M > N)
                fail("field 'M' must not exceed 'N'");
            if (S != 0 && S < M)
                fail("field 'S' must be >= 'M'");
            if (trials == 0)
                fail("field 'trials' must be >= 1");
            if (architectures.empty())
                fail("field 'architectures' must be non-empty");
            if (loss_modes.empty())
                fail("field 'loss_modes' must be non-empty");
            if (coupling_modes.empty())
                fail("field 'coupling_modes' must be non-empty");
            if (element_spacing_wl.empty())
                fail("field 'element_spacing_wl' must be non-empty");
            for (double s : element_spacing_wl)
                if (!(s > 0.0))
                    fail("field 'element_spacing_wl' entries must be > 0");
            if (!(waveguide_spacing_wl > 0.0))
                fail("field 'waveguide_spacing_wl' must be > 0");
            if (!(sigma_x2 > 0.0) || !(sigma_n2 > 0.0))
                fail("noise and symbol variances must be > 0");
            if (p_t_max && !(*p_t_max > 0.0))
                fail("field 'p_t_max' must be > 0");
            if (!(r_s >= 0.0))
                fail("field 'r_s' must be >= 0");
            if (!(frequency_hz > 0.0) || !(y0 > 0.0))
                fail("fields 'frequency_hz' and 'y0' must be > 0");
            if (!(std::abs(termination_reflection) <= 1.0))
                fail("field 'termination_reflection' must lie in [-1, 1]");
            if (dma_starts == 0)
                fail("field 'dma_starts' must be >= 1");
            if (!(hybrid_step > 0.0) || !(hybrid_tol > 0.0))
                fail("hybrid step and tolerance must be > 0");
            try
            {
                tr.validate();
            }
            catch (const Error &e)
            {
                fail(std::string("trust-region settings: ") + e.what());
            }
            if (scenario == Scenario::Fig3Match)
            {
                if (fd_columns.empty())
                    fail("field 'fd_columns' must be non-empty");
                if (fd_rows == 0 || max_elements_per_waveguide == 0)
                    fail("fields 'fd_rows' and 'max_elements_per_waveguide' must be >= 1");
                if (!(fd_column_spacing_wl > 0.0))
                    fail("field 'fd_column_spacing_wl' must be > 0");
            }
            else
            {
                if (elements_per_waveguide.empty())
                    fail("field 'elements_per_waveguide' must be non-empty");
                for (auto e : elements_per_waveguide)
                    if (e == 0)
                        fail("field 'elements_per_waveguide' entries must be >= 1");
            }
        }
    };

    inline ExperimentConfig preset(Scenario s)
    {
        ExperimentConfig c;
        c.scenario = s;
        switch (s)
        {
        case Scenario::Fig2Sweep:
            c.M = 5;
            c.N = 6;
            c.elements_per_waveguide = {2, 4, 6, 8, 10};
            c.element_spacing_wl = {0.5};
            c.architectures = {Architecture::FullDigital, Architecture::Hybrid, Architecture::Dma};
            c.loss_modes = {LossMode::WithLoss, LossMode::NoLoss, LossMode::Compensated};
            break;
        case Scenario::Fig3Match:
            c.M = 5;
            c.N = 6;
            c.element_spacing_wl = {0.5};
            c.architectures = {Architecture::FullDigital, Architecture::Hybrid, Architecture::Dma};
            c.fd_columns = {1, 2, 3, 4};
            break;
        case Scenario::Fig4Coupling:
            c.M = 4;
            c.N = 4;
            c.elements_per_waveguide = {2, 4, 6, 8, 10};
            c.element_spacing_wl = {0.5, 0.2};
            c.architectures = {Architecture::Dma};
            c.coupling_modes = {CouplingMode::Full, CouplingMode::NoAir, CouplingMode::NoCoupling};
            break;
        case Scenario::Custom:
            break;
        }
        return c;
    }

    // ------------------------------------------------------------ json

    inline nlohmann::json to_json(const ExperimentConfig &c, bool with_io = true)
    {
        using nlohmann::json;
        json j;
        j["scenario"] = to_string(c.scenario);
        j["M"] = c.M;
        j["N"] = c.N;
        j["S"] = c.S;
        j["elements_per_waveguide"] = c.elements_per_waveguide;
        j["element_spacing_wl"] = c.element_spacing_wl;
        j["waveguide_spacing_wl"] = c.waveguide_spacing_wl;
        j["delta_db"] = c.delta_db;
        j["p_t_max"] = c.p_t_max ? json(*c.p_t_max) : json(nullptr);
        j["sigma_x2"] = c.sigma_x2;
        j["sigma_n2"] = c.sigma_n2;
        j["r_s"] = c.r_s;
        auto names = [](const auto &v) {
            json a = json::array();
            for (auto x : v)
                a.push_back(to_string(x));
            return a;
        };
        j["architectures"] = names(c.architectures);
        j["loss_modes"] = names(c.loss_modes);
        j["coupling_modes"] = names(c.coupling_modes);
        j["trials"] = c.trials;
        j["master_seed"] = c.master_seed;
        j["frequency_hz"] = c.frequency_hz;
        j["y0"] = c.y0;
        j["termination_reflection"] = c.termination_reflection;
        j["statistic"] = to_string(c.statistic);
        j["tr_initial_radius"] = c.tr.initial_radius;
        j["tr_max_radius"] = c.tr.max_radius;
        j["tr_eta"] = c.tr.eta_accept;
        j["tr_grad_tol"] = c.tr.grad_tol;
        j["tr_max_iters"] = c.tr.max_iters;
        j["tr_hessian"] = optim::to_string(c.tr.hessian_mode);
        j["dma_starts"] = c.dma_starts;
        j["hybrid_step"] = c.hybrid_step;
        j["hybrid_max_iters"] = c.hybrid_max_iters;
        j["hybrid_tol"] = c.hybrid_tol;
        j["fd_rows"] = c.fd_rows;
        j["fd_columns"] = c.fd_columns;
        j["fd_column_spacing_wl"] = c.fd_column_spacing_wl;
        j["max_elements_per_waveguide"] = c.max_elements_per_waveguide;
        if (with_io)
        {
            j["out"] = c.out;
            j["format"] = to_string(c.format);
            j["parallel"] = c.parallel;
        }
        return j;
    }

    namespace detail
    {
        template <typename T>
        T get_field(const nlohmann::json &v, std::string_view key)
        {
            try
            {
                if constexpr (std::is_same_v<T, double>)
                {
                    if (!v.is_number())
                        throw Error(ErrorCode::Config, "");
                }
                else if constexpr (std::is_integral_v<T>)
                {
                    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
                        throw Error(ErrorCode::Config, "");
                }
                return v.get<T>();
            }
            catch (const std::exception &)
            {
                throw Error(ErrorCode::Config, "field '" + std::string(key) + "': wrong type or value " + v.dump());
            }
        }

        template <typename T>
        std::vector<T> get_list(const nlohmann::json &v, std::string_view key)
        {
            if (!v.is_array())
                throw Error(ErrorCode::Config, "field '" + std::string(key) + "' must be a list");
            std::vector<T> out;
            for (const auto &e : v)
                out.push_back(get_field<T>(e, key));
            return out;
        }

        template <typename Enum, std::size_t K>
        std::vector<Enum> get_enum_list(const nlohmann::json &v, const Enum (&values)[K], std::string_view key)
        {
            std::vector<Enum> out;
            for (const auto &s : get_list<std::string>(v, key))
                out.push_back(parse_enum(s, values, key));
            return out;
        }
    }

    // Applies every key of a flat json object on top of c. Unknown keys and
    // mistyped values are errors. "scenario" is handled by the caller.
    inline void apply_json(ExperimentConfig &c, const nlohmann::json &j)
    {
        using namespace detail;
        if (!j.is_object())
            throw Error(ErrorCode::Config, "configuration must be a json object");
        for (const auto &[key, v] : j.items())
        {
            if (key == "scenario")
                continue;
            else if (key == "M")
                c.M = get_field<std::size_t>(v, key);
            else if (key == "N")
                c.N = get_field<std::size_t>(v, key);
            else if (key == "S")
                c.S = get_field<std::size_t>(v, key);
            else if (key == "elements_per_waveguide")
                c.elements_per_waveguide = get_list<std::size_t>(v, key);
            else if (key == "element_spacing_wl")
                c.element_spacing_wl = get_list<double>(v, key);
            else if (key == "waveguide_spacing_wl")
                c.waveguide_spacing_wl = get_field<double>(v, key);
            else if (key == "delta_db")
                c.delta_db = get_field<double>(v, key);
            else if (key == "p_t_max")
                c.p_t_max = v.is_null() ? std::nullopt : std::optional<double>(get_field<double>(v, key));
            else if (key == "sigma_x2")
                c.sigma_x2 = get_field<double>(v, key);
            else if (key == "sigma_n2")
                c.sigma_n2 = get_field<double>(v, key);
            else if (key == "r_s")
                c.r_s = get_field<double>(v, key);
            else if (key == "architectures")
                c.architectures = get_enum_list(v, all_architectures, key);
            else if (key == "loss_modes")
                c.loss_modes = get_enum_list(v, all_loss_modes, key);
            else if (key == "coupling_modes")
                c.coupling_modes = get_enum_list(v, all_coupling_modes, key);
            else if (key == "trials")
                c.trials = get_field<std::size_t>(v, key);
            else if (key == "master_seed")
                c.master_seed = get_field<std::uint64_t>(v, key);
            else if (key == "frequency_hz")
                c.frequency_hz = get_field<double>(v, key);
            else if (key == "y0")
                c.y0 = get_field<double>(v, key);
            else if (key == "termination_reflection")
                c.termination_reflection = get_field<double>(v, key);
            else if (key == "statistic")
                c.statistic = parse_enum(get_field<std::string>(v, key), all_statistics, key);
            else if (key == "tr_initial_radius")
                c.tr.initial_radius = get_field<double>(v, key);
            else if (key == "tr_max_radius")
                c.tr.max_radius = get_field<double>(v, key);
            else if (key == "tr_eta")
                c.tr.eta_accept = get_field<double>(v, key);
            else if (key == "tr_grad_tol")
                c.tr.grad_tol = get_field<double>(v, key);
            else if (key == "tr_max_iters")
                c.tr.max_iters = get_field<std::size_t>(v, key);
            else if (key == "tr_hessian")
                c.tr.hessian_mode = parse_enum(get_field<std::string>(v, key), all_hessians, key);
            else if (key == "dma_starts")
                c.dma_starts = get_field<std::size_t>(v, key);
            else if (key == "hybrid_step")
                c.hybrid_step = get_field<double>(v, key);
            else if (key == "hybrid_max_iters")
                c.hybrid_max_iters = get_field<std::size_t>(v, key);
            else if (key == "hybrid_tol")
                c.hybrid_tol = get_field<double>(v, key);
            else if (key == "fd_rows")
                c.fd_rows = get_field<std::size_t>(v, key);
            else if (key == "fd_columns")
                c.fd_columns = get_list<std::size_t>(v, key);
            else if (key == "fd_column_spacing_wl")
                c.fd_column_spacing_wl = get_field<double>(v, key);
            else if (key == "max_elements_per_waveguide")
                c.max_elements_per_waveguide = get_field<std::size_t>(v, key);
            else if (key == "out")
                c.out = get_field<std::string>(v, key);
            else if (key == "format")
                c.format = parse_enum(get_field<std::string>(v, key), all_formats, key);
            else if (key == "parallel")
                c.parallel = get_field<std::size_t>(v, key);
            else
                throw Error(ErrorCode::Config, "unknown field '" + key + "'");
        }
    }

    // Command-line values that take precedence over the file.
    struct Overrides
    {
        std::optional<Scenario> scenario;
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> trials;
        std::optional<std::string> out;
        std::optional<std::size_t> parallel;
        std::optional<OutputFormat> format;
    };

    // Preset of the scenario, then the file, then the overrides.
    inline ExperimentConfig resolve_config(const std::optional<nlohmann::json> &file, const Overrides &o)
    {
        std::optional<Scenario> scenario = o.scenario;
        if (!scenario && file && file->is_object() && file->contains("scenario"))
            scenario = parse_scenario(detail::get_field<std::string>(file->at("scenario"), "scenario"));
        if (!scenario)
            throw Error(ErrorCode::Config, "missing required field 'scenario' (give --config or --scenario)");
        ExperimentConfig c = preset(*scenario);
        if (file)
            apply_json(c, *file);
        if (o.seed)
            c.master_seed = *o.seed;
        if (o.trials)
            c.trials = *o.trials;
        if (o.out)
            c.out = *o.out;
        if (o.parallel)
            c.parallel = *o.parallel;
        if (o.format)
            c.format = *o.format;
        if (c.M == 0)
            throw Error(ErrorCode::Config, "missing required field 'M'");
        if (c.N == 0)
            throw Error(ErrorCode::Config, "missing required field 'N'");
        if (c.architectures.empty())
            throw Error(ErrorCode::Config, "missing required field 'architectures'");
        if (c.element_spacing_wl.empty())
            throw Error(ErrorCode::Config, "missing required field 'element_spacing_wl'");
        if (c.scenario != Scenario::Fig3Match && c.elements_per_waveguide.empty())
            throw Error(ErrorCode::Config, "missing required field 'elements_per_waveguide'");
        if (c.scenario == Scenario::Fig3Match && c.fd_columns.empty())
            throw Error(ErrorCode::Config, "missing required field 'fd_columns'");
        c.validate();
        return c;
    }

    inline nlohmann::json read_config_file(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorCode::Config, "cannot read config file '" + path + "'");
        try
        {
            return nlohmann::json::parse(in, nullptr, true, true);
        }
        catch (const nlohmann::json::parse_error &e)
        {
            throw Error(ErrorCode::Config, "config file '" + path + "': " + e.what());
        }
    }

    // FNV-1a over the canonical json of everything that affects results.
    inline std::uint64_t config_hash(const ExperimentConfig &c)
    {
        const std::string text = to_json(c, false).dump();
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char ch : text)
        {
            h ^= ch;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    inline std::string hash_hex(std::uint64_t h)
    {
        std::ostringstream os;
        os << std::hex;
        os.width(16);
        os.fill('0');
        os << h;
        return os.str();
    }
}

#endif
