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

#ifndef DMASIM_HARNESS_RUNNER_HPP
#define DMASIM_HARNESS_RUNNER_HPP

#include "dmasim/channel.hpp"
#include "dmasim/equivchan.hpp"
#include "dmasim/geometry.hpp"
#include "dmasim/harness/config.hpp"
#include "dmasim/metrics.hpp"
#include "dmasim/netmodel.hpp"
#include "dmasim/precoder.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace dmasim::harness
{
    // Worker count: explicit request, then DMASIM_WORKERS, then the hardware.
    inline std::size_t resolve_workers(std::size_t requested)
    {
        if (requested > 0)
            return requested;
        if (const char *env = std::getenv("DMASIM_WORKERS"))
        {
            char *end = nullptr;
            const unsigned long v = std::strtoul(env, &end, 10);
            if (end != env && *end == '\0' && v > 0)
                return v;
        }
        return std::max(1u, std::thread::hardware_concurrency());
    }

    // Runs fn(0..count-1) on a bounded pool. fn must not throw; each index
    // writes only its own slot, so the outcome is schedule independent.
    template <typename Fn>
    void parallel_for(std::size_t count, std::size_t workers, Fn &&fn)
    {
        workers = std::max<std::size_t>(1, std::min(workers, count));
        if (workers == 1)
        {
            for (std::size_t i = 0; i < count; ++i)
                fn(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++)
                    fn(i);
            });
    }

    // Stream key of one sweep point, a function of its parameters only.
    inline std::uint64_t point_seed(std::uint64_t master, std::size_t count, double spacing_wl)
    {
        return derive_seed(derive_seed(master, count), std::bit_cast<std::uint64_t>(spacing_wl));
    }

    struct PointSpec
    {
        std::size_t waveguides = 0;
        std::size_t elements_per_waveguide = 0;
        double spacing_wl = 0.0;
        std::uint64_t seed = 0;
    };

    // Everything shared by the trials of one sweep point.
    struct PointContext
    {
        const ExperimentConfig *config = nullptr;
        PointSpec spec;
        PhysicalConstants constants;
        PowerBudget budget;
        ArrayGeometry geometry;
        CMatrix Ytt_fd;
        std::map<CouplingMode, AdmittanceSet> dma;
        UserBlock users;
        ChannelSpec channel;

        std::size_t ports() const { return geometry.element_count(); }
    };

    inline PointContext make_point(const ExperimentConfig &cfg, const PointSpec &p)
    {
        PointContext ctx;
        ctx.config = &cfg;
        ctx.spec = p;
        ctx.constants = cfg.constants();
        ctx.budget = cfg.budget();
        const double lambda = ctx.constants.wavelength;
        ctx.geometry = make_planar_array(Architecture::Dma, p.waveguides, p.elements_per_waveguide,
                                         p.spacing_wl * lambda, cfg.waveguide_spacing_wl * lambda, ctx.constants);
        if (cfg.wants(Architecture::FullDigital) || cfg.wants(Architecture::Hybrid))
            ctx.Ytt_fd = assemble_fd_ytt(make_planar_array(Architecture::FullDigital, p.waveguides,
                                                           p.elements_per_waveguide, p.spacing_wl * lambda,
                                                           cfg.waveguide_spacing_wl * lambda, ctx.constants),
                                         ctx.constants);
        if (cfg.wants(Architecture::Dma))
        {
            const cplx gl(cfg.termination_reflection, 0.0);
            ctx.dma.emplace(CouplingMode::Full,
                            assemble_dma_admittances(ctx.geometry, ctx.constants, CouplingMode::Full, cfg.r_s, gl));
            for (auto mode : cfg.coupling_modes)
                if (!ctx.dma.count(mode))
                    ctx.dma.emplace(mode, assemble_dma_admittances(ctx.geometry, ctx.constants, mode, cfg.r_s, gl));
        }
        ctx.users = assemble_user_block(cfg.M, ctx.constants);
        ctx.channel = make_channel_spec(cfg.M, build_covariance(ctx.geometry.element_positions, ctx.constants,
                                                                cfg.sigma_n2),
                                        cfg.delta(), cfg.sigma_n2, cfg.sigma_x2);
        return ctx;
    }

    struct DmaEvaluation
    {
        std::vector<double> gamma;
        double P_t = 0.0;
        double P_s = 0.0;
    };

    // Scores a DMA design on the true (fully coupled) model. Designs from an
    // ablated model are rescaled so their declared constraint holds there.
    inline DmaEvaluation evaluate_dma_design(const AdmittanceSet &truth, const UserBlock &users,
                                             const ChannelRealization &chan, const PrecoderSolution &sol,
                                             LossMode mode, bool ablated, const PowerBudget &budget, double y0)
    {
        CMatrix B = sol.B;
        const PowerReport pr = dma_power_report(truth, sol.ys_im, B, y0, budget.sigma_x2);
        double scale = 1.0;
        if (mode == LossMode::Compensated || (ablated && mode == LossMode::WithLoss))
            scale = budget.P_max / pr.Ps;
        else if (ablated)
            scale = budget.P_max / pr.Pt;
        B *= std::sqrt(scale);
        DmaEvaluation e;
        e.P_t = pr.Pt * scale;
        e.P_s = pr.Ps * scale;
        const CMatrix H = equivalent_channel_dma(truth, users, chan, sol.ys_im).H;
        e.gamma = sinr(H, B, budget.sigma_n2, budget.sigma_x2);
        return e;
    }

    namespace detail
    {
        inline double seconds_since(std::chrono::steady_clock::time_point t0)
        {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }

        inline void fill_rates(TrialRecord &r, const std::vector<double> &gamma)
        {
            r.per_user_rate = per_user_rate(gamma);
            r.mean_rate = mean(r.per_user_rate);
        }

        inline void mark_failed(TrialRecord &r, const std::string &what)
        {
            r.error = what;
            r.per_user_rate.clear();
            r.mean_rate = std::numeric_limits<double>::quiet_NaN();
            r.P_t = std::numeric_limits<double>::quiet_NaN();
            r.P_s = std::numeric_limits<double>::quiet_NaN();
            r.converged = false;
        }

        inline std::string describe(const std::exception &e)
        {
            if (const auto *d = dynamic_cast<const Error *>(&e))
                return std::string(to_string(d->code()));
            return "runtime_error";
        }
    }

    // All rows of one trial, identified by its stream seed.
    inline std::vector<TrialRecord> run_trial(const PointContext &ctx, std::size_t trial, std::uint64_t seed)
    {
        const ExperimentConfig &cfg = *ctx.config;
        std::vector<TrialRecord> rows;
        TrialRecord base;
        base.scenario = std::string(to_string(cfg.scenario));
        base.M = cfg.M;
        base.spacing_wl = ctx.spec.spacing_wl;
        base.trial_index = trial;
        base.seed = seed;
        base.coupling_mode = std::string(to_string(CouplingMode::Full));
        base.loss_mode = "none";

        ChannelRealization chan;
        try
        {
            chan = draw_realization_seeded(ctx.channel, seed, trial);
        }
        catch (const std::exception &e)
        {
            for (auto a : cfg.architectures)
            {
                TrialRecord r = base;
                r.architecture = std::string(to_string(a));
                detail::mark_failed(r, detail::describe(e));
                rows.push_back(r);
            }
            return rows;
        }
        const std::size_t ports = ctx.ports();

        for (auto arch : cfg.architectures)
        {
            if (arch == Architecture::FullDigital)
            {
                const auto t0 = std::chrono::steady_clock::now();
                TrialRecord r = base;
                r.architecture = "fd";
                r.N = r.S = r.L = ports;
                try
                {
                    const CMatrix H = equivalent_channel_fd(ctx.users, chan).H;
                    const PrecoderSolution sol = zf_fd(H, ctx.Ytt_fd, ctx.budget);
                    detail::fill_rates(r, sol.gamma_per_user);
                    r.P_t = r.P_s = sol.achieved_power;
                    r.converged = true;
                }
                catch (const std::exception &e)
                {
                    detail::mark_failed(r, detail::describe(e));
                }
                r.wall_time = detail::seconds_since(t0);
                rows.push_back(r);
            }
            else if (arch == Architecture::Hybrid)
            {
                const auto t0 = std::chrono::steady_clock::now();
                TrialRecord r = base;
                r.architecture = "hybrid";
                r.N = r.L = ports;
                r.S = cfg.rf_chains();
                try
                {
                    HybridSettings hs;
                    hs.rf_chains = cfg.rf_chains();
                    hs.step = cfg.hybrid_step;
                    hs.max_iters = cfg.hybrid_max_iters;
                    hs.tol = cfg.hybrid_tol;
                    const CMatrix H = equivalent_channel_fd(ctx.users, chan).H;
                    const PrecoderSolution sol = zf_hybrid(H, ctx.Ytt_fd, ctx.budget, hs, derive_seed(seed, 1));
                    detail::fill_rates(r, sol.gamma_per_user);
                    r.P_t = r.P_s = sol.achieved_power;
                    r.converged = sol.converged;
                    r.iterations = sol.iterations;
                }
                catch (const std::exception &e)
                {
                    detail::mark_failed(r, detail::describe(e));
                }
                r.wall_time = detail::seconds_since(t0);
                rows.push_back(r);
            }
            else
            {
                const AdmittanceSet &truth = ctx.dma.at(CouplingMode::Full);
                for (auto coupling : cfg.coupling_modes)
                {
                    const AdmittanceSet &design = ctx.dma.at(coupling);
                    const bool ablated = coupling != CouplingMode::Full;
                    struct Cached
                    {
                        std::optional<PrecoderSolution> sol;
                        std::string error;
                        double seconds = 0.0;
                    };
                    std::map<bool, Cached> cache; // keyed by "reflections ignored"
                    auto solve = [&](bool ignore) -> Cached & {
                        auto it = cache.find(ignore);
                        if (it != cache.end())
                            return it->second;
                        Cached &c = cache[ignore];
                        const auto t0 = std::chrono::steady_clock::now();
                        try
                        {
                            const auto zc = ZfObjectiveContext::make(design, ctx.users, chan,
                                                                     ctx.constants.characteristic_admittance,
                                                                     ctx.budget);
                            DmaSettings ds;
                            ds.tr = cfg.tr;
                            ds.starts = cfg.dma_starts;
                            ds.loss_mode = ignore ? LossMode::NoLoss : LossMode::WithLoss;
                            c.sol = zf_dma(zc, ds, derive_seed(seed, 2));
                        }
                        catch (const std::exception &e)
                        {
                            c.error = detail::describe(e);
                        }
                        c.seconds = detail::seconds_since(t0);
                        return c;
                    };
                    for (auto loss : cfg.loss_modes)
                    {
                        const auto t0 = std::chrono::steady_clock::now();
                        TrialRecord r = base;
                        r.architecture = "dma";
                        r.loss_mode = std::string(to_string(loss));
                        r.coupling_mode = std::string(to_string(coupling));
                        r.N = r.S = ctx.spec.waveguides;
                        r.L = ports;
                        Cached &c = solve(ignores_reflection(loss));
                        if (!c.sol)
                            detail::mark_failed(r, c.error);
                        else
                        {
                            try
                            {
                                const DmaEvaluation ev =
                                    evaluate_dma_design(truth, ctx.users, chan, *c.sol, loss, ablated, ctx.budget,
                                                        ctx.constants.characteristic_admittance);
                                detail::fill_rates(r, ev.gamma);
                                r.P_t = ev.P_t;
                                r.P_s = ev.P_s;
                                r.converged = c.sol->converged;
                                r.iterations = c.sol->iterations;
                            }
                            catch (const std::exception &e)
                            {
                                detail::mark_failed(r, detail::describe(e));
                            }
                        }
                        r.wall_time = c.seconds + detail::seconds_since(t0);
                        rows.push_back(r);
                    }
                }
            }
        }
        return rows;
    }

    // Sweep points of a grid scenario, elements per waveguide outermost.
    inline std::vector<PointSpec> sweep_points(const ExperimentConfig &cfg)
    {
        std::vector<PointSpec> pts;
        for (auto epw : cfg.elements_per_waveguide)
            for (double sp : cfg.element_spacing_wl)
                pts.push_back({cfg.N, epw, sp, point_seed(cfg.master_seed, epw, sp)});
        return pts;
    }

    // Monte Carlo over the grid. Rows are ordered by point, trial, then
    // architecture, whatever the worker count.
    inline std::vector<TrialRecord> run_scenario(const ExperimentConfig &cfg)
    {
        cfg.validate();
        if (cfg.scenario == Scenario::Fig3Match)
            throw Error(ErrorCode::Config, "the matching scenario produces a table; use match_fd_search");
        const auto points = sweep_points(cfg);
        std::vector<PointContext> contexts;
        contexts.reserve(points.size());
        for (const auto &p : points)
            contexts.push_back(make_point(cfg, p));

        const std::size_t units = points.size() * cfg.trials;
        std::vector<std::vector<TrialRecord>> slots(units);
        parallel_for(units, resolve_workers(cfg.parallel), [&](std::size_t u) {
            const PointContext &ctx = contexts[u / cfg.trials];
            const std::size_t trial = u % cfg.trials;
            slots[u] = run_trial(ctx, trial, derive_seed(ctx.spec.seed, trial));
        });

        std::vector<TrialRecord> out;
        for (auto &s : slots)
            out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
        return out;
    }

    // Recomputes the rows of one trial from the fields stored with it.
    inline std::vector<TrialRecord> rerun_trial(const ExperimentConfig &cfg, std::size_t elements_per_waveguide,
                                                double spacing_wl, std::size_t trial, std::uint64_t seed)
    {
        cfg.validate();
        const PointContext ctx = make_point(cfg, {cfg.N, elements_per_waveguide, spacing_wl, 0});
        return run_trial(ctx, trial, seed);
    }

    // ------------------------------------------------------------ statistics

    // Mean or median of the finite entries; NaN when none.
    inline double summarize(std::vector<double> v, Statistic s)
    {
        std::erase_if(v, [](double x) { return !std::isfinite(x); });
        if (v.empty())
            return std::numeric_limits<double>::quiet_NaN();
        if (s == Statistic::Mean)
            return mean(v);
        std::sort(v.begin(), v.end());
        const std::size_t h = v.size() / 2;
        return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    }

    // ------------------------------------------------------------- matching

    // Smallest n in [lo, hi] with value(n) >= target, for nondecreasing
    // value; nullopt when even value(hi) falls short.
    inline std::optional<std::size_t> monotone_search(const std::function<double(std::size_t)> &value,
                                                      double target, std::size_t lo, std::size_t hi)
    {
        if (lo > hi)
            return std::nullopt;
        std::map<std::size_t, double> memo;
        auto at = [&](std::size_t n) {
            auto it = memo.find(n);
            if (it == memo.end())
                it = memo.emplace(n, value(n)).first;
            return it->second;
        };
        if (!(at(hi) >= target))
            return std::nullopt;
        if (at(lo) >= target)
            return lo;
        // value(lo) < target <= value(hi)
        while (hi - lo > 1)
        {
            const std::size_t mid = lo + (hi - lo) / 2;
            if (at(mid) >= target)
                hi = mid;
            else
                lo = mid;
        }
        return hi;
    }

    struct MatchRow
    {
        std::size_t fd_columns = 0;
        std::size_t fd_antennas = 0;
        double fd_rate = 0.0;
        std::optional<std::size_t> required_L_hybrid;
        double hybrid_rate = std::numeric_limits<double>::quiet_NaN();
        std::optional<std::size_t> required_L_dma;
        double dma_rate = std::numeric_limits<double>::quiet_NaN();
    };

    namespace detail
    {
        // Summary rate of one architecture on a planar array, over cfg.trials.
        inline double point_rate(const ExperimentConfig &base, Architecture arch, std::size_t rows,
                                 std::size_t per_row, double spacing_wl, double row_spacing_wl)
        {
            ExperimentConfig cfg = base;
            cfg.architectures = {arch};
            cfg.loss_modes = {base.loss_modes.front()};
            cfg.coupling_modes = {base.coupling_modes.front()};
            cfg.N = rows;
            cfg.waveguide_spacing_wl = row_spacing_wl;
            const PointContext ctx =
                make_point(cfg, {rows, per_row, spacing_wl,
                                 derive_seed(point_seed(base.master_seed, per_row, spacing_wl), rows)});
            std::vector<double> rates(cfg.trials);
            parallel_for(cfg.trials, resolve_workers(cfg.parallel), [&](std::size_t t) {
                const auto rs = run_trial(ctx, t, derive_seed(ctx.spec.seed, t));
                rates[t] = rs.front().mean_rate;
            });
            return summarize(rates, cfg.statistic);
        }
    }

    // For each full-digital size (fd_rows x columns at fd_column_spacing_wl),
    // the smallest hybrid and DMA element count on N rows over the same
    // aperture whose rate reaches the full-digital rate.
    inline std::vector<MatchRow> match_fd_search(const ExperimentConfig &cfg)
    {
        cfg.validate();
        std::vector<MatchRow> table;
        for (auto cols : cfg.fd_columns)
        {
            MatchRow row;
            row.fd_columns = cols;
            row.fd_antennas = cols * cfg.fd_rows;
            row.fd_rate = detail::point_rate(cfg, Architecture::FullDigital, cfg.fd_rows, cols,
                                             cfg.fd_column_spacing_wl, cfg.waveguide_spacing_wl);
            const double aperture_wl = static_cast<double>(cols) * cfg.fd_column_spacing_wl;
            for (auto arch : {Architecture::Hybrid, Architecture::Dma})
            {
                if (!cfg.wants(arch))
                    continue;
                std::map<std::size_t, double> seen;
                auto rate = [&](std::size_t per_row) {
                    const double r = detail::point_rate(cfg, arch, cfg.N, per_row,
                                                        aperture_wl / static_cast<double>(per_row),
                                                        cfg.waveguide_spacing_wl);
                    seen[per_row] = r;
                    return r;
                };
                const std::size_t lo = arch == Architecture::Hybrid
                                           ? std::max<std::size_t>(1, (cfg.rf_chains() + cfg.N - 1) / cfg.N)
                                           : 1;
                const auto per_row = monotone_search(rate, row.fd_rate, lo, cfg.max_elements_per_waveguide);
                std::optional<std::size_t> L;
                double r = std::numeric_limits<double>::quiet_NaN();
                if (per_row)
                {
                    L = *per_row * cfg.N;
                    r = seen.at(*per_row);
                }
                if (arch == Architecture::Hybrid)
                {
                    row.required_L_hybrid = L;
                    row.hybrid_rate = r;
                }
                else
                {
                    row.required_L_dma = L;
                    row.dma_rate = r;
                }
            }
            table.push_back(row);
        }
        return table;
    }
}

#endif
