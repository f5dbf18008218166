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

#ifndef DMASIM_HARNESS_GRADCHECK_HPP
#define DMASIM_HARNESS_GRADCHECK_HPP

#include "dmasim/channel.hpp"
#include "dmasim/geometry.hpp"
#include "dmasim/netmodel.hpp"
#include "dmasim/optim.hpp"
#include "dmasim/precoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace dmasim::harness
{
    // A random small DMA design problem and a load vector to audit at.
    struct GradInstance
    {
        std::size_t N = 0, L = 0, M = 0;
        double spacing_wl = 0.0;
        double r_s = 0.0;
        ZfObjectiveContext ctx;
        RVector x;
    };

    // N <= 4, L <= 10, M <= min(N, 3). Retries until the objective is finite.
    inline GradInstance random_grad_instance(std::uint64_t seed)
    {
        const auto c = PhysicalConstants::at_frequency(10e9);
        for (std::uint64_t attempt = 0;; ++attempt)
        {
            std::mt19937_64 rng(derive_seed(seed, attempt));
            GradInstance g;
            g.N = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
            const std::size_t epw = std::uniform_int_distribution<std::size_t>(1, 10 / g.N)(rng);
            g.L = g.N * epw;
            g.M = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(g.N, 3))(rng);
            g.spacing_wl = std::uniform_real_distribution<double>(0.2, 0.6)(rng);
            g.r_s = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
            const auto geo = make_planar_array(Architecture::Dma, g.N, epw, g.spacing_wl * c.wavelength,
                                               c.wavelength, c);
            const auto s = assemble_dma_admittances(geo, c, CouplingMode::Full, g.r_s);
            const auto u = assemble_user_block(g.M, c);
            const auto spec =
                make_channel_spec(g.M, build_covariance(geo.element_positions, c, 1.0), std::pow(10.0, 1.3));
            const auto chan = draw_realization_seeded(spec, rng());
            g.ctx = ZfObjectiveContext::make(s, u, chan, c.characteristic_admittance,
                                             {reference_transmit_power(c, 1.0), 1.0, 1.0});
            const double w = default_init_halfwidth(g.ctx);
            std::uniform_real_distribution<double> d(-w, w);
            g.x.resize(static_cast<Eigen::Index>(g.L));
            for (Eigen::Index l = 0; l < g.x.size(); ++l)
                g.x(l) = d(rng);
            if (std::isfinite(dma_objective(g.x, g.ctx, false)))
                return g;
        }
    }

    struct GradCheckResult
    {
        double max_error = 0.0;
        std::vector<double> errors; // per instance, worst of both loss settings
    };

    // Audits the closed-form gradient with and without the reflection term.
    inline GradCheckResult gradient_check(std::size_t instances, std::uint64_t seed)
    {
        GradCheckResult r;
        for (std::size_t i = 0; i < instances; ++i)
        {
            const GradInstance g = random_grad_instance(derive_seed(seed, i));
            double worst = 0.0;
            for (bool ignore : {false, true})
            {
                DmaEvaluator ev(g.ctx, ignore);
                worst = std::max(worst, optim::gradient_audit([&](const RVector &y) { return ev.objective(y); },
                                                              [&](const RVector &y) { return ev.gradient(y); },
                                                              g.x));
            }
            r.errors.push_back(worst);
            r.max_error = std::max(r.max_error, worst);
        }
        return r;
    }
}

#endif
