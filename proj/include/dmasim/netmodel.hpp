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

#ifndef DMASIM_NETMODEL_HPP
#define DMASIM_NETMODEL_HPP

#include "dmasim/constants.hpp"
#include "dmasim/coupling.hpp"
#include "dmasim/errors.hpp"
#include "dmasim/geometry.hpp"
#include "dmasim/types.hpp"

#include <cstddef>
#include <string>
#include <string_view>

namespace dmasim
{
    // Mutual-coupling ablations applied to Y_ss.
    enum class CouplingMode
    {
        Full,
        NoAir,      // drop element-to-element coupling through the air
        NoCoupling  // keep only the diagonal of Y_ss
    };

    inline std::string_view to_string(CouplingMode m)
    {
        switch (m)
        {
        case CouplingMode::Full: return "full";
        case CouplingMode::NoAir: return "no_air";
        case CouplingMode::NoCoupling: return "no_coupling";
        }
        return "unknown";
    }

    // Base-station side admittance blocks. For FD/hybrid arrays only Y_tt is
    // populated (L = 0).
    struct AdmittanceSet
    {
        CMatrix Ytt; // N x N
        CMatrix Yst; // L x N
        CMatrix Yss; // L x L
        double Rs = 0.0;

        std::size_t transmitters() const { return static_cast<std::size_t>(Ytt.rows()); }
        std::size_t elements() const { return static_cast<std::size_t>(Yss.rows()); }
    };

    // User side: coupling between users and their loads.
    struct UserBlock
    {
        CMatrix Yrr; // M x M
        CVector Yr;  // diagonal of the M x M load matrix
    };

    namespace detail
    {
        template <typename Fn>
        CMatrix symmetric_fill(std::size_t n, Fn &&entry)
        {
            CMatrix y(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = i; k < n; ++k)
                {
                    const cplx v = entry(i, k);
                    y(i, k) = v;
                    y(k, i) = v;
                }
            return y;
        }
    }

    // Y_tt of an FD or hybrid array: antenna self terms on the diagonal and
    // air coupling off it.
    inline CMatrix assemble_fd_ytt(const ArrayGeometry &g, const CouplingModel &air)
    {
        if (g.architecture == Architecture::Dma)
            throw Error(ErrorCode::Config, "assemble_fd_ytt needs an FD or hybrid geometry");
        const auto &p = g.element_positions;
        return detail::symmetric_fill(p.size(), [&](std::size_t a, std::size_t b)
                                      { return a == b ? air.self(p[a]) : air.mutual(p[a], p[b]); });
    }

    inline CMatrix assemble_fd_ytt(const ArrayGeometry &g, const PhysicalConstants &c)
    {
        return assemble_fd_ytt(g, HalfSpaceDipoleCoupling(c));
    }

    // Y_tt, Y_st and Y_ss of a DMA. Y_ss is the guide part (block diagonal
    // per waveguide) plus the air part (all pairs); ablations remove the
    // air off-diagonal or every off-diagonal entry.
    inline AdmittanceSet assemble_dma_admittances(const ArrayGeometry &g, const CouplingModel &air,
                                                  const CouplingModel &guide,
                                                  CouplingMode mode = CouplingMode::Full, double rs = 0.0)
    {
        if (g.architecture != Architecture::Dma)
            throw Error(ErrorCode::Config, "assemble_dma_admittances needs a DMA geometry");
        g.validate();
        if (rs < 0.0)
            throw Error(ErrorCode::Config, "parasitic resistance R_s must be >= 0");

        const std::size_t n_tx = g.waveguide_count;
        const std::size_t n_el = g.element_count();
        const auto &p = g.element_positions;
        const auto &wg = g.element_waveguide;

        AdmittanceSet s;
        s.Rs = rs;
        s.Ytt = CMatrix::Zero(n_tx, n_tx);
        for (std::size_t n = 0; n < n_tx; ++n)
            s.Ytt(n, n) = guide.self(g.feed_positions[n]);

        s.Yst = CMatrix::Zero(n_el, n_tx);
        for (std::size_t l = 0; l < n_el; ++l)
            s.Yst(l, wg[l]) = guide.mutual(p[l], g.feed_positions[wg[l]]);

        s.Yss = detail::symmetric_fill(n_el, [&](std::size_t a, std::size_t b) -> cplx
                                       {
            if (a == b)
                return guide.self(p[a]) + air.self(p[a]);
            if (mode == CouplingMode::NoCoupling)
                return 0.0;
            cplx v = (wg[a] == wg[b]) ? guide.mutual(p[a], p[b]) : cplx{0.0, 0.0};
            if (mode == CouplingMode::Full)
                v += air.mutual(p[a], p[b]);
            return v; });
        return s;
    }

    // Convenience overload with the reference coupling models. A matched
    // termination is the default.
    inline AdmittanceSet assemble_dma_admittances(const ArrayGeometry &g, const PhysicalConstants &c,
                                                  CouplingMode mode = CouplingMode::Full, double rs = 0.0,
                                                  cplx termination_reflection = {0.0, 0.0})
    {
        const HalfSpaceDipoleCoupling air(c);
        const Te10GuideCoupling guide(c, g.waveguide_width, g.guide_length(), termination_reflection);
        return assemble_dma_admittances(g, air, guide, mode, rs);
    }

    enum class UserSpacing
    {
        WellSeparated, // Y_rr diagonal
        FromPositions  // air coupling between given user positions
    };

    // Users are dipoles with conjugate-matched loads, Y_r = conj(diag Y_rr).
    inline UserBlock assemble_user_block(std::size_t m, const PhysicalConstants &c,
                                         UserSpacing mode = UserSpacing::WellSeparated,
                                         const std::vector<Vec3> &positions = {})
    {
        if (m == 0)
            throw Error(ErrorCode::Config, "at least one user required");
        UserBlock u;
        if (mode == UserSpacing::WellSeparated)
        {
            u.Yrr = CMatrix::Identity(m, m) * c.dipole_self_admittance();
        }
        else
        {
            if (positions.size() != m)
                throw Error(ErrorCode::Config, "user positions required for FromPositions spacing");
            const HalfSpaceDipoleCoupling air(c);
            u.Yrr = detail::symmetric_fill(m, [&](std::size_t a, std::size_t b)
                                           { return a == b ? air.self(positions[a]) : air.mutual(positions[a], positions[b]); });
        }
        u.Yr = u.Yrr.diagonal().conjugate();
        return u;
    }
}

#endif
