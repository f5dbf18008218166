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

#ifndef DMASIM_EQUIVCHAN_HPP
#define DMASIM_EQUIVCHAN_HPP

#include "dmasim/channel.hpp"
#include "dmasim/errors.hpp"
#include "dmasim/linalg.hpp"
#include "dmasim/netmodel.hpp"
#include "dmasim/types.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace dmasim
{
    struct EquivalentChannel
    {
        CMatrix H; // M x N
        Architecture architecture = Architecture::FullDigital;
        CMatrix Yr_tilde; // sqrt(Re{y_r}/2) (Y_r + Y_rr)^{-1}
        std::vector<std::string> warnings;
    };

    // Receive normalization; scales the user currents so that |y|^2 is the
    // received power.
    inline CMatrix receive_normalization(const UserBlock &u)
    {
        const auto m = u.Yrr.rows();
        if ((u.Yr.real().array() <= 0.0).any())
            throw Error(ErrorCode::Model, "user loads need a positive real part");
        CMatrix total = u.Yrr;
        total.diagonal() += u.Yr;
        const CheckedLu lu(total, ErrorCode::Model, "Y_r + Y_rr");
        const RVector scale = (u.Yr.real() / 2.0).cwiseSqrt();
        return scale.asDiagonal() * lu.solve(CMatrix::Identity(m, m));
    }

    // General form: H = Yr~ (Y_rs (Y_s + Y_ss)^{-1} Y_st - Y_rt). Pass empty
    // element blocks for FD/hybrid and an empty Y_rt for a DMA.
    inline CMatrix equivalent_channel_general(const UserBlock &u, const CMatrix &Yrs, const CVector &ys,
                                              const CMatrix &Yss, const CMatrix &Yst, const CMatrix &Yrt)
    {
        const CMatrix yr_t = receive_normalization(u);
        CMatrix inner;
        if (Yss.size() > 0)
        {
            CMatrix a = Yss;
            a.diagonal() += ys;
            const CheckedLu lu(a, ErrorCode::Configuration, "Y_s + Y_ss");
            inner = Yrs * lu.solve(Yst);
        }
        else
        {
            inner = CMatrix::Zero(Yrt.rows(), Yrt.cols());
        }
        if (Yrt.size() > 0)
            inner -= Yrt;
        return yr_t * inner;
    }

    // H = -Yr~ Y_rt
    inline EquivalentChannel equivalent_channel_fd(const UserBlock &u, const ChannelRealization &chan)
    {
        EquivalentChannel e;
        e.architecture = Architecture::FullDigital;
        e.Yr_tilde = receive_normalization(u);
        e.H = -e.Yr_tilde * chan.Y;
        return e;
    }

    // jY_s^im + R_s I + Y_ss
    inline CMatrix dma_inner_matrix(const AdmittanceSet &s, const RVector &ys_im)
    {
        if (ys_im.size() != s.Yss.rows())
            throw Error(ErrorCode::Config, "load vector length must equal the element count");
        CMatrix a = s.Yss;
        a.diagonal().array() += cplx(s.Rs, 0.0);
        a.diagonal() += j_unit * ys_im.cast<cplx>();
        return a;
    }

    // H = Yr~ Y_rs (jY_s^im + Y_ss~)^{-1} Y_st, using a linear solve.
    inline EquivalentChannel equivalent_channel_dma(const AdmittanceSet &s, const UserBlock &u,
                                                    const ChannelRealization &chan, const RVector &ys_im)
    {
        EquivalentChannel e;
        e.architecture = Architecture::Dma;
        e.Yr_tilde = receive_normalization(u);
        const CheckedLu lu(dma_inner_matrix(s, ys_im), ErrorCode::Configuration, "jY_s^im + Y_ss");
        e.warnings = lu.warnings;
        e.H = e.Yr_tilde * chan.Y * lu.solve(s.Yst);
        return e;
    }

    // Y_p = Y_tt - Y_st^T (Y_s + Y_ss)^{-1} Y_st
    inline CMatrix transmitter_admittance_dma(const AdmittanceSet &s, const RVector &ys_im)
    {
        const CheckedLu lu(dma_inner_matrix(s, ys_im), ErrorCode::Configuration, "jY_s^im + Y_ss");
        return s.Ytt - s.Yst.transpose() * lu.solve(s.Yst);
    }

    struct Reflection
    {
        CVector gamma;       // diagonal of Gamma
        RVector supply_gain; // 1 / (1 - |Gamma_n|^2), diagonal of (I - Gamma^H Gamma)^{-1}
        CMatrix Yq;          // (I - Gamma^H Gamma)^{-1} Y_p
        std::vector<std::string> warnings;
    };

    // Feed reflections from the diagonal of Y_p (cross-waveguide terms
    // ignored) against the source admittance Y0.
    inline Reflection reflection_and_supply(const CMatrix &Yp, double y0)
    {
        const auto n = Yp.rows();
        Reflection r;
        r.gamma.resize(n);
        r.supply_gain.resize(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const cplx yin = Yp(i, i);
            const cplx den = yin + y0;
            if (std::abs(den) == 0.0)
                throw Error(ErrorCode::Model, "Y_in + Y0 is singular");
            r.gamma(i) = (yin - y0) / den;
            const double mag2 = std::norm(r.gamma(i));
            if (std::abs(1.0 - mag2) <= 1e-12)
                throw Error(ErrorCode::SuppliedPower, "|Gamma| = 1 at feed " + std::to_string(i));
            if (mag2 > 1.0)
                r.warnings.push_back("|Gamma| > 1 at feed " + std::to_string(i) + " (active port)");
            r.supply_gain(i) = 1.0 / (1.0 - mag2);
        }
        r.Yq = r.supply_gain.cast<cplx>().asDiagonal() * Yp;
        return r;
    }

    // (sigma_x^2 / 2) Tr{Re{B^H Y B}}. FD/hybrid pass Y_tt, DMA passes Y_p.
    inline double transmitted_power(const CMatrix &B, const CMatrix &Y, double sigma_x2)
    {
        if (B.rows() != Y.cols() || Y.rows() != Y.cols())
            throw Error(ErrorCode::Config, "precoder and admittance dimensions disagree");
        return 0.5 * sigma_x2 * (B.adjoint() * Y * B).trace().real();
    }

    // (sigma_x^2 / 2) Tr{Re{B^H Y_q B}}
    inline double supplied_power(const CMatrix &B, const CMatrix &Yq, double sigma_x2)
    {
        return transmitted_power(B, Yq, sigma_x2);
    }

    struct PowerReport
    {
        double Pt = 0.0;
        double Ps = 0.0;
        CVector gamma;
        CMatrix Yp;
        CMatrix Yq;
    };

    inline PowerReport dma_power_report(const AdmittanceSet &s, const RVector &ys_im, const CMatrix &B,
                                        double y0, double sigma_x2)
    {
        PowerReport p;
        p.Yp = transmitter_admittance_dma(s, ys_im);
        Reflection r = reflection_and_supply(p.Yp, y0);
        p.gamma = std::move(r.gamma);
        p.Yq = std::move(r.Yq);
        p.Pt = transmitted_power(B, p.Yp, sigma_x2);
        p.Ps = supplied_power(B, p.Yq, sigma_x2);
        return p;
    }
}

#endif
