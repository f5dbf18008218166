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

#ifndef DMASIM_CHANNEL_HPP
#define DMASIM_CHANNEL_HPP

#include "dmasim/constants.hpp"
#include "dmasim/errors.hpp"
#include "dmasim/types.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace dmasim
{
    // Spatial correlation as a function of k * distance.
    using CorrelationKernel = std::function<double(double)>;

    // Isotropic 3-D scattering: sin(kd)/(kd).
    inline double isotropic_kernel(double kd)
    {
        return kd == 0.0 ? 1.0 : std::sin(kd) / kd;
    }

    // Per-port channel variance that makes the single-antenna reference link
    // reach SNR delta: 2 k^2 w^2 eps^2 sigma_n^2 / (9 pi^2).
    inline double reference_channel_variance(const PhysicalConstants &c, double sigma_n2)
    {
        const double kwe = c.wavenumber * c.angular_frequency * c.permittivity;
        return 2.0 * kwe * kwe * sigma_n2 / (9.0 * std::numbers::pi * std::numbers::pi);
    }

    // Nominal SNR of the reference link for a channel of per-port variance
    // delta * sigma_y2. Equals delta when sigma_y2 is the reference variance.
    inline double calibrate_reference_snr(const PhysicalConstants &c, double sigma_n2, double delta,
                                          double sigma_y2)
    {
        const double kwe = c.wavenumber * c.angular_frequency * c.permittivity;
        return delta * (sigma_y2 / sigma_n2) * 9.0 * std::numbers::pi * std::numbers::pi / (2.0 * kwe * kwe);
    }

    inline double calibrate_reference_snr(const PhysicalConstants &c, double sigma_n2, double delta)
    {
        return calibrate_reference_snr(c, sigma_n2, delta, reference_channel_variance(c, sigma_n2));
    }

    // Transmit power budget under which the simulated reference link
    // (one antenna with self admittance y_tt, one user with load y_r and
    // self admittance y_rr, channel variance delta * sigma_y2) has mean
    // received SNR delta. With the default blocks this is 2 sigma_n^2.
    inline double reference_transmit_power(const PhysicalConstants &c, double sigma_n2)
    {
        const double g = c.dipole_self_admittance();
        const double y_r = g, y_rr = g, y_tt = g;
        const double yr_tilde2 = (y_r / 2.0) / ((y_r + y_rr) * (y_r + y_rr));
        return sigma_n2 * y_tt / (2.0 * yr_tilde2 * reference_channel_variance(c, sigma_n2));
    }

    // sigma_y^2 * kernel(k |r_p - r_q|)
    inline CMatrix build_covariance(const std::vector<Vec3> &positions, const PhysicalConstants &c,
                                    double sigma_n2, const CorrelationKernel &kernel = isotropic_kernel)
    {
        if (positions.empty())
            throw Error(ErrorCode::Config, "covariance needs at least one port");
        const double s2 = reference_channel_variance(c, sigma_n2);
        const std::size_t p = positions.size();
        CMatrix sigma(p, p);
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = a; b < p; ++b)
            {
                const double v = s2 * kernel(c.wavenumber * (positions[a] - positions[b]).norm());
                sigma(a, b) = v;
                sigma(b, a) = v;
            }
        return sigma;
    }

    // Hermitian square root of a PSD covariance. Slightly negative
    // eigenvalues (|lambda| <= 1e-10 trace) are clipped; anything worse is a
    // modelling error.
    inline CMatrix covariance_sqrt(const CMatrix &sigma)
    {
        const CMatrix herm = 0.5 * (sigma + sigma.adjoint());
        Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
        if (es.info() != Eigen::Success)
            throw Error(ErrorCode::Covariance, "eigen-decomposition of covariance failed");
        const double trace = herm.trace().real();
        RVector ev = es.eigenvalues();
        if (ev.minCoeff() < -1e-10 * std::abs(trace))
            throw Error(ErrorCode::Covariance, "covariance is not positive semidefinite");
        ev = ev.cwiseMax(0.0).cwiseSqrt();
        return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    }

    struct ChannelSpec
    {
        std::size_t users = 0;
        std::size_t ports = 0;
        CMatrix covariance;
        CMatrix coloring; // covariance^{1/2}
        double delta = 1.0;
        double sigma_n2 = 1.0;
        double sigma_x2 = 1.0;
    };

    inline ChannelSpec make_channel_spec(std::size_t users, CMatrix covariance, double delta,
                                         double sigma_n2 = 1.0, double sigma_x2 = 1.0)
    {
        if (users == 0)
            throw Error(ErrorCode::Config, "channel needs at least one user");
        if (delta < 0.0 || !(sigma_n2 > 0.0) || !(sigma_x2 > 0.0))
            throw Error(ErrorCode::Config, "delta >= 0 and positive noise/symbol powers required");
        ChannelSpec s;
        s.users = users;
        s.ports = static_cast<std::size_t>(covariance.rows());
        s.coloring = covariance_sqrt(covariance);
        s.covariance = std::move(covariance);
        s.delta = delta;
        s.sigma_n2 = sigma_n2;
        s.sigma_x2 = sigma_x2;
        return s;
    }

    struct ChannelRealization
    {
        CMatrix Y; // M x P wireless block (Y_rt or Y_rs); row m is F_m^T
        std::uint64_t seed = 0;
        std::size_t trial_index = 0;
    };

    inline std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Order-independent stream key for (parent, index).
    inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index)
    {
        return splitmix64(splitmix64(parent) ^ (index * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
    }

    // F_m ~ CN(0, delta Sigma), coloured with Sigma^{1/2}, from one stream seed.
    inline ChannelRealization draw_realization_seeded(const ChannelSpec &spec, std::uint64_t seed,
                                                      std::size_t trial = 0)
    {
        ChannelRealization r;
        r.seed = seed;
        r.trial_index = trial;
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
        CMatrix z(spec.users, spec.ports);
        for (Eigen::Index m = 0; m < z.rows(); ++m)
            for (Eigen::Index p = 0; p < z.cols(); ++p)
            {
                const double re = normal(rng);
                const double im = normal(rng);
                z(m, p) = {re, im};
            }
        r.Y = std::sqrt(spec.delta) * z * spec.coloring.transpose();
        return r;
    }

    // Depends only on (master_seed, trial).
    inline ChannelRealization draw_realization(const ChannelSpec &spec, std::uint64_t master_seed,
                                               std::size_t trial)
    {
        return draw_realization_seeded(spec, derive_seed(master_seed, trial), trial);
    }
}

#endif
