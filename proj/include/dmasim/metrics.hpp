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

#ifndef DMASIM_METRICS_HPP
#define DMASIM_METRICS_HPP

#include "dmasim/errors.hpp"
#include "dmasim/types.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace dmasim
{
    // gamma_m = |h_m b_m|^2 / (sigma_n^2/sigma_x^2 + sum_{k != m} |h_m b_k|^2)
    inline std::vector<double> sinr(const CMatrix &H, const CMatrix &B, double sigma_n2, double sigma_x2)
    {
        if (H.cols() != B.rows() || H.rows() != B.cols())
            throw Error(ErrorCode::Config, "sinr: H is M x N and B must be N x M");
        const RMatrix power = (H * B).cwiseAbs2();
        const double noise = sigma_n2 / sigma_x2;
        std::vector<double> out(static_cast<std::size_t>(H.rows()));
        for (Eigen::Index m = 0; m < H.rows(); ++m)
        {
            const double signal = power(m, m);
            const double interference = power.row(m).sum() - signal;
            out[static_cast<std::size_t>(m)] = signal / (noise + interference);
        }
        return out;
    }

    // Shannon rate log2(1 + gamma) per user.
    inline std::vector<double> per_user_rate(const std::vector<double> &gammas)
    {
        std::vector<double> r;
        r.reserve(gammas.size());
        for (double g : gammas)
        {
            if (g < 0.0)
                throw Error(ErrorCode::Config, "negative SINR");
            r.push_back(std::log2(1.0 + g));
        }
        return r;
    }

    inline double mean(const std::vector<double> &v)
    {
        if (v.empty())
            return 0.0;
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    }

    // One row of experiment output.
    struct TrialRecord
    {
        std::string scenario;
        std::string architecture;
        std::string loss_mode;
        std::string coupling_mode;
        std::size_t M = 0;
        std::size_t N = 0;
        std::size_t S = 0;
        std::size_t L = 0;
        double spacing_wl = 0.0;
        std::size_t trial_index = 0;
        std::uint64_t seed = 0;
        std::vector<double> per_user_rate;
        double mean_rate = 0.0;
        double P_t = 0.0;
        double P_s = 0.0;
        bool converged = false;
        std::size_t iterations = 0;
        std::string error;
        double wall_time = 0.0; // seconds; not serialized
    };
}

#endif
