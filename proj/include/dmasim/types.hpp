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

#ifndef DMASIM_TYPES_HPP
#define DMASIM_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <string_view>

namespace dmasim
{
    using cplx = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    using CVector = Eigen::VectorXcd;
    using RMatrix = Eigen::MatrixXd;
    using RVector = Eigen::VectorXd;
    using Vec3 = Eigen::Vector3d;

    inline constexpr cplx j_unit{0.0, 1.0};

    enum class Architecture
    {
        FullDigital,
        Hybrid,
        Dma
    };

    inline std::string_view to_string(Architecture a)
    {
        switch (a)
        {
        case Architecture::FullDigital:
            return "fd";
        case Architecture::Hybrid:
            return "hybrid";
        case Architecture::Dma:
            return "dma";
        }
        return "unknown";
    }
}

#endif
