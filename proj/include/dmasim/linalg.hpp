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

#ifndef DMASIM_LINALG_HPP
#define DMASIM_LINALG_HPP

#include "dmasim/errors.hpp"
#include "dmasim/types.hpp"

#include <Eigen/LU>

#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace dmasim
{
    inline constexpr double ill_conditioned_threshold = 1e12;

    // LU with partial pivoting plus a reciprocal condition estimate.
    // Exactly singular (or non-finite) systems throw; ill-conditioned ones
    // only add a warning.
    struct CheckedLu
    {
        Eigen::PartialPivLU<CMatrix> lu;
        double rcond = 0.0;
        std::vector<std::string> warnings;

        CheckedLu(const CMatrix &a, ErrorCode on_singular, std::string_view what)
        {
            if (!a.allFinite())
                throw Error(on_singular, std::string(what) + ": non-finite matrix");
            lu.compute(a);
            rcond = lu.rcond();
            const bool zero_pivot = (lu.matrixLU().diagonal().array().abs() == 0.0).any();
            if (zero_pivot || !(rcond > std::numeric_limits<double>::epsilon() * 1e-2))
            {
                std::ostringstream os;
                os << what << ": singular matrix (rcond estimate " << rcond << ")";
                throw Error(on_singular, os.str());
            }
            if (1.0 / rcond > ill_conditioned_threshold)
            {
                std::ostringstream os;
                os << what << ": condition estimate " << 1.0 / rcond << " exceeds 1e12";
                warnings.push_back(os.str());
            }
        }

        template <typename Rhs>
        CMatrix solve(const Rhs &b) const { return lu.solve(b); }
    };

    inline double frobenius_asymmetry(const CMatrix &y)
    {
        return (y - y.transpose()).norm();
    }
}

#endif
