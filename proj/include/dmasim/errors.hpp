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

#ifndef DMASIM_ERRORS_HPP
#define DMASIM_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace dmasim
{
    enum class ErrorCode
    {
        None,
        DegenerateGeometry, // coincident ports
        Index,              // element mapped to a nonexistent waveguide
        Model,              // singular (Y_r + Y_rr) or non-physical load
        Configuration,      // singular element-load system (jY_s^im + Y_ss~)
        SuppliedPower,      // |Gamma| == 1, supplied power undefined
        Rank,               // rank-deficient equivalent channel
        Covariance,         // covariance not PSD within tolerance
        Allocation,         // negative power allocation in the hybrid precoder
        InvalidStart,       // objective not finite at the starting point
        Numerical,          // NaN produced by a callable
        Config,             // bad experiment configuration
        Io
    };

    inline std::string_view to_string(ErrorCode c)
    {
        switch (c)
        {
        case ErrorCode::None: return "";
        case ErrorCode::DegenerateGeometry: return "degenerate_geometry";
        case ErrorCode::Index: return "index";
        case ErrorCode::Model: return "model";
        case ErrorCode::Configuration: return "singular_configuration";
        case ErrorCode::SuppliedPower: return "supplied_power_singular";
        case ErrorCode::Rank: return "rank_deficient";
        case ErrorCode::Covariance: return "covariance";
        case ErrorCode::Allocation: return "power_allocation";
        case ErrorCode::InvalidStart: return "invalid_start";
        case ErrorCode::Numerical: return "numerical";
        case ErrorCode::Config: return "config";
        case ErrorCode::Io: return "io";
        }
        return "unknown";
    }

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorCode code, const std::string &what)
            : std::runtime_error(what), code_(code) {}

        ErrorCode code() const noexcept { return code_; }

    private:
        ErrorCode code_;
    };
}

#endif
