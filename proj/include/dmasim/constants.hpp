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

#ifndef DMASIM_CONSTANTS_HPP
#define DMASIM_CONSTANTS_HPP

#include "dmasim/errors.hpp"

#include <cmath>
#include <numbers>

namespace dmasim
{
    inline constexpr double speed_of_light = 299792458.0;     // m/s
    inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F/m

    // Physical constants of one carrier. All admittances in the library are
    // "magnetic" admittances in siemens, so the free-space self term of a
    // magnetic dipole on a PEC plane is k*omega*eps/(3*pi).
    struct PhysicalConstants
    {
        double frequency = 10e9;
        double wavelength = 0.0;
        double wavenumber = 0.0;
        double angular_frequency = 0.0;
        double permittivity = vacuum_permittivity;
        double characteristic_admittance = 35.33; // Y0 at the waveguide feeds

        static PhysicalConstants at_frequency(double f, double y0 = 35.33,
                                              double eps = vacuum_permittivity)
        {
            if (!(f > 0.0) || !(y0 > 0.0) || !(eps > 0.0))
                throw Error(ErrorCode::Config, "frequency, Y0 and permittivity must be positive");
            PhysicalConstants c;
            c.frequency = f;
            c.wavelength = speed_of_light / f;
            c.wavenumber = 2.0 * std::numbers::pi / c.wavelength;
            c.angular_frequency = 2.0 * std::numbers::pi * f;
            c.permittivity = eps;
            c.characteristic_admittance = y0;
            return c;
        }

        // k*omega*eps/(3*pi)
        double dipole_self_admittance() const
        {
            return wavenumber * angular_frequency * permittivity / (3.0 * std::numbers::pi);
        }
    };
}

#endif
