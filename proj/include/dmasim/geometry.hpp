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

#ifndef DMASIM_GEOMETRY_HPP
#define DMASIM_GEOMETRY_HPP

#include "dmasim/constants.hpp"
#include "dmasim/errors.hpp"
#include "dmasim/types.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace dmasim
{
    // Planar array on the PEC plane y = 0. Rows (waveguides for a DMA) are
    // stacked along x; inside a row the ports advance along z, which is also
    // the dipole orientation. For FD/hybrid arrays every port is an antenna
    // and a "row" is only a layout device.
    struct ArrayGeometry
    {
        Architecture architecture = Architecture::Dma;
        std::size_t waveguide_count = 0;
        std::size_t elements_per_waveguide = 0;
        std::vector<Vec3> element_positions;
        std::vector<std::size_t> element_waveguide; // row index of each element
        std::vector<Vec3> feed_positions;           // one per waveguide (DMA only)
        std::vector<Vec3> user_positions;           // empty for stochastic channels
        double waveguide_width = 0.0;   // a
        double waveguide_height = 0.0;  // b
        double element_spacing = 0.0;
        double waveguide_spacing = 0.0;

        std::size_t element_count() const { return element_positions.size(); }

        // Length of each guide from feed plane to termination.
        double guide_length() const
        {
            return static_cast<double>(elements_per_waveguide) * element_spacing;
        }

        void validate() const
        {
            if (!(element_spacing > 0.0) || !(waveguide_spacing > 0.0))
                throw Error(ErrorCode::Config, "element and waveguide spacing must be positive");
            if (waveguide_count == 0 || elements_per_waveguide == 0)
                throw Error(ErrorCode::Config, "array must contain at least one element");
            if (element_waveguide.size() != element_positions.size())
                throw Error(ErrorCode::Index, "element/waveguide map size mismatch");
            if (architecture == Architecture::Dma)
            {
                if (element_positions.size() != waveguide_count * elements_per_waveguide)
                    throw Error(ErrorCode::Config, "DMA requires L = N x elements_per_waveguide");
                if (feed_positions.size() != waveguide_count)
                    throw Error(ErrorCode::Config, "one feed per waveguide required");
            }
            std::vector<double> last(waveguide_count, -1e300);
            for (std::size_t l = 0; l < element_positions.size(); ++l)
            {
                const std::size_t n = element_waveguide[l];
                if (n >= waveguide_count)
                    throw Error(ErrorCode::Index, "element " + std::to_string(l) +
                                                      " assigned to nonexistent waveguide " + std::to_string(n));
                const double z = element_positions[l].z();
                if (!(z > last[n]))
                    throw Error(ErrorCode::Config, "element positions must increase along each waveguide");
                last[n] = z;
            }
        }
    };

    // Rectangular layout: `rows` rows spaced `row_spacing` apart, `per_row`
    // ports per row at z = (i + 1/2) * spacing. A DMA feed sits at z = 0 of
    // each row. Waveguide cross-section defaults to a = 0.73 lambda,
    // b = 0.167 lambda.
    inline ArrayGeometry make_planar_array(Architecture arch, std::size_t rows, std::size_t per_row,
                                           double spacing, double row_spacing,
                                           const PhysicalConstants &c)
    {
        ArrayGeometry g;
        g.architecture = arch;
        g.waveguide_count = rows;
        g.elements_per_waveguide = per_row;
        g.element_spacing = spacing;
        g.waveguide_spacing = row_spacing;
        g.waveguide_width = 0.73 * c.wavelength;
        g.waveguide_height = 0.167 * c.wavelength;
        g.element_positions.reserve(rows * per_row);
        for (std::size_t n = 0; n < rows; ++n)
        {
            const double x = static_cast<double>(n) * row_spacing;
            for (std::size_t i = 0; i < per_row; ++i)
            {
                g.element_positions.emplace_back(x, 0.0, (static_cast<double>(i) + 0.5) * spacing);
                g.element_waveguide.push_back(n);
            }
            if (arch == Architecture::Dma)
                g.feed_positions.emplace_back(x, 0.0, 0.0);
        }
        g.validate();
        return g;
    }
}

#endif
