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

#ifndef DMASIM_COUPLING_HPP
#define DMASIM_COUPLING_HPP

#include "dmasim/constants.hpp"
#include "dmasim/errors.hpp"
#include "dmasim/types.hpp"

#include <cmath>
#include <numbers>

namespace dmasim
{
    // Pairwise mutual admittance between two ports. Implementations must be
    // symmetric in their arguments and have a passive self term.
    class CouplingModel
    {
    public:
        virtual ~CouplingModel() = default;

        virtual cplx mutual(const Vec3 &a, const Vec3 &b) const = 0;
        virtual cplx self(const Vec3 &a) const = 0;
    };

    // z-oriented magnetic dipoles on an infinite PEC plane. Uses the zz entry
    // of the free-space dyadic Green's function (exp(-jkR) convention)
    //
    //   G_zz = e^{-jkR}/(4 pi R) [ (1 - j/kR - 1/(kR)^2)
    //                              + (-1 + 3j/kR + 3/(kR)^2) (dz/R)^2 ]
    //
    // and Y = j 2 omega eps G_zz, the factor 2 being the image in the plane.
    // The real part tends to k omega eps/(3 pi) as R -> 0, which is the self
    // term.
    class HalfSpaceDipoleCoupling final : public CouplingModel
    {
    public:
        explicit HalfSpaceDipoleCoupling(const PhysicalConstants &c)
            : k_(c.wavenumber), scale_(2.0 * c.angular_frequency * c.permittivity),
              self_(c.dipole_self_admittance()), min_distance_(1e-9 * c.wavelength) {}

        cplx green_zz(const Vec3 &a, const Vec3 &b) const
        {
            const Vec3 d = b - a;
            const double r = d.norm();
            if (r < min_distance_)
                throw Error(ErrorCode::DegenerateGeometry, "coincident ports in air coupling");
            const double kr = k_ * r;
            const double cz = d.z() / r;
            const cplx t1 = 1.0 - j_unit / kr - 1.0 / (kr * kr);
            const cplx t2 = -1.0 + 3.0 * j_unit / kr + 3.0 / (kr * kr);
            return std::exp(-j_unit * kr) / (4.0 * std::numbers::pi * r) * (t1 + t2 * cz * cz);
        }

        cplx mutual(const Vec3 &a, const Vec3 &b) const override
        {
            return j_unit * scale_ * green_zz(a, b);
        }

        cplx self(const Vec3 &) const override { return {self_, 0.0}; }

    private:
        double k_;
        double scale_;
        double self_;
        double min_distance_;
    };

    // Dominant TE10 mode of a rectangular guide running along z from a feed
    // at z = 0 to a termination at z = length. Ports couple through the
    // direct wave and one wave reflected at the termination:
    //
    //   Y(z, z') = Yg [ e^{-j beta |z - z'|} + Gamma_L e^{-j beta (2 length - z - z')} ]
    //
    // Only the axial coordinate is used; callers only pair ports of the same
    // guide. The mode admittance Yg defaults to Y0 so an empty matched guide
    // presents no reflection at its feed.
    class Te10GuideCoupling final : public CouplingModel
    {
    public:
        Te10GuideCoupling(const PhysicalConstants &c, double width, double length,
                          cplx termination_reflection = {0.0, 0.0}, double mode_admittance = 0.0)
            : length_(length), gamma_l_(termination_reflection),
              yg_(mode_admittance > 0.0 ? mode_admittance : c.characteristic_admittance)
        {
            const double kc = std::numbers::pi / width;
            if (!(width > 0.0) || !(c.wavenumber > kc))
                throw Error(ErrorCode::Config, "waveguide TE10 mode is below cutoff");
            if (std::abs(termination_reflection) > 1.0)
                throw Error(ErrorCode::Config, "termination reflection must satisfy |Gamma_L| <= 1");
            beta_ = std::sqrt(c.wavenumber * c.wavenumber - kc * kc);
        }

        double propagation_constant() const { return beta_; }
        double mode_admittance() const { return yg_; }

        cplx mutual(const Vec3 &a, const Vec3 &b) const override
        {
            const double za = a.z(), zb = b.z();
            return yg_ * (std::exp(-j_unit * (beta_ * std::abs(za - zb))) +
                          gamma_l_ * std::exp(-j_unit * (beta_ * (2.0 * length_ - za - zb))));
        }

        cplx self(const Vec3 &a) const override { return mutual(a, a); }

    private:
        double length_;
        cplx gamma_l_;
        double yg_;
        double beta_ = 0.0;
    };
}

#endif
