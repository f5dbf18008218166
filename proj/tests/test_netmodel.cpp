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

#include "dmasim/netmodel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace dmasim;

namespace
{
    const PhysicalConstants c10 = PhysicalConstants::at_frequency(10e9);

    void expect_near_rel(cplx got, cplx want, double tol)
    {
        EXPECT_LE(std::abs(got - want), tol * std::abs(want)) << "got " << got << " want " << want;
    }
}

TEST(Constants, DerivedQuantities)
{
    EXPECT_NEAR(c10.wavelength, 0.0299792458, 1e-16);
    EXPECT_DOUBLE_EQ(c10.wavenumber, 2.0 * std::numbers::pi / c10.wavelength);
    EXPECT_DOUBLE_EQ(c10.angular_frequency, 2.0 * std::numbers::pi * 10e9);
    EXPECT_DOUBLE_EQ(c10.characteristic_admittance, 35.33);
    EXPECT_THROW(PhysicalConstants::at_frequency(-1.0), Error);
}

TEST(Constants, SelfAdmittanceMatchesOracle)
{
    // kwe/(3 pi) at 10 GHz, 50-digit oracle
    EXPECT_NEAR(c10.dipole_self_admittance(), 12.371336967254753, 1e-12);
}

TEST(AirCoupling, SmallSeparationTendsToSelfTerm)
{
    const HalfSpaceDipoleCoupling air(c10);
    const cplx y = air.mutual({0, 0, 0}, {0, 0, 1e-4 * c10.wavelength});
    EXPECT_NEAR(y.real(), c10.dipole_self_admittance(), 1e-6 * c10.dipole_self_admittance());
}

TEST(AirCoupling, MatchesNumericalDifferentiationOracle)
{
    const HalfSpaceDipoleCoupling air(c10);
    const double lam = c10.wavelength;
    expect_near_rel(air.mutual({0, 0, 0}, {0, 0, 0.5 * lam}), {3.7604355142813826, -1.1969838005523912}, 1e-12);
    expect_near_rel(air.mutual({0, 0, 0}, {0.5 * lam, 0, 0}), {-1.8802177571406913, -5.3083863927060781}, 1e-12);
    expect_near_rel(air.mutual({0, 0, 0}, {0.3 * lam, 0, 0.4 * lam}), {1.729800336569436, -2.6770887337277185},
                    1e-12);
}

TEST(AirCoupling, CoincidentPortsAreDegenerate)
{
    const HalfSpaceDipoleCoupling air(c10);
    try
    {
        air.mutual({1, 2, 3}, {1, 2, 3});
        FAIL();
    }
    catch (const Error &e)
    {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateGeometry);
    }
}

TEST(GuideCoupling, PropagationConstantMatchesOracle)
{
    const Te10GuideCoupling guide(c10, 0.73 * c10.wavelength, 0.1);
    EXPECT_NEAR(guide.propagation_constant(), 152.70483182243483, 1e-10);
    EXPECT_THROW(Te10GuideCoupling(c10, 0.4 * c10.wavelength, 0.1), Error);
    EXPECT_THROW(Te10GuideCoupling(c10, 0.73 * c10.wavelength, 0.1, {1.5, 0.0}), Error);
}

TEST(GuideCoupling, MatchedGuideIsTravellingWave)
{
    const Te10GuideCoupling guide(c10, 0.73 * c10.wavelength, 0.1);
    const double beta = guide.propagation_constant();
    const cplx y = guide.mutual({0, 0, 0.01}, {0, 0, 0.03});
    expect_near_rel(y, 35.33 * std::exp(cplx(0.0, -beta * 0.02)), 1e-14);
    EXPECT_EQ(guide.mutual({0, 0, 0.01}, {0, 0, 0.03}), guide.mutual({0, 0, 0.03}, {0, 0, 0.01}));
}

TEST(FdYtt, SingleAntennaIsSelfTerm)
{
    const auto g = make_planar_array(Architecture::FullDigital, 1, 1, 0.5 * c10.wavelength, c10.wavelength, c10);
    const CMatrix y = assemble_fd_ytt(g, c10);
    ASSERT_EQ(y.rows(), 1);
    EXPECT_DOUBLE_EQ(y(0, 0).real(), c10.dipole_self_admittance());
    EXPECT_EQ(y(0, 0).imag(), 0.0);
}

TEST(FdYtt, SymmetricAndOffDiagonalFromModel)
{
    const auto g = make_planar_array(Architecture::FullDigital, 2, 3, 0.5 * c10.wavelength, c10.wavelength, c10);
    const CMatrix y = assemble_fd_ytt(g, c10);
    EXPECT_EQ((y - y.transpose()).norm(), 0.0);
    const HalfSpaceDipoleCoupling air(c10);
    EXPECT_EQ(y(0, 1), air.mutual(g.element_positions[0], g.element_positions[1]));
    expect_near_rel(y(0, 1), {3.7604355142813826, -1.1969838005523912}, 1e-12);
}

TEST(FdYtt, DuplicatePositionsRejected)
{
    auto g = make_planar_array(Architecture::FullDigital, 2, 1, 0.5 * c10.wavelength, c10.wavelength, c10);
    g.element_positions[1] = g.element_positions[0];
    EXPECT_THROW(assemble_fd_ytt(g, c10), Error);
}

TEST(DmaAdmittances, TopologyOfYst)
{
    const auto g = make_planar_array(Architecture::Dma, 2, 2, 0.5 * c10.wavelength, c10.wavelength, c10);
    const auto s = assemble_dma_admittances(g, c10);
    ASSERT_EQ(s.Yst.rows(), 4);
    ASSERT_EQ(s.Yst.cols(), 2);
    for (Eigen::Index n = 0; n < 2; ++n)
    {
        int nz = 0;
        for (Eigen::Index l = 0; l < 4; ++l)
            nz += s.Yst(l, n) != cplx(0.0, 0.0);
        EXPECT_EQ(nz, 2);
    }
    EXPECT_EQ((s.Yss - s.Yss.transpose()).norm(), 0.0);
    EXPECT_TRUE(s.Ytt.isDiagonal());
}

TEST(DmaAdmittances, CrossGuideEntriesAreAirOnly)
{
    const auto g = make_planar_array(Architecture::Dma, 2, 2, 0.5 * c10.wavelength, c10.wavelength, c10);
    const auto full = assemble_dma_admittances(g, c10, CouplingMode::Full);
    const auto noair = assemble_dma_admittances(g, c10, CouplingMode::NoAir);
    const HalfSpaceDipoleCoupling air(c10);
    // elements 0,1 on guide 0; 2,3 on guide 1
    EXPECT_EQ(noair.Yss(0, 2), cplx(0.0, 0.0));
    EXPECT_EQ(full.Yss(0, 2), air.mutual(g.element_positions[0], g.element_positions[2]));
    expect_near_rel(full.Yss(0, 1) - noair.Yss(0, 1), air.mutual(g.element_positions[0], g.element_positions[1]),
                    1e-13);
}

TEST(DmaAdmittances, Ablations)
{
    const auto g = make_planar_array(Architecture::Dma, 3, 4, 0.2 * c10.wavelength, c10.wavelength, c10);
    const auto full = assemble_dma_admittances(g, c10, CouplingMode::Full);
    const auto noair = assemble_dma_admittances(g, c10, CouplingMode::NoAir);
    const auto none = assemble_dma_admittances(g, c10, CouplingMode::NoCoupling);
    EXPECT_TRUE(none.Yss.isDiagonal(0.0));
    EXPECT_EQ((none.Yss.diagonal() - full.Yss.diagonal()).norm(), 0.0);
    EXPECT_EQ((noair.Yss.diagonal() - full.Yss.diagonal()).norm(), 0.0);
    // NoAir equals the guide part plus the air self terms
    const Te10GuideCoupling guide(c10, g.waveguide_width, g.guide_length());
    const HalfSpaceDipoleCoupling air(c10);
    for (std::size_t a = 0; a < g.element_count(); ++a)
        for (std::size_t b = 0; b < g.element_count(); ++b)
        {
            cplx want = 0.0;
            if (g.element_waveguide[a] == g.element_waveguide[b])
                want = guide.mutual(g.element_positions[a], g.element_positions[b]);
            if (a == b)
                want += air.self(g.element_positions[a]);
            EXPECT_EQ(noair.Yss(a, b), want);
        }
}

TEST(DmaAdmittances, ElementOnMissingWaveguideIsIndexError)
{
    auto g = make_planar_array(Architecture::Dma, 2, 2, 0.5 * c10.wavelength, c10.wavelength, c10);
    g.element_waveguide[3] = 7;
    try
    {
        assemble_dma_admittances(g, c10);
        FAIL();
    }
    catch (const Error &e)
    {
        EXPECT_EQ(e.code(), ErrorCode::Index);
    }
}

TEST(DmaAdmittances, RejectsWrongArchitectureAndNegativeRs)
{
    const auto fd = make_planar_array(Architecture::FullDigital, 1, 2, 0.5 * c10.wavelength, c10.wavelength, c10);
    EXPECT_THROW(assemble_dma_admittances(fd, c10), Error);
    const auto g = make_planar_array(Architecture::Dma, 1, 2, 0.5 * c10.wavelength, c10.wavelength, c10);
    EXPECT_THROW(assemble_dma_admittances(g, c10, CouplingMode::Full, -1.0), Error);
}

TEST(Geometry, PositionsIncreaseAlongGuide)
{
    auto g = make_planar_array(Architecture::Dma, 1, 3, 0.5 * c10.wavelength, c10.wavelength, c10);
    std::swap(g.element_positions[0], g.element_positions[1]);
    EXPECT_THROW(g.validate(), Error);
}

TEST(UserBlock, WellSeparatedUsers)
{
    const auto u1 = assemble_user_block(1, c10);
    EXPECT_DOUBLE_EQ(u1.Yrr(0, 0).real(), c10.dipole_self_admittance());
    EXPECT_EQ(u1.Yr(0), u1.Yrr(0, 0));
    const auto u5 = assemble_user_block(5, c10);
    EXPECT_TRUE(u5.Yrr.isDiagonal(0.0));
    for (Eigen::Index m = 0; m < 5; ++m)
    {
        EXPECT_EQ(u5.Yrr(m, m), u5.Yrr(0, 0));
        EXPECT_DOUBLE_EQ((u5.Yr(m) + u5.Yrr(m, m)).real(), 2.0 * u5.Yrr(m, m).real());
    }
    EXPECT_THROW(assemble_user_block(0, c10), Error);
}
