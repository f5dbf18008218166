#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
#
# dmasim: admittance-network simulation of DMA, hybrid and full-digital MIMO downlink
# Copyright (C) 2026 The dmasim authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------

# Independent reference values for the coupling unit tests.
#
# G_zz is formed by symbolic-free numerical differentiation of the scalar
# Green's function, (1 + d^2/dz^2 / k^2) exp(-jkR) / (4 pi R), at 50 digits.
import mpmath as mp

mp.mp.dps = 50

c0 = mp.mpf(299792458)
f = mp.mpf(10) ** 10
eps = mp.mpf("8.8541878128e-12")
lam = c0 / f
k = 2 * mp.pi / lam
w = 2 * mp.pi * f


def scalar_green(dx, dy, dz):
    r = mp.sqrt(dx * dx + dy * dy + dz * dz)
    return mp.exp(-1j * k * r) / (4 * mp.pi * r)


def gzz(dx, dy, dz):
    d2 = mp.diff(lambda t: scalar_green(dx, dy, t), dz, 2)
    return scalar_green(dx, dy, dz) + d2 / (k * k)


def air_admittance(dx, dy, dz):
    return 1j * 2 * w * eps * gzz(dx, dy, dz)


def show(name, v):
    print(f"{name}: {mp.nstr(mp.re(v), 17)} {mp.nstr(mp.im(v), 17)}")


print(f"wavelength: {mp.nstr(lam, 17)}")
show("self_limit_R=1e-7lambda", air_admittance(0, 0, lam * mp.mpf("1e-7")))
print(f"k w eps / (3 pi): {mp.nstr(k * w * eps / (3 * mp.pi), 17)}")
show("along_z_0.5", air_admittance(0, 0, lam / 2))
show("along_x_0.5", air_admittance(lam / 2, 0, 0))
show("oblique_0.3_0.4", air_admittance(lam * mp.mpf("0.3"), 0, lam * mp.mpf("0.4")))
a = mp.mpf("0.73") * lam
print(f"beta_te10: {mp.nstr(mp.sqrt(k * k - (mp.pi / a) ** 2), 17)}")
print(f"log2(1 + 10^1.3): {mp.nstr(mp.log(1 + mp.mpf(10) ** mp.mpf('1.3'), 2), 17)}")
