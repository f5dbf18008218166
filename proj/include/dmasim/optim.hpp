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

#ifndef DMASIM_OPTIM_HPP
#define DMASIM_OPTIM_HPP

#include "dmasim/errors.hpp"
#include "dmasim/types.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace dmasim::optim
{
    enum class HessianMode
    {
        QuasiNewtonBFGS,
        QuasiNewtonSR1
    };

    inline std::string_view to_string(HessianMode m)
    {
        return m == HessianMode::QuasiNewtonBFGS ? "bfgs" : "sr1";
    }

    struct TrSettings
    {
        double initial_radius = 1.0;
        double max_radius = 1e3;
        double eta_accept = 0.1;
        double grad_tol = 1e-6;
        std::size_t max_iters = 500;
        HessianMode hessian_mode = HessianMode::QuasiNewtonBFGS;
        double min_radius = 1e-12;

        void validate() const
        {
            if (!(eta_accept > 0.0 && eta_accept < 0.25))
                throw Error(ErrorCode::Config, "eta_accept must lie in (0, 0.25)");
            if (!(initial_radius > 0.0) || !(max_radius >= initial_radius) || !(min_radius > 0.0))
                throw Error(ErrorCode::Config, "trust radii must satisfy 0 < initial <= max");
            if (!(grad_tol > 0.0))
                throw Error(ErrorCode::Config, "grad_tol must be positive");
        }
    };

    struct TrOutcome
    {
        RVector x_best;
        double f_best = std::numeric_limits<double>::infinity();
        double grad_norm = std::numeric_limits<double>::infinity();
        std::size_t iterations = 0;
        bool converged = false;
        std::vector<double> f_history; // f at the start and after every accepted step
        std::vector<double> radii;     // trust radius used at every iteration
        std::string stop_reason;
    };

    namespace detail
    {
        // Dogleg step on the model m(p) = g^T p + p^T B p / 2 with |p| <= radius.
        // Falls back to the Cauchy point along -g when B is not positive definite.
        inline RVector dogleg(const RVector &g, const RMatrix &B, double radius)
        {
            const double gnorm = g.norm();
            const double gBg = g.dot(B * g);
            Eigen::LLT<RMatrix> llt(B);
            if (llt.info() != Eigen::Success)
            {
                double tau = 1.0;
                if (gBg > 0.0)
                    tau = std::min(gnorm * gnorm * gnorm / (radius * gBg), 1.0);
                return -tau * radius / gnorm * g;
            }
            const RVector pb = -llt.solve(g);
            if (pb.norm() <= radius)
                return pb;
            const RVector pu = -(gnorm * gnorm / gBg) * g;
            const double pun = pu.norm();
            if (pun >= radius)
                return -radius / gnorm * g;
            // |pu + tau (pb - pu)| = radius, tau in [0, 1]
            const RVector d = pb - pu;
            const double a = d.squaredNorm();
            const double b = 2.0 * pu.dot(d);
            const double c = pun * pun - radius * radius;
            const double tau = (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
            return pu + tau * d;
        }

        inline void update_hessian(RMatrix &B, const RVector &s, const RVector &y, HessianMode mode,
                                   bool &scaled)
        {
            const double sy = s.dot(y);
            if (mode == HessianMode::QuasiNewtonBFGS)
            {
                if (!(sy > 1e-12 * s.norm() * y.norm()))
                    return; // curvature condition fails: skip
                if (!scaled)
                {
                    B = RMatrix::Identity(B.rows(), B.cols()) * (y.squaredNorm() / sy);
                    scaled = true;
                }
                const RVector Bs = B * s;
                B += y * y.transpose() / sy - Bs * Bs.transpose() / s.dot(Bs);
            }
            else
            {
                const RVector r = y - B * s;
                const double rs = r.dot(s);
                if (std::abs(rs) < 1e-8 * s.norm() * r.norm())
                    return;
                B += r * r.transpose() / rs;
            }
            B = 0.5 * (B + B.transpose()).eval();
        }
    }

    // Unconstrained trust-region minimization with a quasi-Newton model and
    // dogleg steps. f(x) may return +inf to reject a point; NaN from either
    // callable aborts.
    template <typename Objective, typename Gradient>
    TrOutcome minimize(Objective &&f, Gradient &&grad, const RVector &x0, const TrSettings &settings)
    {
        settings.validate();
        TrOutcome out;
        RVector x = x0;
        double fx = f(x);
        if (std::isnan(fx))
            throw Error(ErrorCode::Numerical, "objective returned NaN at the starting point");
        if (!std::isfinite(fx))
            throw Error(ErrorCode::InvalidStart, "objective is not finite at the starting point");
        RVector g = grad(x);
        if (!g.allFinite())
            throw Error(ErrorCode::Numerical, "gradient is not finite at the starting point");

        const auto n = x.size();
        RMatrix B = RMatrix::Identity(n, n);
        bool scaled = false;
        double radius = settings.initial_radius;
        out.f_history.push_back(fx);

        std::size_t it = 0;
        for (; it < settings.max_iters; ++it)
        {
            const double gn = g.norm();
            if (gn < settings.grad_tol)
            {
                out.converged = true;
                out.stop_reason = "gradient tolerance";
                break;
            }
            if (radius < settings.min_radius)
            {
                out.stop_reason = "trust radius underflow";
                break;
            }

            out.radii.push_back(radius);
            const RVector p = detail::dogleg(g, B, radius);
            const double predicted = -(g.dot(p) + 0.5 * p.dot(B * p));
            const RVector x_new = x + p;
            const double f_new = f(x_new);
            if (std::isnan(f_new))
                throw Error(ErrorCode::Numerical, "objective returned NaN during trust-region step");

            double rho = -std::numeric_limits<double>::infinity();
            if (std::isfinite(f_new) && predicted > 0.0)
                rho = (fx - f_new) / predicted;

            const double pn = p.norm();
            if (rho < 0.25)
                radius = 0.25 * pn;
            else if (rho > 0.75 && pn >= 0.99 * radius)
                radius = std::min(2.0 * radius, settings.max_radius);

            if (rho > settings.eta_accept && f_new < fx)
            {
                RVector g_new = grad(x_new);
                if (!g_new.allFinite())
                    throw Error(ErrorCode::Numerical, "gradient is not finite during trust-region step");
                detail::update_hessian(B, p, g_new - g, settings.hessian_mode, scaled);
                x = x_new;
                fx = f_new;
                g = std::move(g_new);
                out.f_history.push_back(fx);
            }
        }
        if (it == settings.max_iters && out.stop_reason.empty())
            out.stop_reason = "iteration limit";
        out.iterations = it;
        out.x_best = x;
        out.f_best = fx;
        out.grad_norm = g.norm();
        return out;
    }

    // Fourth-order central differences with step rel_step (1 + |x_i|); returns
    // max_i |g_i - fd_i| / (|g_i| + |fd_i| + floor).
    template <typename Objective, typename Gradient>
    double gradient_audit(Objective &&f, Gradient &&grad, const RVector &x, double rel_step = 1e-3,
                          double floor = 1e-12)
    {
        const RVector g = grad(x);
        double worst = 0.0;
        RVector xp = x;
        for (Eigen::Index i = 0; i < x.size(); ++i)
        {
            const double h = rel_step * (1.0 + std::abs(x(i)));
            auto at = [&](double t) {
                xp(i) = x(i) + t;
                const double v = f(xp);
                xp(i) = x(i);
                return v;
            };
            const double fd = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
            worst = std::max(worst, std::abs(g(i) - fd) / (std::abs(g(i)) + std::abs(fd) + floor));
        }
        return worst;
    }
}

#endif
