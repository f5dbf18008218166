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

#ifndef DMASIM_PRECODER_HPP
#define DMASIM_PRECODER_HPP

#include "dmasim/channel.hpp"
#include "dmasim/equivchan.hpp"
#include "dmasim/errors.hpp"
#include "dmasim/linalg.hpp"
#include "dmasim/metrics.hpp"
#include "dmasim/netmodel.hpp"
#include "dmasim/optim.hpp"
#include "dmasim/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace dmasim
{
    struct PowerBudget
    {
        double P_max = 2.0;
        double sigma_x2 = 1.0;
        double sigma_n2 = 1.0;
    };

    struct PrecoderSolution
    {
        Architecture architecture = Architecture::FullDigital;
        CMatrix B;     // N x M
        CMatrix Q;     // hybrid analog stage, N x S
        CMatrix R;     // hybrid digital stage, S x M
        RVector ys_im; // DMA element susceptances
        double achieved_power = 0.0;
        std::vector<double> gamma_per_user;
        bool converged = true;
        std::size_t iterations = 0;
        std::vector<double> objective_history;
        std::vector<std::vector<double>> start_histories; // DMA multi-start runs
        std::vector<std::string> warnings;
    };

    namespace detail
    {
        // Smallest / largest singular value of a wide matrix from its Gram.
        inline std::pair<double, double> singular_extremes(const CMatrix &H)
        {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(H * H.adjoint(), Eigen::EigenvaluesOnly);
            const RVector ev = es.eigenvalues().cwiseMax(0.0);
            return {std::sqrt(ev.minCoeff()), std::sqrt(ev.maxCoeff())};
        }

        inline void require_full_row_rank(const CMatrix &H)
        {
            if (H.rows() > H.cols())
                throw Error(ErrorCode::Rank, "more users than transmit ports");
            const auto [smin, smax] = singular_extremes(H);
            if (!(smin > 1e-12 * smax))
            {
                std::ostringstream os;
                os << "equivalent channel is rank deficient (smallest singular value " << smin << ")";
                throw Error(ErrorCode::Rank, os.str());
            }
        }

        // H^H (H H^H)^{-1} through a Cholesky factorization of the Gram matrix.
        inline std::optional<CMatrix> pseudo_inverse(const CMatrix &H)
        {
            Eigen::LLT<CMatrix> llt(H * H.adjoint());
            if (llt.info() != Eigen::Success)
                return std::nullopt;
            const auto m = H.rows();
            return CMatrix(H.adjoint() * llt.solve(CMatrix::Identity(m, m)));
        }
    }

    // Closed-form ZF, scaled so the transmitted power with Y_tt is P_max.
    inline PrecoderSolution zf_fd(const CMatrix &H, const CMatrix &Ytt, const PowerBudget &budget)
    {
        detail::require_full_row_rank(H);
        const auto hd = detail::pseudo_inverse(H);
        if (!hd)
            throw Error(ErrorCode::Rank, "Gram matrix of the equivalent channel is not positive definite");
        const double unit_power = transmitted_power(*hd, Ytt, budget.sigma_x2);
        PrecoderSolution s;
        s.architecture = Architecture::FullDigital;
        s.B = std::sqrt(budget.P_max / unit_power) * *hd;
        s.achieved_power = transmitted_power(s.B, Ytt, budget.sigma_x2);
        s.gamma_per_user = sinr(H, s.B, budget.sigma_n2, budget.sigma_x2);
        return s;
    }

    // ---------------------------------------------------------------- hybrid

    struct HybridSettings
    {
        std::size_t rf_chains = 0; // S
        double step = 1e-2;
        double step_growth = 1.5;  // after an accepted step
        std::size_t max_iters = 5000;
        double tol = 1e-6;         // on |grad|_F
        std::function<void(const CMatrix &)> observer; // sees Q at every iterate
    };

    // Auxiliary matrices for an analog stage Q:
    //   C_h = (Q^H Q)^{-1} Q^H H^H,  A_h = (H Q C_h)^{-1},
    //   U = (Q C_h - H^H) A_h,  V = (C_h A_h)^H.
    struct HybridAux
    {
        CMatrix Q, Ch, Ah, U, V;
    };

    inline std::optional<HybridAux> hybrid_aux(const CMatrix &H, const RMatrix &theta)
    {
        HybridAux a;
        a.Q = theta.unaryExpr([](double t) { return std::polar(1.0, t); });
        Eigen::LLT<CMatrix> gram(a.Q.adjoint() * a.Q);
        if (gram.info() != Eigen::Success)
            return std::nullopt;
        a.Ch = gram.solve(a.Q.adjoint() * H.adjoint());
        Eigen::LLT<CMatrix> t(H * a.Q * a.Ch);
        if (t.info() != Eigen::Success)
            return std::nullopt;
        a.Ah = t.solve(CMatrix::Identity(H.rows(), H.rows()));
        a.U = (a.Q * a.Ch - H.adjoint()) * a.Ah;
        a.V = (a.Ch * a.Ah).adjoint();
        return a;
    }

    // Negative water-filling sum rate of the ZF digital stage behind Q, up to
    // constants: sum_m log (A_h)_mm - M log(P_max/sigma_n^2 + Tr A_h).
    inline double hybrid_objective(const HybridAux &a, double snr_scale)
    {
        const RVector d = a.Ah.diagonal().real();
        if ((d.array() <= 0.0).any())
            return std::numeric_limits<double>::infinity();
        const double m = static_cast<double>(d.size());
        return d.array().log().sum() - m * std::log(snr_scale + d.sum());
    }

    // 2 Im{[U ((A_h o I)^{-1} - M/(P_max/sigma_n^2 + Tr A_h) I) V] o Q^*}
    inline RMatrix hybrid_gradient(const HybridAux &a, double snr_scale)
    {
        const RVector d = a.Ah.diagonal().real();
        const double m = static_cast<double>(d.size());
        const RVector lambda = d.cwiseInverse().array() - m / (snr_scale + d.sum());
        const CMatrix core = a.U * lambda.cast<cplx>().asDiagonal() * a.V;
        return 2.0 * core.cwiseProduct(a.Q.conjugate()).imag();
    }

    // Fully connected hybrid ZF: gradient descent on the phases of Q, then a
    // ZF digital stage with water-filling power allocation, scaled to P_max.
    inline PrecoderSolution zf_hybrid(const CMatrix &H, const CMatrix &Ytt, const PowerBudget &budget,
                                      const HybridSettings &settings, std::uint64_t seed)
    {
        const auto m = H.rows();
        const auto n = H.cols();
        const auto s = static_cast<Eigen::Index>(settings.rf_chains);
        if (!(m <= s && s <= n))
            throw Error(ErrorCode::Config, "hybrid precoding needs M <= S <= N");
        detail::require_full_row_rank(H);

        const double snr_scale = budget.P_max / budget.sigma_n2;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        RMatrix theta(n, s);
        for (Eigen::Index i = 0; i < theta.size(); ++i)
            theta.data()[i] = phase(rng);

        auto aux = hybrid_aux(H, theta);
        for (int retry = 0; !aux && retry < 16; ++retry)
        {
            for (Eigen::Index i = 0; i < theta.size(); ++i)
                theta.data()[i] = phase(rng);
            aux = hybrid_aux(H, theta);
        }
        if (!aux)
            throw Error(ErrorCode::Rank, "no full-rank analog stage found");

        PrecoderSolution sol;
        sol.architecture = Architecture::Hybrid;
        sol.converged = false;
        double f = hybrid_objective(*aux, snr_scale);
        sol.objective_history.push_back(f);
        double step = settings.step;
        std::size_t it = 0;
        for (; it < settings.max_iters; ++it)
        {
            if (settings.observer)
                settings.observer(aux->Q);
            const RMatrix g = hybrid_gradient(*aux, snr_scale);
            if (g.norm() < settings.tol)
            {
                sol.converged = true;
                break;
            }
            bool accepted = false;
            while (step > 1e-14)
            {
                const RMatrix trial = theta - step * g;
                auto trial_aux = hybrid_aux(H, trial);
                const double f_trial = trial_aux ? hybrid_objective(*trial_aux, snr_scale)
                                                 : std::numeric_limits<double>::infinity();
                if (f_trial <= f)
                {
                    theta = trial;
                    aux = std::move(trial_aux);
                    f = f_trial;
                    sol.objective_history.push_back(f);
                    step *= settings.step_growth;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted)
                break; // no descent possible at machine precision
        }
        if (settings.observer)
            settings.observer(aux->Q);
        sol.iterations = it;

        // O = C_h A_h makes H Q O = I; P allocates power per user.
        const CMatrix O = aux->Ch * aux->Ah;
        const RVector a = aux->Ah.diagonal().real();
        const double level = (budget.P_max + a.sum() * budget.sigma_n2) / static_cast<double>(m);
        RVector p(m);
        for (Eigen::Index k = 0; k < m; ++k)
        {
            const double q = level / a(k) - budget.sigma_n2;
            if (q < 0.0)
                throw Error(ErrorCode::Allocation, "negative power allocation for user " + std::to_string(k));
            p(k) = std::sqrt(q);
        }
        CMatrix R = O * p.cast<cplx>().asDiagonal();
        const double unit_power = transmitted_power(aux->Q * R, Ytt, budget.sigma_x2);
        R *= std::sqrt(budget.P_max / unit_power);

        sol.Q = aux->Q;
        sol.R = R;
        sol.B = sol.Q * sol.R;
        sol.achieved_power = transmitted_power(sol.B, Ytt, budget.sigma_x2);
        sol.gamma_per_user = sinr(H, sol.B, budget.sigma_n2, budget.sigma_x2);
        return sol;
    }

    // ------------------------------------------------------------------- DMA

    enum class LossMode
    {
        WithLoss,   // optimize the supplied-power objective
        NoLoss,     // Gamma = 0 in objective and gradient
        Compensated // NoLoss design, rescaled to the true supplied power
    };

    inline std::string_view to_string(LossMode m)
    {
        switch (m)
        {
        case LossMode::WithLoss: return "with_loss";
        case LossMode::NoLoss: return "no_loss";
        case LossMode::Compensated: return "compensated";
        }
        return "unknown";
    }

    inline bool ignores_reflection(LossMode m) { return m != LossMode::WithLoss; }
    inline bool rescales_to_supply(LossMode m) { return m == LossMode::Compensated; }

    // Immutable data of one DMA ZF design problem.
    struct ZfObjectiveContext
    {
        CMatrix Yrs_tilde; // Yr~ Y_rs, M x L
        CMatrix Yst;       // L x N
        CMatrix Yss_tilde; // R_s I + Y_ss
        CMatrix Ytt;
        double Y0 = 35.33;
        PowerBudget budget;

        static ZfObjectiveContext make(const AdmittanceSet &s, const UserBlock &u, const ChannelRealization &chan,
                                       double y0, const PowerBudget &budget)
        {
            if (chan.Y.cols() != s.Yss.rows())
                throw Error(ErrorCode::Config, "channel width must equal the element count");
            ZfObjectiveContext c;
            c.Yrs_tilde = receive_normalization(u) * chan.Y;
            c.Yst = s.Yst;
            c.Yss_tilde = s.Yss;
            c.Yss_tilde.diagonal().array() += cplx(s.Rs, 0.0);
            c.Ytt = s.Ytt;
            c.Y0 = y0;
            c.budget = budget;
            return c;
        }

        std::size_t elements() const { return static_cast<std::size_t>(Yss_tilde.rows()); }
    };

    // Everything the objective and gradient share at one load vector.
    struct DmaPoint
    {
        RVector x;
        bool valid = false;
        CMatrix K;      // A^{-1} Y_st, L x N
        CMatrix Rt;     // A^{-1} Yrs~^T, L x M  (A symmetric, so Rt^T = Yrs~ A^{-1})
        CMatrix H;      // M x N
        CMatrix Sinv;   // (H H^H)^{-1}
        CMatrix Hd;     // H^H (H H^H)^{-1}
        CMatrix G;      // Hd Hd^H
        CMatrix Yp;
        CVector gamma;
        RVector gain;   // 1 / (1 - |Gamma|^2)
        double f = std::numeric_limits<double>::infinity();
    };

    // f(Y_s^im) = Re Tr{Y_q Hd Hd^H} and its gradient. Remembers the last
    // point so a gradient call after an objective call at the same x reuses
    // the factorizations.
    class DmaEvaluator
    {
    public:
        DmaEvaluator(const ZfObjectiveContext &ctx, bool ignore_reflection)
            : ctx_(ctx), ignore_reflection_(ignore_reflection) {}

        const DmaPoint &at(const RVector &x)
        {
            if (point_.x.size() == x.size() && point_.x == x)
                return point_;
            point_ = DmaPoint{};
            point_.x = x;
            compute(point_);
            return point_;
        }

        double objective(const RVector &x) { return at(x).f; }

        RVector gradient(const RVector &x)
        {
            const DmaPoint &p = at(x);
            if (!p.valid)
                return RVector::Constant(x.size(), std::numeric_limits<double>::quiet_NaN());
            return gradient_at(p);
        }

        bool ignores_reflection() const { return ignore_reflection_; }
        const ZfObjectiveContext &context() const { return ctx_; }

    private:
        void compute(DmaPoint &p) const
        {
            CMatrix a = ctx_.Yss_tilde;
            a.diagonal() += j_unit * p.x.cast<cplx>();
            Eigen::PartialPivLU<CMatrix> lu(a);
            if (!(lu.rcond() > 1e-16) || !a.allFinite())
                return;
            const auto n = ctx_.Yst.cols();
            const auto m = ctx_.Yrs_tilde.rows();
            if (m > n)
                return;
            CMatrix rhs(a.rows(), n + m);
            rhs << ctx_.Yst, ctx_.Yrs_tilde.transpose();
            const CMatrix sol = lu.solve(rhs);
            p.K = sol.leftCols(n);
            p.Rt = sol.rightCols(m);
            p.H = p.Rt.transpose() * ctx_.Yst;

            const auto [smin, smax] = detail::singular_extremes(p.H);
            if (!(smin > 1e-12 * smax))
                return;
            Eigen::LLT<CMatrix> gram(p.H * p.H.adjoint());
            if (gram.info() != Eigen::Success)
                return;
            p.Sinv = gram.solve(CMatrix::Identity(m, m));
            p.Hd = p.H.adjoint() * p.Sinv;
            p.G = p.Hd * p.Hd.adjoint();
            p.Yp = ctx_.Ytt - ctx_.Yst.transpose() * p.K;

            p.gamma.resize(n);
            p.gain.resize(n);
            for (Eigen::Index i = 0; i < n; ++i)
            {
                if (ignore_reflection_)
                {
                    p.gamma(i) = 0.0;
                    p.gain(i) = 1.0;
                    continue;
                }
                const cplx yin = p.Yp(i, i);
                p.gamma(i) = (yin - ctx_.Y0) / (yin + ctx_.Y0);
                const double mag2 = std::norm(p.gamma(i));
                if (!(mag2 < 1.0 - 1e-12))
                    return; // same band reflection_and_supply rejects
                p.gain(i) = 1.0 / (1.0 - mag2);
            }
            const CMatrix ypg = p.Yp * p.G;
            double f = 0.0;
            for (Eigen::Index i = 0; i < n; ++i)
                f += p.gain(i) * ypg(i, i).real();
            if (!std::isfinite(f))
                return;
            p.f = f;
            p.valid = true;
        }

        // Three contributions, all diagonal in the element index l:
        //  - feed reflections through Gamma(Y_p), with C = 1/(y_in + Y0),
        //  - Y_p itself at fixed Gamma,
        //  - the pseudo-inverse through H.
        RVector gradient_at(const DmaPoint &p) const
        {
            const auto n = ctx_.Yst.cols();
            const auto l_count = p.K.rows();
            const CMatrix ypg = p.Yp * p.G;

            // d(1/(1-|Gamma|^2)) weights: c_n alpha_n with
            // alpha_n = conj(Gamma_n) (1 - Gamma_n) / (y_in,n + Y0).
            CVector w1 = CVector::Zero(n);
            if (!ignore_reflection_)
                for (Eigen::Index i = 0; i < n; ++i)
                {
                    const cplx c = 1.0 / (p.Yp(i, i) + ctx_.Y0);
                    const cplx alpha = std::conj(p.gamma(i)) * (1.0 - p.gamma(i)) * c;
                    w1(i) = 2.0 * ypg(i, i).real() * p.gain(i) * p.gain(i) * alpha;
                }

            // E = D Y_p, Psi = (E + E^H)/2
            const CMatrix E = p.gain.cast<cplx>().asDiagonal() * p.Yp;
            const CMatrix psi = 0.5 * (E + E.adjoint());
            const CMatrix phi = p.H * psi * p.H.adjoint();
            const CMatrix sinv2 = p.Sinv * p.Sinv;
            const CMatrix omega = sinv2 * phi * p.Sinv + p.Sinv * phi * sinv2;
            const CMatrix Z = psi * p.H.adjoint() * sinv2 - p.H.adjoint() * omega; // N x M

            const CMatrix KGD = p.K * (p.G * p.gain.cast<cplx>().asDiagonal()); // L x N
            const CMatrix KZ = p.K * Z;                                           // L x M

            RVector g(l_count);
            for (Eigen::Index l = 0; l < l_count; ++l)
            {
                cplx t1 = 0.0;
                for (Eigen::Index i = 0; i < n; ++i)
                    t1 += w1(i) * p.K(l, i) * p.K(l, i);
                const cplx t2 = (KGD.row(l).array() * p.K.row(l).array()).sum();
                const cplx t3 = (KZ.row(l).array() * p.Rt.row(l).array()).sum();
                g(l) = -t1.imag() - t2.imag() + 2.0 * t3.imag();
            }
            return g;
        }

        ZfObjectiveContext ctx_;
        bool ignore_reflection_;
        DmaPoint point_;
    };

    // +inf when the configuration is singular.
    inline double dma_objective(const RVector &ys_im, const ZfObjectiveContext &ctx,
                                bool ignore_reflection = false)
    {
        DmaEvaluator ev(ctx, ignore_reflection);
        return ev.objective(ys_im);
    }

    inline RVector dma_gradient(const RVector &ys_im, const ZfObjectiveContext &ctx,
                                bool ignore_reflection = false)
    {
        DmaEvaluator ev(ctx, ignore_reflection);
        const DmaPoint &p = ev.at(ys_im);
        if (!p.valid)
            throw Error(ErrorCode::Configuration, "gradient requested at a singular configuration");
        return ev.gradient(ys_im);
    }

    struct DmaSettings
    {
        optim::TrSettings tr;
        std::size_t starts = 3;
        LossMode loss_mode = LossMode::WithLoss;
        double init_halfwidth = 0.0; // 0: derived from diag Y_ss~
    };

    // Half-width of the uniform initial susceptances: |mean Im diag Y_ss~|, or
    // |mean diag Y_ss~| when the imaginary mean vanishes.
    inline double default_init_halfwidth(const ZfObjectiveContext &ctx)
    {
        const cplx mean_diag = ctx.Yss_tilde.diagonal().mean();
        const double im = std::abs(mean_diag.imag());
        return im > 1e-9 * std::abs(mean_diag) ? im : std::abs(mean_diag);
    }

    // B = sqrt(P_max) Hd / sqrt(Tr{(sigma_x^2/2) Re{Hd^H Y Hd}}), with Y = Y_q
    // (or Y_p when reflections are ignored).
    inline CMatrix dma_baseband(const DmaPoint &p, const PowerBudget &budget)
    {
        return std::sqrt(budget.P_max / (0.5 * budget.sigma_x2 * p.f)) * p.Hd;
    }

    // Trust-region design of the element loads followed by the normalized
    // pseudo-inverse baseband stage.
    inline PrecoderSolution zf_dma(const ZfObjectiveContext &ctx, const DmaSettings &settings, std::uint64_t seed)
    {
        if (ctx.Yrs_tilde.rows() > ctx.Yst.cols())
            throw Error(ErrorCode::Rank, "more users than DMA feeds");
        const bool ignore = ignores_reflection(settings.loss_mode);
        DmaEvaluator ev(ctx, ignore);
        const double half = settings.init_halfwidth > 0.0 ? settings.init_halfwidth : default_init_halfwidth(ctx);
        const auto l_count = static_cast<Eigen::Index>(ctx.elements());

        PrecoderSolution sol;
        sol.architecture = Architecture::Dma;
        std::optional<optim::TrOutcome> best;
        std::string last_error;
        for (std::size_t start = 0; start < std::max<std::size_t>(settings.starts, 1); ++start)
        {
            std::mt19937_64 rng(derive_seed(seed, start));
            std::uniform_real_distribution<double> u(-half, half);
            // Ablated networks need not be passive, so a draw can land where
            // |Gamma| >= 1; redraw a bounded number of times.
            RVector x0(l_count);
            for (int draw = 0; draw < 64; ++draw)
            {
                for (Eigen::Index l = 0; l < l_count; ++l)
                    x0(l) = u(rng);
                if (std::isfinite(ev.objective(x0)))
                    break;
            }
            try
            {
                auto out = optim::minimize([&](const RVector &x) { return ev.objective(x); },
                                           [&](const RVector &x) { return ev.gradient(x); }, x0, settings.tr);
                sol.start_histories.push_back(out.f_history);
                sol.iterations += out.iterations;
                if (!best || out.f_best < best->f_best)
                    best = std::move(out);
            }
            catch (const Error &e)
            {
                last_error = e.what();
                sol.warnings.push_back(std::string("start ") + std::to_string(start) + ": " + e.what());
            }
        }
        if (!best)
            throw Error(ErrorCode::Configuration, "all trust-region starts failed: " + last_error);

        const DmaPoint &p = ev.at(best->x_best);
        sol.ys_im = best->x_best;
        sol.converged = best->converged;
        sol.objective_history = best->f_history;
        sol.B = dma_baseband(p, ctx.budget);

        // Power bookkeeping always against the true reflections.
        const Reflection refl = reflection_and_supply(p.Yp, ctx.Y0);
        sol.warnings.insert(sol.warnings.end(), refl.warnings.begin(), refl.warnings.end());
        if (rescales_to_supply(settings.loss_mode))
        {
            const double ps = supplied_power(sol.B, refl.Yq, ctx.budget.sigma_x2);
            sol.B *= std::sqrt(ctx.budget.P_max / ps);
        }
        sol.achieved_power = settings.loss_mode == LossMode::NoLoss
                                 ? transmitted_power(sol.B, p.Yp, ctx.budget.sigma_x2)
                                 : supplied_power(sol.B, refl.Yq, ctx.budget.sigma_x2);
        sol.gamma_per_user = sinr(p.H, sol.B, ctx.budget.sigma_n2, ctx.budget.sigma_x2);
        return sol;
    }
}

#endif
