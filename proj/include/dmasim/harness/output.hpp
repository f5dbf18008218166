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

#ifndef DMASIM_HARNESS_OUTPUT_HPP
#define DMASIM_HARNESS_OUTPUT_HPP

#include "dmasim/errors.hpp"
#include "dmasim/harness/config.hpp"
#include "dmasim/harness/runner.hpp"
#include "dmasim/metrics.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace dmasim::harness
{
    inline constexpr std::string_view csv_header =
        "scenario,arch,loss_mode,coupling_mode,M,N,S,L,spacing_wl,trial,seed,rate_user_mean,rate_users,P_t,P_s,"
        "converged,iters,error";

    // Shortest decimal that parses back to the same double.
    inline std::string format_double(double v)
    {
        if (std::isnan(v))
            return "nan";
        if (std::isinf(v))
            return v > 0 ? "inf" : "-inf";
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    }

    inline double parse_double(std::string_view s)
    {
        if (s == "nan")
            return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf")
            return std::numeric_limits<double>::infinity();
        if (s == "-inf")
            return -std::numeric_limits<double>::infinity();
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw Error(ErrorCode::Io, "not a number: '" + std::string(s) + "'");
        return v;
    }

    inline std::string csv_row(const TrialRecord &r)
    {
        std::string users;
        for (std::size_t i = 0; i < r.per_user_rate.size(); ++i)
        {
            if (i)
                users += ';';
            users += format_double(r.per_user_rate[i]);
        }
        std::ostringstream os;
        os << r.scenario << ',' << r.architecture << ',' << r.loss_mode << ',' << r.coupling_mode << ',' << r.M << ','
           << r.N << ',' << r.S << ',' << r.L << ',' << format_double(r.spacing_wl) << ',' << r.trial_index << ','
           << r.seed << ',' << format_double(r.mean_rate) << ',' << users << ',' << format_double(r.P_t) << ','
           << format_double(r.P_s) << ',' << (r.converged ? 1 : 0) << ',' << r.iterations << ',' << r.error;
        return os.str();
    }

    inline nlohmann::json json_row(const TrialRecord &r, std::string_view config_hash)
    {
        auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
        nlohmann::json j;
        j["scenario"] = r.scenario;
        j["arch"] = r.architecture;
        j["loss_mode"] = r.loss_mode;
        j["coupling_mode"] = r.coupling_mode;
        j["M"] = r.M;
        j["N"] = r.N;
        j["S"] = r.S;
        j["L"] = r.L;
        j["spacing_wl"] = r.spacing_wl;
        j["trial"] = r.trial_index;
        j["seed"] = r.seed;
        j["rate_user_mean"] = num(r.mean_rate);
        j["rate_users"] = r.per_user_rate;
        j["P_t"] = num(r.P_t);
        j["P_s"] = num(r.P_s);
        j["converged"] = r.converged;
        j["iters"] = r.iterations;
        j["error"] = r.error;
        j["config_hash"] = config_hash;
        return j;
    }

    inline void write_results(std::ostream &os, const std::vector<TrialRecord> &records, OutputFormat format,
                              std::string_view config_hash)
    {
        if (records.empty())
            throw Error(ErrorCode::Io, "no records to write");
        if (format == OutputFormat::Csv)
        {
            os << csv_header << '\n';
            for (const auto &r : records)
                os << csv_row(r) << '\n';
        }
        else
        {
            for (const auto &r : records)
                os << json_row(r, config_hash).dump() << '\n';
        }
    }

    // Writes to path; nothing is created when records is empty.
    inline void emit_results(const std::vector<TrialRecord> &records, OutputFormat format, const std::string &path,
                             std::string_view config_hash = "")
    {
        if (records.empty())
            throw Error(ErrorCode::Io, "no records to write");
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
        write_results(out, records, format, config_hash);
        out.flush();
        if (!out)
            throw Error(ErrorCode::Io, "write to '" + path + "' failed");
    }

    // Parses one CSV row back; the inverse of csv_row.
    inline TrialRecord parse_csv_row(const std::string &line)
    {
        std::vector<std::string> f;
        std::string cur;
        for (char ch : line)
        {
            if (ch == ',')
            {
                f.push_back(cur);
                cur.clear();
            }
            else
                cur += ch;
        }
        f.push_back(cur);
        if (f.size() != 18)
            throw Error(ErrorCode::Io, "expected 18 fields, got " + std::to_string(f.size()));
        auto count = [](const std::string &s) { return static_cast<std::size_t>(std::stoull(s)); };
        TrialRecord r;
        r.scenario = f[0];
        r.architecture = f[1];
        r.loss_mode = f[2];
        r.coupling_mode = f[3];
        r.M = count(f[4]);
        r.N = count(f[5]);
        r.S = count(f[6]);
        r.L = count(f[7]);
        r.spacing_wl = parse_double(f[8]);
        r.trial_index = count(f[9]);
        r.seed = std::stoull(f[10]);
        r.mean_rate = parse_double(f[11]);
        std::string_view users = f[12];
        while (!users.empty())
        {
            const auto cut = users.find(';');
            r.per_user_rate.push_back(parse_double(users.substr(0, cut)));
            users = cut == std::string_view::npos ? std::string_view{} : users.substr(cut + 1);
        }
        r.P_t = parse_double(f[13]);
        r.P_s = parse_double(f[14]);
        r.converged = f[15] == "1";
        r.iterations = count(f[16]);
        r.error = f[17];
        return r;
    }

    inline constexpr std::string_view match_header =
        "fd_columns,fd_antennas,fd_rate,required_L_hybrid,hybrid_rate,required_L_dma,dma_rate";

    // Unmatched searches are written as "unmatched".
    inline void write_match_table(std::ostream &os, const std::vector<MatchRow> &rows)
    {
        if (rows.empty())
            throw Error(ErrorCode::Io, "no rows to write");
        auto count = [](const std::optional<std::size_t> &v) {
            return v ? std::to_string(*v) : std::string("unmatched");
        };
        os << match_header << '\n';
        for (const auto &r : rows)
            os << r.fd_columns << ',' << r.fd_antennas << ',' << format_double(r.fd_rate) << ','
               << count(r.required_L_hybrid) << ',' << format_double(r.hybrid_rate) << ','
               << count(r.required_L_dma) << ',' << format_double(r.dma_rate) << '\n';
    }
}

#endif
