// SPDX-License-Identifier: Apache-2.0
#include "rrce/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace rrce::io {

std::string format_double(double v)
{
    if (!std::isfinite(v)) {
        throw NumericalError("refusing to write a non-finite value");
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string opt(const std::optional<double>& v)
{
    return v ? format_double(*v) : std::string();
}

} // namespace

std::string sweep_csv(const SweepResult& result)
{
    std::string out =
        "axis_name,axis_value,estimator,beam,d_total,mse_analytic,mse_analytic_db,mse_mc,mc_std,"
        "mi_nats,nmse_trace\n";
    const std::string axis = to_string(result.axis);
    for (const SweepPoint& p : result.points) {
        try {
            out += axis + ',' + format_double(p.axis_value) + ',' + p.estimator + ',' + p.beam +
                   ',' + std::to_string(p.d_total) + ',' + format_double(p.mse_analytic) + ',' +
                   format_double(linear_to_db(p.mse_analytic)) + ',' + opt(p.mse_mc) + ',' +
                   opt(p.mc_std) + ',' + opt(p.mi_nats) + ',' + opt(p.nmse_trace) + '\n';
        } catch (const NumericalError&) {
            throw NumericalError("non-finite value in sweep row " + axis + "=" +
                                 std::to_string(p.axis_value) + " " + p.estimator + "/" + p.beam);
        }
    }
    return out;
}

std::string pattern_csv(const BeamPattern& pattern)
{
    std::string out = "theta_deg";
    for (Index j = 0; j < pattern.column_gain_db.cols(); ++j) {
        out += ",gain_db_col" + std::to_string(j);
    }
    out += ",gain_db_aggregate\n";
    for (std::size_t i = 0; i < pattern.theta_deg.size(); ++i) {
        const auto r = static_cast<Index>(i);
        out += format_double(pattern.theta_deg[i]);
        for (Index j = 0; j < pattern.column_gain_db.cols(); ++j) {
            out += ',' + format_double(pattern.column_gain_db(r, j));
        }
        out += ',' + format_double(pattern.aggregate_db(r)) + '\n';
    }
    return out;
}

std::string pilot_csv(const PilotSet& pilots)
{
    std::string out = "user,n,re,im\n";
    for (std::size_t k = 0; k < pilots.symbols.size(); ++k) {
        for (Index n = -(pilots.memory - 1); n < pilots.length; ++n) {
            const cdouble x = pilots.at(static_cast<Index>(k), n);
            out += std::to_string(k) + ',' + std::to_string(n) + ',' + format_double(x.real()) +
                   ',' + format_double(x.imag()) + '\n';
        }
    }
    return out;
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.close();
    if (!f) {
        throw IoError("failed writing '" + path + "'");
    }
}

void write_sweep_csv(const SweepResult& result, const std::string& path)
{
    write_file(path, sweep_csv(result));
}

} // namespace rrce::io
