#include "spde/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace spde {

namespace {

std::string f17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// NaN is not representable in JSON; fits without enough points travel as null.
nlohmann::json num_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

double null_to_nan(const nlohmann::json& j) {
    if (j.is_null()) return std::nan("");
    return j.get<double>();
}

void write_footer(std::ostream& os, double order, double intercept, double r2, std::uint64_t seed,
                  const std::map<std::string, std::string>& config,
                  const std::vector<std::string>& warnings) {
    os << "# order=" << f17(order) << " intercept=" << f17(intercept) << " r2=" << f17(r2)
       << " seed=" << seed << "\n";
    for (const auto& [k, v] : config) os << "# config " << k << "=" << v << "\n";
    for (const auto& w : warnings) os << "# warning " << w << "\n";
}

}  // namespace

void emit_report_csv(const ExperimentReport& report, std::ostream& os) {
    os << "N,h,estimate,std_error,samples\n";
    for (const ErrorPoint& p : report.points) {
        os << p.steps << ',' << f17(p.h) << ',' << f17(p.estimate) << ',' << f17(p.std_error)
           << ',' << p.samples << "\n";
    }
    write_footer(os, report.fitted_order, report.fit_intercept, report.fit_r2, report.seed,
                 report.config, report.warnings);
}

void emit_report_json(const ExperimentReport& report, std::ostream& os) {
    os << report_to_json_text(report) << "\n";
}

std::string report_to_json_text(const ExperimentReport& report) {
    nlohmann::json j;
    j["points"] = nlohmann::json::array();
    for (const ErrorPoint& p : report.points) {
        j["points"].push_back({{"N", p.steps},
                               {"h", p.h},
                               {"estimate", p.estimate},
                               {"std_error", p.std_error},
                               {"samples", p.samples}});
    }
    j["fitted_order"] = num_or_null(report.fitted_order);
    j["fit_intercept"] = num_or_null(report.fit_intercept);
    j["fit_r2"] = num_or_null(report.fit_r2);
    j["config"] = report.config;
    j["seed"] = report.seed;
    j["warnings"] = report.warnings;
    return j.dump(2);
}

ExperimentReport report_from_json_text(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    ExperimentReport r;
    for (const auto& p : j.at("points")) {
        ErrorPoint pt;
        pt.steps = p.at("N").get<std::int64_t>();
        pt.h = p.at("h").get<double>();
        pt.estimate = p.at("estimate").get<double>();
        pt.std_error = p.at("std_error").get<double>();
        pt.samples = p.at("samples").get<std::int64_t>();
        r.points.push_back(pt);
    }
    r.fitted_order = null_to_nan(j.at("fitted_order"));
    r.fit_intercept = null_to_nan(j.at("fit_intercept"));
    r.fit_r2 = null_to_nan(j.at("fit_r2"));
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
}

void emit_report_file(const ExperimentReport& report, const std::string& format,
                      const std::string& path) {
    std::ofstream os(path, std::ios::binary);  // binary: byte-identical reruns
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    if (format == "json") {
        emit_report_json(report, os);
    } else {
        emit_report_csv(report, os);
    }
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + path);
}

void emit_lower_bound_csv(const LowerBoundSweep& sweep, std::ostream& os) {
    os << "h,exact_gap,lower_bound\n";
    for (const LowerBoundPoint& p : sweep.points) {
        os << f17(p.h) << ',' << f17(p.gap) << ',' << f17(p.bound) << "\n";
    }
    write_footer(os, sweep.fit.order, sweep.fit.intercept, sweep.fit.r2, sweep.report.seed,
                 sweep.report.config, sweep.warnings);
}

void emit_lower_bound_json(const LowerBoundSweep& sweep, std::ostream& os) {
    nlohmann::json j;
    j["points"] = nlohmann::json::array();
    for (const LowerBoundPoint& p : sweep.points) {
        j["points"].push_back({{"h", p.h}, {"exact_gap", p.gap}, {"lower_bound", p.bound}});
    }
    j["fitted_order"] = num_or_null(sweep.fit.order);
    j["fit_intercept"] = num_or_null(sweep.fit.intercept);
    j["fit_r2"] = num_or_null(sweep.fit.r2);
    j["dominated"] = sweep.dominated;
    j["tail_estimate"] = std::isfinite(sweep.tail_estimate) ? nlohmann::json(sweep.tail_estimate)
                                                            : nlohmann::json(nullptr);
    j["config"] = sweep.report.config;
    j["warnings"] = sweep.warnings;
    os << j.dump(2) << "\n";
}

void emit_lower_bound_file(const LowerBoundSweep& sweep, const std::string& format,
                           const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    if (format == "json") {
        emit_lower_bound_json(sweep, os);
    } else {
        emit_lower_bound_csv(sweep, os);
    }
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace spde
