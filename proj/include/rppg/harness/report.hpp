#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rppg/csv.hpp"

namespace rppg::harness {

struct Row {
    std::string experiment;
    std::string variant;
    std::size_t fold = 0;
    std::string subject;
    double rmse_bpm = 0.0;
    double accuracy_pct = 0.0;
};

struct VariantSummary {
    std::string variant;
    std::size_t n = 0;
    double rmse_median = 0.0, rmse_q1 = 0.0, rmse_q3 = 0.0;
    double acc_median = 0.0, acc_q1 = 0.0, acc_q3 = 0.0;
};

/// Per-variant, per-fold results plus quartile summaries.
struct ReportTable {
    std::vector<Row> rows;

    static double quantile(std::vector<double> v, double q) {
        std::sort(v.begin(), v.end());
        const double pos = q * static_cast<double>(v.size() - 1);
        const std::size_t i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        if (i + 1 >= v.size()) return v.back();
        return (1.0 - frac) * v[i] + frac * v[i + 1];
    }

    std::vector<VariantSummary> summarize() const {
        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>
            by_variant;
        for (const Row& r : rows) {
            by_variant[r.variant].first.push_back(r.rmse_bpm);
            by_variant[r.variant].second.push_back(r.accuracy_pct);
        }
        std::vector<VariantSummary> out;
        for (const auto& [variant, data] : by_variant) {
            VariantSummary s;
            s.variant = variant;
            s.n = data.first.size();
            s.rmse_median = quantile(data.first, 0.5);
            s.rmse_q1 = quantile(data.first, 0.25);
            s.rmse_q3 = quantile(data.first, 0.75);
            s.acc_median = quantile(data.second, 0.5);
            s.acc_q1 = quantile(data.second, 0.25);
            s.acc_q3 = quantile(data.second, 0.75);
            out.push_back(std::move(s));
        }
        return out;
    }

    double median_rmse(const std::string& variant) const {
        for (const VariantSummary& s : summarize())
            if (s.variant == variant) return s.rmse_median;
        throw std::invalid_argument("no rows for variant: " + variant);
    }

    double median_accuracy(const std::string& variant) const {
        for (const VariantSummary& s : summarize())
            if (s.variant == variant) return s.acc_median;
        throw std::invalid_argument("no rows for variant: " + variant);
    }

    std::string to_csv() const {
        std::ostringstream ss;
        ss << "experiment,variant,fold,subject,rmse_bpm,accuracy_pct\n";
        for (const Row& r : rows)
            ss << r.experiment << ',' << r.variant << ',' << r.fold << ','
               << r.subject << ',' << csv::format_double(r.rmse_bpm) << ','
               << csv::format_double(r.accuracy_pct) << '\n';
        return ss.str();
    }

    std::string summary_csv() const {
        std::ostringstream ss;
        ss << "variant,n,rmse_median,rmse_q1,rmse_q3,accuracy_median,"
              "accuracy_q1,accuracy_q3\n";
        for (const VariantSummary& s : summarize())
            ss << s.variant << ',' << s.n << ','
               << csv::format_double(s.rmse_median) << ','
               << csv::format_double(s.rmse_q1) << ','
               << csv::format_double(s.rmse_q3) << ','
               << csv::format_double(s.acc_median) << ','
               << csv::format_double(s.acc_q1) << ','
               << csv::format_double(s.acc_q3) << '\n';
        return ss.str();
    }

    void write(const std::string& report_path,
               const std::string& summary_path) const {
        csv::write_file_atomic(report_path, to_csv());
        csv::write_file_atomic(summary_path, summary_csv());
    }
};

} // namespace rppg::harness
