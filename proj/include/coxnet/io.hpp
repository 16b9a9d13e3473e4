#pragma once

#include "coxnet/simulation.hpp"

#include <json.hpp>

#include <string>

namespace coxnet {

using json = nlohmann::ordered_json;

// CSV dialect: comma-separated, UTF-8, '.' decimal, header required, first
// two columns `time` and `status`, remaining columns are covariates.
SurvivalDataset read_dataset_csv(const std::string& path);
void write_dataset_csv(const std::string& path, const SurvivalDataset& d);

// shortest decimal string that parses back to exactly v
std::string format_double(double v);

// 64-bit FNV-1a over the file bytes, as 16 hex digits
std::string fingerprint_file(const std::string& path);

// Every output carries one of these so a run can be reproduced exactly:
// the fully resolved configuration plus the input fingerprint.
struct RunManifest {
    std::string command;
    json config;
    std::string tool_version;
    std::string dataset_fingerprint;
};

json manifest_json(const RunManifest& m);
RunManifest manifest_from_json(const json& j);

json vector_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j);

json fit_result_json(const FitResult& fit, const PenaltySpec& spec,
                     const std::vector<std::string>& feature_names);
json aen_fit_json(const AenFit& fit, const std::vector<std::string>& feature_names);
json cv_report_json(const CvReport& report);
json grouping_report_json(const GroupingReport& report,
                          const std::vector<std::string>& feature_names);
json experiment_report_json(const ExperimentReport& report);

// Reads back what fit_result_json / aen_fit_json wrote (for an adaptive
// fit, the second stage). Returns the fit, its penalty, and the manifest's
// dataset fingerprint for cross-checking.
struct LoadedFit {
    FitResult fit;
    PenaltySpec spec;
    std::string dataset_fingerprint;
};
LoadedFit load_fit_json(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}
