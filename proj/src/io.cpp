#include "coxnet/io.hpp"

#include "coxnet/version.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace coxnet {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double parse_double(const std::string& s, const std::string& where) {
    double v;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument(where + ": cannot parse number '" + s + "'");
    return v;
}

}  // namespace

SurvivalDataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 3)
        throw std::invalid_argument(path + ":1: header needs time, status and at least one "
                                    "covariate column");
    if (header[0] != "time")
        throw std::invalid_argument(path + ":1: first column must be 'time', got '" +
                                    header[0] + "'");
    if (header[1] != "status")
        throw std::invalid_argument(path + ":1: second column must be 'status', got '" +
                                    header[1] + "'");

    std::vector<std::string> names(header.begin() + 2, header.end());
    std::vector<double> times;
    std::vector<int> statuses;
    std::vector<double> values;

    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);
        std::string where = path + ":" + std::to_string(line_no);
        if (fields.size() != header.size())
            throw std::invalid_argument(where + ": expected " + std::to_string(header.size()) +
                                        " fields, got " + std::to_string(fields.size()));
        times.push_back(parse_double(fields[0], where));
        double status = parse_double(fields[1], where);
        if (status != 0.0 && status != 1.0)
            throw std::invalid_argument(where + ": status must be 0 or 1, got '" + fields[1] +
                                        "'");
        statuses.push_back(static_cast<int>(status));
        for (std::size_t k = 2; k < fields.size(); ++k)
            values.push_back(parse_double(fields[k], where));
    }
    if (times.empty()) throw std::invalid_argument(path + ": no data rows");

    SurvivalDataset d;
    const Eigen::Index n = static_cast<Eigen::Index>(times.size());
    const Eigen::Index p = static_cast<Eigen::Index>(names.size());
    d.time = Eigen::Map<Eigen::VectorXd>(times.data(), n);
    d.status.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) d.status[i] = statuses[static_cast<std::size_t>(i)];
    d.X.resize(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < p; ++k)
            d.X(i, k) = values[static_cast<std::size_t>(i * p + k)];
    d.feature_names = std::move(names);
    return d;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_dataset_csv(const std::string& path, const SurvivalDataset& d) {
    std::ostringstream out;
    out << "time,status";
    for (const auto& name : d.feature_names) out << ',' << name;
    out << '\n';
    for (Eigen::Index i = 0; i < d.n(); ++i) {
        out << format_double(d.time[i]) << ',' << d.status[i];
        for (Eigen::Index k = 0; k < d.p(); ++k) out << ',' << format_double(d.X(i, k));
        out << '\n';
    }
    write_text_file(path, out.str());
}

std::string fingerprint_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::uint64_t hash = 14695981039346656037ull;
    char chunk[4096];
    while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(chunk[i]);
            hash *= 1099511628211ull;
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf);
}

json manifest_json(const RunManifest& m) {
    json j;
    j["command"] = m.command;
    j["config"] = m.config;
    j["tool_version"] = m.tool_version;
    j["dataset_fingerprint"] = m.dataset_fingerprint;
    return j;
}

RunManifest manifest_from_json(const json& j) {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config");
    m.tool_version = j.value("tool_version", std::string{});
    m.dataset_fingerprint = j.value("dataset_fingerprint", std::string{});
    return m;
}

json vector_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    Eigen::Index i = 0;
    for (const auto& x : j) v[i++] = x.get<double>();
    return v;
}

json fit_result_json(const FitResult& fit, const PenaltySpec& spec,
                     const std::vector<std::string>& feature_names) {
    json j;
    j["feature_names"] = feature_names;
    j["beta"] = vector_json(fit.beta);
    j["beta_std"] = vector_json(fit.beta_std);
    j["objective"] = fit.objective;
    j["objective_trace"] = fit.objective_trace;
    j["outer_iterations"] = fit.outer_iterations;
    j["inner_iterations"] = fit.inner_iterations;
    j["converged"] = fit.converged;
    j["kkt_residual"] = fit.kkt_residual;
    json active = json::array();
    for (Eigen::Index k : fit.active_set) active.push_back(k);
    j["active_set"] = active;
    j["standardization"] = {{"means", vector_json(fit.standardization.means)},
                            {"scales", vector_json(fit.standardization.scales)}};
    j["penalty"] = {{"lambda1", spec.lambda1},
                    {"lambda2", spec.lambda2},
                    {"gamma", spec.gamma},
                    {"weights", vector_json(spec.weights)}};
    return j;
}

json aen_fit_json(const AenFit& fit, const std::vector<std::string>& feature_names) {
    json j;
    j["en_stage"] = fit_result_json(fit.en_stage, fit.spec_en, feature_names);
    j["weights"] = vector_json(fit.weights);
    j["aen_stage"] = fit_result_json(fit.aen_stage, fit.spec_aen, feature_names);
    return j;
}

json cv_report_json(const CvReport& report) {
    json points = json::array();
    for (const auto& pt : report.points)
        points.push_back({{"lambda2", pt.lambda2},
                          {"lambda1", pt.lambda1},
                          {"mean_score", pt.mean_score},
                          {"se_score", pt.se_score},
                          {"folds_used", pt.folds_used}});
    json j;
    j["points"] = points;
    j["best"] = {{"lambda1", report.best_lambda1}, {"lambda2", report.best_lambda2}};
    j["fold_assignment"] = report.fold_assignment;
    return j;
}

json grouping_report_json(const GroupingReport& report,
                          const std::vector<std::string>& feature_names) {
    json j;
    j["pair"] = {report.a + 1, report.b + 1};
    j["features"] = {feature_names[static_cast<std::size_t>(report.a)],
                     feature_names[static_cast<std::size_t>(report.b)]};
    j["distance"] = report.distance;
    j["hypothesis_met"] = report.hypothesis_met;
    if (report.bound)
        j["bound"] = *report.bound;
    else
        j["note"] = report.note;
    j["correlation"] = report.correlation;
    return j;
}

json experiment_report_json(const ExperimentReport& report) {
    json j;
    j["experiment"] = report.experiment;
    if (!report.rows.empty()) {
        json rows = json::array();
        for (const auto& row : report.rows)
            rows.push_back({{"method", row.method},
                            {"lambda1", row.lambda1},
                            {"lambda1_en", row.lambda1_en},
                            {"lambda2", row.lambda2},
                            {"beta", vector_json(row.beta)},
                            {"distance_23", row.distance_23},
                            {"distance_67", row.distance_67},
                            {"max_zero_block", row.max_zero_block}});
        j["rows"] = rows;
    }
    if (report.oracle) {
        const OracleSummary& o = *report.oracle;
        json records = json::array();
        for (const auto& rec : o.records)
            records.push_back({{"beta", vector_json(rec.beta)},
                               {"identified", vector_json(rec.identified)},
                               {"asymptotic_sd", vector_json(rec.asymptotic_sd)},
                               {"sparsity_ok", rec.sparsity_ok}});
        j["oracle"] = {{"replicates", o.replicates},
                       {"sparsity_fraction", o.sparsity_fraction},
                       {"labels", o.labels},
                       {"true_identified", vector_json(o.true_identified)},
                       {"empirical_sd", vector_json(o.empirical_sd)},
                       {"asymptotic_sd", vector_json(o.asymptotic_sd)},
                       {"sd_ratio", vector_json(o.sd_ratio)},
                       {"records", records}};
    }
    if (!report.grouping.empty()) {
        json sweep = json::array();
        for (const auto& pt : report.grouping) {
            json entry = {{"rho", pt.rho},
                          {"seeds", pt.seeds},
                          {"median_distance_23", pt.median_distance_23},
                          {"median_distance_67", pt.median_distance_67}};
            if (pt.median_bound_23) entry["median_bound_23"] = *pt.median_bound_23;
            if (pt.median_bound_67) entry["median_bound_67"] = *pt.median_bound_67;
            sweep.push_back(entry);
        }
        j["sweep"] = sweep;
    }
    return j;
}

LoadedFit load_fit_json(const std::string& path) {
    json j = json::parse(read_text_file(path));
    LoadedFit out;
    if (j.contains("manifest"))
        out.dataset_fingerprint =
            j["manifest"].value("dataset_fingerprint", std::string{});

    const json& f = j.contains("aen_stage") ? j["aen_stage"] : j;
    if (!f.contains("beta") || !f.contains("penalty"))
        throw std::invalid_argument(path + ": not a fit result file");

    out.fit.beta = vector_from_json(f.at("beta"));
    out.fit.beta_std = vector_from_json(f.at("beta_std"));
    out.fit.objective = f.value("objective", 0.0);
    out.fit.converged = f.value("converged", false);
    out.fit.kkt_residual = f.value("kkt_residual", 0.0);
    for (const auto& k : f.at("active_set"))
        out.fit.active_set.push_back(k.get<Eigen::Index>());
    out.fit.standardization.means = vector_from_json(f.at("standardization").at("means"));
    out.fit.standardization.scales = vector_from_json(f.at("standardization").at("scales"));

    const json& pen = f.at("penalty");
    out.spec.lambda1 = pen.at("lambda1").get<double>();
    out.spec.lambda2 = pen.at("lambda2").get<double>();
    out.spec.gamma = pen.at("gamma").get<double>();
    out.spec.weights = vector_from_json(pen.at("weights"));
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}
