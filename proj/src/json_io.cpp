/*
 * Copyright 2026 The opdelta authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "opdelta/json_io.hpp"

#include <fstream>

namespace opdelta {

namespace {

nlohmann::json vector_to_json(const Vector& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

}  // namespace

nlohmann::json fit_report_json(const RfccaFit& fit, const AsymptoticReport& report) {
    nlohmann::json doc;
    doc["rho2"] = fit.rho2;
    doc["f1"] = vector_to_json(fit.f1);
    doc["f2"] = vector_to_json(fit.f2);
    doc["sigma2"] = report.sigma2;
    doc["ci"] = {report.ci_lo, report.ci_hi};
    doc["n"] = report.n;
    doc["alpha"] = fit.alpha;
    doc["M"] = fit.structure.dim;
    doc["split"] = fit.structure.split;
    doc["confidence"] = report.level;
    doc["vector_cov_diag"] = vector_to_json(report.vector_cov_diag);
    return doc;
}

nlohmann::json mc_study_json(const McStudyResult& result, const BrownianModel& model) {
    nlohmann::json doc;
    doc["rho2_true"] = result.rho2_true;
    doc["n"] = result.n;
    doc["replications"] = result.replications;
    doc["seed"] = result.seed;
    doc["alpha"] = model.alpha;
    const double a1 = model.a.empty() ? 0.0 : model.a.front();
    doc["a1sq"] = a1 * a1;
    doc["kl_terms"] = model.kl_terms;
    doc["standardized"] = result.standardized;
    doc["sigma2"] = result.sigma2;
    doc["histogram"] = {{"edges", result.bin_edges}, {"counts", result.bin_counts}};
    doc["summary"] = {{"mean", result.summary.mean},
                      {"variance", result.summary.variance},
                      {"ks_stat", result.summary.ks_stat},
                      {"sigma2_median", result.summary.sigma2_median}};
    doc["skipped"] = result.skipped;
    return doc;
}

nlohmann::json error_json(const Error& err) {
    return {{"error", {{"code", err.code()}, {"message", err.what()}}}};
}

void write_json(const std::string& path, const nlohmann::json& doc) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::Io, "io.write_failed", "cannot write '" + path + "'");
    }
    out << doc.dump(2) << "\n";
}

}  // namespace opdelta
