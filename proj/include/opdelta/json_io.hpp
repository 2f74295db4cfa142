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

#ifndef OPDELTA_JSON_IO_HPP
#define OPDELTA_JSON_IO_HPP

#include <json.hpp>
#include <string>

#include "opdelta/asymptotics.hpp"
#include "opdelta/brownian.hpp"
#include "opdelta/error.hpp"

namespace opdelta {

/// schemas/fit_report.schema.json
nlohmann::json fit_report_json(const RfccaFit& fit, const AsymptoticReport& report);

/// schemas/mc_study.schema.json
nlohmann::json mc_study_json(const McStudyResult& result, const BrownianModel& model);

nlohmann::json error_json(const Error& err);

/// Writes with a trailing newline; dump order is deterministic (object keys
/// are sorted by nlohmann), so identical inputs give byte-identical files.
void write_json(const std::string& path, const nlohmann::json& doc);

}  // namespace opdelta

#endif  // OPDELTA_JSON_IO_HPP
