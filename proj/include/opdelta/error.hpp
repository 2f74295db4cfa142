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

#ifndef OPDELTA_ERROR_HPP
#define OPDELTA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace opdelta {

/// Error classes map onto the CLI exit-code contract:
/// 0 success, 2 I/O, 3 configuration, 4 numeric/degeneracy.
enum class ErrorKind { Io = 2, Config = 3, Numeric = 4 };

/// Exception carrying a stable machine-readable code (e.g. "io.not_found",
/// "config.alpha_nonpositive") alongside the human-readable message.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& message)
        : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

    ErrorKind kind() const { return kind_; }
    const std::string& code() const { return code_; }
    int exit_code() const { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
    std::string code_;
};

}  // namespace opdelta

#endif  // OPDELTA_ERROR_HPP
