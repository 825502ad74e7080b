// SPDX-License-Identifier: Apache-2.0
//
// mmwlab: indoor millimeter-wave network laboratory
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

#ifndef MMWLAB_ERROR_HPP
#define MMWLAB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mmwlab {

// Base of every error raised by the library. `module()` names the component
// that raised it so front ends can report provenance.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// A series hit its term cap, or lost too many digits to cancellation.
class SeriesError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

// Optimizer (fitting, golden-section, simplex) failed to converge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Requested closed form is outside its region of validity.
class ValidityError : public Error {
public:
    using Error::Error;
};

// Enumeration would exceed a configured size cap.
class CapacityError : public Error {
public:
    using Error::Error;
};

class InfeasibleError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace mmwlab

#endif // MMWLAB_ERROR_HPP
