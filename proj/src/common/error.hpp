// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace lakegraph {

enum class ErrorKind : int32_t {
	Internal = 1,
	InvalidArgument = 2,
	NotFound = 3,
	IoError = 4,
	FormatError = 5,
	ContractViolation = 6,
	Unsupported = 7,
	QueryError = 8,
	ClusterError = 9,
	CapacityError = 10,
};

class LakeGraphError : public std::runtime_error {
public:
	LakeGraphError(ErrorKind kind, const std::string &message)
	    : std::runtime_error(message), kind_(kind) {}

	ErrorKind kind() const { return kind_; }

private:
	ErrorKind kind_;
};

} // namespace lakegraph
