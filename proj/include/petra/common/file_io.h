// Copyright 2026 The Petra Authors
//
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

#ifndef PETRA_COMMON_FILE_IO_H_
#define PETRA_COMMON_FILE_IO_H_

#include <filesystem>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "petra/common/bytes.h"

namespace petra {

// NOT_FOUND if the file does not exist, IO for other failures.
absl::StatusOr<std::string> ReadFileToString(const std::filesystem::path& path);

// Writes through a temporary file and renames it into place. `private_file`
// restricts permissions to the owner.
absl::Status WriteFileAtomic(const std::filesystem::path& path,
                             ByteView contents, bool private_file = false);

// Appends `line` plus a newline with a single write and fsyncs.
absl::Status AppendLine(const std::filesystem::path& path,
                        std::string_view line);

}  // namespace petra

#endif  // PETRA_COMMON_FILE_IO_H_
