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

#include "petra/common/file_io.h"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "petra/common/error.h"

namespace petra {
namespace {

absl::Status IoError(const std::filesystem::path& path, std::string_view what) {
  return Error(ErrorCode::kIo, absl::StrCat(std::string(what), " ", path.string(), ": ",
                                            std::strerror(errno)));
}

absl::Status WriteAll(int fd, ByteView data) {
  size_t done = 0;
  while (done < data.size()) {
    ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      return Error(ErrorCode::kIo, std::strerror(errno));
    }
    done += static_cast<size_t>(n);
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<std::string> ReadFileToString(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) {
      return Error(ErrorCode::kNotFound, absl::StrCat("no such file ",
                                                      path.string()));
    }
    return IoError(path, "cannot open");
  }
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) return IoError(path, "cannot read");
  return out.str();
}

absl::Status WriteFileAtomic(const std::filesystem::path& path,
                             ByteView contents, bool private_file) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC,
                  private_file ? 0600 : 0644);
  if (fd < 0) return IoError(tmp, "cannot create");
  absl::Status status = WriteAll(fd, contents);
  if (status.ok() && ::fsync(fd) != 0) status = IoError(tmp, "cannot sync");
  ::close(fd);
  if (status.ok() && std::rename(tmp.c_str(), path.c_str()) != 0) {
    status = IoError(path, "cannot rename onto");
  }
  if (!status.ok()) std::filesystem::remove(tmp);
  return status;
}

absl::Status AppendLine(const std::filesystem::path& path,
                        std::string_view line) {
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC,
                  0600);
  if (fd < 0) return IoError(path, "cannot open");
  std::string buffer(line);
  buffer.push_back('\n');
  absl::Status status = WriteAll(fd, AsBytes(buffer));
  if (status.ok() && ::fsync(fd) != 0) status = IoError(path, "cannot sync");
  ::close(fd);
  return status;
}

}  // namespace petra
