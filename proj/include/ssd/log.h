// include/ssd/log.h

// Copyright 2026 The ssdscreen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SSD_LOG_H_
#define SSD_LOG_H_

#include <sstream>
#include <string>

namespace ssd {

enum class LogLevel { kError = 0, kWarning = 1, kInfo = 2, kDebug = 3 };

void SetLogLevel(LogLevel level);
LogLevel GetLogLevel();

void LogMessage(LogLevel level, const char *func, const std::string &msg);

namespace internal {

class LogStream {
 public:
  LogStream(LogLevel level, const char *func) : level_(level), func_(func) {}
  ~LogStream() { LogMessage(level_, func_, stream_.str()); }
  template <typename T>
  LogStream &operator<<(const T &v) {
    stream_ << v;
    return *this;
  }

 private:
  LogLevel level_;
  const char *func_;
  std::ostringstream stream_;
};

/// Lets the logging macro be a single expression, so it nests safely in an
/// unbraced if/else.
struct Voidify {
  void operator&(const LogStream &) {}
};

}  // namespace internal
}  // namespace ssd

#define SSD_LOG_AT(level)                                   \
  (::ssd::GetLogLevel() < (level))                          \
      ? (void)0                                             \
      : ::ssd::internal::Voidify() & ::ssd::internal::LogStream((level), __func__)
#define SSD_LOG SSD_LOG_AT(::ssd::LogLevel::kInfo)
#define SSD_WARN SSD_LOG_AT(::ssd::LogLevel::kWarning)
#define SSD_VLOG SSD_LOG_AT(::ssd::LogLevel::kDebug)

#endif  // SSD_LOG_H_
