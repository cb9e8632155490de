// src/text_util.h

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

#ifndef SSD_SRC_TEXT_UTIL_H_
#define SSD_SRC_TEXT_UTIL_H_

#include <string>
#include <string_view>
#include <vector>

namespace ssd::internal {

std::vector<std::string> Split(std::string_view s, char sep);
/// Splits on runs of spaces/tabs, dropping empty fields.
std::vector<std::string> SplitWhitespace(std::string_view s);
std::string Trim(std::string_view s);
/// Lines without their terminator; a trailing CR is dropped as well.
std::vector<std::string> SplitLines(const std::string &text);
/// Whole file as lines. Throws IoError.
std::vector<std::string> ReadLines(const std::string &path);
std::string ReadFile(const std::string &path);
void WriteFile(const std::string &path, const std::string &contents);

}  // namespace ssd::internal

#endif  // SSD_SRC_TEXT_UTIL_H_
