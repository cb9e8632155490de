// src/binary_io.h

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

#ifndef SSD_SRC_BINARY_IO_H_
#define SSD_SRC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include "ssd/error.h"

namespace ssd::internal {

static_assert(std::endian::native == std::endian::little,
              "binary containers assume a little-endian host");

/// Appends little-endian scalars to a byte string.
class ByteWriter {
 public:
  void Bytes(std::string_view s) { out_.append(s); }
  template <typename T>
  void Put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void String(const std::string &s) {
    Put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  const std::string &Data() const { return out_; }
  std::string Take() { return std::move(out_); }

 private:
  std::string out_;
};

/// Bounds-checked reader; every overrun raises FormatError.
class ByteReader {
 public:
  ByteReader(std::string_view data, std::string what)
      : data_(data), what_(std::move(what)) {}

  void Expect(std::string_view magic) {
    Need(magic.size());
    if (data_.substr(pos_, magic.size()) != magic)
      throw FormatError(what_ + ": bad magic, expected '" + std::string(magic) + "'");
    pos_ += magic.size();
  }
  template <typename T>
  T Get() {
    Need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string String() {
    auto n = Get<std::uint32_t>();
    Need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  /// Guards against sizes that would overrun the buffer before allocating.
  void Need(std::size_t n) const {
    if (n > data_.size() - pos_)
      throw FormatError(what_ + ": truncated at byte " + std::to_string(pos_));
  }
  bool AtEnd() const { return pos_ == data_.size(); }
  std::size_t Position() const { return pos_; }

 private:
  std::string_view data_;
  std::string what_;
  std::size_t pos_ = 0;
};

}  // namespace ssd::internal

#endif  // SSD_SRC_BINARY_IO_H_
