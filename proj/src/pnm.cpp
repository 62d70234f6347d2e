// Copyright 2026 The gdn Authors
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

#include "gdn/pnm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bytes.hpp"
#include "gdn/error.hpp"

namespace gdn {

namespace detail {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw format_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw format_error("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw format_error("write failed for '" + path + "'");
}

}  // namespace detail

namespace {

class HeaderCursor {
 public:
  explicit HeaderCursor(const std::string& s) : s_(s) {}

  long next_int() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) throw format_error("pnm: expected an integer at byte " + std::to_string(start));
    return std::stol(s_.substr(start, pos_ - start));
  }
  // Exactly one whitespace byte separates the header from binary data.
  void end_header() {
    if (pos_ >= s_.size() || !std::isspace(static_cast<unsigned char>(s_[pos_])))
      throw format_error("pnm: malformed header");
    ++pos_;
  }
  std::size_t pos() const { return pos_; }

 private:
  void skip() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else if (s_[pos_] == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }
  const std::string& s_;
  std::size_t pos_ = 2;
};

}  // namespace

PnmImage parse_pnm(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw format_error("pnm: missing magic");
  const char kind = bytes[1];
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6')
    throw format_error(std::string("pnm: unsupported type P") + kind);
  PnmImage img;
  img.channels = (kind == '3' || kind == '6') ? 3 : 1;
  HeaderCursor cur(bytes);
  const long w = cur.next_int();
  const long h = cur.next_int();
  const long maxval = cur.next_int();
  if (w <= 0 || h <= 0 || w > 1 << 16 || h > 1 << 16) throw format_error("pnm: bad dimensions");
  if (maxval <= 0 || maxval > 65535) throw format_error("pnm: bad maxval");
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.maxval = static_cast<int>(maxval);
  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * img.channels;
  img.samples.resize(count);

  if (kind == '2' || kind == '3') {
    for (std::size_t k = 0; k < count; ++k) {
      const long v = cur.next_int();
      if (v > maxval) throw format_error("pnm: sample exceeds maxval");
      img.samples[k] = static_cast<std::uint16_t>(v);
    }
    return img;
  }
  cur.end_header();
  const std::size_t width = maxval > 255 ? 2 : 1;
  if (bytes.size() - cur.pos() < count * width) throw format_error("pnm: truncated pixel data");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + cur.pos());
  for (std::size_t k = 0; k < count; ++k) {
    const std::uint16_t v = width == 2 ? static_cast<std::uint16_t>((p[2 * k] << 8) | p[2 * k + 1]) : p[k];
    if (v > maxval) throw format_error("pnm: sample exceeds maxval");
    img.samples[k] = v;
  }
  return img;
}

PnmImage read_pnm(const std::string& path) { return parse_pnm(detail::read_file(path)); }

void write_pnm(const std::string& path, const PnmImage& img) {
  if (img.channels != 1 && img.channels != 3) throw invalid_argument("pnm: channels must be 1 or 3");
  if (img.maxval <= 0 || img.maxval > 65535) throw invalid_argument("pnm: bad maxval");
  std::ostringstream out;
  out << (img.channels == 1 ? "P5" : "P6") << '\n' << img.width << ' ' << img.height << '\n' << img.maxval << '\n';
  std::string bytes = out.str();
  const bool wide = img.maxval > 255;
  for (std::uint16_t v : img.samples) {
    if (wide) bytes.push_back(static_cast<char>(v >> 8));
    bytes.push_back(static_cast<char>(v & 0xff));
  }
  detail::write_file(path, bytes);
}

Image to_unit_gray(const PnmImage& img) {
  Image out(img.height, img.width);
  const double scale = 1.0 / img.maxval;
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      if (img.channels == 1) {
        out(r, c) = img.at(r, c) * scale;
      } else {
        out(r, c) = (0.2126 * img.at(r, c, 0) + 0.7152 * img.at(r, c, 1) + 0.0722 * img.at(r, c, 2)) * scale;
      }
    }
  }
  return out;
}

PnmImage from_unit_gray(const Image& image, int maxval) {
  PnmImage img;
  img.width = static_cast<int>(image.cols());
  img.height = static_cast<int>(image.rows());
  img.channels = 1;
  img.maxval = maxval;
  img.samples.resize(static_cast<std::size_t>(image.size()));
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c) {
      const double v = std::clamp(image(r, c), 0.0, 1.0) * maxval;
      img.samples[static_cast<std::size_t>(r) * img.width + c] = static_cast<std::uint16_t>(std::lround(v));
    }
  return img;
}

}  // namespace gdn
