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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gdn/params.hpp"

namespace gdn {

/// Grayscale image with intensities in [0, 1], rows = height.
using Image = Matrix;

/// Raw portable graymap/pixmap contents (P2, P3, P5, P6), 8 or 16 bit.
struct PnmImage {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 (graymap) or 3 (pixmap)
  int maxval = 255;
  std::vector<std::uint16_t> samples;  // row-major, channels interleaved

  std::uint16_t at(int row, int col, int channel = 0) const {
    return samples[(static_cast<std::size_t>(row) * width + col) * channels + channel];
  }
};

PnmImage read_pnm(const std::string& path);
PnmImage parse_pnm(const std::string& bytes);

/// Binary P5 (channels == 1) or P6 (channels == 3); 16-bit when maxval > 255.
void write_pnm(const std::string& path, const PnmImage& image);

/// Intensities scaled to [0, 1]. Pixmaps are reduced to Rec. 709 luma on the
/// encoded values (no gamma removal).
Image to_unit_gray(const PnmImage& image);

/// Quantize a [0, 1] image to a graymap with the given maxval (clamped).
PnmImage from_unit_gray(const Image& image, int maxval = 255);

}  // namespace gdn
