/* Copyright 2026 The TIIL Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <map>
#include <string>

#include "tiil/tensor.hpp"

namespace tiil {

// Reads any PNG as 8-bit RGB scaled to [0,1]. Throws DataError.
ImageTensor read_png_image(const std::string& path);

// Writes 1- or 3-channel images as 8-bit PNG (values rounded to 1/255).
// `text` entries are stored as tEXt chunks.
void write_png_image(const std::string& path, const ImageTensor& image,
                     const std::map<std::string, std::string>& text = {});

// Any nonzero grey level is a set pixel.
BinaryMask read_png_mask(const std::string& path);

// Single-channel PNG with values {0, 255}.
void write_png_mask(const std::string& path, const BinaryMask& mask);

std::map<std::string, std::string> read_png_text(const std::string& path);

// Rounds every value to the nearest multiple of 1/255, as a PNG round trip would.
ImageTensor quantize_8bit(const ImageTensor& image);

}  // namespace tiil
