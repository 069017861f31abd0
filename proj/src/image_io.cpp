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

#include "tiil/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <vector>

#include "tiil/error.hpp"

namespace tiil {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw DataError("cannot open '" + path + "'");
  return f;
}

struct Decoded {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 0;
  std::vector<std::uint8_t> pixels;
  std::map<std::string, std::string> text;
};

// Decodes to 8-bit grey (want_rgb == false) or 8-bit RGB.
Decoded decode(const std::string& path, bool want_rgb) {
  FilePtr file = open_file(path, "rb");
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw DataError("'" + path + "' is not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw DataError("libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw DataError("libpng initialisation failed");
  }
  Decoded out;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("corrupt PNG '" + path + "'");
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const png_byte color = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  png_set_strip_alpha(png);
  const bool is_grey = (color & PNG_COLOR_MASK_COLOR) == 0;
  if (want_rgb && is_grey) png_set_gray_to_rgb(png);
  if (!want_rgb && !is_grey) png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  png_read_update_info(png, info);

  out.width = png_get_image_width(png, info);
  out.height = png_get_image_height(png, info);
  out.channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out.pixels.resize(stride * out.height);
  rows.resize(out.height);
  for (std::size_t y = 0; y < out.height; ++y) rows[y] = out.pixels.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, info);

  png_textp texts = nullptr;
  int n_text = 0;
  png_get_text(png, info, &texts, &n_text);
  for (int i = 0; i < n_text; ++i) {
    out.text[texts[i].key] = std::string(texts[i].text, texts[i].text_length);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

void encode(const std::string& path, std::size_t width, std::size_t height,
            std::size_t channels, const std::vector<std::uint8_t>& pixels,
            const std::map<std::string, std::string>& text) {
  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw DataError("libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw DataError("libpng initialisation failed");
  }
  std::vector<png_text> chunks;
  std::vector<std::string> keys;
  std::vector<std::string> values;
  keys.reserve(text.size());
  values.reserve(text.size());
  for (const auto& [k, v] : text) {
    keys.push_back(k);
    values.push_back(v);
  }
  for (std::size_t i = 0; i < keys.size(); ++i) {
    png_text t{};
    t.compression = PNG_TEXT_COMPRESSION_NONE;
    t.key = keys[i].data();
    t.text = values[i].data();
    t.text_length = values[i].size();
    chunks.push_back(t);
  }
  std::vector<png_bytep> rows(height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("failed writing PNG '" + path + "'");
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (!chunks.empty()) png_set_text(png, info, chunks.data(), static_cast<int>(chunks.size()));
  png_write_info(png, info);
  for (std::size_t y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(pixels.data() + y * width * channels);
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

ImageTensor read_png_image(const std::string& path) {
  Decoded d = decode(path, true);
  std::vector<double> data(d.pixels.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = d.pixels[i] / 255.0;
  try {
    return ImageTensor({d.height, d.width, 3}, std::move(data));
  } catch (const InvalidArgument& e) {
    throw DataError("'" + path + "': " + e.what());
  }
}

void write_png_image(const std::string& path, const ImageTensor& image,
                     const std::map<std::string, std::string>& text) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw InvalidArgument("PNG output needs 1 or 3 channels, got " +
                          std::to_string(image.channels()));
  }
  std::vector<std::uint8_t> bytes(image.values().size());
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = to_byte(image.values()[i]);
  encode(path, image.width(), image.height(), image.channels(), bytes, text);
}

BinaryMask read_png_mask(const std::string& path) {
  Decoded d = decode(path, false);
  std::vector<std::uint8_t> bits(d.width * d.height);
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = d.pixels[i] != 0 ? 1 : 0;
  return BinaryMask(d.height, d.width, std::move(bits));
}

void write_png_mask(const std::string& path, const BinaryMask& mask) {
  std::vector<std::uint8_t> bytes(mask.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.at_index(i) ? 255 : 0;
  encode(path, mask.width(), mask.height(), 1, bytes, {});
}

std::map<std::string, std::string> read_png_text(const std::string& path) {
  return decode(path, false).text;
}

ImageTensor quantize_8bit(const ImageTensor& image) {
  std::vector<double> data(image.values().begin(), image.values().end());
  for (double& v : data) v = to_byte(v) / 255.0;
  return ImageTensor(image.shape(), std::move(data));
}

}  // namespace tiil
