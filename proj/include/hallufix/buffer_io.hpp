#pragma once

#include <filesystem>

#include "hallufix/image.hpp"

namespace hallufix {

// Grayscale PFM ("Pf"), 32-bit float, little-endian (negative scale),
// bottom-to-top row order per the format.
void write_pfm(const ImageF& img, const std::filesystem::path& path);
ImageF read_pfm(const std::filesystem::path& path);

// 8-bit grayscale PNG of values clamped to [0,1].
void write_png_gray(const ImageF& img, const std::filesystem::path& path);

// 16-bit RGB PNG; vectors are encoded (n+1)/2 before quantization.
void write_png_normal(const Image3& img, const std::filesystem::path& path);

}  // namespace hallufix
