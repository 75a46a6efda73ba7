#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dexitac/tactile/frame.hpp"

namespace dexitac::tactile {

// Binary portable graymap (P5). 8-bit and 16-bit (big-endian) maxval are
// both accepted on read; writes are always 8-bit.
RawImage read_pgm(const std::filesystem::path& path);
RawImage parse_pgm(const std::string& bytes);

// Quantizes [0,1] intensities to 0..255. `comment` lines go into the header.
std::string encode_pgm(const TactileFrame& frame, const std::vector<std::string>& comments = {});
void write_pgm(const std::filesystem::path& path, const TactileFrame& frame,
               const std::vector<std::string>& comments = {});

// One entry of a frame directory: frame_<finger>_<seq>.pgm
struct FrameFile {
  int finger = 1;
  long seq = 0;
  std::filesystem::path path;
};

// Sorted by (finger, seq). Files not matching the naming pattern are ignored.
std::vector<FrameFile> list_frame_files(const std::filesystem::path& dir);

std::string frame_file_name(int finger, long seq);

}  // namespace dexitac::tactile
