#include "dexitac/tactile/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>

#include "dexitac/error.hpp"

namespace dexitac::tactile {
namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_token(const std::string& s, std::size_t& pos) {
  while (pos < s.size()) {
    const char c = s[pos];
    if (c == '#') {
      while (pos < s.size() && s[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) && s[pos] != '#') ++pos;
  if (start == pos) throw ImageFormatError("truncated PGM header");
  return s.substr(start, pos - start);
}

int header_int(const std::string& s, std::size_t& pos) {
  const std::string tok = next_token(s, pos);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw ImageFormatError("bad PGM header value '" + tok + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ImageFormatError("bad PGM header value '" + tok + "'");
  }
}

}  // namespace

RawImage parse_pgm(const std::string& bytes) {
  std::size_t pos = 0;
  if (next_token(bytes, pos) != "P5") throw ImageFormatError("not a binary PGM (P5)");
  RawImage img;
  img.width = header_int(bytes, pos);
  img.height = header_int(bytes, pos);
  const int maxval = header_int(bytes, pos);
  if (img.width <= 0 || img.height <= 0) throw EmptyFrame("PGM has no pixels");
  if (maxval <= 0 || maxval > 65535) throw ImageFormatError("PGM maxval out of range");
  ++pos;  // single whitespace byte before the raster
  img.channels = 1;
  img.max_value = maxval;

  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  const std::size_t bpp = maxval > 255 ? 2 : 1;
  if (bytes.size() < pos + count * bpp) throw ImageFormatError("truncated PGM raster");
  img.samples.resize(count);
  const auto* raster = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  for (std::size_t i = 0; i < count; ++i) {
    img.samples[i] = bpp == 1 ? raster[i] : (raster[2 * i] << 8) | raster[2 * i + 1];
  }
  return img;
}

RawImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageFormatError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_pgm(bytes);
}

std::string encode_pgm(const TactileFrame& frame, const std::vector<std::string>& comments) {
  std::ostringstream os;
  os << "P5\n";
  for (const auto& c : comments) os << "# " << c << "\n";
  os << frame.width << " " << frame.height << "\n255\n";
  std::string out = os.str();
  out.reserve(out.size() + frame.pixels.size());
  for (double v : frame.pixels) {
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0))));
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, const TactileFrame& frame,
               const std::vector<std::string>& comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageFormatError("cannot write " + path.string());
  const std::string bytes = encode_pgm(frame, comments);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string frame_file_name(int finger, long seq) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "frame_%d_%06ld.pgm", finger, seq);
  return buf;
}

std::vector<FrameFile> list_frame_files(const std::filesystem::path& dir) {
  static const std::regex pattern(R"(frame_([12])_(\d+)\.pgm)");
  std::vector<FrameFile> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (!std::regex_match(name, m, pattern)) continue;
    files.push_back({std::stoi(m[1]), std::stol(m[2]), entry.path()});
  }
  std::sort(files.begin(), files.end(), [](const FrameFile& a, const FrameFile& b) {
    return a.finger != b.finger ? a.finger < b.finger : a.seq < b.seq;
  });
  return files;
}

}  // namespace dexitac::tactile
