#include "mict/image.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "mict/errors.hpp"

namespace mict {

Raster::Raster(int w, int h)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

std::array<std::uint8_t, 3> Raster::at(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

void Raster::set(int x, int y, std::array<std::uint8_t, 3> rgb) {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  pixels[i] = rgb[0];
  pixels[i + 1] = rgb[1];
  pixels[i + 2] = rgb[2];
}

ForegroundMask::ForegroundMask(int w, int h, bool value) : bits(h, w) { bits.setConstant(value); }

void ForegroundMask::fill(const OrientedRectd& r) {
  for_each_pixel_in(r, width(), height(), true, [this](int x, int y) { bits(y, x) = true; });
}

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

int next_int(std::istream& in, const std::filesystem::path& path) {
  const std::string tok = next_token(in);
  try {
    return std::stoi(tok);
  } catch (...) {
    fail(ErrorKind::Io, "malformed header in " + path.string());
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

}  // namespace

Raster read_ppm(const std::filesystem::path& path) {
  auto in = open_in(path);
  if (next_token(in) != "P6") fail(ErrorKind::Io, path.string() + " is not a binary PPM (P6)");
  const int w = next_int(in, path);
  const int h = next_int(in, path);
  const int maxval = next_int(in, path);
  if (w <= 0 || h <= 0 || maxval != 255)
    fail(ErrorKind::Io, "unsupported PPM geometry or depth in " + path.string());
  Raster img(w, h);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
    fail(ErrorKind::Io, "truncated pixel data in " + path.string());
  return img;
}

void write_ppm(const std::filesystem::path& path, const Raster& img) {
  auto out = open_out(path);
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

ForegroundMask read_pbm(const std::filesystem::path& path) {
  auto in = open_in(path);
  const std::string magic = next_token(in);
  if (magic != "P1" && magic != "P4") fail(ErrorKind::Io, path.string() + " is not a PBM bitmap");
  const int w = next_int(in, path);
  const int h = next_int(in, path);
  if (w <= 0 || h <= 0) fail(ErrorKind::Io, "bad PBM size in " + path.string());
  ForegroundMask mask(w, h);
  if (magic == "P1") {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        char c;
        do {
          if (!in.get(c)) fail(ErrorKind::Io, "truncated PBM " + path.string());
        } while (c != '0' && c != '1');
        mask.bits(y, x) = (c == '1');
      }
    }
  } else {
    const int row_bytes = (w + 7) / 8;
    std::vector<unsigned char> row(static_cast<std::size_t>(row_bytes));
    for (int y = 0; y < h; ++y) {
      in.read(reinterpret_cast<char*>(row.data()), row_bytes);
      if (in.gcount() != row_bytes) fail(ErrorKind::Io, "truncated PBM " + path.string());
      for (int x = 0; x < w; ++x) mask.bits(y, x) = (row[x / 8] >> (7 - x % 8)) & 1;
    }
  }
  return mask;
}

void write_pbm(const std::filesystem::path& path, const ForegroundMask& mask) {
  auto out = open_out(path);
  const int w = mask.width();
  const int h = mask.height();
  out << "P4\n" << w << ' ' << h << '\n';
  const int row_bytes = (w + 7) / 8;
  std::vector<unsigned char> row(static_cast<std::size_t>(row_bytes));
  for (int y = 0; y < h; ++y) {
    std::fill(row.begin(), row.end(), 0);
    for (int x = 0; x < w; ++x)
      if (mask.at(x, y)) row[x / 8] |= static_cast<unsigned char>(1u << (7 - x % 8));
    out.write(reinterpret_cast<const char*>(row.data()), row_bytes);
  }
}

}  // namespace mict
