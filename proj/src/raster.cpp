#include "veinforge/raster.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace vf {

const char* err_name(Err e) {
  switch (e) {
    case Err::MissingFile: return "MissingFile";
    case Err::MalformedHeader: return "MalformedHeader";
    case Err::UnsupportedFormat: return "UnsupportedFormat";
    case Err::TruncatedPayload: return "TruncatedPayload";
    case Err::IoFailure: return "IoFailure";
    case Err::CoordinateOutOfBounds: return "CoordinateOutOfBounds";
    case Err::WindowTooLarge: return "WindowTooLarge";
    case Err::NoContrast: return "NoContrast";
    case Err::NonFinite: return "NonFinite";
    case Err::NotPSD: return "NotPSD";
    case Err::DimensionMismatch: return "DimensionMismatch";
    case Err::EmptyCoordinateList: return "EmptyCoordinateList";
    case Err::InsufficientCoordinates: return "InsufficientCoordinates";
    case Err::InsufficientSamples: return "InsufficientSamples";
    case Err::AllZeroSpectrum: return "AllZeroSpectrum";
    case Err::EmptyModel: return "EmptyModel";
    case Err::UnknownLabel: return "UnknownLabel";
    case Err::BothEmpty: return "BothEmpty";
    case Err::NoAttempts: return "NoAttempts";
    case Err::EmptyScoreList: return "EmptyScoreList";
    case Err::ProtocolViolation: return "ProtocolViolation";
    case Err::InsufficientData: return "InsufficientData";
    case Err::InvalidSpec: return "InvalidSpec";
    case Err::BadMagic: return "BadMagic";
    case Err::UnsupportedVersion: return "UnsupportedVersion";
    case Err::CorruptLength: return "CorruptLength";
  }
  return "UnknownError";
}

std::size_t BinaryImage::popcount() const {
  std::size_t n = 0;
  for (std::uint8_t v : pixels) n += v;
  return n;
}

CoordinateList CoordinateList::from_unordered(std::vector<Coord> pts) {
  std::sort(pts.begin(), pts.end(), raster_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  CoordinateList out;
  out.points = std::move(pts);
  return out;
}

namespace {

// Reads one PGM header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {}
      continue;
    }
    if (std::isspace(c)) continue;
    break;
  }
  if (c == EOF) return tok;
  tok.push_back(static_cast<char>(c));
  while ((c = in.get()) != EOF && !std::isspace(c) && c != '#') {
    tok.push_back(static_cast<char>(c));
  }
  if (c == '#') in.unget();
  return tok;
}

long parse_dim(const std::string& tok, const char* what) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
    raise(Err::MalformedHeader, std::string("bad ") + what + " token '" + tok + "'");
  }
  long v = std::stol(tok);
  if (v < 1) raise(Err::MalformedHeader, std::string(what) + " must be >= 1");
  return v;
}

}  // namespace

GrayImage load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Err::MissingFile, path);

  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (!in || m0 != 'P') raise(Err::MalformedHeader, "no PNM magic in " + path);
  if (m1 != '5') {
    raise(Err::UnsupportedFormat,
          std::string("P") + m1 + " is not binary grayscale (P5): " + path);
  }

  long w = parse_dim(next_token(in), "width");
  long h = parse_dim(next_token(in), "height");
  long maxval = parse_dim(next_token(in), "maxval");
  if (maxval > 255) {
    raise(Err::UnsupportedFormat, "maxval " + std::to_string(maxval) + " > 255");
  }
  // next_token consumed exactly one whitespace byte after maxval

  GrayImage img(static_cast<int>(w), static_cast<int>(h));
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.size()));
  if (static_cast<std::size_t>(in.gcount()) != img.size()) {
    raise(Err::TruncatedPayload, path + ": expected " +
                                     std::to_string(img.size()) + " bytes, got " +
                                     std::to_string(in.gcount()));
  }
  return img;
}

void save_pgm(const GrayImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(Err::IoFailure, "cannot open " + path + " for writing");
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.size()));
  if (!out) raise(Err::IoFailure, "short write to " + path);
}

BinaryImage rasterize(const CoordinateList& coords, int width, int height) {
  BinaryImage out(width, height);
  for (const Coord& c : coords.points) {
    if (c.x < 0 || c.x >= width || c.y < 0 || c.y >= height) {
      raise(Err::CoordinateOutOfBounds,
            "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ") outside " +
                std::to_string(width) + "x" + std::to_string(height));
    }
    out.at(c.x, c.y) = 1;
  }
  return out;
}

GrayImage to_gray(const BinaryImage& bin) {
  GrayImage out(bin.width, bin.height);
  for (std::size_t i = 0; i < bin.pixels.size(); ++i) {
    out.pixels[i] = bin.pixels[i] ? 255 : 0;
  }
  return out;
}

BinaryImage to_binary(const GrayImage& img) {
  BinaryImage out(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    out.pixels[i] = img.pixels[i] ? 1 : 0;
  }
  return out;
}

}  // namespace vf
