#include "satseg/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

namespace satseg {

using json = nlohmann::json;

namespace {

constexpr char kMagic[] = "MSRASTER\n";  // 9 bytes, no terminator on disk
constexpr size_t kMagicLen = 9;

size_t dtype_size(Dtype d) {
  switch (d) {
    case Dtype::u8: return 1;
    case Dtype::u16: return 2;
    case Dtype::f32: return 4;
  }
  return 0;
}

template <typename T>
std::vector<T> make_storage(size_t n) {
  return std::vector<T>(n, T{});
}

}  // namespace

std::string_view dtype_str(Dtype d) {
  switch (d) {
    case Dtype::u8: return "u8";
    case Dtype::u16: return "u16";
    case Dtype::f32: return "f32";
  }
  return "?";
}

Dtype dtype_from_str(std::string_view s) {
  if (s == "u8") return Dtype::u8;
  if (s == "u16") return Dtype::u16;
  if (s == "f32") return Dtype::f32;
  fail(ErrorCode::UnsupportedDtype, "unsupported dtype: " + std::string(s));
}

MultispectralRaster::MultispectralRaster(int width, int height,
                                         std::vector<BandName> bands,
                                         Dtype dtype, int bit_depth)
    : width_(width),
      height_(height),
      bands_(std::move(bands)),
      dtype_(dtype),
      bit_depth_(bit_depth) {
  if (width <= 0 || height <= 0)
    fail(ErrorCode::ShapeMismatch, "raster dims must be positive");
  std::unordered_set<std::string> seen;
  for (const auto& b : bands_)
    if (!seen.insert(b.str()).second)
      fail(ErrorCode::DuplicateBandName, "duplicate band: " + b.str());
  size_t n = value_count();
  switch (dtype_) {
    case Dtype::u8: data_ = make_storage<uint8_t>(n); break;
    case Dtype::u16: data_ = make_storage<uint16_t>(n); break;
    case Dtype::f32: data_ = make_storage<float>(n); break;
  }
}

int MultispectralRaster::band_index(const BandName& name) const {
  for (size_t i = 0; i < bands_.size(); ++i)
    if (bands_[i] == name) return int(i);
  return -1;
}

void MultispectralRaster::validate() const {
  size_t stored = std::visit([](const auto& v) { return v.size(); }, data_);
  if (stored != value_count())
    fail(ErrorCode::LengthMismatch,
         "payload holds " + std::to_string(stored) + " values, header declares " +
             std::to_string(value_count()));
  if (dtype_ == Dtype::u16 && (bit_depth_ == 11 || bit_depth_ == 14)) {
    uint16_t limit = uint16_t(1u << bit_depth_);
    for (uint16_t v : data<uint16_t>())
      if (v >= limit)
        fail(ErrorCode::LengthMismatch,
             "u16 value " + std::to_string(v) + " exceeds bit depth " +
                 std::to_string(bit_depth_));
  }
}

bool operator==(const MultispectralRaster& a, const MultispectralRaster& b) {
  return a.width_ == b.width_ && a.height_ == b.height_ &&
         a.bands_ == b.bands_ && a.dtype_ == b.dtype_ &&
         a.bit_depth_ == b.bit_depth_ &&
         a.ground_resolution_ == b.ground_resolution_ && a.data_ == b.data_;
}

LabelMask::LabelMask(int width, int height, std::vector<ClassLabel> classes)
    : width_(width), height_(height), classes_(std::move(classes)) {
  if (width <= 0 || height <= 0)
    fail(ErrorCode::ShapeMismatch, "mask dims must be positive");
  std::unordered_set<int> seen;
  for (auto c : classes_)
    if (!seen.insert(int(c)).second)
      fail(ErrorCode::DuplicateBandName,
           "duplicate class plane: " + std::string(class_str(c)));
  data_.assign(plane_size() * classes_.size(), 0);
}

int LabelMask::class_index(ClassLabel c) const {
  for (size_t i = 0; i < classes_.size(); ++i)
    if (classes_[i] == c) return int(i);
  return -1;
}

std::span<uint8_t> LabelMask::plane_for(ClassLabel c) {
  int i = class_index(c);
  if (i < 0)
    fail(ErrorCode::MissingBand,
         "mask has no plane for " + std::string(class_str(c)));
  return plane(size_t(i));
}

std::span<const uint8_t> LabelMask::plane_for(ClassLabel c) const {
  int i = class_index(c);
  if (i < 0)
    fail(ErrorCode::MissingBand,
         "mask has no plane for " + std::string(class_str(c)));
  return plane(size_t(i));
}

// ---- I/O ----

void save_raster(const MultispectralRaster& r,
                 const std::filesystem::path& path) {
  r.validate();
  json header;
  header["version"] = 1;
  header["width"] = r.width();
  header["height"] = r.height();
  json names = json::array();
  for (const auto& b : r.bands()) names.push_back(b.str());
  header["bands"] = names;
  header["dtype"] = std::string(dtype_str(r.dtype()));
  header["bit_depth"] = r.bit_depth();
  if (r.ground_resolution())
    header["ground_resolution"] = *r.ground_resolution();
  std::string hs = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    fail(ErrorCode::IoFailure, "cannot open for writing: " + path.string());
  out.write(kMagic, kMagicLen);
  uint64_t hlen = hs.size();
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(hs.data(), std::streamsize(hs.size()));
  auto write_payload = [&out](auto span) {
    using T = typename decltype(span)::value_type;
    out.write(reinterpret_cast<const char*>(span.data()),
              std::streamsize(span.size() * sizeof(T)));
  };
  switch (r.dtype()) {
    case Dtype::u8: write_payload(r.data<uint8_t>()); break;
    case Dtype::u16: write_payload(r.data<uint16_t>()); break;
    case Dtype::f32: write_payload(r.data<float>()); break;
  }
  if (!out) fail(ErrorCode::IoFailure, "write failed: " + path.string());
}

MultispectralRaster load_raster(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open: " + path.string());

  char magic[kMagicLen];
  in.read(magic, kMagicLen);
  if (!in || std::memcmp(magic, kMagic, kMagicLen) != 0)
    fail(ErrorCode::MalformedHeader, "missing MSRASTER magic: " + path.string());

  uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  if (!in || hlen == 0 || hlen > (1ull << 24))
    fail(ErrorCode::MalformedHeader, "implausible header length");
  std::string hs(hlen, '\0');
  in.read(hs.data(), std::streamsize(hlen));
  if (!in) fail(ErrorCode::MalformedHeader, "truncated header");

  json header;
  try {
    header = json::parse(hs);
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedHeader, std::string("bad header JSON: ") + e.what());
  }

  if (!header.contains("version") || !header["version"].is_number_integer())
    fail(ErrorCode::MalformedHeader, "header missing version");
  if (header["version"].get<int>() != 1)
    fail(ErrorCode::UnsupportedVersion,
         "unsupported container version " + header["version"].dump());
  for (const char* key : {"width", "height", "bands", "dtype", "bit_depth"})
    if (!header.contains(key))
      fail(ErrorCode::MalformedHeader, std::string("header missing ") + key);

  int w = header["width"].get<int>();
  int h = header["height"].get<int>();
  if (w <= 0 || h <= 0) fail(ErrorCode::MalformedHeader, "non-positive dims");
  std::vector<BandName> bands;
  for (const auto& n : header["bands"])
    bands.push_back(BandName::parse(n.get<std::string>()));
  Dtype dtype = dtype_from_str(header["dtype"].get<std::string>());

  MultispectralRaster r(w, h, std::move(bands), dtype,
                        header["bit_depth"].get<int>());
  if (header.contains("ground_resolution"))
    r.set_ground_resolution(header["ground_resolution"].get<double>());

  size_t payload = r.value_count() * dtype_size(dtype);
  std::visit(
      [&](auto& v) {
        using T = typename std::decay_t<decltype(v)>::value_type;
        in.read(reinterpret_cast<char*>(v.data()),
                std::streamsize(v.size() * sizeof(T)));
      },
      r.data_);
  if (size_t(in.gcount()) != payload)
    fail(ErrorCode::LengthMismatch,
         "payload shorter than declared width*height*bands");
  // Trailing bytes mean the header lied about the shape too.
  char extra;
  if (in.read(&extra, 1))
    fail(ErrorCode::LengthMismatch, "payload longer than declared");

  r.validate();
  return r;
}

LabelMask load_mask(const std::filesystem::path& path) {
  MultispectralRaster r = load_raster(path);
  if (r.dtype() != Dtype::u8)
    fail(ErrorCode::UnsupportedDtype, "mask container must be u8");
  std::vector<ClassLabel> classes;
  for (const auto& b : r.bands()) {
    std::string s = b.str();
    if (s.rfind("class:", 0) != 0)
      fail(ErrorCode::MalformedHeader, "mask band not class-named: " + s);
    classes.push_back(class_from_str(s.substr(6)));
  }
  LabelMask m(r.width(), r.height(), classes);
  for (size_t i = 0; i < classes.size(); ++i) {
    auto src = r.band_data<uint8_t>(i);
    auto dst = m.plane(i);
    std::copy(src.begin(), src.end(), dst.begin());
    for (uint8_t v : dst)
      if (v > 1)
        fail(ErrorCode::MalformedHeader, "mask values must be 0/1");
  }
  return m;
}

void save_mask(const LabelMask& m, const std::filesystem::path& path) {
  std::vector<BandName> bands;
  for (auto c : m.classes()) bands.push_back(BandName::class_plane(c));
  MultispectralRaster r(m.width(), m.height(), bands, Dtype::u8, 8);
  for (size_t i = 0; i < m.classes().size(); ++i) {
    auto src = m.plane(i);
    auto dst = r.band_data<uint8_t>(i);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  save_raster(r, path);
}

}  // namespace satseg
