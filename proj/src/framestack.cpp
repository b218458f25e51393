#include "biphoton/framestack.hpp"

#include <cstring>
#include <filesystem>
#include <sstream>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

constexpr char kMagic[4] = {'B', 'P', 'F', '1'};

template <typename T>
void write_le(std::ofstream& out, T value) {
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i)
    bytes[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in, const std::string& path, const char* what) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw DataError(path + ": truncated header while reading " + std::string(what));
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return static_cast<T>(v);
}

std::string encode_metadata(const std::map<std::string, std::string>& metadata) {
  std::ostringstream out;
  for (const auto& [k, v] : metadata) out << k << " = " << v << "\n";
  return out.str();
}

std::map<std::string, std::string> decode_metadata(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const auto trim = [](std::string& s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t\r");
      s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    trim(key);
    trim(value);
    if (!key.empty()) out[key] = value;
  }
  return out;
}

}  // namespace

FrameStackWriter::FrameStackWriter(const std::string& path, int width, int height,
                                   const std::map<std::string, std::string>& metadata)
    : out_(path, std::ios::binary), path_(path), width_(width), height_(height) {
  if (!out_) throw DataError(path + ": cannot open for writing");
  out_.write(kMagic, 4);
  write_le<std::uint16_t>(out_, 1);
  write_le<std::uint32_t>(out_, static_cast<std::uint32_t>(width));
  write_le<std::uint32_t>(out_, static_cast<std::uint32_t>(height));
  count_pos_ = out_.tellp();
  write_le<std::uint32_t>(out_, 0);  // frame count, patched on close
  write_le<std::uint8_t>(out_, 0);   // u16 little-endian payload
  const std::string meta = encode_metadata(metadata);
  write_le<std::uint32_t>(out_, static_cast<std::uint32_t>(meta.size()));
  out_.write(meta.data(), static_cast<std::streamsize>(meta.size()));
  if (!out_) throw DataError(path + ": header write failed");
}

FrameStackWriter::~FrameStackWriter() {
  try {
    close();
  } catch (...) {
    // destructor must not throw; an explicit close() reports errors
  }
}

void FrameStackWriter::append(const Frame& frame) {
  if (closed_) throw DataError(path_ + ": writer already closed");
  if (frame.width() != width_ || frame.height() != height_)
    throw DataError(path_ + ": frame size does not match stack header");
  for (int iy = 0; iy < height_; ++iy) {
    for (int ix = 0; ix < width_; ++ix) {
      write_le<std::uint16_t>(out_, frame.pixels(iy, ix));
    }
  }
  if (!out_)
    throw DataError(path_ + ": write failed at frame " + std::to_string(frames_written_));
  ++frames_written_;
}

void FrameStackWriter::close() {
  if (closed_) return;
  closed_ = true;
  out_.seekp(count_pos_);
  write_le<std::uint32_t>(out_, static_cast<std::uint32_t>(frames_written_));
  out_.flush();
  if (!out_) throw DataError(path_ + ": failed to finalize header");
  out_.close();
}

FrameStackReader::FrameStackReader(const std::string& path)
    : in_(path, std::ios::binary), path_(path) {
  if (!in_) throw DataError(path + ": cannot open");
  char magic[4];
  if (!in_.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError(path + ": bad magic, not a BPF1 stack");
  header_.version = read_le<std::uint16_t>(in_, path, "version");
  if (header_.version != 1)
    throw DataError(path + ": unsupported version " + std::to_string(header_.version));
  header_.width = read_le<std::uint32_t>(in_, path, "width");
  header_.height = read_le<std::uint32_t>(in_, path, "height");
  header_.frame_count = read_le<std::uint32_t>(in_, path, "frame count");
  header_.encoding = read_le<std::uint8_t>(in_, path, "encoding");
  if (header_.encoding != 0)
    throw DataError(path + ": unsupported pixel encoding " +
                    std::to_string(header_.encoding));
  const auto meta_len = read_le<std::uint32_t>(in_, path, "metadata length");
  std::string meta(meta_len, '\0');
  if (meta_len > 0 && !in_.read(meta.data(), meta_len))
    throw DataError(path + ": truncated metadata block");
  header_.metadata = decode_metadata(meta);
  payload_offset_ = in_.tellg();

  const auto file_size = std::filesystem::file_size(path);
  const std::uint64_t frame_bytes =
      static_cast<std::uint64_t>(header_.width) * header_.height * 2;
  const std::uint64_t expected =
      static_cast<std::uint64_t>(payload_offset_) + frame_bytes * header_.frame_count;
  if (file_size < expected) {
    const std::uint64_t actual_frames =
        frame_bytes == 0 ? 0 : (file_size - payload_offset_) / frame_bytes;
    std::ostringstream s;
    s << path << ": truncated payload, header declares " << header_.frame_count
      << " frames but the file holds " << actual_frames << " (missing "
      << (expected - file_size) << " bytes)";
    throw DataError(s.str());
  }
}

Frame FrameStackReader::read_frame(std::int64_t index) {
  if (index < 0 || index >= frame_count())
    throw DataError(path_ + ": frame index " + std::to_string(index) + " out of range");
  const std::uint64_t frame_bytes =
      static_cast<std::uint64_t>(header_.width) * header_.height * 2;
  in_.clear();
  in_.seekg(payload_offset_ + static_cast<std::streamoff>(frame_bytes * index));
  Frame frame;
  frame.index = index;
  frame.pixels.resize(header_.height, header_.width);
  std::vector<unsigned char> buf(frame_bytes);
  if (!in_.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(frame_bytes)))
    throw DataError(path_ + ": read failed at frame " + std::to_string(index) +
                    " (byte offset " +
                    std::to_string(payload_offset_ + static_cast<std::streamoff>(frame_bytes * index)) + ")");
  for (std::uint32_t iy = 0; iy < header_.height; ++iy) {
    for (std::uint32_t ix = 0; ix < header_.width; ++ix) {
      const std::size_t o = 2 * (static_cast<std::size_t>(iy) * header_.width + ix);
      frame.pixels(iy, ix) =
          static_cast<std::uint16_t>(buf[o] | (std::uint16_t(buf[o + 1]) << 8));
    }
  }
  return frame;
}

}  // namespace biphoton
