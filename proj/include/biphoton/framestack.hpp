#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <string>

#include "biphoton/emccd.hpp"

namespace biphoton {

// BPF1 frame-stack container, little-endian:
//   bytes 0-3  magic "BPF1"
//   u16        version (= 1)
//   u32        width, u32 height, u32 frame count
//   u8         pixel encoding (0 = u16 little-endian)
//   u32        metadata length
//   bytes      metadata, UTF-8 "key = value" lines
//   payload    frames, row-major, contiguous
// The frame count is patched on close; readers reject bad magic/version and
// truncated payloads.

struct StackHeader {
  std::uint16_t version = 1;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t frame_count = 0;
  std::uint8_t encoding = 0;
  std::map<std::string, std::string> metadata;
};

class FrameStackWriter {
 public:
  FrameStackWriter(const std::string& path, int width, int height,
                   const std::map<std::string, std::string>& metadata);
  ~FrameStackWriter();

  void append(const Frame& frame);
  void close();  // patches the frame count; call before reading the file

  std::int64_t frames_written() const { return frames_written_; }

 private:
  std::ofstream out_;
  std::string path_;
  int width_ = 0;
  int height_ = 0;
  std::int64_t frames_written_ = 0;
  std::streampos count_pos_;
  bool closed_ = false;
};

class FrameStackReader {
 public:
  explicit FrameStackReader(const std::string& path);

  const StackHeader& header() const { return header_; }
  std::int64_t frame_count() const { return header_.frame_count; }

  Frame read_frame(std::int64_t index);

 private:
  std::ifstream in_;
  std::string path_;
  StackHeader header_;
  std::streamoff payload_offset_ = 0;
};

}  // namespace biphoton
