#pragma once

// Shared binary-container plumbing for basis and checkpoint files:
// an 8-byte little-endian header length, a JSON header, then raw
// little-endian float64 blocks.

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "adaptkry/error.hpp"
#include "adaptkry/matrix.hpp"

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts need byte swaps");

namespace adaptkry::detail {

inline void write_json_header(std::ostream& out, const nlohmann::json& header) {
  const std::string text = header.dump();
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

inline nlohmann::json read_json_header(std::istream& in, const std::string& path) {
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  if (!in || len > (1u << 20)) throw io_error("corrupt container header in " + path);
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw io_error("truncated container header in " + path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw io_error("malformed JSON header in " + path + ": " + e.what());
  }
}

inline void write_f64_block(std::ostream& out, const Matrix& block) {
  out.write(reinterpret_cast<const char*>(block.data()),
            static_cast<std::streamsize>(block.size() * sizeof(double)));
}

inline Matrix read_f64_block(std::istream& in, std::size_t rows, std::size_t cols,
                             const std::string& path) {
  Matrix block(rows, cols);
  in.read(reinterpret_cast<char*>(block.data()),
          static_cast<std::streamsize>(block.size() * sizeof(double)));
  if (!in) throw io_error("truncated data block in " + path);
  return block;
}

}  // namespace adaptkry::detail
