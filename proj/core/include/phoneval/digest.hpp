#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace phoneval {

using Sha256 = std::array<std::uint8_t, 32>;

Sha256 sha256(std::span<const std::uint8_t> bytes);
Sha256 sha256(std::string_view text);
/// Digest of a file's bytes. Throws IoError if the file cannot be read.
Sha256 sha256_file(const std::filesystem::path& path);
std::string to_hex(const Sha256& digest);

}  // namespace phoneval
