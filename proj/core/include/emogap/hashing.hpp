#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace emogap {

// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

std::uint64_t fnv1a_64(std::string_view data) noexcept;

// Per-stage seed derived from the run seed and the stage name.
std::uint64_t stage_seed(std::uint64_t run_seed, std::string_view stage) noexcept;

}  // namespace emogap
