// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ris/io_util.hpp"

#include <cstdio>
#include <fstream>

#include "ris/error.hpp"

namespace ris
{

void write_file_atomic(const std::filesystem::path &path, std::string_view content)
{
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
      throw Error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::uint64_t fnv1a64(std::string_view data) noexcept
{
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : data)
  {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v)
{
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace ris
