// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "ris/error.hpp"
#include "ris/simulation.hpp"

namespace ris
{

namespace
{

constexpr char kMagic[8] = {'R', 'I', 'S', 'R', 'E', 'C', '0', '1'};

StopReason stop_from(const std::string &s)
{
  if (s == "converged")
    return StopReason::Converged;
  if (s == "diverged")
    return StopReason::Diverged;
  return StopReason::StepLimit;
}

void put(std::ostream &os, const std::vector<double> &v)
{
  os.write(reinterpret_cast<const char *>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> get(std::istream &is, std::size_t n)
{
  std::vector<double> v(n);
  is.read(reinterpret_cast<char *>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is)
    throw Error("record: truncated binary data");
  return v;
}

}  // namespace

void write_csv(const SimRecord &rec, std::ostream &os)
{
  os << "t_s";
  for (int p : rec.port_indices)
    os << ",V_p" << p << ",I_p" << p;
  for (const auto &l : rec.probe_labels)
    os << ",V_" << l;
  os << '\n';
  os.precision(17);
  for (long n = 0; n < rec.steps; ++n)
  {
    const auto k = static_cast<std::size_t>(n);
    os << (static_cast<double>(n) + rec.voltage_offset) * rec.dt;
    for (std::size_t p = 0; p < rec.port_indices.size(); ++p)
      os << ',' << rec.voltage[p][k] << ',' << rec.current[p][k];
    for (const auto &v : rec.probe_voltage)
      os << ',' << v[k];
    os << '\n';
  }
}

void write_binary(const SimRecord &rec, std::ostream &os)
{
  const nlohmann::json header = {{"dt", rec.dt},
                                 {"steps", rec.steps},
                                 {"stop_reason", to_string(rec.stop_reason)},
                                 {"voltage_offset", rec.voltage_offset},
                                 {"current_offset", rec.current_offset},
                                 {"active_port", rec.active_port},
                                 {"source_f0", rec.source_f0},
                                 {"port_indices", rec.port_indices},
                                 {"probe_labels", rec.probe_labels},
                                 {"wall_seconds", rec.wall_seconds},
                                 {"cells_per_second", rec.cells_per_second}};
  const std::string text = header.dump();
  const std::uint64_t len = text.size();
  os.write(kMagic, sizeof kMagic);
  os.write(reinterpret_cast<const char *>(&len), sizeof len);
  os.write(text.data(), static_cast<std::streamsize>(len));
  for (const auto &v : rec.voltage)
    put(os, v);
  for (const auto &v : rec.current)
    put(os, v);
  for (const auto &v : rec.probe_voltage)
    put(os, v);
  put(os, rec.energy);
}

SimRecord read_binary(std::istream &is)
{
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw Error("record: not a binary SimRecord");
  std::uint64_t len = 0;
  is.read(reinterpret_cast<char *>(&len), sizeof len);
  std::string text(len, '\0');
  is.read(text.data(), static_cast<std::streamsize>(len));
  if (!is)
    throw Error("record: truncated header");
  const auto h = nlohmann::json::parse(text);
  SimRecord rec;
  rec.dt = h.at("dt").get<double>();
  rec.steps = h.at("steps").get<long>();
  rec.stop_reason = stop_from(h.at("stop_reason").get<std::string>());
  rec.voltage_offset = h.at("voltage_offset").get<double>();
  rec.current_offset = h.at("current_offset").get<double>();
  rec.active_port = h.at("active_port").get<int>();
  rec.source_f0 = h.at("source_f0").get<double>();
  rec.port_indices = h.at("port_indices").get<std::vector<int>>();
  rec.probe_labels = h.at("probe_labels").get<std::vector<std::string>>();
  rec.wall_seconds = h.at("wall_seconds").get<double>();
  rec.cells_per_second = h.at("cells_per_second").get<double>();
  const auto n = static_cast<std::size_t>(rec.steps);
  for (std::size_t p = 0; p < rec.port_indices.size(); ++p)
    rec.voltage.push_back(get(is, n));
  for (std::size_t p = 0; p < rec.port_indices.size(); ++p)
    rec.current.push_back(get(is, n));
  for (std::size_t p = 0; p < rec.probe_labels.size(); ++p)
    rec.probe_voltage.push_back(get(is, n));
  rec.energy = get(is, n);
  return rec;
}

}  // namespace ris
