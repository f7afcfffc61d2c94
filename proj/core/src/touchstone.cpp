// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <ostream>

#include "ris/constants.hpp"
#include "ris/rf.hpp"

namespace ris
{

namespace
{

double degrees(const complex &z) { return std::arg(z) * 180.0 / constants::pi; }

}  // namespace

void write_touchstone(const SParamMatrix &s, std::ostream &os)
{
  const int n = s.n_ports;
  os << "! rissim S-parameters, " << n << " ports, columns without an excitation run are zero\n";
  os << "# Hz S MA R " << s.z0 << '\n';
  os.precision(10);
  for (std::size_t f = 0; f < static_cast<std::size_t>(s.grid.n_points); ++f)
  {
    os << s.grid.at(f);
    if (n == 2)
    {
      // two-port files list S11 S21 S12 S22
      for (const auto &[i, j] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}})
        os << ' ' << std::abs(s.at(i, j, f)) << ' ' << degrees(s.at(i, j, f));
      os << '\n';
      continue;
    }
    for (int i = 0; i < n; ++i)
    {
      for (int j = 0; j < n; ++j)
      {
        if (j > 0 && j % 4 == 0)
          os << "\n";
        os << ' ' << std::abs(s.at(i, j, f)) << ' ' << degrees(s.at(i, j, f));
      }
      os << '\n';
    }
  }
}

void write_sparam_csv(const SParamMatrix &s, std::ostream &os)
{
  os << "f_hz,i,j,re,im,mag_db,phase_deg\n";
  os.precision(12);
  for (std::size_t f = 0; f < static_cast<std::size_t>(s.grid.n_points); ++f)
    for (int j = 0; j < s.n_ports; ++j)
    {
      if (s.measured[static_cast<std::size_t>(j)] == 0)
        continue;
      for (int i = 0; i < s.n_ports; ++i)
      {
        const complex z = s.at(i, j, f);
        os << s.grid.at(f) << ',' << i << ',' << j << ',' << z.real() << ',' << z.imag() << ','
           << 20.0 * std::log10(std::max(std::abs(z), 1e-300)) << ',' << degrees(z) << '\n';
      }
    }
}

void write_impedance_csv(const FrequencyGrid &grid, int port, const Impedance &z, std::ostream &os)
{
  os << "f_hz,port,re_ohm,im_ohm,defined\n";
  os.precision(12);
  for (std::size_t f = 0; f < z.z.size(); ++f)
  {
    os << grid.at(f) << ',' << port << ',';
    if (z.defined[f])
      os << z.z[f].real() << ',' << z.z[f].imag() << ",1\n";
    else
      os << ",,0\n";
  }
}

void write_power_csv(const PowerReport &p, std::ostream &os)
{
  os << "f_hz,port,incoming_w,reflected_w,accepted_w\n";
  os.precision(12);
  for (std::size_t s = 0; s < p.port_indices.size(); ++s)
    for (std::size_t f = 0; f < p.incoming[s].size(); ++f)
      os << p.grid.at(f) << ',' << p.port_indices[s] << ',' << p.incoming[s][f] << ','
         << p.reflected[s][f] << ',' << p.accepted[s][f] << '\n';
}

}  // namespace ris
