// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ris/rf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ris/constants.hpp"
#include "ris/error.hpp"

namespace ris
{

namespace
{

constexpr std::size_t kRenormalize = 1024;

double to_db(double mag) { return 20.0 * std::log10(std::max(mag, 1e-300)); }

void fft(std::vector<complex> &a, bool inverse)
{
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i)
  {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1)
      j ^= bit;
    j ^= bit;
    if (i < j)
      std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1)
  {
    const double ang = 2.0 * constants::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const complex wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len)
    {
      complex w(1.0);
      for (std::size_t k = 0; k < len / 2; ++k)
      {
        const complex u = a[i + k], v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto &x : a)
      x /= static_cast<double>(n);
}

}  // namespace

double FrequencyGrid::at(std::size_t i) const noexcept
{
  if (static_cast<int>(i) == n_points - 1)
    return f_stop;
  return f_start + static_cast<double>(i) * step();
}

std::vector<double> FrequencyGrid::values() const
{
  std::vector<double> v(static_cast<std::size_t>(std::max(n_points, 0)));
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = at(i);
  return v;
}

std::vector<std::string> validate(const FrequencyGrid &grid)
{
  std::vector<std::string> v;
  if (!(grid.f_start > 0.0))
    v.emplace_back("analysis.f_start: must be > 0");
  if (!(grid.f_stop > grid.f_start))
    v.emplace_back("analysis.f_stop: must exceed f_start");
  if (grid.n_points < 2)
    v.emplace_back("analysis.n_points: must be >= 2");
  return v;
}

std::vector<complex> dtft(std::span<const double> x, double dt, double offset,
                          const FrequencyGrid &grid)
{
  const std::size_t nf = static_cast<std::size_t>(grid.n_points);
  std::vector<complex> out(nf);
  for (std::size_t f = 0; f < nf; ++f)
  {
    const double w = -2.0 * constants::pi * grid.at(f) * dt;
    const complex step = std::polar(1.0, w);
    complex acc(0.0), ph(1.0);
    for (std::size_t n = 0; n < x.size(); ++n)
    {
      if (n % kRenormalize == 0)
        ph = std::polar(1.0, w * static_cast<double>(n));
      acc += x[n] * ph;
      ph *= step;
    }
    out[f] = acc * std::polar(dt, w * offset);
  }
  return out;
}

int PortSpectra::slot_of(int port_index) const noexcept
{
  for (std::size_t s = 0; s < port_indices.size(); ++s)
    if (port_indices[s] == port_index)
      return static_cast<int>(s);
  return -1;
}

PortSpectra port_spectra(const SimRecord &rec, const FrequencyGrid &grid)
{
  if (auto v = validate(grid); !v.empty())
    throw ValidationError(std::move(v));
  const double period = rec.source_f0 > 0.0 ? 1.0 / rec.source_f0 : 1.0 / grid.f_start;
  if (rec.steps <= 0 || rec.duration() < period)
    throw Error("port_spectra: record shorter than one source period");
  PortSpectra s;
  s.grid = grid;
  s.active_port = rec.active_port;
  s.port_indices = rec.port_indices;
  for (std::size_t p = 0; p < rec.port_indices.size(); ++p)
  {
    s.voltage.push_back(dtft(rec.voltage[p], rec.dt, rec.voltage_offset, grid));
    s.current.push_back(dtft(rec.current[p], rec.dt, rec.current_offset, grid));
  }
  return s;
}

Impedance feed_impedance(const PortSpectra &spectra, int port_index)
{
  const int slot = spectra.slot_of(port_index);
  if (slot < 0)
    throw Error("feed_impedance: port " + std::to_string(port_index) + " not recorded");
  const auto &v = spectra.voltage[static_cast<std::size_t>(slot)];
  const auto &i = spectra.current[static_cast<std::size_t>(slot)];
  double peak = 0.0;
  for (const auto &x : i)
    peak = std::max(peak, std::abs(x));
  Impedance z;
  z.z.resize(v.size());
  z.defined.resize(v.size());
  for (std::size_t f = 0; f < v.size(); ++f)
  {
    const bool ok = peak > 0.0 && std::abs(i[f]) > 1e-15 * peak;
    z.defined[f] = ok ? 1 : 0;
    z.z[f] = ok ? v[f] / i[f] : complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
  }
  return z;
}

std::vector<double> SParamMatrix::magnitude_db(int i, int j) const
{
  std::vector<double> out(static_cast<std::size_t>(grid.n_points));
  for (std::size_t f = 0; f < out.size(); ++f)
    out[f] = to_db(std::abs(at(i, j, f)));
  return out;
}

SParamMatrix scattering_matrix(const std::vector<PortSpectra> &runs, int n_ports, double z0)
{
  if (runs.empty())
    throw Error("scattering_matrix: no runs");
  if (n_ports <= 0 || !(z0 > 0.0))
    throw Error("scattering_matrix: invalid port count or reference impedance");
  SParamMatrix s;
  s.grid = runs.front().grid;
  s.z0 = z0;
  s.n_ports = n_ports;
  const std::size_t nf = static_cast<std::size_t>(s.grid.n_points);
  s.data.assign(static_cast<std::size_t>(n_ports) * n_ports * nf, complex(0.0));
  s.measured.assign(static_cast<std::size_t>(n_ports), 0);
  const double k = 1.0 / (2.0 * std::sqrt(z0));
  for (const auto &run : runs)
  {
    if (!(run.grid == s.grid))
      throw Error("scattering_matrix: runs use different frequency grids");
    const int j = run.active_port;
    const int sj = run.slot_of(j);
    if (j < 0 || j >= n_ports || sj < 0)
      throw Error("scattering_matrix: active port of a run not recorded");
    if (s.measured[static_cast<std::size_t>(j)])
      throw Error("scattering_matrix: duplicate run for port " + std::to_string(j));
    s.measured[static_cast<std::size_t>(j)] = 1;
    bool excited = false;
    for (std::size_t slot = 0; slot < run.port_indices.size(); ++slot)
    {
      const int i = run.port_indices[slot];
      if (i < 0 || i >= n_ports)
        continue;
      for (std::size_t f = 0; f < nf; ++f)
      {
        const complex a = (run.voltage[static_cast<std::size_t>(sj)][f] +
                           z0 * run.current[static_cast<std::size_t>(sj)][f]) * k;
        const complex b = (run.voltage[slot][f] - z0 * run.current[slot][f]) * k;
        excited = excited || std::abs(a) > 0.0;
        s.at(i, j, f) = std::abs(a) > 0.0 ? b / a : complex(0.0);
      }
    }
    // A run without incident wave (zero source) leaves its column undefined.
    if (!excited)
      s.measured[static_cast<std::size_t>(j)] = 2;
  }
  return s;
}

PowerReport port_powers(const PortSpectra &spectra, double z0)
{
  PowerReport p;
  p.grid = spectra.grid;
  p.active_port = spectra.active_port;
  p.port_indices = spectra.port_indices;
  const double k = 1.0 / (2.0 * std::sqrt(z0));
  for (std::size_t slot = 0; slot < spectra.port_indices.size(); ++slot)
  {
    const std::size_t nf = spectra.voltage[slot].size();
    std::vector<double> in(nf), re(nf), acc(nf);
    for (std::size_t f = 0; f < nf; ++f)
    {
      const complex a = (spectra.voltage[slot][f] + z0 * spectra.current[slot][f]) * k;
      const complex b = (spectra.voltage[slot][f] - z0 * spectra.current[slot][f]) * k;
      in[f] = 0.5 * std::norm(a);
      re[f] = 0.5 * std::norm(b);
      acc[f] = in[f] - re[f];
    }
    p.incoming.push_back(std::move(in));
    p.reflected.push_back(std::move(re));
    p.accepted.push_back(std::move(acc));
  }
  return p;
}

nlohmann::json PowerReport::to_json() const
{
  nlohmann::json ports = nlohmann::json::array();
  for (std::size_t s = 0; s < port_indices.size(); ++s)
  {
    ports.push_back({{"port", port_indices[s]},
                     {"incoming_w", incoming[s]},
                     {"reflected_w", reflected[s]},
                     {"accepted_w", accepted[s]}});
  }
  return {{"schema", "ris.powers"}, {"version", 1}, {"active_port", active_port},
          {"frequencies_hz", grid.values()}, {"ports", ports}};
}

nlohmann::json ResonanceReport::to_json() const
{
  nlohmann::json b = nlohmann::json::array();
  for (const auto &band : bands)
    b.push_back({{"f_lo_hz", band.f_lo}, {"f_hi_hz", band.f_hi}, {"width_hz", band.width()}});
  return {{"schema", "ris.resonance"},
          {"version", 1},
          {"port", port},
          {"frequency_hz", frequency},
          {"min_db", min_db},
          {"bandwidth_hz", bandwidth},
          {"threshold_db", threshold_db},
          {"bands", b},
          {"weak_resonance", weak}};
}

std::pair<double, double> parabolic_vertex(double y0, double y1, double y2) noexcept
{
  const double denom = y0 - 2.0 * y1 + y2;
  if (denom == 0.0 || !std::isfinite(denom))
    return {0.0, y1};
  const double d = std::clamp(0.5 * (y0 - y2) / denom, -1.0, 1.0);
  return {d, y1 - 0.25 * (y0 - y2) * d};
}

ResonanceReport find_resonance(std::span<const double> db, const FrequencyGrid &grid,
                               double threshold_db)
{
  ResonanceReport r;
  r.threshold_db = threshold_db;
  const std::size_t n = db.size();
  if (n == 0)
    throw Error("find_resonance: empty curve");
  const std::size_t m = static_cast<std::size_t>(std::min_element(db.begin(), db.end()) - db.begin());
  r.frequency = grid.at(m);
  r.min_db = db[m];
  if (m > 0 && m + 1 < n)
  {
    const auto [d, v] = parabolic_vertex(db[m - 1], db[m], db[m + 1]);
    r.frequency = grid.at(m) + d * grid.step();
    r.min_db = std::min(v, db[m]);
  }
  auto crossing = [&](std::size_t a, std::size_t b)
  {
    const double t = (threshold_db - db[a]) / (db[b] - db[a]);
    return grid.at(a) + t * (grid.at(b) - grid.at(a));
  };
  for (std::size_t i = 0; i < n;)
  {
    if (db[i] > threshold_db)
    {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && db[j + 1] <= threshold_db)
      ++j;
    Band b;
    b.f_lo = i > 0 ? crossing(i - 1, i) : grid.at(i);
    b.f_hi = j + 1 < n ? crossing(j, j + 1) : grid.at(j);
    r.bands.push_back(b);
    if (m >= i && m <= j)
      r.bandwidth = b.width();
    i = j + 1;
  }
  r.weak = r.bands.empty();
  return r;
}

ResonanceReport find_resonance(const SParamMatrix &s, int port, double threshold_db)
{
  if (port < 0 || port >= s.n_ports)
    throw Error("find_resonance: invalid port");
  if (s.measured[static_cast<std::size_t>(port)] != 1)
  {
    ResonanceReport weak;
    weak.port = port;
    weak.frequency = s.grid.f_start;
    weak.threshold_db = threshold_db;
    weak.weak = true;
    return weak;
  }
  const auto db = s.magnitude_db(port, port);
  auto r = find_resonance(db, s.grid, threshold_db);
  r.port = port;
  return r;
}

CouplingPeak find_max_coupling(const SParamMatrix &s, int src, int dst)
{
  if (src == dst || src < 0 || dst < 0 || src >= s.n_ports || dst >= s.n_ports)
    throw Error("find_max_coupling: invalid port pair");
  const std::size_t n = static_cast<std::size_t>(s.grid.n_points);
  std::vector<double> mag(n);
  for (std::size_t f = 0; f < n; ++f)
    mag[f] = std::abs(s.at(dst, src, f));
  const std::size_t m = static_cast<std::size_t>(std::max_element(mag.begin(), mag.end()) - mag.begin());
  CouplingPeak p;
  if (!(mag[m] > 0.0))
  {
    p.frequency = s.grid.f_start;
    p.no_coupling = true;
    return p;
  }
  p.frequency = s.grid.at(m);
  p.magnitude = mag[m];
  if (m > 0 && m + 1 < n && mag[m - 1] > 0.0 && mag[m + 1] > 0.0)
  {
    const auto [d, v] = parabolic_vertex(to_db(mag[m - 1]), to_db(mag[m]), to_db(mag[m + 1]));
    p.frequency += d * s.grid.step();
    p.magnitude = std::max(mag[m], std::pow(10.0, v / 20.0));
  }
  return p;
}

std::vector<double> envelope(std::span<const double> x)
{
  std::size_t n = 1;
  while (n < x.size())
    n <<= 1;
  n <<= 1;  // zero padding keeps the circular transform from wrapping the pulse
  std::vector<complex> a(n, complex(0.0));
  for (std::size_t i = 0; i < x.size(); ++i)
    a[i] = x[i];
  fft(a, false);
  for (std::size_t k = 1; k < n / 2; ++k)
    a[k] *= 2.0;
  for (std::size_t k = n / 2 + 1; k < n; ++k)
    a[k] = 0.0;
  fft(a, true);
  std::vector<double> env(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    env[i] = std::abs(a[i]);
  return env;
}

double peak_position(std::span<const double> x)
{
  if (x.empty())
    throw Error("peak_position: empty series");
  const std::size_t m = static_cast<std::size_t>(std::max_element(x.begin(), x.end()) - x.begin());
  if (m == 0 || m + 1 == x.size())
    return static_cast<double>(m);
  return static_cast<double>(m) + parabolic_vertex(x[m - 1], x[m], x[m + 1]).first;
}

}  // namespace ris
