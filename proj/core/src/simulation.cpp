// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ris/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ris/constants.hpp"
#include "ris/error.hpp"

namespace ris
{

namespace
{

using std::size_t;
using Field = std::vector<double>;

// Stretched-coordinate absorber along one axis. Only the 2*(P+1) outermost node/cell slots of
// the axis carry auxiliary fields.
struct PmlAxis
{
  bool active = false;
  size_t n = 0, p = 0;
  std::vector<long> slot;       // node/cell index -> auxiliary slot or -1
  std::vector<size_t> indices;  // indices with a slot, ascending
  std::vector<double> be, ae;   // per slot, E nodes
  std::vector<double> bh, ah;   // per slot, H cells (x_{i+1/2})

  void setup(const std::vector<double> &x, size_t cells, double dt, const RunConfig &cfg, double f0)
  {
    n = x.size();
    p = cells;
    slot.assign(n, -1);
    if (p == 0)
      return;
    if (n < 2 * p + 3)
      throw Error("absorber thicker than half the domain");
    active = true;
    for (size_t i = 0; i <= p; ++i)
      indices.push_back(i);
    for (size_t i = n - 1 - p; i < n; ++i)
      indices.push_back(i);
    for (size_t s = 0; s < indices.size(); ++s)
      slot[indices[s]] = static_cast<long>(s);

    const double lo_edge = x[p], hi_edge = x[n - 1 - p];
    const double d_lo = x[p] - x[0], d_hi = x[n - 1] - x[n - 1 - p];
    const double m = cfg.pml_grading_order;
    const double lnr = std::log(cfg.pml_reflection);
    const double alpha_max = 2.0 * constants::pi * constants::eps0 * f0 / 20.0;
    auto coeffs = [&](double pos, double &b, double &a)
    {
      double rho = 0.0, depth = 1.0;
      if (pos < lo_edge)
      {
        rho = (lo_edge - pos) / d_lo;
        depth = d_lo;
      }
      else if (pos > hi_edge)
      {
        rho = (pos - hi_edge) / d_hi;
        depth = d_hi;
      }
      rho = std::clamp(rho, 0.0, 1.0);
      const double smax = -(m + 1.0) * lnr / (2.0 * constants::eta0 * depth);
      const double sigma = smax * std::pow(rho, m);
      const double alpha = alpha_max * (1.0 - rho);
      b = std::exp(-(sigma + alpha) * dt / constants::eps0);
      a = (sigma + alpha) > 0.0 ? sigma / (sigma + alpha) * (b - 1.0) : 0.0;
    };
    const size_t ns = indices.size();
    be.resize(ns);
    ae.resize(ns);
    bh.resize(ns);
    ah.resize(ns);
    for (size_t s = 0; s < ns; ++s)
    {
      const size_t i = indices[s];
      coeffs(x[i], be[s], ae[s]);
      const double xh = i + 1 < n ? 0.5 * (x[i] + x[i + 1]) : x[i];
      coeffs(xh, bh[s], ah[s]);
    }
  }
  size_t slots() const noexcept { return indices.size(); }
};

struct ElementState
{
  std::vector<double> current;  // per edge, time n
  std::vector<double> charge;   // per edge, time n
  std::vector<double> e_old;    // per edge, E^n
  std::vector<double> e_bar, i_bar;  // per edge, time n+1/2
  std::vector<double> r, l, inv_c, vs_share, rport;  // per edge
  std::vector<size_t> id;
};

class Engine
{
public:
  Engine(const MaterialGrid &grid, const Mesh &mesh, int active_port, const SourceSpec &src,
         const RunConfig &cfg)
      : g_(grid), d_(grid.dims), src_(src), cfg_(cfg), active_port_(active_port)
  {
    dt_ = stable_timestep(mesh, grid, cfg.cfl_factor);
    ch_ = dt_ / constants::mu0;
    const size_t n = d_.size();
    for (auto *f : {&ex_, &ey_, &ez_, &hx_, &hy_, &hz_})
      f->assign(n, 0.0);
    for (size_t a = 0; a < 3; ++a)
      setup_axis(a, mesh.pml_cells);
    ca_.resize(g_.materials.size());
    cb_.resize(g_.materials.size());
    eps_.resize(g_.materials.size());
    for (size_t m = 0; m < g_.materials.size(); ++m)
    {
      const auto &mat = g_.materials[m];
      eps_[m] = mat.eps;
      if (mat.pec)
        continue;
      const double beta = mat.sigma * dt_ / (2.0 * mat.eps);
      ca_[m] = (1.0 - beta) / (1.0 + beta);
      cb_[m] = dt_ / mat.eps / (1.0 + beta);
    }
    if (!cfg.disable_pml && mesh.pml_cells > 0)
    {
      for (size_t a = 0; a < 3; ++a)
        pml_[a].setup(g_.nodes[a], static_cast<size_t>(mesh.pml_cells), dt_, cfg, src.f0);
      alloc_psi();
    }
    setup_elements();
#ifdef _OPENMP
    threads_ = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
#endif
    plane_.assign(d_.nx, 0.0);
  }

  SimRecord run();

private:
  void setup_axis(size_t a, int pml_cells);
  void alloc_psi();
  void setup_elements();
  double update_h();
  double update_e();
  void pml_h();
  void pml_e();
  void update_elements(double t_now, double t_next, double &energy_e, SimRecord &rec, long step);
  double curl_h(size_t c, size_t i, size_t j, size_t k) const;

  Field &field_e(size_t c) { return c == 0 ? ex_ : (c == 1 ? ey_ : ez_); }

  const MaterialGrid &g_;
  GridDims d_;
  SourceSpec src_;
  RunConfig cfg_;
  int active_port_;
  double dt_ = 0.0, ch_ = 0.0;
  int threads_ = 1;

  Field ex_, ey_, ez_, hx_, hy_, hz_;
  std::vector<double> ca_, cb_, eps_;
  // primal spacing, dual spacing and their inverses per axis; energy weights zero in the absorber
  std::array<std::vector<double>, 3> dp_, dd_, idp_, idd_, wp_, wd_;
  std::array<PmlAxis, 3> pml_;
  // auxiliary fields: psi_e[a][0/1] for the two E components curled along axis a
  std::array<std::array<Field, 2>, 3> psi_e_, psi_h_;
  std::vector<double> plane_;

  std::vector<size_t> elem_begin_;  // edge range of element e: [elem_begin_[e], elem_begin_[e+1])
  std::vector<size_t> elem_edge_comp_;
  ElementState st_;
  std::vector<int> port_elems_;   // element index per recorded port
  std::vector<int> probe_elems_;
};

void Engine::setup_axis(size_t a, int pml_cells)
{
  const auto &x = g_.nodes[a];
  const size_t n = x.size();
  dp_[a].assign(n, 0.0);
  idp_[a].assign(n, 0.0);
  dd_[a].assign(n, 0.0);
  idd_[a].assign(n, 0.0);
  wp_[a].assign(n, 0.0);
  wd_[a].assign(n, 0.0);
  const size_t p = cfg_.disable_pml ? 0 : static_cast<size_t>(std::max(pml_cells, 0));
  for (size_t i = 0; i + 1 < n; ++i)
  {
    dp_[a][i] = x[i + 1] - x[i];
    idp_[a][i] = 1.0 / dp_[a][i];
    const bool inside = i >= p && i + 1 + p < n;
    wp_[a][i] = inside ? dp_[a][i] : 0.0;
  }
  for (size_t i = 0; i < n; ++i)
  {
    const double lo = i > 0 ? x[i] - x[i - 1] : 0.0;
    const double hi = i + 1 < n ? x[i + 1] - x[i] : 0.0;
    dd_[a][i] = 0.5 * (lo + hi);
    idd_[a][i] = 1.0 / dd_[a][i];
    const bool inside = i >= p && i + p < n;
    wd_[a][i] = inside ? dd_[a][i] : 0.0;
  }
}

void Engine::alloc_psi()
{
  for (size_t a = 0; a < 3; ++a)
  {
    if (!pml_[a].active)
      continue;
    std::array<size_t, 3> shape{d_.nx, d_.ny, d_.nz};
    shape[a] = pml_[a].slots();
    const size_t sz = shape[0] * shape[1] * shape[2];
    for (auto &f : psi_e_[a])
      f.assign(sz, 0.0);
    for (auto &f : psi_h_[a])
      f.assign(sz, 0.0);
  }
}

void Engine::setup_elements()
{
  elem_begin_.push_back(0);
  for (size_t e = 0; e < g_.lumped.size(); ++e)
  {
    const auto &el = g_.lumped[e];
    const double total = el.total_length;
    for (const auto &edge : el.edges)
    {
      const double frac = edge.length / total;
      st_.id.push_back(d_.index(edge.i, edge.j, edge.k));
      elem_edge_comp_.push_back(edge.component);
      double r = 0.0, l = 0.0, ic = 0.0, rp = 0.0;
      if (el.kind != LumpedKind::Probe)
      {
        r = el.series.resistance * frac;
        l = el.series.inductance * frac;
        ic = el.series.capacitance ? frac / *el.series.capacitance : 0.0;
      }
      if (el.kind == LumpedKind::Port)
        rp = el.port_resistance * frac;
      st_.r.push_back(r + rp);
      st_.rport.push_back(rp);
      st_.l.push_back(l);
      st_.inv_c.push_back(ic);
      const bool driven = el.kind == LumpedKind::Port && el.port_index == active_port_;
      st_.vs_share.push_back(driven ? frac : 0.0);
    }
    elem_begin_.push_back(st_.id.size());
  }
  const size_t ne = st_.id.size();
  st_.current.assign(ne, 0.0);
  st_.charge.assign(ne, 0.0);
  st_.e_old.assign(ne, 0.0);
  st_.e_bar.assign(ne, 0.0);
  st_.i_bar.assign(ne, 0.0);

  std::vector<std::pair<int, int>> ports;
  for (size_t e = 0; e < g_.lumped.size(); ++e)
  {
    const auto &el = g_.lumped[e];
    if (el.kind == LumpedKind::Port)
    {
      const bool wanted = cfg_.record_ports.empty() ||
                          std::find(cfg_.record_ports.begin(), cfg_.record_ports.end(),
                                    el.port_index) != cfg_.record_ports.end();
      if (wanted)
        ports.emplace_back(el.port_index, static_cast<int>(e));
    }
    else if (el.kind == LumpedKind::Probe)
    {
      probe_elems_.push_back(static_cast<int>(e));
    }
  }
  std::sort(ports.begin(), ports.end());
  for (const auto &[p, e] : ports)
    port_elems_.push_back(e);
}

double Engine::update_h()
{
  const size_t nx = d_.nx, ny = d_.ny, nz = d_.nz, sx = ny * nz;
  const double ch = ch_;
  double *hx = hx_.data(), *hy = hy_.data(), *hz = hz_.data();
  const double *ex = ex_.data(), *ey = ey_.data(), *ez = ez_.data();
  const auto &idx = idp_[0], &idy = idp_[1], &idz = idp_[2];
  const auto &wdx = wd_[0], &wpx = wp_[0], &wpy = wp_[1], &wpz = wp_[2];
  std::fill(plane_.begin(), plane_.end(), 0.0);
  double *plane = plane_.data();

#pragma omp parallel for schedule(static) num_threads(threads_)
  for (long li = 0; li < static_cast<long>(nx); ++li)
  {
    const size_t i = static_cast<size_t>(li);
    double acc = 0.0;
    // Hx(i, j+1/2, k+1/2)
    {
      double s = 0.0;
      for (size_t j = 0; j + 1 < ny; ++j)
      {
        const size_t base = (i * ny + j) * nz;
        double row = 0.0;
        for (size_t k = 0; k + 1 < nz; ++k)
        {
          const size_t id = base + k;
          const double old = hx[id];
          const double nw =
              old - ch * ((ez[id + nz] - ez[id]) * idy[j] - (ey[id + 1] - ey[id]) * idz[k]);
          hx[id] = nw;
          row += old * nw * wpz[k];
        }
        s += row * wpy[j];
      }
      acc += s * wdx[i];
    }
    if (i + 1 < nx)
    {
      // Hy(i+1/2, j, k+1/2)
      double s = 0.0;
      for (size_t j = 0; j < ny; ++j)
      {
        const size_t base = (i * ny + j) * nz;
        double row = 0.0;
        for (size_t k = 0; k + 1 < nz; ++k)
        {
          const size_t id = base + k;
          const double old = hy[id];
          const double nw =
              old - ch * ((ex[id + 1] - ex[id]) * idz[k] - (ez[id + sx] - ez[id]) * idx[i]);
          hy[id] = nw;
          row += old * nw * wpz[k];
        }
        s += row * wd_[1][j];
      }
      acc += s * wpx[i];
      // Hz(i+1/2, j+1/2, k)
      s = 0.0;
      for (size_t j = 0; j + 1 < ny; ++j)
      {
        const size_t base = (i * ny + j) * nz;
        double row = 0.0;
        for (size_t k = 0; k < nz; ++k)
        {
          const size_t id = base + k;
          const double old = hz[id];
          const double nw =
              old - ch * ((ey[id + sx] - ey[id]) * idx[i] - (ex[id + nz] - ex[id]) * idy[j]);
          hz[id] = nw;
          row += old * nw * wd_[2][k];
        }
        s += row * wpy[j];
      }
      acc += s * wpx[i];
    }
    plane[i] = acc;
  }
  double total = 0.0;
  for (size_t i = 0; i < nx; ++i)
    total += plane_[i];
  return 0.5 * constants::mu0 * total;
}

double Engine::update_e()
{
  const size_t nx = d_.nx, ny = d_.ny, nz = d_.nz, sx = ny * nz;
  double *ex = ex_.data(), *ey = ey_.data(), *ez = ez_.data();
  const double *hx = hx_.data(), *hy = hy_.data(), *hz = hz_.data();
  const std::uint16_t *mx = g_.edge_material[0].data(), *my = g_.edge_material[1].data(),
                      *mz = g_.edge_material[2].data();
  const double *ca = ca_.data(), *cb = cb_.data(), *ep = eps_.data();
  const auto &iddx = idd_[0], &iddy = idd_[1], &iddz = idd_[2];
  const auto &wpx = wp_[0], &wdx = wd_[0], &wpy = wp_[1], &wdy = wd_[1], &wpz = wp_[2],
             &wdz = wd_[2];
  double *plane = plane_.data();

#pragma omp parallel for schedule(static) num_threads(threads_)
  for (long li = 0; li < static_cast<long>(nx); ++li)
  {
    const size_t i = static_cast<size_t>(li);
    double acc = 0.0;
    if (i + 1 < nx)
    {
      // Ex(i+1/2, j, k)
      double s = 0.0;
      for (size_t j = 1; j + 1 < ny; ++j)
      {
        const size_t base = (i * ny + j) * nz;
        double row = 0.0;
        for (size_t k = 1; k + 1 < nz; ++k)
        {
          const size_t id = base + k;
          const std::uint16_t m = mx[id];
          const double v = ca[m] * ex[id] +
                           cb[m] * ((hz[id] - hz[id - nz]) * iddy[j] - (hy[id] - hy[id - 1]) * iddz[k]);
          ex[id] = v;
          row += ep[m] * v * v * wdz[k];
        }
        s += row * wdy[j];
      }
      acc += s * wpx[i];
    }
    if (i > 0 && i + 1 < nx)
    {
      // Ey(i, j+1/2, k)
      double s = 0.0;
      for (size_t j = 0; j + 1 < ny; ++j)
      {
        const size_t base = (i * ny + j) * nz;
        double row = 0.0;
        for (size_t k = 1; k + 1 < nz; ++k)
        {
          const size_t id = base + k;
          const std::uint16_t m = my[id];
          const double v = ca[m] * ey[id] +
                           cb[m] * ((hx[id] - hx[id - 1]) * iddz[k] - (hz[id] - hz[id - sx]) * iddx[i]);
          ey[id] = v;
          row += ep[m] * v * v * wdz[k];
        }
        s += row * wpy[j];
      }
      // Ez(i, j, k+1/2)
      for (size_t j = 1; j + 1 < ny; ++j)
      {
        const size_t base = (i * ny + j) * nz;
        double row = 0.0;
        for (size_t k = 0; k + 1 < nz; ++k)
        {
          const size_t id = base + k;
          const std::uint16_t m = mz[id];
          const double v = ca[m] * ez[id] +
                           cb[m] * ((hy[id] - hy[id - sx]) * iddx[i] - (hx[id] - hx[id - nz]) * iddy[j]);
          ez[id] = v;
          row += ep[m] * v * v * wpz[k];
        }
        s += row * wdy[j];
      }
      acc += s * wdx[i];
    }
    plane[i] = acc;
  }
  double total = 0.0;
  for (size_t i = 0; i < nx; ++i)
    total += plane_[i];
  return 0.5 * total;
}

// CPML corrections. For axis a, psi_?[a][0] belongs to the component (a+1)%3 and
// psi_?[a][1] to (a+2)%3.
void Engine::pml_h()
{
  const size_t nx = d_.nx, ny = d_.ny, nz = d_.nz;
  const double ch = ch_;
  if (pml_[0].active)
  {
    const auto &P = pml_[0];
    auto &py = psi_h_[0][0], &pz = psi_h_[0][1];  // Hy, Hz
    const long ns = static_cast<long>(P.slots());
#pragma omp parallel for schedule(static) num_threads(threads_)
    for (long ls = 0; ls < ns; ++ls)
    {
      const size_t s = static_cast<size_t>(ls), i = P.indices[s];
      if (i + 1 >= nx)
        continue;
      const double b = P.bh[s], a = P.ah[s], inv = idp_[0][i];
      for (size_t j = 0; j < ny; ++j)
        for (size_t k = 0; k < nz; ++k)
        {
          const size_t id = d_.index(i, j, k), q = (s * ny + j) * nz + k;
          if (k + 1 < nz)
          {
            py[q] = b * py[q] + a * (ez_[id + ny * nz] - ez_[id]) * inv;
            hy_[id] += ch * py[q];
          }
          if (j + 1 < ny)
          {
            pz[q] = b * pz[q] + a * (ey_[id + ny * nz] - ey_[id]) * inv;
            hz_[id] -= ch * pz[q];
          }
        }
    }
  }
  if (pml_[1].active)
  {
    const auto &P = pml_[1];
    auto &pz = psi_h_[1][0], &px = psi_h_[1][1];  // Hz, Hx
    const size_t ns = P.slots();
#pragma omp parallel for schedule(static) num_threads(threads_)
    for (long li = 0; li < static_cast<long>(nx); ++li)
    {
      const size_t i = static_cast<size_t>(li);
      for (size_t s = 0; s < ns; ++s)
      {
        const size_t j = P.indices[s];
        if (j + 1 >= ny)
          continue;
        const double b = P.bh[s], a = P.ah[s], inv = idp_[1][j];
        for (size_t k = 0; k < nz; ++k)
        {
          const size_t id = d_.index(i, j, k), q = (i * ns + s) * nz + k;
          if (k + 1 < nz)
          {
            px[q] = b * px[q] + a * (ez_[id + nz] - ez_[id]) * inv;
            hx_[id] -= ch * px[q];
          }
          if (i + 1 < nx)
          {
            pz[q] = b * pz[q] + a * (ex_[id + nz] - ex_[id]) * inv;
            hz_[id] += ch * pz[q];
          }
        }
      }
    }
  }
  if (pml_[2].active)
  {
    const auto &P = pml_[2];
    auto &px = psi_h_[2][0], &py = psi_h_[2][1];  // Hx, Hy
    const size_t ns = P.slots();
#pragma omp parallel for schedule(static) num_threads(threads_)
    for (long li = 0; li < static_cast<long>(nx); ++li)
    {
      const size_t i = static_cast<size_t>(li);
      for (size_t j = 0; j < ny; ++j)
        for (size_t s = 0; s < ns; ++s)
        {
          const size_t k = P.indices[s];
          if (k + 1 >= nz)
            continue;
          const double b = P.bh[s], a = P.ah[s], inv = idp_[2][k];
          const size_t id = d_.index(i, j, k), q = (i * ny + j) * ns + s;
          if (j + 1 < ny)
          {
            px[q] = b * px[q] + a * (ey_[id + 1] - ey_[id]) * inv;
            hx_[id] += ch * px[q];
          }
          if (i + 1 < nx)
          {
            py[q] = b * py[q] + a * (ex_[id + 1] - ex_[id]) * inv;
            hy_[id] -= ch * py[q];
          }
        }
    }
  }
}

void Engine::pml_e()
{
  const size_t nx = d_.nx, ny = d_.ny, nz = d_.nz, sx = ny * nz;
  const double *cb = cb_.data();
  const auto &mat = g_.edge_material;
  if (pml_[0].active)
  {
    const auto &P = pml_[0];
    auto &py = psi_e_[0][0], &pz = psi_e_[0][1];  // Ey, Ez
    const long ns = static_cast<long>(P.slots());
#pragma omp parallel for schedule(static) num_threads(threads_)
    for (long ls = 0; ls < ns; ++ls)
    {
      const size_t s = static_cast<size_t>(ls), i = P.indices[s];
      if (i == 0 || i + 1 >= nx)
        continue;
      const double b = P.be[s], a = P.ae[s], inv = idd_[0][i];
      for (size_t j = 0; j < ny; ++j)
        for (size_t k = 1; k + 1 < nz; ++k)
        {
          const size_t id = d_.index(i, j, k), q = (s * ny + j) * nz + k;
          if (j + 1 < ny)
          {
            py[q] = b * py[q] + a * (hz_[id] - hz_[id - sx]) * inv;
            ey_[id] -= cb[mat[1][id]] * py[q];
          }
        }
      for (size_t j = 1; j + 1 < ny; ++j)
        for (size_t k = 0; k + 1 < nz; ++k)
        {
          const size_t id = d_.index(i, j, k), q = (s * ny + j) * nz + k;
          pz[q] = b * pz[q] + a * (hy_[id] - hy_[id - sx]) * inv;
          ez_[id] += cb[mat[2][id]] * pz[q];
        }
    }
  }
  if (pml_[1].active)
  {
    const auto &P = pml_[1];
    auto &pz = psi_e_[1][0], &px = psi_e_[1][1];  // Ez, Ex
    const size_t ns = P.slots();
#pragma omp parallel for schedule(static) num_threads(threads_)
    for (long li = 0; li < static_cast<long>(nx); ++li)
    {
      const size_t i = static_cast<size_t>(li);
      for (size_t s = 0; s < ns; ++s)
      {
        const size_t j = P.indices[s];
        if (j == 0 || j + 1 >= ny)
          continue;
        const double b = P.be[s], a = P.ae[s], inv = idd_[1][j];
        for (size_t k = 0; k + 1 < nz; ++k)
        {
          const size_t id = d_.index(i, j, k), q = (i * ns + s) * nz + k;
          if (i + 1 < nx && k > 0)
          {
            px[q] = b * px[q] + a * (hz_[id] - hz_[id - nz]) * inv;
            ex_[id] += cb[mat[0][id]] * px[q];
          }
          if (i > 0 && i + 1 < nx)
          {
            pz[q] = b * pz[q] + a * (hx_[id] - hx_[id - nz]) * inv;
            ez_[id] -= cb[mat[2][id]] * pz[q];
          }
        }
      }
    }
  }
  if (pml_[2].active)
  {
    const auto &P = pml_[2];
    auto &px = psi_e_[2][0], &py = psi_e_[2][1];  // Ex, Ey
    const size_t ns = P.slots();
#pragma omp parallel for schedule(static) num_threads(threads_)
    for (long li = 0; li < static_cast<long>(nx); ++li)
    {
      const size_t i = static_cast<size_t>(li);
      for (size_t j = 0; j < ny; ++j)
        for (size_t s = 0; s < ns; ++s)
        {
          const size_t k = P.indices[s];
          if (k == 0 || k + 1 >= nz)
            continue;
          const double b = P.be[s], a = P.ae[s], inv = idd_[2][k];
          const size_t id = d_.index(i, j, k), q = (i * ny + j) * ns + s;
          if (i + 1 < nx && j > 0 && j + 1 < ny)
          {
            px[q] = b * px[q] + a * (hy_[id] - hy_[id - 1]) * inv;
            ex_[id] -= cb[mat[0][id]] * px[q];
          }
          if (j + 1 < ny && i > 0 && i + 1 < nx)
          {
            py[q] = b * py[q] + a * (hx_[id] - hx_[id - 1]) * inv;
            ey_[id] += cb[mat[1][id]] * py[q];
          }
        }
    }
  }
}

double Engine::curl_h(size_t c, size_t i, size_t j, size_t k) const
{
  const size_t id = d_.index(i, j, k), nz = d_.nz, sx = d_.ny * d_.nz;
  switch (c)
  {
    case 0:
      return (hz_[id] - hz_[id - nz]) * idd_[1][j] - (hy_[id] - hy_[id - 1]) * idd_[2][k];
    case 1:
      return (hx_[id] - hx_[id - 1]) * idd_[2][k] - (hz_[id] - hz_[id - sx]) * idd_[0][i];
    default:
      return (hy_[id] - hy_[id - sx]) * idd_[0][i] - (hx_[id] - hx_[id - nz]) * idd_[1][j];
  }
}

// Semi-implicit trapezoidal update of the edges carrying lumped circuits. The main update has
// already overwritten these edges; they are recomputed from the saved E^n.
void Engine::update_elements(double t_now, double t_next, double &energy_e, SimRecord &rec,
                             long step)
{
  auto source = [&](double t) { return t <= src_.end_time() ? gaussian_excitation(t, src_) : 0.0; };
  const double vs = 0.5 * (source(t_now) + source(t_next));

  auto &e_bar_edges = st_.e_bar;
  auto &i_bar_edges = st_.i_bar;
  for (size_t e = 0; e + 1 < elem_begin_.size(); ++e)
  {
    const auto &el = g_.lumped[e];
    for (size_t q = elem_begin_[e]; q < elem_begin_[e + 1]; ++q)
    {
      const auto &edge = el.edges[q - elem_begin_[e]];
      const size_t c = edge.component, id = st_.id[q];
      const auto &mat = g_.materials[g_.edge_material[c][id]];
      Field &f = field_e(c);
      const double e_new_main = f[id];
      const double e0 = st_.e_old[q];
      const double curl = curl_h(c, edge.i, edge.j, edge.k);
      const double dl = edge.length, area = edge.dual_area;
      const double two_eps_dt = 2.0 * mat.eps / dt_;
      double e_bar;
      if (el.kind == LumpedKind::Probe)
      {
        e_bar = 0.5 * (e0 + e_new_main);
      }
      else
      {
        const double zeff = st_.r[q] + 2.0 * st_.l[q] / dt_ + 0.5 * dt_ * st_.inv_c[q];
        const double k = -vs * st_.vs_share[q] + 2.0 * st_.l[q] / dt_ * st_.current[q] -
                         st_.charge[q] * st_.inv_c[q];
        e_bar = (curl + two_eps_dt * e0 - k / (area * zeff)) /
                (two_eps_dt + mat.sigma + dl / (area * zeff));
        const double i_bar = (dl * e_bar + k) / zeff;
        const double e_new = 2.0 * e_bar - e0;
        f[id] = e_new;
        st_.current[q] = 2.0 * i_bar - st_.current[q];
        st_.charge[q] += dt_ * i_bar;
        i_bar_edges[q] = i_bar;
        // Replace the main-loop energy contribution of this edge.
        const double vol = dl * area;
        const bool counted = wp_[c][c == 0 ? edge.i : (c == 1 ? edge.j : edge.k)] > 0.0 &&
                             wd_[(c + 1) % 3][c == 0 ? edge.j : (c == 1 ? edge.k : edge.i)] > 0.0 &&
                             wd_[(c + 2) % 3][c == 0 ? edge.k : (c == 1 ? edge.i : edge.j)] > 0.0;
        if (counted)
          energy_e += 0.5 * mat.eps * vol * (e_new * e_new - e_new_main * e_new_main);
      }
      e_bar_edges[q] = e_bar;
    }
  }

  for (size_t p = 0; p < port_elems_.size(); ++p)
  {
    const size_t e = static_cast<size_t>(port_elems_[p]);
    double v = 0.0, cur = 0.0;
    for (size_t q = elem_begin_[e]; q < elem_begin_[e + 1]; ++q)
    {
      v += vs * st_.vs_share[q] + st_.rport[q] * i_bar_edges[q];
      cur += i_bar_edges[q] * (g_.lumped[e].edges[q - elem_begin_[e]].length);
    }
    rec.voltage[p][static_cast<size_t>(step)] = v;
    rec.current[p][static_cast<size_t>(step)] = -cur / g_.lumped[e].total_length;
  }
  for (size_t p = 0; p < probe_elems_.size(); ++p)
  {
    const size_t e = static_cast<size_t>(probe_elems_[p]);
    double v = 0.0;
    for (size_t q = elem_begin_[e]; q < elem_begin_[e + 1]; ++q)
      v += e_bar_edges[q] * g_.lumped[e].edges[q - elem_begin_[e]].length;
    rec.probe_voltage[p][static_cast<size_t>(step)] = v;
  }
}

SimRecord Engine::run()
{
  SimRecord rec;
  rec.dt = dt_;
  rec.active_port = active_port_;
  rec.source_f0 = src_.f0;
  for (int e : port_elems_)
    rec.port_indices.push_back(g_.lumped[static_cast<size_t>(e)].port_index);
  for (int e : probe_elems_)
    rec.probe_labels.push_back(g_.lumped[static_cast<size_t>(e)].label);

  const long max_steps = cfg_.max_timesteps;
  const size_t reserve = static_cast<size_t>(std::min<long>(max_steps, 1 << 16));
  rec.voltage.assign(port_elems_.size(), {});
  rec.current.assign(port_elems_.size(), {});
  rec.probe_voltage.assign(probe_elems_.size(), {});
  rec.energy.reserve(reserve);
  for (auto *set : {&rec.voltage, &rec.current, &rec.probe_voltage})
    for (auto &v : *set)
      v.reserve(reserve);

  const double stop_ratio = std::pow(10.0, cfg_.energy_stop_db / 10.0);
  const double t_end = src_.end_time();
  double energy_e = 0.0;  // energy of E^n (absorber excluded)
  double peak = 0.0, peak_at_extinction = -1.0;
  rec.stop_reason = StopReason::StepLimit;

  const auto start = std::chrono::steady_clock::now();
  long n = 0;
  for (; n < max_steps; ++n)
  {
    const double t_now = static_cast<double>(n) * dt_;
    const double t_next = t_now + dt_;
    const double eh = update_h();
    if (!psi_h_[0][0].empty() || !psi_h_[1][0].empty() || !psi_h_[2][0].empty())
      pml_h();
    const double w = energy_e + eh;
    rec.energy.push_back(w);

    for (size_t q = 0; q < st_.id.size(); ++q)
      st_.e_old[q] = field_e(elem_edge_comp_[q])[st_.id[q]];
    energy_e = update_e();
    if (!psi_e_[0][0].empty() || !psi_e_[1][0].empty() || !psi_e_[2][0].empty())
      pml_e();
    for (auto &v : rec.voltage)
      v.push_back(0.0);
    for (auto &v : rec.current)
      v.push_back(0.0);
    for (auto &v : rec.probe_voltage)
      v.push_back(0.0);
    update_elements(t_now, t_next, energy_e, rec, n);

    if (!std::isfinite(w))
    {
      rec.stop_reason = StopReason::Diverged;
      ++n;
      break;
    }
    peak = std::max(peak, w);
    if (t_now > t_end)
    {
      if (peak_at_extinction < 0.0)
        peak_at_extinction = peak;
      if (w > 1e6 * peak_at_extinction && w > 0.0)
      {
        rec.stop_reason = StopReason::Diverged;
        ++n;
        break;
      }
      if (w <= stop_ratio * peak)
      {
        rec.stop_reason = StopReason::Converged;
        ++n;
        break;
      }
    }
  }
  rec.steps = n;
  const auto stop = std::chrono::steady_clock::now();
  rec.wall_seconds = std::chrono::duration<double>(stop - start).count();
  if (rec.wall_seconds > 0.0)
    rec.cells_per_second = static_cast<double>(d_.size()) * static_cast<double>(n) / rec.wall_seconds;
  return rec;
}

}  // namespace

std::vector<std::string> validate(const RunConfig &cfg)
{
  std::vector<std::string> v;
  if (!(cfg.cfl_factor > 0.0 && cfg.cfl_factor <= 1.0))
    v.emplace_back("run.cfl_factor: must be in (0, 1]");
  if (cfg.max_timesteps <= 0)
    v.emplace_back("run.max_timesteps: must be > 0");
  if (!(cfg.energy_stop_db < 0.0))
    v.emplace_back("run.energy_stop_db: must be < 0");
  if (cfg.workers < 0)
    v.emplace_back("run.workers: must be >= 0");
  if (!(cfg.pml_reflection > 0.0 && cfg.pml_reflection < 1.0))
    v.emplace_back("run.pml_reflection: must be in (0, 1)");
  if (cfg.pml_grading_order < 1)
    v.emplace_back("run.pml_grading_order: must be >= 1");
  return v;
}

const char *to_string(StopReason r) noexcept
{
  switch (r)
  {
    case StopReason::Converged:
      return "converged";
    case StopReason::StepLimit:
      return "step_limit";
    case StopReason::Diverged:
      return "diverged";
  }
  return "unknown";
}

int SimRecord::slot_of(int port_index) const noexcept
{
  for (size_t s = 0; s < port_indices.size(); ++s)
    if (port_indices[s] == port_index)
      return static_cast<int>(s);
  return -1;
}

double stable_timestep(const Mesh &mesh, const MaterialGrid &grid, double cfl_factor)
{
  (void)mesh;
  const auto &d = grid.dims;
  const auto &x = grid.nodes;
  const auto &mat = grid.materials;
  double worst = std::numeric_limits<double>::infinity();
  double vacuum = worst;  // used when every edge is a perfect conductor
  for (size_t i = 0; i + 1 < d.nx; ++i)
  {
    const double ax = 1.0 / ((x[0][i + 1] - x[0][i]) * (x[0][i + 1] - x[0][i]));
    for (size_t j = 0; j + 1 < d.ny; ++j)
    {
      const double ay = 1.0 / ((x[1][j + 1] - x[1][j]) * (x[1][j + 1] - x[1][j]));
      for (size_t k = 0; k + 1 < d.nz; ++k)
      {
        const double az = 1.0 / ((x[2][k + 1] - x[2][k]) * (x[2][k + 1] - x[2][k]));
        // Smallest permittivity among the updated (non-PEC) edges of the cell.
        double eps = std::numeric_limits<double>::infinity();
        auto take = [&](const EdgeMaterial &m)
        {
          if (!m.pec)
            eps = std::min(eps, m.eps);
        };
        for (size_t a = 0; a < 2; ++a)
          for (size_t b = 0; b < 2; ++b)
          {
            take(mat[grid.edge_material[0][d.index(i, j + a, k + b)]]);
            take(mat[grid.edge_material[1][d.index(i + a, j, k + b)]]);
            take(mat[grid.edge_material[2][d.index(i + a, j + b, k)]]);
          }
        vacuum = std::min(vacuum, std::sqrt(constants::eps0 * constants::mu0 / (ax + ay + az)));
        if (std::isinf(eps))
          continue;
        const double c = 1.0 / std::sqrt(eps * constants::mu0);
        worst = std::min(worst, 1.0 / (c * std::sqrt(ax + ay + az)));
      }
    }
  }
  return cfl_factor * (std::isinf(worst) ? vacuum : worst);
}

SimRecord run_simulation(const MaterialGrid &grid, const Mesh &mesh, int active_port,
                         const SourceSpec &src, const RunConfig &cfg)
{
  if (auto v = validate(cfg); !v.empty())
    throw ValidationError(std::move(v));
  if (auto v = validate(src); !v.empty())
    throw ValidationError(std::move(v));
  const bool exists = std::any_of(grid.lumped.begin(), grid.lumped.end(), [&](const auto &l)
                                  { return l.kind == LumpedKind::Port && l.port_index == active_port; });
  if (!exists)
    throw Error("run_simulation: active port " + std::to_string(active_port) + " does not exist");
  Engine engine(grid, mesh, active_port, src, cfg);
  return engine.run();
}

}  // namespace ris
