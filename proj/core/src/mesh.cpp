// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ris/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ris/constants.hpp"
#include "ris/error.hpp"

namespace ris
{

namespace
{

constexpr double kTol = 1e-9;  // mm; coordinates closer than this are the same line

struct Line
{
  double x;
  bool fixed;
};

std::vector<Line> merge_sorted(std::span<const double> fixed, std::span<const double> other)
{
  std::vector<Line> all;
  all.reserve(fixed.size() + other.size());
  for (double x : fixed)
  {
    all.push_back({x, true});
  }
  for (double x : other)
  {
    all.push_back({x, false});
  }
  std::sort(all.begin(), all.end(), [](const Line &a, const Line &b)
            { return a.x < b.x || (a.x == b.x && a.fixed && !b.fixed); });
  std::vector<Line> out;
  for (const Line &l : all)
  {
    if (!out.empty() && l.x - out.back().x <= kTol)
    {
      out.back().fixed = out.back().fixed || l.fixed;
      continue;
    }
    out.push_back(l);
  }
  return out;
}

std::vector<Line> smooth(const std::vector<Line> &in, double threshold)
{
  std::vector<Line> kept;
  kept.reserve(in.size());
  for (const Line &l : in)
  {
    while (true)
    {
      if (kept.empty() || l.x - kept.back().x >= threshold - kTol)
      {
        kept.push_back(l);
        break;
      }
      if (!l.fixed)
      {
        break;  // drop the newcomer
      }
      if (!kept.back().fixed)
      {
        kept.pop_back();  // a fixed line evicts a non-fixed neighbour
        continue;
      }
      kept.push_back(l);  // fixed-fixed pair stays, reported elsewhere
      break;
    }
  }
  return kept;
}

double target_resolution(double a, double b, std::span<const ResolutionRegion> regions,
                         double fallback)
{
  double res = fallback;
  for (const auto &r : regions)
  {
    bool hit;
    if (r.hi - r.lo > kTol)
    {
      hit = r.lo < b - kTol && r.hi > a + kTol;
    }
    else
    {
      hit = r.lo >= a - kTol && r.lo <= b + kTol;
    }
    if (hit)
    {
      res = std::min(res, r.resolution);
    }
  }
  return res;
}

std::vector<Line> fill(const std::vector<Line> &in, std::span<const ResolutionRegion> regions,
                       double coarse)
{
  std::vector<Line> out;
  for (std::size_t i = 0; i < in.size(); ++i)
  {
    out.push_back(in[i]);
    if (i + 1 == in.size())
    {
      break;
    }
    const double a = in[i].x, b = in[i + 1].x;
    const double res = target_resolution(a, b, regions, coarse);
    const auto n = static_cast<long>(std::ceil((b - a) / res - 1e-9));
    for (long k = 1; k < n; ++k)
    {
      out.push_back({a + (b - a) * static_cast<double>(k) / static_cast<double>(n), false});
    }
  }
  return out;
}

// Splits cells that are more than `g` times larger than a neighbour. All splits of one pass are
// decided from the same snapshot so that mirrored inputs give mirrored outputs.
std::vector<Line> grade(std::vector<Line> lines, double g, double threshold)
{
  const double inf = std::numeric_limits<double>::infinity();
  for (int pass = 0; pass < 1000; ++pass)
  {
    const std::size_t n = lines.size();
    if (n < 3)
    {
      break;
    }
    std::vector<Line> added;
    for (std::size_t i = 0; i + 1 < n; ++i)
    {
      const double a = lines[i].x, b = lines[i + 1].x, s = b - a;
      const double sl = i > 0 ? a - lines[i - 1].x : inf;
      const double sr = i + 2 < n ? lines[i + 2].x - b : inf;
      const bool need_l = s > g * sl * (1.0 + 1e-9);
      const bool need_r = s > g * sr * (1.0 + 1e-9);
      if (!need_l && !need_r)
      {
        continue;
      }
      if (need_l && need_r)
      {
        const double p = a + g * sl, q = b - g * sr;
        if (q - p >= std::max({sl, sr, threshold}))
        {
          added.push_back({p, false});
          added.push_back({q, false});
          continue;
        }
      }
      else if (need_l)
      {
        if (s - g * sl >= std::max(sl, threshold))
        {
          added.push_back({a + g * sl, false});
          continue;
        }
      }
      else if (s - g * sr >= std::max(sr, threshold))
      {
        added.push_back({b - g * sr, false});
        continue;
      }
      if (0.5 * s >= threshold - kTol)
      {
        added.push_back({0.5 * (a + b), false});
      }
    }
    if (added.empty())
    {
      break;
    }
    lines.insert(lines.end(), added.begin(), added.end());
    std::sort(lines.begin(), lines.end(), [](const Line &x, const Line &y) { return x.x < y.x; });
  }
  return lines;
}

bool contains_line(const std::vector<double> &sorted, double x)
{
  auto it = std::lower_bound(sorted.begin(), sorted.end(), x - kTol);
  return it != sorted.end() && std::abs(*it - x) <= kTol;
}

std::string num(double v, int prec = 4)
{
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

}  // namespace

MeshSpec MeshSpec::defaults_for(double f0_hz, double fc_hz, double eps_r_max)
{
  MeshSpec s;
  const double lambda_hi = constants::c0 / (f0_hz + 0.5 * fc_hz) / constants::mm;
  const double lambda0 = constants::c0 / f0_hz / constants::mm;
  s.fine_resolution = lambda_hi / (20.0 * std::sqrt(std::max(1.0, eps_r_max)));
  s.coarse_resolution = lambda_hi / 15.0;
  s.air_padding = lambda0 / 8.0;
  return s;
}

std::vector<std::string> validate(const MeshSpec &s)
{
  std::vector<std::string> v;
  if (!(s.fine_resolution > 0.0))
  {
    v.push_back("mesh.fine_resolution: must be > 0");
  }
  if (!(s.fine_resolution <= s.coarse_resolution))
  {
    v.push_back("mesh.coarse_resolution: must be >= fine_resolution");
  }
  const double t = s.threshold();
  if (!(t > 0.0) || !(t <= s.fine_resolution))
  {
    v.push_back("mesh.merge_threshold: must satisfy 0 < threshold <= fine_resolution");
  }
  if (s.pml_cells < 4)
  {
    v.push_back("mesh.pml_cells: must be >= 4");
  }
  if (!(s.air_padding >= 0.0))
  {
    v.push_back("mesh.air_padding: must be >= 0");
  }
  if (!(s.max_grading > 1.0))
  {
    v.push_back("mesh.max_grading: must be > 1");
  }
  return v;
}

std::size_t Mesh::cell_count() const noexcept
{
  std::size_t n = 1;
  for (const auto &l : lines)
  {
    n *= l.size() > 1 ? l.size() - 1 : 0;
  }
  return n;
}

Box Mesh::domain() const noexcept
{
  Box b;
  for (std::size_t a = 0; a < 3; ++a)
  {
    if (!lines[a].empty())
    {
      b.lo[a] = lines[a].front();
      b.hi[a] = lines[a].back();
    }
  }
  return b;
}

Mesh Mesh::uniform(const Box &box, double spacing, int pml_cells)
{
  Mesh m;
  m.pml_cells = pml_cells;
  m.merge_threshold = 0.5 * spacing;
  for (std::size_t a = 0; a < 3; ++a)
  {
    const double ext = box.extent(a);
    const auto n = std::max<long>(1, std::lround(ext / spacing));
    for (long i = 0; i <= n; ++i)
    {
      m.lines[a].push_back(box.lo[a] + ext * static_cast<double>(i) / static_cast<double>(n));
    }
    m.fixed[a].assign(m.lines[a].size(), 0);
  }
  return m;
}

std::vector<double> smooth_lines(std::span<const double> lines,
                                 std::span<const std::uint8_t> fixed, double threshold)
{
  std::vector<Line> in;
  in.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i)
  {
    in.push_back({lines[i], i < fixed.size() && fixed[i] != 0});
  }
  std::vector<double> out;
  for (const Line &l : smooth(in, threshold))
  {
    out.push_back(l.x);
  }
  return out;
}

std::vector<double> mesh_axis(std::span<const double> fixed_lines,
                              std::span<const ResolutionRegion> regions,
                              std::span<const double> refinement_lines, const MeshSpec &spec)
{
  const double t = spec.threshold();
  auto lines = merge_sorted(fixed_lines, refinement_lines);
  lines = smooth(lines, t);
  lines = fill(lines, regions, spec.coarse_resolution);
  lines = grade(std::move(lines), spec.max_grading, t);
  lines = smooth(lines, t);
  std::vector<double> out;
  out.reserve(lines.size());
  for (const Line &l : lines)
  {
    out.push_back(l.x);
  }
  return out;
}

Mesh generate_mesh(const Scene &scene, const MeshSpec &spec)
{
  auto problems = validate(spec);
  if (scene.primitives.empty() && scene.lumped_items.empty())
  {
    problems.push_back("scene: empty scene cannot be meshed");
  }
  for (std::size_t a = 0; a < 3 && problems.empty(); ++a)
  {
    if (!(scene.bounds.extent(a) > 0.0))
    {
      problems.push_back(std::string("scene: degenerate bounding box (zero extent along ") +
                         axis_name(axis_from_index(a)) + ")");
    }
  }
  if (!problems.empty())
  {
    throw ValidationError(std::move(problems));
  }

  const double fine = spec.fine_resolution, coarse = spec.coarse_resolution;
  const double refine_offset = std::max(0.5 * fine, spec.threshold());
  const double pad = std::ceil(spec.air_padding / coarse - 1e-9) * coarse;

  Mesh mesh;
  mesh.pml_cells = spec.pml_cells;
  mesh.merge_threshold = spec.threshold();

  for (std::size_t a = 0; a < 3; ++a)
  {
    std::vector<ResolutionRegion> regions;
    std::vector<double> refine;
    for (const auto &p : scene.primitives)
    {
      const double lo = p.box.lo[a], hi = p.box.hi[a];
      switch (p.material.kind)
      {
        case Material::Kind::Conductor:
          regions.push_back({lo, hi, fine});
          if (spec.edge_refinement && hi - lo > kTol)
          {
            // edge sits at one third of the [inside, outside] span
            if (lo + refine_offset < hi - kTol)
            {
              refine.push_back(lo + refine_offset);
              refine.push_back(hi - refine_offset);
            }
            refine.push_back(lo - 2.0 * refine_offset);
            refine.push_back(hi + 2.0 * refine_offset);
          }
          break;
        case Material::Kind::Dielectric:
          regions.push_back({lo, hi, coarse / std::sqrt(std::max(1.0, p.material.eps_r))});
          break;
        case Material::Kind::Air:
          break;
      }
    }
    for (const auto &l : scene.lumped_items)
    {
      const double lo = std::min(l.start[a], l.end()[a]);
      const double hi = std::max(l.start[a], l.end()[a]);
      regions.push_back({lo, hi, fine});
    }

    std::vector<double> fixed = scene.fixed_lines[a];
    const double lo = scene.bounds.lo[a] - pad, hi = scene.bounds.hi[a] + pad;
    // refinement lines outside the padded domain are meaningless
    std::erase_if(refine, [&](double x) { return x <= lo + kTol || x >= hi - kTol; });
    fixed.push_back(lo);
    fixed.push_back(hi);
    std::sort(fixed.begin(), fixed.end());

    auto lines = mesh_axis(fixed, regions, refine, spec);

    // absorber cells continue the outermost spacing
    const double s_lo = lines[1] - lines[0];
    const double s_hi = lines[lines.size() - 1] - lines[lines.size() - 2];
    std::vector<double> full;
    full.reserve(lines.size() + 2 * static_cast<std::size_t>(spec.pml_cells));
    for (int k = spec.pml_cells; k >= 1; --k)
    {
      full.push_back(lines.front() - k * s_lo);
    }
    full.insert(full.end(), lines.begin(), lines.end());
    for (int k = 1; k <= spec.pml_cells; ++k)
    {
      full.push_back(lines.back() + k * s_hi);
    }
    mesh.lines[a] = std::move(full);
    mesh.fixed[a].resize(mesh.lines[a].size());
    for (std::size_t i = 0; i < mesh.lines[a].size(); ++i)
    {
      mesh.fixed[a][i] = contains_line(scene.fixed_lines[a], mesh.lines[a][i]) ? 1 : 0;
    }
  }
  return mesh;
}

MeshReport mesh_report(const Mesh &mesh, double grading_bound)
{
  MeshReport r;
  r.cells = mesh.cell_count();
  r.grading_bound = grading_bound;
  double inv2 = 0.0;
  for (std::size_t a = 0; a < 3; ++a)
  {
    const auto &x = mesh.lines[a];
    auto &st = r.axes[a];
    st.lines = x.size();
    if (x.size() < 2)
    {
      continue;
    }
    st.min_spacing = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
    {
      const double s = x[i + 1] - x[i];
      st.min_spacing = std::min(st.min_spacing, s);
      st.max_spacing = std::max(st.max_spacing, s);
      if (i + 2 < x.size())
      {
        const double s2 = x[i + 2] - x[i + 1];
        const double ratio = std::max(s / s2, s2 / s);
        if (ratio > st.max_grading)
        {
          st.max_grading = ratio;
          st.max_grading_at = x[i + 1];
        }
        if (ratio > grading_bound * (1.0 + 1e-9))
        {
          r.grading_violations.push_back({axis_from_index(a), x[i + 1], ratio});
        }
      }
      const bool both_fixed = !mesh.fixed[a].empty() && mesh.fixed[a][i] && mesh.fixed[a][i + 1];
      if (both_fixed && s < mesh.merge_threshold - kTol)
      {
        r.sub_threshold_fixed_pairs.push_back({axis_from_index(a), x[i], x[i + 1]});
      }
    }
    r.max_grading = std::max(r.max_grading, st.max_grading);
    const double d = st.min_spacing * constants::mm;
    inv2 += 1.0 / (d * d);
  }
  r.estimated_dt = inv2 > 0.0 ? 0.95 / (constants::c0 * std::sqrt(inv2)) : 0.0;
  // six field components plus one material id per edge
  r.estimated_memory_bytes = static_cast<double>(r.cells) * (6.0 * sizeof(double) + 3.0 * sizeof(std::uint16_t));
  return r;
}

std::string MeshReport::to_table() const
{
  std::ostringstream os;
  os << "mesh report\n";
  os << "  cells              " << cells << "\n";
  os << "  axis  lines   min[mm]   max[mm]  grading\n";
  for (std::size_t a = 0; a < 3; ++a)
  {
    const auto &s = axes[a];
    os << "  " << axis_name(axis_from_index(a)) << std::setw(10) << s.lines << std::setw(10)
       << num(s.min_spacing) << std::setw(10) << num(s.max_spacing) << std::setw(9)
       << num(s.max_grading, 3) << "\n";
  }
  os << "  grading bound      " << grading_bound
     << (grading_violations.empty() ? " (ok)" : " (" + std::to_string(grading_violations.size()) +
                                                    " violations)")
     << "\n";
  os << "  estimated dt       " << num(estimated_dt * 1e12) << " ps\n";
  os << "  estimated memory   " << num(estimated_memory_bytes / (1024.0 * 1024.0)) << " MiB\n";
  if (!sub_threshold_fixed_pairs.empty())
  {
    os << "  sub-threshold fixed line pairs:\n";
    for (const auto &p : sub_threshold_fixed_pairs)
    {
      os << "    " << axis_name(p.axis) << ": " << num(p.a, 8) << " / " << num(p.b, 8) << "\n";
    }
  }
  return os.str();
}

nlohmann::json MeshReport::to_json() const
{
  nlohmann::json axes_j = nlohmann::json::object();
  for (std::size_t a = 0; a < 3; ++a)
  {
    const auto &s = axes[a];
    axes_j[axis_name(axis_from_index(a))] = {{"lines", s.lines},
                                             {"min_spacing_mm", s.min_spacing},
                                             {"max_spacing_mm", s.max_spacing},
                                             {"max_grading", s.max_grading},
                                             {"max_grading_at_mm", s.max_grading_at}};
  }
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto &p : sub_threshold_fixed_pairs)
  {
    pairs.push_back({{"axis", axis_name(p.axis)}, {"a_mm", p.a}, {"b_mm", p.b}});
  }
  nlohmann::json viol = nlohmann::json::array();
  for (const auto &v : grading_violations)
  {
    viol.push_back({{"axis", axis_name(v.axis)}, {"at_mm", v.at}, {"ratio", v.ratio}});
  }
  return {{"schema", "ris.mesh_report"},
          {"version", 1},
          {"cells", cells},
          {"axes", axes_j},
          {"max_grading", max_grading},
          {"grading_bound", grading_bound},
          {"grading_violations", viol},
          {"sub_threshold_fixed_pairs", pairs},
          {"estimated_dt_s", estimated_dt},
          {"estimated_memory_bytes", estimated_memory_bytes}};
}

nlohmann::json to_json(const Mesh &mesh)
{
  nlohmann::json lines, fixed;
  for (std::size_t a = 0; a < 3; ++a)
  {
    const char *n = axis_name(axis_from_index(a));
    lines[n] = mesh.lines[a];
    std::vector<bool> f(mesh.fixed[a].begin(), mesh.fixed[a].end());
    fixed[n] = f;
  }
  return {{"schema", "ris.mesh"},
          {"version", 1},
          {"lines_mm", lines},
          {"fixed", fixed},
          {"pml_cells", mesh.pml_cells},
          {"merge_threshold_mm", mesh.merge_threshold}};
}

Mesh mesh_from_json(const nlohmann::json &j)
{
  if (j.value("schema", "") != "ris.mesh")
  {
    throw Error("mesh json: missing or wrong schema tag");
  }
  Mesh m;
  for (std::size_t a = 0; a < 3; ++a)
  {
    const char *n = axis_name(axis_from_index(a));
    m.lines[a] = j.at("lines_mm").at(n).get<std::vector<double>>();
    const auto f = j.at("fixed").at(n).get<std::vector<bool>>();
    m.fixed[a].assign(f.begin(), f.end());
  }
  m.pml_cells = j.at("pml_cells").get<int>();
  m.merge_threshold = j.at("merge_threshold_mm").get<double>();
  return m;
}

}  // namespace ris
