#include "tkf/law.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "tkf/errors.hpp"
#include "tkf/format.hpp"

namespace tkf {

namespace {

// Kahan summation: pmf tables can hold millions of entries.
struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

}  // namespace

double DiscreteLaw::total() const {
  KahanSum k;
  for (double m : masses) k.add(m);
  return k.s;
}

double DiscreteLaw::mean() const {
  KahanSum k;
  for (std::size_t i = 0; i < masses.size(); ++i)
    k.add(masses[i] * static_cast<double>(support_offset + static_cast<std::int64_t>(i)));
  return k.s;
}

double DiscreteLaw::variance() const {
  double m1 = mean();
  KahanSum k;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    double d = static_cast<double>(support_offset + static_cast<std::int64_t>(i)) - m1;
    k.add(masses[i] * d * d);
  }
  return k.s;
}

double JointLaw::at(std::int64_t y1, std::int64_t y2) const {
  std::int64_t r = y1 - y1_offset;
  if (r < 0 || r >= static_cast<std::int64_t>(rows.size())) return 0.0;
  const Row& row = rows[static_cast<std::size_t>(r)];
  std::int64_t c = y2 - row.y2_offset;
  if (c < 0 || c >= static_cast<std::int64_t>(row.masses.size())) return 0.0;
  return row.masses[static_cast<std::size_t>(c)];
}

double JointLaw::total() const {
  KahanSum k;
  for (const Row& row : rows)
    for (double m : row.masses) k.add(m);
  return k.s;
}

DiscreteLaw JointLaw::marginal(int coord) const {
  DiscreteLaw out;
  out.tail_bound = tail_bound;
  if (rows.empty()) return out;
  if (coord == 0) {
    out.support_offset = y1_offset;
    out.masses.reserve(rows.size());
    for (const Row& row : rows) {
      KahanSum k;
      for (double m : row.masses) k.add(m);
      out.masses.push_back(k.s);
    }
    return out;
  }
  std::int64_t lo = rows[0].y2_offset, hi = rows[0].y2_offset;
  for (const Row& row : rows) {
    if (row.masses.empty()) continue;
    lo = std::min(lo, row.y2_offset);
    hi = std::max(hi, row.y2_offset + static_cast<std::int64_t>(row.masses.size()));
  }
  out.support_offset = lo;
  out.masses.assign(static_cast<std::size_t>(hi - lo), 0.0);
  for (const Row& row : rows)
    for (std::size_t i = 0; i < row.masses.size(); ++i)
      out.masses[static_cast<std::size_t>(row.y2_offset - lo) + i] += row.masses[i];
  return out;
}

namespace {

// Shared by both kinds: from Σ|a−b|, Σmin(a,b) over the union support plus
// the two totals and tail bounds, build the certified TvResult. The identity
// TV + overlap = 1 holds exactly for the untruncated laws; on the stored
// support it reads l1/2 + ovl = (ta_total + tb_total)/2, checked here.
TvResult finish_tv(double l1, double ovl, double total_a, double total_b, double tail_a,
                   double tail_b) {
  double lhs = 0.5 * l1 + ovl;
  double rhs = 0.5 * (total_a + total_b);
  if (std::fabs(lhs - rhs) > 1e-9 + 1e-9 * rhs)
    throw ProbError{"tv/overlap identity violated beyond tail budget"};
  TvResult r;
  r.lo = std::max(0.0, 0.5 * l1);
  r.hi = std::min(1.0, 0.5 * l1 + 0.5 * (tail_a + tail_b));
  r.overlap = std::max(0.0, ovl);
  r.overlap_hi = std::min(1.0, ovl + std::min(tail_a, tail_b));
  return r;
}

}  // namespace

TvResult tv_distance(const DiscreteLaw& a, const DiscreteLaw& b) {
  std::int64_t lo = std::min(a.min_support(), b.min_support());
  std::int64_t hi = std::max(a.max_support(), b.max_support());
  KahanSum l1, ovl;
  for (std::int64_t n = lo; n <= hi; ++n) {
    double x = a.at(n), y = b.at(n);
    l1.add(std::fabs(x - y));
    ovl.add(std::min(x, y));
  }
  return finish_tv(l1.s, ovl.s, a.total(), b.total(), a.tail_bound, b.tail_bound);
}

TvResult tv_distance(const JointLaw& a, const JointLaw& b) {
  std::int64_t lo = std::min(a.y1_offset, b.y1_offset);
  std::int64_t hi = std::max(a.y1_offset + static_cast<std::int64_t>(a.rows.size()),
                             b.y1_offset + static_cast<std::int64_t>(b.rows.size()));
  KahanSum l1, ovl, ta, tb;
  for (std::int64_t y1 = lo; y1 < hi; ++y1) {
    std::int64_t c_lo = 0, c_hi = -1;
    bool any = false;
    auto widen = [&](const JointLaw& l) {
      std::int64_t r = y1 - l.y1_offset;
      if (r < 0 || r >= static_cast<std::int64_t>(l.rows.size())) return;
      const auto& row = l.rows[static_cast<std::size_t>(r)];
      if (row.masses.empty()) return;
      std::int64_t b0 = row.y2_offset;
      std::int64_t b1 = row.y2_offset + static_cast<std::int64_t>(row.masses.size()) - 1;
      if (!any) {
        c_lo = b0;
        c_hi = b1;
        any = true;
      } else {
        c_lo = std::min(c_lo, b0);
        c_hi = std::max(c_hi, b1);
      }
    };
    widen(a);
    widen(b);
    for (std::int64_t y2 = c_lo; y2 <= c_hi; ++y2) {
      double x = a.at(y1, y2), y = b.at(y1, y2);
      l1.add(std::fabs(x - y));
      ovl.add(std::min(x, y));
      ta.add(x);
      tb.add(y);
    }
  }
  return finish_tv(l1.s, ovl.s, ta.s, tb.s, a.tail_bound, b.tail_bound);
}

void write_csv(std::ostream& os, const DiscreteLaw& law) {
  os << "value,mass\n";
  for (std::size_t i = 0; i < law.masses.size(); ++i)
    os << law.support_offset + static_cast<std::int64_t>(i) << ',' << fmt_g17(law.masses[i])
       << '\n';
}

void write_csv(std::ostream& os, const JointLaw& law) {
  os << "value,value2,mass\n";
  for (std::size_t r = 0; r < law.rows.size(); ++r) {
    std::int64_t y1 = law.y1_offset + static_cast<std::int64_t>(r);
    const auto& row = law.rows[r];
    for (std::size_t i = 0; i < row.masses.size(); ++i)
      os << y1 << ',' << row.y2_offset + static_cast<std::int64_t>(i) << ','
         << fmt_g17(row.masses[i]) << '\n';
  }
}

void write_json(std::ostream& os, const DiscreteLaw& law) {
  os << "{\"support_offset\":" << law.support_offset << ",\"masses\":[";
  for (std::size_t i = 0; i < law.masses.size(); ++i) {
    if (i) os << ',';
    os << fmt_g17(law.masses[i]);
  }
  os << "],\"tail_bound\":" << fmt_g17(law.tail_bound) << "}\n";
}

void write_json(std::ostream& os, const JointLaw& law) {
  os << "{\"y1_offset\":" << law.y1_offset << ",\"rows\":[";
  for (std::size_t r = 0; r < law.rows.size(); ++r) {
    if (r) os << ',';
    const auto& row = law.rows[r];
    os << "{\"y2_offset\":" << row.y2_offset << ",\"masses\":[";
    for (std::size_t i = 0; i < row.masses.size(); ++i) {
      if (i) os << ',';
      os << fmt_g17(row.masses[i]);
    }
    os << "]}";
  }
  os << "],\"tail_bound\":" << fmt_g17(law.tail_bound) << "}\n";
}

}  // namespace tkf
