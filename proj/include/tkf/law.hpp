#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace tkf {

// Truncated pmf over {offset, offset+1, ...} with a certified bound on the
// mass outside the stored support. Invariant: masses >= 0, tail_bound >= 0,
// total() + tail_bound = 1 within 1e-9.
struct DiscreteLaw {
  std::int64_t support_offset = 0;
  std::vector<double> masses;
  double tail_bound = 0.0;

  double at(std::int64_t n) const {
    std::int64_t i = n - support_offset;
    if (i < 0 || i >= static_cast<std::int64_t>(masses.size())) return 0.0;
    return masses[static_cast<std::size_t>(i)];
  }
  std::int64_t min_support() const { return support_offset; }
  std::int64_t max_support() const {
    return support_offset + static_cast<std::int64_t>(masses.size()) - 1;
  }
  double total() const;
  double mean() const;
  double variance() const;
};

// Banded nonnegative table over integer pairs: rows indexed by y1, each row a
// contiguous y2 band. Same normalization invariant as DiscreteLaw.
struct JointLaw {
  struct Row {
    std::int64_t y2_offset = 0;
    std::vector<double> masses;
  };
  std::int64_t y1_offset = 0;
  std::vector<Row> rows;
  double tail_bound = 0.0;

  double at(std::int64_t y1, std::int64_t y2) const;
  double total() const;
  DiscreteLaw marginal(int coord) const;  // coord 0 -> y1, coord 1 -> y2
};

// TV and overlap with certified intervals. lo = ½Σ|a−b| over the stored
// union support (a lower bound on the true TV); hi adds half the combined
// tail mass. overlap = Σ min(a,b) over the union support; overlap_hi adds
// min of the tails. The identity TV + overlap = 1 is checked internally
// within the tail budget (ProbError if violated).
struct TvResult {
  double lo = 0.0;
  double hi = 0.0;
  double overlap = 0.0;
  double overlap_hi = 0.0;
};
TvResult tv_distance(const DiscreteLaw& a, const DiscreteLaw& b);
TvResult tv_distance(const JointLaw& a, const JointLaw& b);

// CSV: header "value,mass" / "value,value2,mass"; '.' decimal, '\n' endings.
// JSON: numbers with 17 significant digits.
void write_csv(std::ostream& os, const DiscreteLaw& law);
void write_csv(std::ostream& os, const JointLaw& law);
void write_json(std::ostream& os, const DiscreteLaw& law);
void write_json(std::ostream& os, const JointLaw& law);

}  // namespace tkf
