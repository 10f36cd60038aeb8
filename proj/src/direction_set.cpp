#include "favlab/direction_set.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>

#include "favlab/geometry.hpp"

namespace favlab {

namespace {

/// eps as an exact dyadic rational p/2^s (doubles are dyadic rationals).
struct DyadicFrac {
  unsigned __int128 p = 0;
  int s = 0;
};

DyadicFrac exact_fraction(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionViolation("eps must lie in (0,1)");
  int e = 0;
  double f = std::frexp(eps, &e);  // eps = f * 2^e, f in [0.5, 1)
  auto p = static_cast<std::uint64_t>(std::ldexp(f, 53));
  int s = 53 - e;
  while ((p & 1ull) == 0 && s > 0) {
    p >>= 1;
    --s;
  }
  if (s > 100) throw PreconditionViolation("eps below exact-arithmetic resolution");
  return {static_cast<unsigned __int128>(p), s};
}

/// cnt/size >= 1 - eps, exactly.
bool density_at_least(std::uint64_t cnt, std::uint64_t size, const DyadicFrac& eps) {
  unsigned __int128 lhs = static_cast<unsigned __int128>(cnt) << eps.s;
  unsigned __int128 rhs = ((static_cast<unsigned __int128>(1) << eps.s) - eps.p) * size;
  return lhs >= rhs;
}

/// a >= (1 + eps) * b, exactly.
bool grown_by(std::uint64_t a, std::uint64_t b, const DyadicFrac& eps) {
  unsigned __int128 lhs = static_cast<unsigned __int128>(a) << eps.s;
  unsigned __int128 rhs = ((static_cast<unsigned __int128>(1) << eps.s) + eps.p) * b;
  return lhs >= rhs;
}

}  // namespace

DirectionSet::DirectionSet(int depth) : depth_(depth) {
  if (depth < 0 || depth > 26) throw PreconditionViolation("bitset depth out of range");
  w_.assign((cells() + 63) / 64, 0ull);
}

std::uint64_t DirectionSet::count() const {
  std::uint64_t n = 0;
  for (std::uint64_t word : w_) n += std::popcount(word);
  return n;
}

std::uint64_t DirectionSet::count_range(std::uint64_t lo, std::uint64_t hi) const {
  if (lo >= hi) return 0;
  std::uint64_t n = 0;
  std::uint64_t wl = lo >> 6, wh = (hi - 1) >> 6;
  for (std::uint64_t k = wl; k <= wh; ++k) {
    std::uint64_t word = w_[k];
    if (k == wl) word &= ~0ull << (lo & 63);
    if (k == wh && ((hi & 63) != 0)) word &= ~0ull >> (64 - (hi & 63));
    n += std::popcount(word);
  }
  return n;
}

std::uint64_t DirectionSet::count_interval(const DyadicInterval& iv) const {
  if (iv.depth > depth_) throw DepthExhausted("interval finer than bitset depth");
  int shift = depth_ - iv.depth;
  return count_range(iv.index << shift, (iv.index + 1) << shift);
}

double DirectionSet::measure() const {
  return static_cast<double>(count()) / static_cast<double>(cells());
}

void DirectionSet::set_range(std::uint64_t lo, std::uint64_t hi) {
  for (std::uint64_t i = lo; i < hi; ++i) set(i);
}

void DirectionSet::reset_range(std::uint64_t lo, std::uint64_t hi) {
  for (std::uint64_t i = lo; i < hi; ++i) reset(i);
}

void DirectionSet::set_interval(const DyadicInterval& iv) {
  if (iv.depth > depth_) throw DepthExhausted("interval finer than bitset depth");
  int shift = depth_ - iv.depth;
  set_range(iv.index << shift, (iv.index + 1) << shift);
}

void DirectionSet::set_cells_inside(double lo, double hi) {
  double width = hi - lo;
  if (width >= 1.0) {
    set_range(0, cells());
    return;
  }
  if (width <= 0.0) return;
  lo -= std::floor(lo);
  if (lo >= 1.0) lo = 0.0;
  hi = lo + width;
  double n = static_cast<double>(cells());
  auto mark = [&](double a, double b) {
    auto first = static_cast<std::int64_t>(std::ceil(a * n - 1e-9));
    auto last = static_cast<std::int64_t>(std::floor(b * n + 1e-9));
    for (std::int64_t i = std::max<std::int64_t>(first, 0); i < last; ++i)
      set(static_cast<std::uint64_t>(i));
  };
  if (hi <= 1.0) {
    mark(lo, hi);
  } else {
    mark(lo, 1.0);
    mark(0.0, hi - 1.0);
  }
}

void DirectionSet::set_cells_touching(double lo, double hi) {
  double width = hi - lo;
  if (width >= 1.0) {
    set_range(0, cells());
    return;
  }
  if (width <= 0.0) return;
  lo -= std::floor(lo);
  if (lo >= 1.0) lo = 0.0;
  hi = lo + width;
  double n = static_cast<double>(cells());
  auto first = static_cast<std::int64_t>(std::floor(lo * n + 1e-9));
  auto last = static_cast<std::int64_t>(std::ceil(hi * n - 1e-9));
  auto m = static_cast<std::int64_t>(cells());
  for (std::int64_t i = first; i < last; ++i) {
    std::int64_t j = i % m;
    if (j < 0) j += m;
    set(static_cast<std::uint64_t>(j));
  }
}

DirectionSet DirectionSet::operator|(const DirectionSet& o) const {
  if (depth_ != o.depth_) throw PreconditionViolation("depth mismatch");
  DirectionSet r(depth_);
  for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] | o.w_[i];
  return r;
}

DirectionSet DirectionSet::operator&(const DirectionSet& o) const {
  if (depth_ != o.depth_) throw PreconditionViolation("depth mismatch");
  DirectionSet r(depth_);
  for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] & o.w_[i];
  return r;
}

DirectionSet DirectionSet::minus(const DirectionSet& o) const {
  if (depth_ != o.depth_) throw PreconditionViolation("depth mismatch");
  DirectionSet r(depth_);
  for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] & ~o.w_[i];
  return r;
}

DirectionSet DirectionSet::complement() const {
  DirectionSet r(depth_);
  for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = ~w_[i];
  std::uint64_t tail = cells() & 63;
  if (tail != 0) r.w_.back() &= ~0ull >> (64 - tail);
  if (cells() < 64) r.w_[0] &= (1ull << cells()) - 1;
  return r;
}

bool DirectionSet::contains(const DirectionSet& o) const {
  if (depth_ != o.depth_) throw PreconditionViolation("depth mismatch");
  for (std::size_t i = 0; i < w_.size(); ++i)
    if ((o.w_[i] & ~w_[i]) != 0) return false;
  return true;
}

DirectionSet DirectionSet::rotated(std::int64_t shift) const {
  auto n = static_cast<std::int64_t>(cells());
  shift %= n;
  if (shift < 0) shift += n;
  DirectionSet r(depth_);
  for (std::uint64_t i = 0; i < cells(); ++i) {
    if (test(i)) r.set(static_cast<std::uint64_t>((static_cast<std::int64_t>(i) + shift) % n));
  }
  return r;
}

DirectionSet DirectionSet::rotated_quarter() const {
  if (depth_ < 2) throw PreconditionViolation("quarter rotation needs depth >= 2");
  return rotated(static_cast<std::int64_t>(cells() / 4));
}

DirectionSet DirectionSet::rotated_half() const {
  if (depth_ < 1) throw PreconditionViolation("half rotation needs depth >= 1");
  return rotated(static_cast<std::int64_t>(cells() / 2));
}

DirectionSet DirectionSet::line_closure() const { return *this | rotated_half(); }

std::uint64_t DirectionSet::cell_of(double turn) const {
  turn -= std::floor(turn);
  if (turn >= 1.0) turn = 0.0;
  auto i = static_cast<std::uint64_t>(turn * static_cast<double>(cells()));
  return std::min<std::uint64_t>(i, cells() - 1);
}

std::string DirectionSet::serialize() const {
  if (depth_ < 2) throw PreconditionViolation("serialization needs depth >= 2");
  std::string hex;
  hex.reserve(cells() / 4);
  for (std::uint64_t c = 0; c < cells(); c += 4) {
    int v = 0;
    for (int b = 0; b < 4; ++b)
      if (test(c + b)) v |= 1 << b;
    hex.push_back("0123456789abcdef"[v]);
  }
  return "depth=" + std::to_string(depth_) + ";hex=" + hex;
}

DirectionSet DirectionSet::deserialize(const std::string& line) {
  int depth = 0;
  auto semi = line.find(';');
  if (line.rfind("depth=", 0) != 0 || semi == std::string::npos ||
      line.compare(semi + 1, 4, "hex=") != 0)
    throw PreconditionViolation("bad direction-set line: " + line);
  depth = std::stoi(line.substr(6, semi - 6));
  DirectionSet r(depth);
  std::string hex = line.substr(semi + 5);
  if (hex.size() != r.cells() / 4)
    throw PreconditionViolation("direction-set hex length mismatch");
  for (std::uint64_t i = 0; i < hex.size(); ++i) {
    char c = hex[i];
    int v = c >= 'a' ? c - 'a' + 10 : (c >= 'A' ? c - 'A' + 10 : c - '0');
    for (int b = 0; b < 4; ++b)
      if (v & (1 << b)) r.set(4 * i + b);
  }
  return r;
}

DirectionSet DirectionSet::from_interval(int depth, const DyadicInterval& iv) {
  DirectionSet r(depth);
  r.set_interval(iv);
  return r;
}

double direction_of(double dx, double dy) {
  double phi = std::atan2(dy, dx) / 6.283185307179586476925286766559;
  phi -= std::floor(phi);
  if (phi >= 1.0) phi = 0.0;
  return phi;
}

bool line_direction_in(const DirectionSet& g, double dx, double dy) {
  double phi = direction_of(dx, dy);
  if (g.test(g.cell_of(phi))) return true;
  double anti = phi < 0.5 ? phi + 0.5 : phi - 0.5;
  return g.test(g.cell_of(anti));
}

namespace {

/// Recursive top-down scan for the maximal intervals with density >= 1-eps.
void collect_dense(const DirectionSet& g, const DyadicInterval& iv, const DyadicFrac& eps,
                   std::vector<DyadicInterval>* out) {
  std::uint64_t cnt = g.count_interval(iv);
  if (cnt == 0) return;
  std::uint64_t size = 1ull << (g.depth() - iv.depth);
  if (density_at_least(cnt, size, eps)) {
    out->push_back(iv);
    return;
  }
  collect_dense(g, iv.child(0), eps, out);
  collect_dense(g, iv.child(1), eps, out);
}

/// Maximal elements of a family of dyadic intervals (overlap implies nesting).
std::vector<DyadicInterval> maximal_of(std::vector<DyadicInterval> family) {
  std::sort(family.begin(), family.end(), [](const DyadicInterval& a, const DyadicInterval& b) {
    double la = a.lo(), lb = b.lo();
    if (la != lb) return la < lb;
    return a.depth < b.depth;  // coarser first at the same left endpoint
  });
  std::vector<DyadicInterval> out;
  double frontier = -1.0;
  for (const auto& iv : family) {
    if (iv.lo() >= frontier - 1e-18) {
      out.push_back(iv);
      frontier = iv.hi();
    }
  }
  return out;
}

void collect_gaps(const DirectionSet& g, const DyadicInterval& iv,
                  std::vector<DyadicInterval>* out) {
  std::uint64_t cnt = g.count_interval(iv);
  std::uint64_t size = 1ull << (g.depth() - iv.depth);
  if (cnt == 0) {
    out->push_back(iv);
    return;
  }
  if (cnt == size) return;
  collect_gaps(g, iv.child(0), out);
  collect_gaps(g, iv.child(1), out);
}

bool is_sublist(const std::vector<DyadicInterval>& sub, const std::vector<DyadicInterval>& sup) {
  for (const auto& iv : sub)
    if (std::find(sup.begin(), sup.end(), iv) == sup.end()) return false;
  return true;
}

}  // namespace

std::vector<DyadicInterval> maximal_gaps(const DyadicInterval& J, const DirectionSet& g) {
  if (J.depth > g.depth()) throw DepthExhausted("interval finer than bitset depth");
  std::vector<DyadicInterval> out;
  collect_gaps(g, J, &out);
  return out;
}

EnlargementTrace enlarge(const DyadicInterval& J, const DirectionSet& g, double eps) {
  if (J.depth > g.depth()) throw DepthExhausted("interval finer than bitset depth");
  DyadicFrac ef = exact_fraction(eps);

  std::uint64_t j_size = 1ull << (g.depth() - J.depth);
  std::uint64_t g_count = g.count_interval(J);
  if (g.count() != g_count) throw PreconditionViolation("direction set not supported inside J");
  if (g_count == 0) throw PreconditionViolation("direction set is empty");
  // Measure window: |G| < (1-eps)|J| <=> NOT density_at_least over J.
  if (density_at_least(g_count, j_size, ef))
    throw PreconditionViolation("direction set too dense inside J for enlargement");

  EnlargementTrace tr;
  tr.interval = J;
  tr.input = g;

  collect_dense(g, J, ef, &tr.dense);

  std::vector<DyadicInterval> parents;
  parents.reserve(tr.dense.size());
  for (const auto& iv : tr.dense) parents.push_back(iv.parent());
  tr.dense_parents = maximal_of(std::move(parents));

  DirectionSet out(g.depth());
  for (const auto& iv : tr.dense_parents) out.set_interval(iv);
  tr.output = out;

  tr.gaps_before = maximal_gaps(J, g);
  tr.gaps_after = maximal_gaps(J, out);

  // Postconditions, all in exact integer arithmetic.
  if (!out.contains(g)) throw std::logic_error("enlarge: input not contained in output");
  if (!grown_by(out.count(), g_count, ef))
    throw std::logic_error("enlarge: measure growth below (1+eps)");
  if (!is_sublist(tr.gaps_after, tr.gaps_before))
    throw std::logic_error("enlarge: new gap family not a sub-family");
  return tr;
}

EnlargementRun iterate_enlargement(const DyadicInterval& J0, const DirectionSet& g0,
                                   double eps, double s) {
  if (!(s > 0.0 && s <= 1.0)) throw PreconditionViolation("s must lie in (0,1]");
  DyadicFrac ef = exact_fraction(eps);
  std::uint64_t j_size = 1ull << (g0.depth() - J0.depth);
  std::uint64_t g_count = g0.count_interval(J0);
  if (4.0 * static_cast<double>(g_count) < s * static_cast<double>(j_size))
    throw PreconditionViolation("initial measure below (s/4)|J0|");

  EnlargementRun run{{}, g0, 0, 0};
  run.step_bound = static_cast<int>(
      std::ceil(std::log((1.0 - eps) * 4.0 / s) / std::log1p(eps)));
  if (run.step_bound < 0) run.step_bound = 0;

  DirectionSet cur = g0;
  while (!density_at_least(cur.count_interval(J0), j_size, ef)) {
    if (run.steps > run.step_bound)
      throw std::logic_error("iterate_enlargement: exceeded closed-form step bound");
    EnlargementTrace tr = enlarge(J0, cur, eps);
    cur = tr.output;
    run.traces.push_back(std::move(tr));
    ++run.steps;
  }
  if (run.steps > run.step_bound)
    throw std::logic_error("iterate_enlargement: exceeded closed-form step bound");
  run.final = cur;
  return run;
}

}  // namespace favlab
