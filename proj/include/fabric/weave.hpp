#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fabric/error.hpp"
#include "fabric/image.hpp"
#include "fabric/imgcore.hpp"
#include "fabric/wiener.hpp"

namespace fabric::weave {

/// Row-major boolean matrix. Rows follow weft yarns, columns warp yarns;
/// true means the warp yarn lies over the weft at that crossing.
class BoolMatrix {
 public:
  BoolMatrix() = default;
  BoolMatrix(int rows, int cols, bool fill = false) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw Error(ErrorCode::InvalidInput, "negative matrix dimensions");
    cells_.assign(static_cast<std::size_t>(rows) * cols, fill ? 1 : 0);
  }

  /// Builds a matrix from rows of 'T'/'F' (or '1'/'0') characters.
  static BoolMatrix from_rows(const std::vector<std::string>& rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r ? static_cast<int>(rows.front().size()) : 0;
    BoolMatrix m(r, c);
    for (int i = 0; i < r; ++i) {
      if (static_cast<int>(rows[i].size()) != c) throw Error(ErrorCode::InvalidInput, "ragged matrix rows");
      for (int j = 0; j < c; ++j) {
        const char ch = rows[i][j];
        if (ch != 'T' && ch != 'F' && ch != '1' && ch != '0') {
          throw Error(ErrorCode::InvalidInput, "matrix cells must be T/F or 1/0");
        }
        m.set(i, j, ch == 'T' || ch == '1');
      }
    }
    return m;
  }

  std::vector<std::string> to_rows() const {
    std::vector<std::string> out(rows_, std::string(cols_, 'F'));
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        if ((*this)(i, j)) out[i][j] = 'T';
    return out;
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  bool empty() const noexcept { return cells_.empty(); }

  bool operator()(int r, int c) const { return cells_[static_cast<std::size_t>(r) * cols_ + c] != 0; }
  void set(int r, int c, bool v) { cells_[static_cast<std::size_t>(r) * cols_ + c] = v ? 1 : 0; }

  /// Value of the infinite periodic tiling of this matrix.
  bool wrapped(int r, int c) const {
    const int rr = ((r % rows_) + rows_) % rows_;
    const int cc = ((c % cols_) + cols_) % cols_;
    return (*this)(rr, cc);
  }

  BoolMatrix inverted() const {
    BoolMatrix out = *this;
    for (auto& v : out.cells_) v ^= 1U;
    return out;
  }

  BoolMatrix shifted(int dr, int dc) const {
    BoolMatrix out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out.set(i, j, wrapped(i + dr, j + dc));
    return out;
  }

  BoolMatrix mirrored() const {
    BoolMatrix out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out.set(i, j, (*this)(i, cols_ - 1 - j));
    return out;
  }

  /// Repeats the matrix periodically to the requested size.
  BoolMatrix tiled(int rows, int cols) const {
    BoolMatrix out(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) out.set(i, j, wrapped(i, j));
    return out;
  }

  friend bool operator==(const BoolMatrix&, const BoolMatrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> cells_;
};

enum class WeaveClass { Plain11, Twill31, Satin5, Unknown };

constexpr std::string_view to_string(WeaveClass c) {
  switch (c) {
    case WeaveClass::Plain11: return "plain_1_1";
    case WeaveClass::Twill31: return "twill_3_1";
    case WeaveClass::Satin5: return "satin_5";
    case WeaveClass::Unknown: return "unknown";
  }
  return "unknown";
}

inline BoolMatrix plain_tile() { return BoolMatrix::from_rows({"TF", "FT"}); }

/// Three warp risers, one sinker; the pattern moves one end right per pick.
inline BoolMatrix twill31_tile() { return BoolMatrix::from_rows({"TTTF", "FTTT", "TFTT", "TTFT"}); }

/// Five-end satin: a single warp riser per pick, advancing by `step` (2 or 3).
inline BoolMatrix satin5_tile(int step = 2) {
  if (step != 2 && step != 3) throw Error(ErrorCode::InvalidParams, "five-end satin step must be 2 or 3");
  BoolMatrix m(5, 5);
  for (int r = 0; r < 5; ++r) m.set(r, (r * step) % 5, true);
  return m;
}

inline BoolMatrix canonical_tile(WeaveClass c) {
  switch (c) {
    case WeaveClass::Plain11: return plain_tile();
    case WeaveClass::Twill31: return twill31_tile();
    case WeaveClass::Satin5: return satin5_tile();
    case WeaveClass::Unknown: break;
  }
  throw Error(ErrorCode::InvalidParams, "no canonical tile for an unknown weave");
}

// ---------------------------------------------------------------------------
// Cross-over grid
// ---------------------------------------------------------------------------

struct CrossoverCell {
  Rect window;
  std::int64_t sum = 0;
};

/// cell(i, j) is the intersection of weft stripe i with warp stripe j.
struct CrossoverGrid {
  int rows = 0;
  int cols = 0;
  std::vector<CrossoverCell> cells;

  const CrossoverCell& cell(int i, int j) const { return cells[static_cast<std::size_t>(i) * cols + j]; }
};

inline CrossoverGrid build_grid(const wiener::YarnOutlines& warp, const wiener::YarnOutlines& weft,
                                const BinaryImage& img) {
  if (warp.stripes.empty() || weft.stripes.empty()) {
    throw Error(ErrorCode::DecompositionFailed, "no yarn outlines in one direction; no cross-over points");
  }
  CrossoverGrid g;
  g.rows = static_cast<int>(weft.stripes.size());
  g.cols = static_cast<int>(warp.stripes.size());
  g.cells.reserve(static_cast<std::size_t>(g.rows) * g.cols);
  for (const auto& row : weft.stripes) {
    for (const auto& col : warp.stripes) {
      if (col.start < 0 || row.start < 0 || col.end >= img.width() || row.end >= img.height()) {
        throw Error(ErrorCode::InvalidInput, "outline outside the binary image");
      }
      CrossoverCell c{Rect{col.start, row.start, col.width(), row.width()}, 0};
      for (int y = row.start; y <= row.end; ++y)
        for (int x = col.start; x <= col.end; ++x) c.sum += img(x, y);
      g.cells.push_back(c);
    }
  }
  return g;
}

struct WeaveMatrix {
  BoolMatrix grid;
  BoolMatrix repeat;
  double threshold = 0.0;  // cell sums above this are warp-over
};

/// Otsu split of a set of scalar values: maximizes n0 * n1 * (m0 - m1)^2 over
/// the gaps between distinct sorted values; ties go to the smallest split.
/// Returns the largest value of the lower class.
inline double otsu_split(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  if (values.empty() || values.front() == values.back()) {
    throw Error(ErrorCode::IndeterminatePattern, "all values identical");
  }
  const double total = [&] {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }();
  const double n = static_cast<double>(values.size());
  double best = -1.0;
  double split = values.front();
  double s0 = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    s0 += values[i];
    if (values[i] == values[i + 1]) continue;
    const double n0 = static_cast<double>(i + 1);
    const double n1 = n - n0;
    const double m0 = s0 / n0;
    const double m1 = (total - s0) / n1;
    const double between = n0 * n1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      split = values[i];
    }
  }
  return split;
}

/// Smallest (p, q), p, q <= max_period, for which the matrix is exactly
/// (p, q)-periodic; the returned tile is its top-left p x q block.
inline std::optional<BoolMatrix> minimal_repeat(const BoolMatrix& m, int max_period = 8) {
  if (m.empty()) return std::nullopt;
  struct Candidate {
    int p, q;
  };
  std::vector<Candidate> cands;
  for (int p = 1; p <= std::min(max_period, m.rows()); ++p)
    for (int q = 1; q <= std::min(max_period, m.cols()); ++q) cands.push_back({p, q});
  std::stable_sort(cands.begin(), cands.end(), [](Candidate a, Candidate b) {
    return a.p * a.q != b.p * b.q ? a.p * a.q < b.p * b.q : a.p < b.p;
  });
  for (const auto [p, q] : cands) {
    bool periodic = true;
    for (int i = 0; i < m.rows() && periodic; ++i)
      for (int j = 0; j < m.cols() && periodic; ++j)
        periodic = m(i, j) == m(i % p, j % q);
    if (!periodic) continue;
    BoolMatrix tile(p, q);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < q; ++j) tile.set(i, j, m(i, j));
    return tile;
  }
  return std::nullopt;
}

/// Cells whose summed binary intensity falls in the brighter Otsu class are
/// marked true (warp over weft); a sum equal to the split stays false.
inline WeaveMatrix classify_crossovers(const CrossoverGrid& g, bool invert = false) {
  if (g.cells.empty()) throw Error(ErrorCode::InvalidInput, "empty cross-over grid");
  std::vector<double> sums;
  sums.reserve(g.cells.size());
  for (const auto& c : g.cells) sums.push_back(static_cast<double>(c.sum));
  WeaveMatrix wm;
  wm.threshold = otsu_split(sums);
  wm.grid = BoolMatrix(g.rows, g.cols);
  for (int i = 0; i < g.rows; ++i)
    for (int j = 0; j < g.cols; ++j)
      wm.grid.set(i, j, (static_cast<double>(g.cell(i, j).sum) > wm.threshold) != invert);
  wm.repeat = minimal_repeat(wm.grid).value_or(wm.grid);
  return wm;
}

// ---------------------------------------------------------------------------
// Pattern recognition
// ---------------------------------------------------------------------------

struct PatternMatch {
  WeaveClass weave = WeaveClass::Unknown;
  double confidence = 0.0;   // fraction of cells agreeing with the matched tile
  bool inverted = false;     // matched the boolean complement of the canonical tile
  std::string orientation;   // e.g. "3/1 S", "weft-faced step 2"
  BoolMatrix tile;           // matched tile, aligned with the matrix origin
};

/// Minimum agreement for a class to be reported instead of Unknown.
inline constexpr double kMinAgreement = 0.85;

namespace detail {

struct Variant {
  WeaveClass weave;
  BoolMatrix tile;
  std::string orientation;
  bool inverted;
};

inline std::vector<Variant> canonical_variants() {
  std::vector<Variant> v;
  for (bool inv : {false, true}) {
    auto apply = [inv](const BoolMatrix& m) { return inv ? m.inverted() : m; };
    v.push_back({WeaveClass::Plain11, apply(plain_tile()), "", inv});
    const std::string ratio = inv ? "1/3" : "3/1";
    v.push_back({WeaveClass::Twill31, apply(twill31_tile()), ratio + " S", inv});
    v.push_back({WeaveClass::Twill31, apply(twill31_tile().mirrored()), ratio + " Z", inv});
    const std::string face = inv ? "warp-faced" : "weft-faced";
    v.push_back({WeaveClass::Satin5, apply(satin5_tile(2)), face + " step 2", inv});
    v.push_back({WeaveClass::Satin5, apply(satin5_tile(3)), face + " step 3", inv});
  }
  return v;
}

}  // namespace detail

/// Best agreement of the matrix with each canonical weave under every cyclic
/// shift, mirror direction and global inversion.
inline PatternMatch match_pattern(const BoolMatrix& m, double min_agreement = kMinAgreement) {
  PatternMatch best;
  if (m.empty()) return best;
  const double cells = static_cast<double>(m.rows()) * m.cols();
  for (const auto& var : detail::canonical_variants()) {
    const int p = var.tile.rows();
    if (m.rows() < p || m.cols() < p) continue;
    for (int a = 0; a < p; ++a) {
      for (int b = 0; b < p; ++b) {
        int agree = 0;
        for (int i = 0; i < m.rows(); ++i)
          for (int j = 0; j < m.cols(); ++j) agree += m(i, j) == var.tile.wrapped(i + a, j + b) ? 1 : 0;
        const double score = agree / cells;
        if (score > best.confidence) {
          best.weave = var.weave;
          best.confidence = score;
          best.inverted = var.inverted;
          best.orientation = var.orientation;
          best.tile = var.tile.shifted(a, b);
        }
      }
    }
  }
  if (best.confidence < min_agreement) {
    best.weave = WeaveClass::Unknown;
    best.orientation.clear();
  }
  return best;
}

inline WeaveClass recognize_pattern(const WeaveMatrix& m) { return match_pattern(m.grid).weave; }

// ---------------------------------------------------------------------------
// End-to-end analysis
// ---------------------------------------------------------------------------

/// Intensity statistics of the four region types defined by the outlines.
struct YarnContrast {
  double warp_only = 0.0;
  double weft_only = 0.0;
  double crossings = 0.0;
  double gaps = 0.0;
  double warp_spread = 0.0;  // standard deviation inside the warp-only region
  double weft_spread = 0.0;
  bool complete = false;  // every region type had pixels

  double group_contrast() const noexcept { return std::abs(warp_only - weft_only); }
  double boundary_contrast() const noexcept {
    return std::min(std::abs(warp_only - gaps), std::abs(weft_only - gaps));
  }
  double yarn_spread() const noexcept { return std::max(warp_spread, weft_spread); }
};

/// The yarn boundary is lost when the two yarn groups differ from each other
/// by more than this multiple of the weaker yarn-to-gap contrast.
inline constexpr double kMaxGroupToBoundary = 1.5;
/// Outlines that cut across yarns leave mixed single-yarn regions; their
/// spread may not exceed this fraction of the yarn-to-gap contrast.
inline constexpr double kMaxYarnSpread = 0.4;

inline bool boundaries_resolvable(const YarnContrast& c) {
  const double b = c.boundary_contrast();
  return c.complete && b > 0.0 && c.group_contrast() <= kMaxGroupToBoundary * b &&
         c.yarn_spread() <= kMaxYarnSpread * b;
}

inline YarnContrast measure_yarn_contrast(const GrayImage& img, const wiener::YarnOutlines& warp,
                                          const wiener::YarnOutlines& weft) {
  std::vector<std::uint8_t> in_warp(img.width(), 0);
  std::vector<std::uint8_t> in_weft(img.height(), 0);
  for (const auto& s : warp.stripes)
    for (int x = std::max(0, s.start); x <= std::min(img.width() - 1, s.end); ++x) in_warp[x] = 1;
  for (const auto& s : weft.stripes)
    for (int y = std::max(0, s.start); y <= std::min(img.height() - 1, s.end); ++y) in_weft[y] = 1;

  std::array<double, 4> sum{};
  std::array<double, 4> sq{};
  std::array<std::int64_t, 4> count{};
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const int k = (in_warp[x] ? 1 : 0) + (in_weft[y] ? 2 : 0);
      const double v = img(x, y);
      sum[k] += v;
      sq[k] += v * v;
      ++count[k];
    }
  }
  auto mean = [&](int k) { return count[k] ? sum[k] / static_cast<double>(count[k]) : 0.0; };
  auto spread = [&](int k) {
    if (!count[k]) return 0.0;
    const double m = mean(k);
    return std::sqrt(std::max(0.0, sq[k] / static_cast<double>(count[k]) - m * m));
  };
  YarnContrast c;
  c.gaps = mean(0);
  c.warp_only = mean(1);
  c.weft_only = mean(2);
  c.crossings = mean(3);
  c.warp_spread = spread(1);
  c.weft_spread = spread(2);
  c.complete = count[0] > 0 && count[1] > 0 && count[2] > 0 && count[3] > 0;
  return c;
}

struct WeaveOptions {
  /// Decides whether yarns are the dark (transmitted) or bright (reflected)
  /// class of the decomposed sub-images.
  Illumination illumination = Illumination::Reflected;
  /// Swap the over/under polarity of the cross-over classification.
  bool invert_crossings = false;
  std::int64_t noise_area = 9;
  double min_agreement = kMinAgreement;
};

struct WeaveAnalysis {
  GrayImage warp_sub;
  GrayImage weft_sub;
  wiener::YarnOutlines warp;
  wiener::YarnOutlines weft;
  YarnContrast contrast;
  CrossoverGrid grid;
  WeaveMatrix matrix;
  PatternMatch match;
};

inline constexpr int kMinWeaveSide = 128;

/// Binarizes a decomposed sub-image so that yarn pixels are 0.
inline BinaryImage yarn_mask(const GrayImage& sub, Illumination mode, std::int64_t noise_area) {
  BinaryImage bin;
  try {
    bin = imgcore::otsu_threshold(sub).binary;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateHistogram) throw;
    throw Error(ErrorCode::DecompositionFailed, "decomposed sub-image is featureless");
  }
  bin = imgcore::remove_small_components(bin, noise_area);
  return mode == Illumination::Reflected ? bin.inverted() : bin;
}

/// Decomposes the image along `axis`, binarizes with Otsu, cleans 3x3 specks
/// and extracts the stripes of that yarn group.
inline wiener::YarnOutlines yarn_outlines(const GrayImage& img, YarnAxis axis, Illumination mode,
                                          std::int64_t noise_area = 9) {
  return wiener::extract_yarn_outlines(yarn_mask(wiener::decompose(img, axis), mode, noise_area), axis);
}

/// Drops stripes cut by the image border while at least two others remain;
/// their cross-over windows are partial and their sums not comparable.
inline wiener::YarnOutlines interior_outlines(const wiener::YarnOutlines& o) {
  wiener::YarnOutlines out = o;
  out.stripes.clear();
  for (const auto& s : o.stripes)
    if (s.start > 0 && s.end < o.image_extent - 1) out.stripes.push_back(s);
  return out.stripes.size() >= 2 ? out : o;
}

/// Otsu binarization of the fabric image with the level computed from the
/// pixels inside the cross-over windows only, so gaps and single-yarn areas do
/// not pull the split away from the over/under contrast.
inline BinaryImage crossing_binarization(const GrayImage& img, const wiener::YarnOutlines& warp,
                                         const wiener::YarnOutlines& weft) {
  imgcore::Histogram h{};
  for (const auto& row : weft.stripes)
    for (const auto& col : warp.stripes)
      for (int y = std::max(0, row.start); y <= std::min(img.height() - 1, row.end); ++y)
        for (int x = std::max(0, col.start); x <= std::min(img.width() - 1, col.end); ++x) ++h[img(x, y)];
  int t = 0;
  try {
    t = imgcore::otsu_level(h);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateHistogram) throw;
    throw Error(ErrorCode::IndeterminatePattern, "cross-over windows have a single intensity");
  }
  return imgcore::threshold_binary(img, t);
}

/// Decompose -> Otsu -> outlines -> grid -> classify -> recognize.
inline WeaveAnalysis analyze_weave(const GrayImage& img, const WeaveOptions& opts = {}) {
  if (img.width() < kMinWeaveSide || img.height() < kMinWeaveSide) {
    throw Error(ErrorCode::ImageTooSmall, "weave analysis needs at least 128x128 pixels");
  }
  WeaveAnalysis a;
  a.warp_sub = wiener::decompose(img, YarnAxis::Warp);
  a.weft_sub = wiener::decompose(img, YarnAxis::Weft);
  a.warp = wiener::extract_yarn_outlines(yarn_mask(a.warp_sub, opts.illumination, opts.noise_area), YarnAxis::Warp);
  a.weft = wiener::extract_yarn_outlines(yarn_mask(a.weft_sub, opts.illumination, opts.noise_area), YarnAxis::Weft);
  if (a.warp.stripes.size() < 2 || a.weft.stripes.size() < 2) {
    throw Error(ErrorCode::DecompositionFailed, "yarn boundaries not found in both directions");
  }
  a.warp = interior_outlines(a.warp);
  a.weft = interior_outlines(a.weft);
  a.contrast = measure_yarn_contrast(img, a.warp, a.weft);
  if (!boundaries_resolvable(a.contrast)) {
    throw Error(ErrorCode::DecompositionFailed,
                "yarn boundaries cannot be resolved against the warp/weft contrast");
  }
  a.grid = build_grid(a.warp, a.weft, crossing_binarization(img, a.warp, a.weft));
  a.matrix = classify_crossovers(a.grid, opts.invert_crossings);
  a.match = match_pattern(a.matrix.grid, opts.min_agreement);
  return a;
}

}  // namespace fabric::weave
