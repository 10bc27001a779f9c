#include "attractors/nca.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "attractors/error.hpp"
#include "attractors/rng.hpp"

namespace attractors::nca {

namespace {

// Separable Sobel factors: kernel[a][b] = rows[a] * cols[b] / 8.
constexpr std::array<double, 3> kSmooth = {1.0, 2.0, 1.0};
constexpr std::array<double, 3> kDiff = {-1.0, 0.0, 1.0};

constexpr double sobel_x(int a, int b) { return kSmooth[a] * kDiff[b] / 8.0; }
constexpr double sobel_y(int a, int b) { return kDiff[a] * kSmooth[b] / 8.0; }

void require_shape(std::span<const double> flat, GridShape shape) {
  if (shape.channels != kChannels)
    throw Error(ErrorCode::InvalidArgument, "substrate must have 16 channels");
  if (shape.height < 1 || shape.width < 1 || flat.size() != shape.size())
    throw Error(ErrorCode::InvalidArgument, "substrate size does not match its grid shape");
}

// Perception vector of one cell, fixed accumulation order (a, then b).
void perceive_cell(std::span<const double> s, GridShape g, int y, int x, double* p) {
  const int C = g.channels;
  for (int c = 0; c < C; ++c) {
    p[c] = s[(static_cast<std::size_t>(y) * g.width + x) * C + c];
    p[C + c] = 0.0;
    p[2 * C + c] = 0.0;
  }
  for (int a = 0; a < 3; ++a) {
    const int yy = y + a - 1;
    if (yy < 0 || yy >= g.height) continue;
    for (int b = 0; b < 3; ++b) {
      const int xx = x + b - 1;
      if (xx < 0 || xx >= g.width) continue;
      const double kx = sobel_x(a, b);
      const double ky = sobel_y(a, b);
      const double* cell = s.data() + (static_cast<std::size_t>(yy) * g.width + xx) * C;
      for (int c = 0; c < C; ++c) {
        p[C + c] += kx * cell[c];
        p[2 * C + c] += ky * cell[c];
      }
    }
  }
}

// delta = w2^T relu(w1^T p + b1); sums run in ascending input index.
void rule_delta(const RuleWeights& w, const double* p, double* hidden, double* delta) {
  const int H = w.hidden;
  const int C = w.channels;
  std::copy(w.b1.begin(), w.b1.end(), hidden);
  for (int i = 0; i < 3 * C; ++i) {
    const double pi = p[i];
    const double* row = w.w1.data() + static_cast<std::size_t>(i) * H;
    for (int j = 0; j < H; ++j) hidden[j] += pi * row[j];
  }
  std::fill(delta, delta + C, 0.0);
  for (int j = 0; j < H; ++j) {
    const double hj = hidden[j] > 0.0 ? hidden[j] : 0.0;
    const double* row = w.w2.data() + static_cast<std::size_t>(j) * C;
    for (int c = 0; c < C; ++c) delta[c] += hj * row[c];
  }
}

bool neighbourhood_is_zero(std::span<const double> s, GridShape g, int y, int x) {
  for (int yy = std::max(0, y - 1); yy <= std::min(g.height - 1, y + 1); ++yy)
    for (int xx = std::max(0, x - 1); xx <= std::min(g.width - 1, x + 1); ++xx) {
      const double* cell = s.data() + (static_cast<std::size_t>(yy) * g.width + xx) * g.channels;
      for (int c = 0; c < g.channels; ++c)
        if (cell[c] != 0.0) return false;
    }
  return true;
}

void fill_mask(std::span<const double> s, GridShape g, std::uint8_t* alive, bool parallel) {
#pragma omp parallel for schedule(static) if (parallel)
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      bool any = false;
      for (int yy = std::max(0, y - 1); yy <= std::min(g.height - 1, y + 1) && !any; ++yy)
        for (int xx = std::max(0, x - 1); xx <= std::min(g.width - 1, x + 1); ++xx)
          if (s[(static_cast<std::size_t>(yy) * g.width + xx) * g.channels + kAlpha] >
              kAliveThreshold) {
            any = true;
            break;
          }
      alive[static_cast<std::size_t>(y) * g.width + x] = any ? 1 : 0;
    }
  }
}

// Zeroes every cell not alive both before (in) and after (out) the update.
// A non-finite update is left unmasked: a NaN alpha reads as dead and would
// otherwise be wiped before anyone could see it.
void apply_alive_mask(std::span<const double> in, std::span<double> out, GridShape g,
                      bool parallel) {
  if (!all_finite(out)) return;
  std::vector<std::uint8_t> pre(g.cells()), post(g.cells());
  fill_mask(in, g, pre.data(), parallel);
  fill_mask(out, g, post.data(), parallel);
  const auto cells = static_cast<std::int64_t>(g.cells());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t k = 0; k < cells; ++k)
    if (!(pre[k] && post[k]))
      std::fill_n(out.data() + k * g.channels, g.channels, 0.0);
}

}  // namespace

Substrate::Substrate(int height, int width, int channels)
    : height(height), width(width), channels(channels) {
  if (height < 1 || width < 1 || channels < 1)
    throw Error(ErrorCode::InvalidArgument, "substrate dimensions must be positive");
  data.assign(static_cast<std::size_t>(height) * width * channels, 0.0);
}

Substrate Substrate::from_flat(std::span<const double> flat, GridShape shape) {
  Substrate s(shape.height, shape.width, shape.channels);
  if (flat.size() != s.data.size())
    throw Error(ErrorCode::InvalidArgument, "flat state does not match grid shape");
  std::copy(flat.begin(), flat.end(), s.data.begin());
  return s;
}

RuleWeights RuleWeights::zeros(int hidden) {
  RuleWeights w;
  w.hidden = hidden;
  w.w1.assign(static_cast<std::size_t>(kPerception) * hidden, 0.0);
  w.b1.assign(hidden, 0.0);
  w.w2.assign(static_cast<std::size_t>(hidden) * kChannels, 0.0);
  return w;
}

RuleWeights RuleWeights::random(std::uint64_t seed, double scale, int hidden) {
  RuleWeights w = zeros(hidden);
  Rng rng(seed);
  auto draw = [&] { return static_cast<double>(static_cast<float>(scale * rng.gaussian())); };
  for (auto& v : w.w1) v = draw();
  for (auto& v : w.b1) v = draw();
  for (auto& v : w.w2) v = draw();
  return w;
}

void RuleWeights::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::MalformedWeights, what); };
  if (channels != kChannels) fail("rule must have 16 channels");
  if (hidden < 1) fail("hidden width must be positive");
  if (w1.size() != static_cast<std::size_t>(3 * channels) * hidden) fail("w1 has the wrong size");
  if (b1.size() != static_cast<std::size_t>(hidden)) fail("b1 has the wrong size");
  if (w2.size() != static_cast<std::size_t>(hidden) * channels) fail("w2 has the wrong size");
  if (!all_finite(w1) || !all_finite(b1) || !all_finite(w2)) fail("weights are not finite");
}

std::size_t LivingMask::count() const {
  return static_cast<std::size_t>(std::count(alive.begin(), alive.end(), std::uint8_t{1}));
}

std::vector<double> perceive(const Substrate& s) {
  require_shape(s.data, s.shape());
  std::vector<double> out(s.shape().cells() * kPerception);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x)
      perceive_cell(s.data, s.shape(), y, x,
                    out.data() + (static_cast<std::size_t>(y) * s.width + x) * kPerception);
  return out;
}

LivingMask living_mask(std::span<const double> flat, GridShape shape) {
  if (shape.channels <= kAlpha || flat.size() != shape.size())
    throw Error(ErrorCode::InvalidArgument, "substrate size does not match its grid shape");
  LivingMask mask{shape.height, shape.width, std::vector<std::uint8_t>(shape.cells())};
  fill_mask(flat, shape, mask.alive.data(), false);
  return mask;
}

LivingMask living_mask(const Substrate& s) { return living_mask(s.data, s.shape()); }

void step_into(std::span<const double> in, std::span<double> out, GridShape g,
               const RuleWeights& w) {
  require_shape(in, g);
  if (out.size() != in.size()) throw Error(ErrorCode::InvalidArgument, "output size mismatch");
  const int C = g.channels;

  // A cell whose 3x3 neighbourhood is all zero perceives p = 0 and gets the
  // same delta as rule_delta(0); computing it once is bit-identical.
  std::vector<double> zero_p(kPerception, 0.0), scratch(w.hidden), zero_delta(C);
  rule_delta(w, zero_p.data(), scratch.data(), zero_delta.data());

#pragma omp parallel
  {
    std::vector<double> p(kPerception), hidden(w.hidden), delta(C);
#pragma omp for schedule(static)
    for (int y = 0; y < g.height; ++y) {
      for (int x = 0; x < g.width; ++x) {
        const std::size_t base = (static_cast<std::size_t>(y) * g.width + x) * C;
        const double* d = zero_delta.data();
        if (!neighbourhood_is_zero(in, g, y, x)) {
          perceive_cell(in, g, y, x, p.data());
          rule_delta(w, p.data(), hidden.data(), delta.data());
          d = delta.data();
        }
        for (int c = 0; c < C; ++c) out[base + c] = in[base + c] + d[c];
      }
    }
  }
  apply_alive_mask(in, out, g, true);
}

void step_into_serial(std::span<const double> in, std::span<double> out, GridShape g,
                      const RuleWeights& w) {
  require_shape(in, g);
  if (out.size() != in.size()) throw Error(ErrorCode::InvalidArgument, "output size mismatch");
  const int C = g.channels;
  std::vector<double> p(kPerception), hidden(w.hidden), delta(C);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      perceive_cell(in, g, y, x, p.data());
      rule_delta(w, p.data(), hidden.data(), delta.data());
      const std::size_t base = (static_cast<std::size_t>(y) * g.width + x) * C;
      for (int c = 0; c < C; ++c) out[base + c] = in[base + c] + delta[c];
    }
  }
  apply_alive_mask(in, out, g, false);
}

Substrate nca_step(const Substrate& s, const RuleWeights& w) {
  Substrate out(s.height, s.width, s.channels);
  step_into(s.data, out.data, s.shape(), w);
  for (std::size_t i = 0; i < out.data.size(); ++i)
    if (!std::isfinite(out.data[i])) throw NumericalBlowup(i, -1);
  return out;
}

Substrate seed_state(int height, int width) {
  if (height < 3 || width < 3) throw Error(ErrorCode::InvalidArgument, "seed grid must be at least 3x3");
  Substrate s(height, width);
  for (int c = kAlpha; c < kChannels; ++c) s.at(height / 2, width / 2, c) = 1.0;
  return s;
}

namespace {

class NcaSystem final : public System {
 public:
  NcaSystem(RuleWeights w, int height, int width)
      : System("nca", GridShape{height, width, kChannels}.size(),
               {{"H", height}, {"W", width}, {"hidden", w.hidden}, {"update_rate", w.update_rate}},
               StepKind::Nca),
        weights_(std::move(w)),
        shape_{height, width, kChannels} {}

  std::optional<GridShape> grid() const override { return shape_; }

  StateVector initial_state() const override { return seed_state(shape_.height, shape_.width).data; }

  void step_into(std::span<const double> x, std::span<double> out) const override {
    nca::step_into(x, out, shape_, weights_);
  }

 private:
  RuleWeights weights_;
  GridShape shape_;
};

}  // namespace

SystemHandle as_system(RuleWeights w, int height, int width) {
  w.validate();
  if (w.update_rate != 1.0)
    throw Error(ErrorCode::UnsupportedUpdateRate, "only deterministic (update_rate = 1) rules are supported");
  if (height < 3 || width < 3) throw Error(ErrorCode::InvalidArgument, "grid must be at least 3x3");
  return std::make_shared<NcaSystem>(std::move(w), height, width);
}

}  // namespace attractors::nca
