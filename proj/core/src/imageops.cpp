#include "tacrot/imageops.hpp"

#include <algorithm>
#include <cstdlib>
#include <queue>
#include <stdexcept>

namespace tacrot {

std::vector<std::uint8_t> max_channel_abs_diff(const IntensityFrame& a,
                                               const IntensityFrame& b) {
  if (!a.same_size(b))
    throw std::invalid_argument("frame dimensions differ");
  const size_t n = a.r.size();
  std::vector<std::uint8_t> out(n);
  for (size_t i = 0; i < n; ++i) {
    int dr = std::abs(int(a.r[i]) - int(b.r[i]));
    int dg = std::abs(int(a.g[i]) - int(b.g[i]));
    int db = std::abs(int(a.b[i]) - int(b.b[i]));
    out[i] = static_cast<std::uint8_t>(std::max({dr, dg, db}));
  }
  return out;
}

std::vector<std::uint8_t> value_channel(const IntensityFrame& frame) {
  const size_t n = frame.r.size();
  std::vector<std::uint8_t> out(n);
  for (size_t i = 0; i < n; ++i)
    out[i] = std::max({frame.r[i], frame.g[i], frame.b[i]});
  return out;
}

Mask threshold_mask(const std::vector<std::uint8_t>& img, int width, int height,
                    int threshold) {
  Mask m(width, height);
  for (size_t i = 0; i < img.size(); ++i) m.data[i] = img[i] > threshold;
  return m;
}

namespace {

template <bool Erode>
Mask morph3(const Mask& m) {
  Mask out(m.width, m.height);
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      bool v = Erode;
      for (int dy = -1; dy <= 1 && v == Erode; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          int xx = x + dx, yy = y + dy;
          bool in = xx >= 0 && yy >= 0 && xx < m.width && yy < m.height;
          // Outside the image counts as background.
          bool px = in && m.at(xx, yy);
          if (Erode ? !px : px) {
            v = !Erode;
            break;
          }
        }
      }
      out.set(x, y, v);
    }
  }
  return out;
}

}  // namespace

Mask erode3(const Mask& m) { return morph3<true>(m); }
Mask dilate3(const Mask& m) { return morph3<false>(m); }
Mask morph_open(const Mask& m) { return dilate3(erode3(m)); }
Mask morph_close(const Mask& m) { return erode3(dilate3(m)); }

Mask largest_component(const Mask& m) {
  Mask out(m.width, m.height);
  std::vector<int> label(m.data.size(), -1);
  int next_label = 0;
  size_t best_size = 0;
  int best_label = -1;
  std::vector<size_t> stack;
  std::vector<std::vector<size_t>> members;
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      size_t i = m.idx(x, y);
      if (!m.data[i] || label[i] != -1) continue;
      members.emplace_back();
      stack.clear();
      stack.push_back(i);
      label[i] = next_label;
      while (!stack.empty()) {
        size_t j = stack.back();
        stack.pop_back();
        members.back().push_back(j);
        int jx = static_cast<int>(j % m.width);
        int jy = static_cast<int>(j / m.width);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            int xx = jx + dx, yy = jy + dy;
            if (xx < 0 || yy < 0 || xx >= m.width || yy >= m.height) continue;
            size_t k = m.idx(xx, yy);
            if (m.data[k] && label[k] == -1) {
              label[k] = next_label;
              stack.push_back(k);
            }
          }
        }
      }
      if (members.back().size() > best_size) {
        best_size = members.back().size();
        best_label = next_label;
      }
      ++next_label;
    }
  }
  if (best_label >= 0)
    for (size_t j : members[static_cast<size_t>(best_label)]) out.data[j] = 1;
  return out;
}

std::vector<std::uint8_t> box_filter(const std::vector<std::uint8_t>& img,
                                     int width, int height, int k) {
  const int r = k / 2;
  std::vector<int> tmp(img.size());
  std::vector<std::uint8_t> out(img.size());
  // Horizontal pass, borders clamped.
  for (int y = 0; y < height; ++y) {
    const size_t row = static_cast<size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      int s = 0;
      for (int d = -r; d <= r; ++d) {
        int xx = std::clamp(x + d, 0, width - 1);
        s += img[row + xx];
      }
      tmp[row + x] = s;
    }
  }
  // Vertical pass.
  const int norm = k * k;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      int s = 0;
      for (int d = -r; d <= r; ++d) {
        int yy = std::clamp(y + d, 0, height - 1);
        s += tmp[static_cast<size_t>(yy) * width + x];
      }
      out[static_cast<size_t>(y) * width + x] =
          static_cast<std::uint8_t>((s + norm / 2) / norm);
    }
  }
  return out;
}

MomentStats mask_moments(const Mask& m) {
  MomentStats s;
  double sx = 0, sy = 0;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (m.at(x, y)) {
        ++s.area;
        sx += x;
        sy += y;
      }
  if (s.area == 0) return s;
  s.cx = sx / static_cast<double>(s.area);
  s.cy = sy / static_cast<double>(s.area);
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (m.at(x, y)) {
        double dx = x - s.cx, dy = y - s.cy;
        s.mu20 += dx * dx;
        s.mu02 += dy * dy;
        s.mu11 += dx * dy;
      }
  return s;
}

WeightedMoments weighted_moments(const Mask& m,
                                 const std::vector<std::uint8_t>& w) {
  WeightedMoments s;
  double sx = 0, sy = 0;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (m.at(x, y)) {
        const double v = w[static_cast<size_t>(y) * m.width + x];
        s.weight += v;
        sx += v * x;
        sy += v * y;
      }
  if (s.weight <= 0.0) return s;
  s.cx = sx / s.weight;
  s.cy = sy / s.weight;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (m.at(x, y)) {
        const double v = w[static_cast<size_t>(y) * m.width + x];
        const double dx = x - s.cx, dy = y - s.cy;
        s.mu20 += v * dx * dx;
        s.mu02 += v * dy * dy;
        s.mu11 += v * dx * dy;
      }
  s.mu20 /= s.weight;
  s.mu02 /= s.weight;
  s.mu11 /= s.weight;
  return s;
}

}  // namespace tacrot
