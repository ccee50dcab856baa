#include "flexkrylov/transforms.hpp"

#include <cmath>
#include <sstream>

namespace flexkrylov {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_divisible(Index n, int levels, const char* what) {
  if (levels < 1) throw ConfigError(std::string(what) + ": levels must be at least 1");
  const Index block = Index{1} << levels;
  if (n < block || n % block != 0) {
    std::ostringstream os;
    os << what << ": length " << n << " is not divisible by 2^" << levels
       << "; pad the signal to a multiple of " << block;
    throw ConfigError(os.str());
  }
}

// One analysis step on `len` entries starting at data[0] with the given stride.
void analysis_step(double* data, Index len, Index stride, std::vector<double>& tmp) {
  const Index half = len / 2;
  tmp.resize(static_cast<std::size_t>(len));
  for (Index i = 0; i < half; ++i) {
    const double a = data[(2 * i) * stride];
    const double b = data[(2 * i + 1) * stride];
    tmp[i] = (a + b) * kInvSqrt2;
    tmp[half + i] = (a - b) * kInvSqrt2;
  }
  for (Index i = 0; i < len; ++i) data[i * stride] = tmp[i];
}

void synthesis_step(double* data, Index len, Index stride, std::vector<double>& tmp) {
  const Index half = len / 2;
  tmp.resize(static_cast<std::size_t>(len));
  for (Index i = 0; i < half; ++i) {
    const double a = data[i * stride];
    const double d = data[(half + i) * stride];
    tmp[2 * i] = (a + d) * kInvSqrt2;
    tmp[2 * i + 1] = (a - d) * kInvSqrt2;
  }
  for (Index i = 0; i < len; ++i) data[i * stride] = tmp[i];
}

// Mallat in-place layout <-> block-ordered coefficient vector.
template <typename Visit>
void for_each_block(Index rows, Index cols, int levels, Visit&& visit) {
  Index pos = 0;
  const Index h = rows >> levels;
  const Index w = cols >> levels;
  visit(Index{0}, Index{0}, h, w, pos);
  pos += h * w;
  for (int l = levels; l >= 1; --l) {
    const Index bh = rows >> l;
    const Index bw = cols >> l;
    visit(Index{0}, bw, bh, bw, pos);  // LH
    pos += bh * bw;
    visit(bh, Index{0}, bh, bw, pos);  // HL
    pos += bh * bw;
    visit(bh, bw, bh, bw, pos);  // HH
    pos += bh * bw;
  }
}

}  // namespace

Vector haar_forward(const Vector& x, int levels) {
  check_divisible(x.size(), levels, "haar_forward");
  Vector s = x;
  std::vector<double> tmp;
  for (int l = 0; l < levels; ++l) analysis_step(s.data(), x.size() >> l, 1, tmp);
  return s;
}

Vector haar_inverse(const Vector& s, int levels) {
  check_divisible(s.size(), levels, "haar_inverse");
  Vector x = s;
  std::vector<double> tmp;
  for (int l = levels - 1; l >= 0; --l) synthesis_step(x.data(), s.size() >> l, 1, tmp);
  return x;
}

Vector haar_forward_2d(const Vector& image, Index rows, Index cols, int levels) {
  if (image.size() != rows * cols) {
    throw ConfigError("haar_forward_2d: image length does not match rows*cols");
  }
  check_divisible(rows, levels, "haar_forward_2d (rows)");
  check_divisible(cols, levels, "haar_forward_2d (cols)");
  Vector m = image;
  std::vector<double> tmp;
  for (int l = 0; l < levels; ++l) {
    const Index h = rows >> l;
    const Index w = cols >> l;
    for (Index r = 0; r < h; ++r) analysis_step(m.data() + r * cols, w, 1, tmp);
    for (Index c = 0; c < w; ++c) analysis_step(m.data() + c, h, cols, tmp);
  }
  Vector out(image.size());
  for_each_block(rows, cols, levels, [&](Index r0, Index c0, Index bh, Index bw, Index pos) {
    for (Index r = 0; r < bh; ++r) {
      for (Index c = 0; c < bw; ++c) out[pos + r * bw + c] = m[(r0 + r) * cols + c0 + c];
    }
  });
  return out;
}

Vector haar_inverse_2d(const Vector& coeffs, Index rows, Index cols, int levels) {
  if (coeffs.size() != rows * cols) {
    throw ConfigError("haar_inverse_2d: coefficient length does not match rows*cols");
  }
  check_divisible(rows, levels, "haar_inverse_2d (rows)");
  check_divisible(cols, levels, "haar_inverse_2d (cols)");
  Vector m(coeffs.size());
  for_each_block(rows, cols, levels, [&](Index r0, Index c0, Index bh, Index bw, Index pos) {
    for (Index r = 0; r < bh; ++r) {
      for (Index c = 0; c < bw; ++c) m[(r0 + r) * cols + c0 + c] = coeffs[pos + r * bw + c];
    }
  });
  std::vector<double> tmp;
  for (int l = levels - 1; l >= 0; --l) {
    const Index h = rows >> l;
    const Index w = cols >> l;
    for (Index c = 0; c < w; ++c) synthesis_step(m.data() + c, h, cols, tmp);
    for (Index r = 0; r < h; ++r) synthesis_step(m.data() + r * cols, w, 1, tmp);
  }
  return m;
}

Index count_sparsity(const Vector& s, double tol) {
  if (tol < 0.0) throw ConfigError("count_sparsity: tolerance must be nonnegative");
  Index count = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (std::abs(s[i]) > tol) ++count;
  }
  return count;
}

HaarTransform1D::HaarTransform1D(Index length, int levels) : OrthonormalTransform(length, levels) {
  check_divisible(length, levels, "HaarTransform1D");
}

std::string HaarTransform1D::describe() const {
  std::ostringstream os;
  os << "haar1d(n=" << rows() << ", levels=" << levels() << ")";
  return os.str();
}

void HaarTransform1D::do_apply(const Vector& x, Vector& y) const { y = haar_forward(x, levels()); }

void HaarTransform1D::do_apply_adjoint(const Vector& y, Vector& x) const {
  x = haar_inverse(y, levels());
}

HaarTransform2D::HaarTransform2D(Index rows, Index cols, int levels)
    : OrthonormalTransform(rows * cols, levels), rows_(rows), cols_(cols) {
  check_divisible(rows, levels, "HaarTransform2D (rows)");
  check_divisible(cols, levels, "HaarTransform2D (cols)");
}

std::string HaarTransform2D::describe() const {
  std::ostringstream os;
  os << "haar2d(" << rows_ << "x" << cols_ << ", levels=" << levels() << ")";
  return os.str();
}

void HaarTransform2D::do_apply(const Vector& x, Vector& y) const {
  y = haar_forward_2d(x, rows_, cols_, levels());
}

void HaarTransform2D::do_apply_adjoint(const Vector& y, Vector& x) const {
  x = haar_inverse_2d(y, rows_, cols_, levels());
}

}  // namespace flexkrylov
