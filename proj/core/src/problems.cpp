#include "flexkrylov/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <utility>

namespace flexkrylov {

namespace {

Index reflect(Index i, Index n) {
  const Index period = 2 * n;
  Index m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

void finish_problem(TestProblem& p) {
  p.b_true = p.a->apply(p.x_true);
  p.e = Vector::Zero(p.b_true.size());
  p.b = p.b_true;
  p.noise_level = 0.0;
}

Vector image_by_name(const std::string& name, Index side, std::uint64_t seed) {
  if (name == "shepp_logan") return shepp_logan(side);
  if (name == "blocks") return blocks_image(side);
  if (name == "stars") return stars_image(side, seed);
  throw ConfigError("unknown image '" + name + "' (expected shepp_logan, blocks or stars)");
}

}  // namespace

// --- heat ---------------------------------------------------------------

Vector heat_true_solution(Index n) {
  Vector x = Vector::Zero(n);
  for (Index i = 1; i <= n / 2; ++i) {
    const double ti = 20.0 * static_cast<double>(i) / static_cast<double>(n);
    double v;
    if (ti < 2.0) {
      v = 0.75 * ti * ti / 4.0;
    } else if (ti < 3.0) {
      v = 0.75 + (ti - 2.0) * (3.0 - ti);
    } else {
      v = 0.75 * std::exp(-(ti - 3.0) * 2.0);
    }
    x[i - 1] = v;
  }
  return x;
}

OperatorPtr heat_operator(Index n) {
  if (n < 16) throw ConfigError("heat: n must be >= 16");
  const double h = 1.0 / static_cast<double>(n);
  const double c = h / (2.0 * std::sqrt(std::numbers::pi));
  Vector d(n);
  for (Index i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) + 0.5) * h;
    d[i] = c * std::pow(t, -1.5) * std::exp(-1.0 / (4.0 * t));
  }
  Matrix a = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j; i < n; ++i) a(i, j) = d[i - j];
  }
  return std::make_shared<DenseOperator>(std::move(a));
}

TestProblem gen_heat(Index n) {
  TestProblem p;
  p.name = "heat";
  p.a = heat_operator(n);
  p.x_true = heat_true_solution(n);
  finish_problem(p);
  return p;
}

// --- 1D blur ------------------------------------------------------------

Matrix blur1d_matrix(Index n, double variance, int band) {
  if (band < 1) throw ConfigError("blur1d: band must be >= 1");
  if (!(variance >= 0.0)) throw ConfigError("blur1d: variance must be >= 0");
  if (n < band) throw ConfigError("blur1d: n must be >= band");
  if (variance == 0.0) return Matrix::Identity(n, n);
  std::vector<double> z(static_cast<std::size_t>(band));
  double total = 0.0;
  for (int d = 0; d < band; ++d) {
    z[static_cast<std::size_t>(d)] = std::exp(-static_cast<double>(d * d) / (2.0 * variance));
    total += d == 0 ? z[0] : 2.0 * z[static_cast<std::size_t>(d)];
  }
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = std::max<Index>(0, i - band + 1); j < std::min<Index>(n, i + band); ++j) {
      a(i, j) = z[static_cast<std::size_t>(std::abs(i - j))] / total;
    }
  }
  return a;
}

Vector blur1d_true_signal(Index n) {
  if (n < 56 || n % 2 != 0) throw ConfigError("blur1d: default signal needs even n >= 56");
  Vector x = Vector::Zero(n);
  x.segment(16, 8).setConstant(1.0);
  x.segment(40, 4).setConstant(2.0);
  x.segment(52, 4).setConstant(0.5);
  return x;
}

TestProblem gen_blur1d(Index n, double variance, int band) {
  TestProblem p;
  p.name = "blur1d";
  const Matrix a = blur1d_matrix(n, variance, band);
  CsrMatrix csr;
  csr.rows = n;
  csr.cols = n;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (a(i, j) != 0.0) {
        csr.col_idx.push_back(static_cast<std::int32_t>(j));
        csr.values.push_back(a(i, j));
      }
    }
    csr.row_ptr.push_back(static_cast<std::int64_t>(csr.values.size()));
  }
  p.a = std::make_shared<SparseOperator>(std::move(csr));
  p.x_true = blur1d_true_signal(n);
  finish_problem(p);
  return p;
}

// --- 2D deblurring ----------------------------------------------------------

Matrix make_psf(const Psf& psf) {
  if (!(psf.param >= 0.0) || !std::isfinite(psf.param)) {
    throw ConfigError("psf: parameter must be >= 0");
  }
  if (psf.param == 0.0) return Matrix::Ones(1, 1);  // delta
  const Index half = psf.kind == PsfKind::gaussian ? static_cast<Index>(std::ceil(3.0 * psf.param))
                                                   : static_cast<Index>(std::floor(psf.param));
  const Index side = 2 * half + 1;
  Matrix p = Matrix::Zero(side, side);
  for (Index k = -half; k <= half; ++k) {
    for (Index l = -half; l <= half; ++l) {
      const double r2 = static_cast<double>(k * k + l * l);
      double v;
      if (psf.kind == PsfKind::gaussian) {
        v = std::exp(-r2 / (2.0 * psf.param * psf.param));
      } else {
        v = r2 <= psf.param * psf.param ? 1.0 : 0.0;
      }
      p(k + half, l + half) = v;
    }
  }
  return p / p.sum();
}

ReflexiveBlurOperator::ReflexiveBlurOperator(Index rows, Index cols, Matrix psf)
    : LinearOperator(rows * cols, rows * cols), img_rows_(rows), img_cols_(cols), psf_(std::move(psf)) {
  if (rows < 1 || cols < 1) throw ConfigError("blur operator: empty image");
  if (psf_.rows() % 2 == 0 || psf_.cols() % 2 == 0) {
    throw ConfigError("blur operator: PSF sides must be odd");
  }
}

std::string ReflexiveBlurOperator::describe() const {
  std::ostringstream os;
  os << "reflexive blur " << img_rows_ << "x" << img_cols_ << " psf " << psf_.rows() << "x"
     << psf_.cols();
  return os.str();
}

void ReflexiveBlurOperator::do_apply(const Vector& x, Vector& y) const {
  const Index hr = psf_.rows() / 2;
  const Index hc = psf_.cols() / 2;
  for (Index k = -hr; k <= hr; ++k) {
    for (Index l = -hc; l <= hc; ++l) {
      const double w = psf_(k + hr, l + hc);
      if (w == 0.0) continue;
      for (Index i = 0; i < img_rows_; ++i) {
        const Index si = reflect(i + k, img_rows_) * img_cols_;
        const Index di = i * img_cols_;
        for (Index j = 0; j < img_cols_; ++j) y[di + j] += w * x[si + reflect(j + l, img_cols_)];
      }
    }
  }
}

void ReflexiveBlurOperator::do_apply_adjoint(const Vector& y, Vector& x) const {
  const Index hr = psf_.rows() / 2;
  const Index hc = psf_.cols() / 2;
  for (Index k = -hr; k <= hr; ++k) {
    for (Index l = -hc; l <= hc; ++l) {
      const double w = psf_(k + hr, l + hc);
      if (w == 0.0) continue;
      for (Index i = 0; i < img_rows_; ++i) {
        const Index si = reflect(i + k, img_rows_) * img_cols_;
        const Index di = i * img_cols_;
        for (Index j = 0; j < img_cols_; ++j) x[si + reflect(j + l, img_cols_)] += w * y[di + j];
      }
    }
  }
}

TestProblem gen_deblur2d(Index side, const Psf& psf, const std::string& image,
                         std::uint64_t image_seed) {
  if (side < 2 || (side & (side - 1)) != 0) {
    throw ConfigError("deblur2d: side must be a power of two");
  }
  TestProblem p;
  p.name = "deblur2d";
  p.a = std::make_shared<ReflexiveBlurOperator>(side, side, make_psf(psf));
  p.x_true = image_by_name(image, side, image_seed);
  p.image_rows = side;
  p.image_cols = side;
  finish_problem(p);
  return p;
}

// --- tomography -------------------------------------------------------------

int TomoGeometry::resolved_rays() const {
  return rays_per_angle > 0 ? rays_per_angle
                            : static_cast<int>(std::lround(std::sqrt(2.0) * n_grid));
}

double TomoGeometry::resolved_width() const {
  return detector_width > 0.0 ? detector_width : std::sqrt(2.0) * n_grid;
}

std::vector<double> TomoGeometry::offsets() const {
  const int p = resolved_rays();
  const double d = resolved_width();
  std::vector<double> s(static_cast<std::size_t>(p), 0.0);
  if (p == 1) return s;
  for (int i = 0; i < p; ++i) {
    s[static_cast<std::size_t>(i)] = -0.5 * d + d * static_cast<double>(i) / (p - 1);
  }
  return s;
}

void TomoGeometry::validate() const {
  if (n_grid < 1) throw ConfigError("tomography: n_grid must be >= 1");
  if (angles_deg.empty()) throw ConfigError("tomography: need at least one angle");
  if (rays_per_angle < 0) throw ConfigError("tomography: rays per angle must be >= 0");
  if (!(detector_width >= 0.0)) throw ConfigError("tomography: detector width must be >= 0");
  for (double a : angles_deg) {
    if (!std::isfinite(a)) throw ConfigError("tomography: non-finite angle");
  }
}

std::vector<double> angle_range(double start, double step, double stop) {
  if (!(step > 0.0) || !(stop >= start)) throw ConfigError("angle range: need step > 0, stop >= start");
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (long i = 0; i < count; ++i) out.push_back(start + step * static_cast<double>(i));
  return out;
}

CsrMatrix assemble_tomography(const TomoGeometry& g) {
  g.validate();
  const Index n = g.n_grid;
  const double half = 0.5 * static_cast<double>(n);
  const double edge_tol = 1e-10 * std::max(1.0, half);
  const std::vector<double> offsets = g.offsets();

  CsrMatrix csr;
  csr.rows = static_cast<Index>(g.angles_deg.size() * offsets.size());
  csr.cols = n * n;
  csr.row_ptr.reserve(static_cast<std::size_t>(csr.rows) + 1);

  std::vector<double> ts;
  std::vector<std::pair<std::int32_t, double>> entries;
  for (double angle : g.angles_deg) {
    const double theta = angle * std::numbers::pi / 180.0;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double dx = -s;
    const double dy = c;
    for (double off : offsets) {
      const double x0 = off * c;
      const double y0 = off * s;
      ts.clear();
      entries.clear();
      auto inside = [&](double t) {
        const double x = x0 + t * dx;
        const double y = y0 + t * dy;
        return std::abs(x) <= half + edge_tol && std::abs(y) <= half + edge_tol;
      };
      if (std::abs(dx) > 1e-14) {
        for (Index k = 0; k <= n; ++k) {
          const double t = (static_cast<double>(k) - half - x0) / dx;
          if (inside(t)) ts.push_back(t);
        }
      }
      if (std::abs(dy) > 1e-14) {
        for (Index k = 0; k <= n; ++k) {
          const double t = (static_cast<double>(k) - half - y0) / dy;
          if (inside(t)) ts.push_back(t);
        }
      }
      std::sort(ts.begin(), ts.end());
      for (std::size_t i = 1; i < ts.size(); ++i) {
        const double len = ts[i] - ts[i - 1];
        if (len <= edge_tol) continue;
        const double tm = 0.5 * (ts[i] + ts[i - 1]);
        // Axis-parallel rays keep their exact offset so grid-line ties follow
        // the right/below rule instead of rounding noise in cos(90 deg).
        const double xm = std::abs(dx) > 1e-14 ? x0 + tm * dx : x0;
        const double ym = std::abs(dy) > 1e-14 ? y0 + tm * dy : y0;
        const auto col = static_cast<Index>(std::floor(xm + half));
        const auto row = static_cast<Index>(std::floor(half - ym));
        if (col < 0 || col >= n || row < 0 || row >= n) continue;
        entries.emplace_back(static_cast<std::int32_t>(row * n + col), len);
      }
      std::sort(entries.begin(), entries.end());
      for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!csr.col_idx.empty() && static_cast<std::int64_t>(csr.values.size()) > csr.row_ptr.back() &&
            csr.col_idx.back() == entries[i].first) {
          csr.values.back() += entries[i].second;
          continue;
        }
        csr.col_idx.push_back(entries[i].first);
        csr.values.push_back(entries[i].second);
      }
      csr.row_ptr.push_back(static_cast<std::int64_t>(csr.values.size()));
    }
  }
  return csr;
}

TestProblem gen_tomo(const TomoGeometry& g, const std::string& phantom, std::uint64_t image_seed) {
  TestProblem p;
  p.name = "tomo";
  p.a = std::make_shared<SparseOperator>(assemble_tomography(g));
  p.x_true = image_by_name(phantom, g.n_grid, image_seed);
  p.image_rows = g.n_grid;
  p.image_cols = g.n_grid;
  finish_problem(p);
  return p;
}

// --- images -------------------------------------------------------------

Vector shepp_logan(Index side) {
  if (side < 16) throw ConfigError("shepp_logan: side must be >= 16");
  struct Ellipse {
    double value, a, b, x0, y0, phi_deg;
  };
  static constexpr Ellipse kEllipses[] = {
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
      {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
      {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
      {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
      {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
      {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
      {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
      {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
      {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
      {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
  };
  Vector img = Vector::Zero(side * side);
  const double n = static_cast<double>(side);
  for (Index i = 0; i < side; ++i) {
    const double y = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / n;
    for (Index j = 0; j < side; ++j) {
      const double x = (2.0 * static_cast<double>(j) + 1.0) / n - 1.0;
      double v = 0.0;
      for (const auto& e : kEllipses) {
        const double phi = e.phi_deg * std::numbers::pi / 180.0;
        const double u = (x - e.x0) * std::cos(phi) + (y - e.y0) * std::sin(phi);
        const double w = -(x - e.x0) * std::sin(phi) + (y - e.y0) * std::cos(phi);
        if (u * u / (e.a * e.a) + w * w / (e.b * e.b) <= 1.0) v += e.value;
      }
      img[i * side + j] = std::clamp(v, 0.0, 1.0);
    }
  }
  return img;
}

Vector blocks_image(Index side) {
  if (side < 16) throw ConfigError("blocks: side must be >= 16");
  Vector img = Vector::Zero(side * side);
  const Index u = side / 16;
  auto fill = [&](Index r0, Index r1, Index c0, Index c1, double v) {
    for (Index i = r0 * u; i < r1 * u; ++i) {
      for (Index j = c0 * u; j < c1 * u; ++j) img[i * side + j] = v;
    }
  };
  fill(2, 6, 2, 8, 1.0);
  fill(8, 14, 4, 12, 0.5);
  fill(10, 12, 6, 10, 0.8);
  fill(3, 5, 10, 14, 0.3);
  return img;
}

Vector stars_image(Index side, std::uint64_t seed) {
  if (side < 16) throw ConfigError("stars: side must be >= 16");
  Vector img = Vector::Zero(side * side);
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<Index> pos(0, side - 1);
  std::uniform_real_distribution<double> level(0.3, 1.0);
  const Index count = std::max<Index>(6, side / 4);
  for (Index k = 0; k < count; ++k) {
    const Index i = pos(gen);
    const Index j = pos(gen);
    img[i * side + j] = level(gen);
  }
  // A small satellite-like body with two panels.
  const Index c = side / 2;
  const Index h = std::max<Index>(1, side / 32);
  for (Index i = c - 2 * h; i < c + 2 * h; ++i) {
    for (Index j = c - h; j < c + h; ++j) img[i * side + j] = 1.0;
  }
  for (Index i = c - h / 2 - 1; i <= c + h / 2; ++i) {
    for (Index j = c - 6 * h; j < c + 6 * h; ++j) {
      if (std::abs(j - c) >= h) img[i * side + j] = 0.6;
    }
  }
  return img;
}

// --- noise and specs ----------------------------------------------------

TestProblem add_noise(TestProblem p, double level, std::uint64_t seed) {
  if (!(level >= 0.0) || !std::isfinite(level)) throw ConfigError("add_noise: level must be >= 0");
  const Index m = p.b_true.size();
  p.noise_level = level;
  p.e = Vector::Zero(m);
  if (level > 0.0 && m > 0) {
    std::mt19937_64 gen(seed);
    auto uniform = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    Vector g(m);
    for (Index i = 0; i < m; i += 2) {
      const double u1 = 1.0 - uniform();  // (0, 1]
      const double u2 = uniform();
      const double r = std::sqrt(-2.0 * std::log(u1));
      g[i] = r * std::cos(2.0 * std::numbers::pi * u2);
      if (i + 1 < m) g[i + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
    }
    const double gn = g.norm();
    if (gn > 0.0) p.e = (level * p.b_true.norm() / gn) * g;
  }
  p.b = p.b_true + p.e;
  return p;
}

void ProblemSpec::validate() const {
  const auto& gens = problem_generators();
  if (std::find(gens.begin(), gens.end(), generator) == gens.end()) {
    throw ConfigError("unknown problem generator '" + generator + "'");
  }
  if (n < 1) throw ConfigError("problem: n must be positive");
  if (!(noise_level >= 0.0)) throw ConfigError("problem: noise level must be >= 0");
  if (transform != "none" && transform != "haar") {
    throw ConfigError("problem: transform must be 'none' or 'haar'");
  }
  if (transform == "haar" && transform_levels < 1) {
    throw ConfigError("problem: transform levels must be >= 1");
  }
  if (generator == "heat" && n < 16) throw ConfigError("heat: n must be >= 16");
  if (generator == "blur1d") {
    if (band < 1 || n < band) throw ConfigError("blur1d: need 1 <= band <= n");
    if (!(variance >= 0.0)) throw ConfigError("blur1d: variance must be >= 0");
  }
  if (generator == "deblur2d" || generator == "tomo") {
    if (image != "shepp_logan" && image != "blocks" && image != "stars") {
      throw ConfigError("unknown image '" + image + "' (expected shepp_logan, blocks or stars)");
    }
    if (image == "shepp_logan" && n < 16) throw ConfigError("shepp_logan: side must be >= 16");
  }
  if (generator == "deblur2d") {
    if ((n & (n - 1)) != 0) throw ConfigError("deblur2d: side must be a power of two");
    if (!(psf.param >= 0.0) || !std::isfinite(psf.param)) throw ConfigError("psf: parameter must be >= 0");
  }
  if (generator == "tomo") {
    if (rays_per_angle < 0) throw ConfigError("tomography: rays per angle must be >= 0");
    if (!(detector_width >= 0.0)) throw ConfigError("tomography: detector width must be >= 0");
    for (double a : angles_deg) {
      if (!std::isfinite(a)) throw ConfigError("tomography: non-finite angle");
    }
  }
}

TestProblem generate(const ProblemSpec& spec) {
  spec.validate();
  TestProblem p;
  if (spec.generator == "heat") {
    p = gen_heat(spec.n);
  } else if (spec.generator == "blur1d") {
    p = gen_blur1d(spec.n, spec.variance, spec.band);
  } else if (spec.generator == "deblur2d") {
    p = gen_deblur2d(spec.n, spec.psf, spec.image, spec.image_seed);
  } else {
    TomoGeometry g;
    g.n_grid = static_cast<int>(spec.n);
    g.angles_deg = spec.angles_deg.empty() ? angle_range(0.0, 2.0, 179.0) : spec.angles_deg;
    g.rays_per_angle = spec.rays_per_angle;
    g.detector_width = spec.detector_width;
    p = gen_tomo(g, spec.image, spec.image_seed);
  }
  if (spec.transform == "haar") {
    if (p.image_rows > 0) {
      p.psi = std::make_shared<HaarTransform2D>(p.image_rows, p.image_cols, spec.transform_levels);
    } else {
      p.psi = std::make_shared<HaarTransform1D>(p.x_true.size(), spec.transform_levels);
    }
  }
  return add_noise(std::move(p), spec.noise_level, spec.seed);
}

const std::vector<std::string>& problem_generators() {
  static const std::vector<std::string> names{"heat", "blur1d", "deblur2d", "tomo"};
  return names;
}

}  // namespace flexkrylov
